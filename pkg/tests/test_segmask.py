import numpy as np
import pytest

from ecgforge.errors import InvalidArgument, InvalidCrop, NotTwoTone
from ecgforge.services.layout import make_layout
from ecgforge.services.raster import RasterImage, render_page
from ecgforge.services.segmask import (
    binarize_mask,
    classify_overlap,
    crop_lead,
    make_lead_crops,
    make_overlap_sample,
    overlap_crop_rect,
)
from ecgforge.services.annotate import BBox
from ecgforge.services.signals import LeadId


def _foreground_in_page(crop):
    ys, xs = np.nonzero(crop.mask_bin.pixels == 1)
    return set(zip((xs + crop.crop_rect.x_min).tolist(), (ys + crop.crop_rect.y_min).tolist()))


def _expected_in_crop(entry, rect):
    return {(x, y) for x, y in entry.pixel_set() if rect.contains(x, y)}


def test_mask_alignment_on_60_crops(synth_records):
    layout = make_layout('12x1')
    checked = 0
    for record in synth_records:
        page, trace = render_page(record, layout)
        crops = make_lead_crops(record, layout, page=page, trace=trace)
        assert len(crops) == 12
        for crop in crops:
            entry = trace.find(crop.lead)
            assert _foreground_in_page(crop) == _expected_in_crop(entry, crop.crop_rect)
            assert set(np.unique(crop.mask_bin.pixels).tolist()) <= {0, 1}
            assert set(np.unique(crop.mask_gray.pixels).tolist()) <= {0, 255}
            assert crop.image.pixels.shape[:2] == crop.mask_gray.pixels.shape
            checked += 1
    assert checked == 60


def test_crop_geometry_is_local(synth_records):
    layout = make_layout('3x4', rhythm=True)
    record = synth_records[0]
    page, trace = render_page(record, layout)
    crops = make_lead_crops(record, layout, page=page, trace=trace)
    assert len(crops) == 13
    rhythm = [crop for crop in crops if crop.is_rhythm]
    assert len(rhythm) == 1 and rhythm[0].signal_window == (0.0, 10.0)
    for crop in crops:
        entry = trace.find(crop.lead, crop.is_rhythm)
        assert crop.baseline_y == entry.cell.baseline_y - crop.crop_rect.y_min
        assert crop.x0 == entry.cell.left - crop.crop_rect.x_min


def test_overlap_fixture_is_flagged(pulse_record):
    layout = make_layout('12x1', row_height_boxes=3)
    page, trace = render_page(pulse_record, layout)
    for lead in LeadId:
        crop = make_overlap_sample(pulse_record, layout, lead, page=page, trace=trace)
        assert crop.overlap
        entry = trace.find(lead)
        # Solo la derivación objetivo en la máscara, aunque la imagen muestre vecinas
        assert _foreground_in_page(crop) == _expected_in_crop(entry, crop.crop_rect)
        assert crop.crop_rect.x_min == entry.cell.left
        assert crop.crop_rect.x_max == entry.cell.right


def test_zero_record_never_overlaps(zero_record):
    layout = make_layout('12x1', row_height_boxes=3)
    page, trace = render_page(zero_record, layout)
    crops = [make_overlap_sample(zero_record, layout, lead, page=page, trace=trace) for lead in LeadId]
    assert len(crops) == 12
    assert not any(crop.overlap for crop in crops)


def test_overlap_requires_reduced_rows(zero_record):
    with pytest.raises(InvalidArgument):
        make_overlap_sample(zero_record, make_layout('12x1'), LeadId.I)
    with pytest.raises(InvalidArgument):
        make_overlap_sample(zero_record, make_layout('3x1', row_height_boxes=3), LeadId.V1)


def test_classify_overlap_by_instance(pulse_record):
    layout = make_layout('12x1', row_height_boxes=3)
    page, trace = render_page(pulse_record, layout)
    entry = trace.find(LeadId.V6)
    rect = overlap_crop_rect(entry, (page.width, page.height), 2)
    assert classify_overlap(trace, LeadId.V6, rect)
    assert classify_overlap(trace, (LeadId.V6, False), rect)


def test_binarize_rejects_gray_values():
    with pytest.raises(NotTwoTone):
        binarize_mask(RasterImage(np.array([[0, 128, 255]], dtype=np.uint8)))
    assert binarize_mask(RasterImage(np.array([[0, 255]], dtype=np.uint8))).pixels.tolist() == [[1, 0]]


def test_crop_outside_page():
    page = RasterImage.blank(10, 10)
    mask = RasterImage.blank(10, 10, channels=1)
    with pytest.raises(InvalidCrop):
        crop_lead(page, mask, BBox(20, 20, 30, 30))
    with pytest.raises(InvalidCrop):
        crop_lead(page, RasterImage.blank(5, 5, channels=1), BBox(0, 0, 3, 3))


def test_zero_record_never_overlaps_in_3x4(zero_record):
    layout = make_layout('3x4', row_height_boxes=3)
    page, trace = render_page(zero_record, layout)
    crops = [make_overlap_sample(zero_record, layout, lead, page=page, trace=trace) for lead in LeadId]
    assert len(crops) == 12
    assert not any(crop.overlap for crop in crops)


def test_neighbour_columns_do_not_flag_overlap(zero_record):
    layout = make_layout('3x4')
    crops = make_lead_crops(zero_record, layout)
    assert len(crops) == 12
    assert not any(crop.overlap for crop in crops)
