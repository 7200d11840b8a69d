import pytest

from ecgforge.errors import EmptyTrace, NameNotRendered, OutOfBounds, ParseError
from ecgforge.services.annotate import (
    CLASS_NAMES,
    BBox,
    YoloAnnotation,
    annotate_page,
    denormalize,
    format_yolo_lines,
    lead_region_bbox,
    name_bbox,
    name_class,
    parse_yolo_line,
    to_yolo,
    write_classes,
)
from ecgforge.services.layout import StyleSpec, make_layout
from ecgforge.services.raster import render_page
from ecgforge.services.signals import LeadId, synth_record


def _lines(layout, style=None):
    page, trace = render_page(synth_record(21), layout, style)
    annotations = annotate_page(trace, (page.width, page.height))
    return page, trace, annotations, format_yolo_lines(annotations).splitlines()


def test_3x4_with_rhythm_has_26_lines():
    _, _, annotations, lines = _lines(make_layout('3x4', rhythm=True))
    assert len(lines) == 26
    assert sum(1 for a in annotations if a.c == 0) == 13
    assert sorted(a.c for a in annotations if a.c != 0) == sorted(list(range(1, 13)) + [2])


def test_12x1_has_24_lines():
    _, _, _, lines = _lines(make_layout('12x1'))
    assert len(lines) == 24


def test_without_names_only_regions():
    _, _, annotations, _ = _lines(make_layout('12x1'), StyleSpec(show_lead_names=False))
    assert len(annotations) == 12
    assert all(a.c == 0 for a in annotations)


def test_class_mapping():
    assert name_class(LeadId.V3) == 9
    assert name_class(LeadId.I) == 1
    assert CLASS_NAMES[0] == 'lead'
    assert CLASS_NAMES[9] == 'V3'
    assert len(CLASS_NAMES) == 13


def test_lines_parse_back_within_one_pixel():
    page, trace, annotations, lines = _lines(make_layout('3x4', rhythm=True))
    width, height = page.width, page.height
    sources = [lead_region_bbox(e, (width, height)) for e in trace.entries]
    sources += [name_bbox(e, (width, height)) for e in trace.entries if e.name_glyph_rect is not None]
    assert len(sources) == len(lines)
    for line, source in zip(lines, sources):
        box = denormalize(parse_yolo_line(line), width, height)
        for a, b in zip(box.as_tuple(), source.as_tuple()):
            assert abs(a - b) <= 1


def test_region_boxes_enclose_pixels():
    page, trace, _, _ = _lines(make_layout('6x2', rhythm=True))
    for entry in trace.entries:
        box = lead_region_bbox(entry, (page.width, page.height), pad_px=0)
        assert box.x_min == entry.xs.min() and box.x_max == entry.xs.max() + 1
        assert box.y_min == entry.ys.min() and box.y_max == entry.ys.max() + 1


def test_line_format():
    annotation = to_yolo(BBox(0, 0, 50, 20), 9, 100, 40)
    assert annotation.format() == '9 0.250000 0.250000 0.500000 0.500000'


def test_out_of_bounds():
    with pytest.raises(OutOfBounds):
        to_yolo(BBox(0, 0, 120, 20), 0, 100, 40)
    with pytest.raises(OutOfBounds):
        YoloAnnotation(13, 0.5, 0.5, 0.1, 0.1)
    with pytest.raises(OutOfBounds):
        BBox(5, 5, 5, 10)


def test_missing_name_and_empty_trace():
    page, trace = render_page(synth_record(1), make_layout('3x1'), StyleSpec(show_lead_names=False))
    with pytest.raises(NameNotRendered):
        name_bbox(trace.entries[0], (page.width, page.height))
    empty = trace.entries[0].__class__(lead=LeadId.I, cell=trace.entries[0].cell,
                                       pixels=trace.entries[0].pixels[:0])
    with pytest.raises(EmptyTrace):
        lead_region_bbox(empty, (page.width, page.height))


def test_parse_rejects_garbage():
    with pytest.raises(ParseError):
        parse_yolo_line('1 0.5 0.5')
    with pytest.raises(ParseError):
        parse_yolo_line('x 0.5 0.5 0.1 0.1')


def test_classes_file(tmp_path):
    path = tmp_path / 'classes.txt'
    write_classes(str(path))
    assert path.read_text().splitlines() == list(CLASS_NAMES)
