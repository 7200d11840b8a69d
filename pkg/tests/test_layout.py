import numpy as np
import pytest

from ecgforge.errors import InvalidArgument, InvalidLayout, OutOfWindow
from ecgforge.services.layout import (
    LAYOUT_NAMES,
    Calibration,
    StyleSpec,
    make_layout,
    page_geometry,
    px_to_signal,
    round_half_away,
    signal_to_px,
)
from ecgforge.services.signals import LeadId


@pytest.mark.parametrize('name', LAYOUT_NAMES)
def test_every_lead_once_and_windows_tile(name):
    layout = make_layout(name)
    leads = [cell.lead for cell in layout.cells]
    if name == '3x1':
        assert leads == [LeadId.I, LeadId.II, LeadId.III]
    else:
        assert sorted(leads) == list(LeadId)

    for row in range(layout.rows):
        cells = sorted((c for c in layout.cells if c.row == row), key=lambda c: c.col)
        assert cells[0].t0 == 0.0
        assert cells[-1].t1 == pytest.approx(10.0)
        for left, right in zip(cells, cells[1:]):
            assert left.t1 == right.t0


def test_layout_tables():
    assert [c.lead for c in make_layout('3x4').cells if c.row == 0] == [LeadId.I, LeadId.aVR, LeadId.V1, LeadId.V4]
    assert [c.lead for c in make_layout('6x2').cells if c.row == 3] == [LeadId.aVR, LeadId.V4]
    assert make_layout('3x4').window_s == 2.5
    assert make_layout('6x2').window_s == 5.0


def test_rhythm_strip_spans_page():
    layout = make_layout('3x4', rhythm=True)
    geometry = page_geometry(layout)
    rhythm = [cell for cell in geometry.cells if cell.is_rhythm]
    assert len(rhythm) == 1
    assert rhythm[0].lead is LeadId.II
    assert (rhythm[0].t0, rhythm[0].t1) == (0.0, 10.0)
    assert rhythm[0].row == 3


def test_invalid_layouts():
    with pytest.raises(InvalidLayout):
        make_layout('4x3')
    with pytest.raises(InvalidArgument):
        make_layout('12x1', rhythm=True)
    with pytest.raises(InvalidArgument):
        make_layout('3x4', row_height_boxes=0)


def test_default_page_size():
    geometry = page_geometry(make_layout('12x1'))
    assert (geometry.width, geometry.height) == (1040, 1480)
    assert geometry.band_height == 120
    assert geometry.row_baselines[0] == 80

    geometry = page_geometry(make_layout('3x4', rhythm=True))
    assert (geometry.width, geometry.height) == (1040, 520)


def test_cell_rectangles_tile_rows():
    geometry = page_geometry(make_layout('3x4'))
    row = sorted((c for c in geometry.cells if c.row == 1), key=lambda c: c.col)
    assert row[0].left == 20
    assert [c.right for c in row[:-1]] == [c.left for c in row[1:]]
    assert row[-1].right == 1020


def test_signal_to_px_round_trip():
    layout = make_layout('6x2')
    cell = page_geometry(layout).cells[3]
    calibration = layout.calibration
    x, y = signal_to_px(cell.t0 + 0.5, 1.0, cell, calibration)
    assert x == cell.left + 50
    assert y == cell.baseline_y - 40
    t, v = px_to_signal(x, y, cell, calibration)
    assert t == pytest.approx(cell.t0 + 0.5)
    assert v == pytest.approx(1.0)


def test_signal_to_px_window():
    layout = make_layout('3x4')
    cell = page_geometry(layout).cells[1]
    with pytest.raises(OutOfWindow):
        signal_to_px(cell.t1, 0.0, cell, layout.calibration)


def test_round_half_away():
    assert round_half_away(2.5) == 3
    assert round_half_away(-2.5) == -3
    assert list(round_half_away(np.array([0.5, 1.49, -0.5]))) == [1, 1, -1]


def test_calibration_validation():
    assert Calibration().scale_x == 100.0
    assert Calibration().scale_y == 40.0
    with pytest.raises(InvalidArgument):
        Calibration(px_per_large_box=0)


def test_style_rejects_invisible_waveform():
    with pytest.raises(InvalidArgument):
        StyleSpec(waveform_color=(255, 255, 255))


def test_zero_margin_page_height():
    geometry = page_geometry(make_layout('3x1', margins_boxes=(0, 0, 0, 0)))
    assert (geometry.width, geometry.height) == (1000, 360)


@pytest.mark.parametrize('name', LAYOUT_NAMES)
def test_doubling_px_per_box_doubles_page(name):
    small = page_geometry(make_layout(name, calibration=Calibration(px_per_large_box=20)))
    large = page_geometry(make_layout(name, calibration=Calibration(px_per_large_box=40)))
    assert (large.width, large.height) == (2 * small.width, 2 * small.height)


@pytest.mark.parametrize('name', ['3x4', '6x2'])
def test_cell_rectangles_are_disjoint(name):
    cells = page_geometry(make_layout(name, rhythm=True)).cells
    for i, a in enumerate(cells):
        for b in cells[i + 1:]:
            assert a.right <= b.left or b.right <= a.left or a.bottom <= b.top or b.bottom <= a.top


def test_v3_position_in_3x4():
    (cell,) = [c for c in make_layout('3x4').cells if c.lead is LeadId.V3]
    assert (cell.row, cell.col) == (2, 2)
    assert (cell.t0, cell.t1) == (5.0, 7.5)


def test_last_sample_stays_inside_cell():
    layout = make_layout('3x4')
    for cell in page_geometry(layout).cells:
        x, _ = signal_to_px(cell.t1 - 1 / 500, 0.0, cell, layout.calibration)
        assert cell.left <= x < cell.right
