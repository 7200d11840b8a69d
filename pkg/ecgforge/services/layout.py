"""
Servicio de layouts
Rejillas de derivaciones (3x1, 3x4, 6x2, 12x1), calibración y geometría en píxeles
"""
import math
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from ecgforge.errors import InvalidArgument, InvalidLayout, OutOfWindow
from ecgforge.services.signals import LeadId

LAYOUT_NAMES = ('3x1', '3x4', '6x2', '12x1')
PAGE_DURATION_S = 10.0

DEFAULT_ROW_HEIGHT_BOXES = 6.0
OVERLAP_ROW_HEIGHT_BOXES = 3.0
DEFAULT_MARGINS_BOXES = (1.0, 1.0, 1.0, 1.0)

# Filas de cada layout, en orden de columnas
LAYOUT_TABLE = {
    '3x1': ((LeadId.I,), (LeadId.II,), (LeadId.III,)),
    '3x4': (
        (LeadId.I, LeadId.aVR, LeadId.V1, LeadId.V4),
        (LeadId.II, LeadId.aVL, LeadId.V2, LeadId.V5),
        (LeadId.III, LeadId.aVF, LeadId.V3, LeadId.V6),
    ),
    '6x2': (
        (LeadId.I, LeadId.V1),
        (LeadId.II, LeadId.V2),
        (LeadId.III, LeadId.V3),
        (LeadId.aVR, LeadId.V4),
        (LeadId.aVL, LeadId.V5),
        (LeadId.aVF, LeadId.V6),
    ),
    '12x1': tuple((lead,) for lead in LeadId),
}

RHYTHM_LAYOUTS = ('3x4', '6x2')


def round_half_away(value):
    """Redondeo a entero alejándose de cero en empates (escalar o array)"""
    rounded = np.sign(value) * np.floor(np.abs(value) + 0.5)
    if np.ndim(rounded) == 0:
        return int(rounded)
    return rounded.astype(np.int64)


@dataclass(frozen=True)
class Calibration:
    """Escala de papel: una caja grande = 0.2 s y 0.5 mV"""

    seconds_per_large_box: float = 0.2
    mv_per_large_box: float = 0.5
    px_per_large_box: int = 20

    def __post_init__(self):
        if not self.seconds_per_large_box > 0 or not self.mv_per_large_box > 0:
            raise InvalidArgument("La calibración debe ser positiva")
        if int(self.px_per_large_box) != self.px_per_large_box or self.px_per_large_box < 1:
            raise InvalidArgument(f"px_per_large_box debe ser un entero positivo: {self.px_per_large_box}")

    @property
    def scale_x(self):
        """Píxeles por segundo"""
        return self.px_per_large_box / self.seconds_per_large_box

    @property
    def scale_y(self):
        """Píxeles por mV"""
        return self.px_per_large_box / self.mv_per_large_box


@dataclass(frozen=True)
class Cell:
    lead: LeadId
    row: int
    col: int
    t0: float
    t1: float


@dataclass(frozen=True)
class LayoutSpec:
    name: str
    rows: int
    cols: int
    cells: Tuple[Cell, ...]
    rhythm_strip: Optional[LeadId] = None
    row_height_boxes: float = DEFAULT_ROW_HEIGHT_BOXES
    margins_boxes: Tuple[float, float, float, float] = DEFAULT_MARGINS_BOXES
    calibration: Calibration = field(default_factory=Calibration)

    @property
    def window_s(self):
        return PAGE_DURATION_S / self.cols

    @property
    def required_duration_s(self):
        return max(cell.t1 for cell in self.cells)


@dataclass(frozen=True)
class StyleSpec:
    """Estilo visual de la página"""

    show_grid: bool = True
    show_lead_names: bool = True
    show_separators: bool = True
    rhythm_name: bool = True
    font_scale: int = 2
    waveform_color: Tuple[int, int, int] = (0, 0, 0)
    grid_major_color: Tuple[int, int, int] = (240, 150, 150)
    grid_minor_color: Tuple[int, int, int] = (250, 215, 215)
    background_color: Tuple[int, int, int] = (255, 255, 255)
    text_color: Tuple[int, int, int] = (0, 0, 0)
    separator_color: Tuple[int, int, int] = (128, 128, 128)
    line_thickness_px: int = 1

    def __post_init__(self):
        if tuple(self.waveform_color) == tuple(self.background_color):
            raise InvalidArgument("El color de la onda no puede ser igual al fondo")
        if self.font_scale < 1 or self.line_thickness_px < 1:
            raise InvalidArgument("font_scale y line_thickness_px deben ser positivos")


@dataclass(frozen=True)
class CellGeometry:
    """Rectángulo en píxeles [left, right) x [top, bottom) de una instancia de derivación"""

    lead: LeadId
    row: int
    col: int
    t0: float
    t1: float
    left: int
    top: int
    right: int
    bottom: int
    baseline_y: int
    is_rhythm: bool = False

    @property
    def rect(self):
        return (self.left, self.top, self.right, self.bottom)


@dataclass(frozen=True)
class PageGeometry:
    width: int
    height: int
    band_height: int
    cells: Tuple[CellGeometry, ...]
    row_baselines: Tuple[int, ...]


def make_layout(name, calibration=None, row_height_boxes=DEFAULT_ROW_HEIGHT_BOXES, rhythm=False,
                margins_boxes=DEFAULT_MARGINS_BOXES, rhythm_lead=LeadId.II):
    """
    Construye uno de los cuatro layouts soportados

    Args:
        name (str): '3x1', '3x4', '6x2' o '12x1'
        calibration (Calibration): Calibración; por defecto 0.2 s / 0.5 mV / 20 px
        row_height_boxes (float): Cajas grandes por fila de derivación
        rhythm (bool): Añadir tira de ritmo a todo lo ancho (solo 3x4 y 6x2)
        margins_boxes (tuple): Márgenes (izq, der, arriba, abajo) en cajas grandes
        rhythm_lead (LeadId): Derivación de la tira de ritmo

    Returns:
        LayoutSpec: Layout inmutable
    """
    table = LAYOUT_TABLE.get(name)
    if table is None:
        raise InvalidLayout(f"Layout desconocido: {name!r} (válidos: {', '.join(LAYOUT_NAMES)})")
    if rhythm and name not in RHYTHM_LAYOUTS:
        raise InvalidArgument(f"El layout {name} no admite tira de ritmo")
    if not row_height_boxes > 0:
        raise InvalidArgument(f"row_height_boxes debe ser positivo: {row_height_boxes}")
    if len(margins_boxes) != 4 or any(m < 0 for m in margins_boxes):
        raise InvalidArgument(f"Márgenes inválidos: {margins_boxes}")

    rows, cols = len(table), len(table[0])
    window = PAGE_DURATION_S / cols
    cells = tuple(
        Cell(lead=lead, row=row, col=col, t0=col * window, t1=(col + 1) * window)
        for row, leads in enumerate(table)
        for col, lead in enumerate(leads)
    )
    return LayoutSpec(
        name=name,
        rows=rows,
        cols=cols,
        cells=cells,
        rhythm_strip=LeadId(rhythm_lead) if rhythm else None,
        row_height_boxes=float(row_height_boxes),
        margins_boxes=tuple(float(m) for m in margins_boxes),
        calibration=calibration or Calibration(),
    )


def page_geometry(layout):
    """
    Calcula tamaño de página, rectángulos de celda y líneas base

    Args:
        layout (LayoutSpec): Layout

    Returns:
        PageGeometry: Geometría determinista en píxeles
    """
    calibration = layout.calibration
    box = calibration.px_per_large_box
    margin_left, margin_right, margin_top, margin_bottom = (m * box for m in layout.margins_boxes)
    cell_width = layout.window_s * calibration.scale_x
    band = round_half_away(layout.row_height_boxes * box)
    top0 = round_half_away(margin_top)
    n_bands = layout.rows + (1 if layout.rhythm_strip is not None else 0)

    width = int(math.ceil(margin_left + layout.cols * cell_width + margin_right - 1e-9))
    height = int(math.ceil(top0 + n_bands * band + margin_bottom - 1e-9))
    baselines = tuple(top0 + r * band + round_half_away(band / 2) for r in range(n_bands))

    cells = []
    for cell in layout.cells:
        top = top0 + cell.row * band
        cells.append(CellGeometry(
            lead=cell.lead, row=cell.row, col=cell.col, t0=cell.t0, t1=cell.t1,
            left=round_half_away(margin_left + cell.col * cell_width),
            right=round_half_away(margin_left + (cell.col + 1) * cell_width),
            top=top, bottom=top + band, baseline_y=baselines[cell.row],
        ))
    if layout.rhythm_strip is not None:
        top = top0 + layout.rows * band
        cells.append(CellGeometry(
            lead=layout.rhythm_strip, row=layout.rows, col=0, t0=0.0, t1=PAGE_DURATION_S,
            left=round_half_away(margin_left),
            right=round_half_away(margin_left + layout.cols * cell_width),
            top=top, bottom=top + band, baseline_y=baselines[layout.rows], is_rhythm=True,
        ))
    return PageGeometry(width=width, height=height, band_height=band, cells=tuple(cells), row_baselines=baselines)


def samples_to_px(times, values, cell, calibration):
    """
    Versión vectorizada de signal_to_px, sin comprobar la ventana

    x queda en [left, right): la última muestra de la ventana no invade la celda vecina.
    """
    x = round_half_away(cell.left + (np.asarray(times) - cell.t0) * calibration.scale_x)
    x = np.minimum(x, cell.right - 1)
    y = round_half_away(cell.baseline_y - np.asarray(values) * calibration.scale_y)
    return x, y


def signal_to_px(t, v, cell, calibration):
    """
    Convierte (t s, v mV) en coordenadas de píxel de la celda

    La coordenada y no se recorta a la banda de la fila.

    Returns:
        tuple: (x_px, y_px) enteros
    """
    if not cell.t0 <= t < cell.t1:
        raise OutOfWindow(f"t={t} fuera de la ventana [{cell.t0}, {cell.t1})")
    x, y = samples_to_px(t, v, cell, calibration)
    return int(x), int(y)


def px_to_signal(x, y, cell, calibration):
    """Inversa de signal_to_px (sin cuantizar)"""
    t = cell.t0 + (x - cell.left) / calibration.scale_x
    v = (cell.baseline_y - y) / calibration.scale_y
    return t, v


__all__ = [
    'LAYOUT_NAMES',
    'PAGE_DURATION_S',
    'DEFAULT_ROW_HEIGHT_BOXES',
    'OVERLAP_ROW_HEIGHT_BOXES',
    'Calibration',
    'Cell',
    'LayoutSpec',
    'StyleSpec',
    'CellGeometry',
    'PageGeometry',
    'make_layout',
    'page_geometry',
    'samples_to_px',
    'signal_to_px',
    'px_to_signal',
    'round_half_away',
]
