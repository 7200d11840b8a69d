"""
Rasterizador determinista de páginas ECG
Rejilla calibrada, polilíneas Bresenham, separadores y nombres con fuente de mapa de bits
"""
import logging
from dataclasses import dataclass, field, replace
from typing import Optional, Tuple

import numpy as np

from ecgforge.errors import RecordTooShort, UnsupportedGlyph
from ecgforge.services.font import GLYPH_HEIGHT, GLYPH_WIDTH, glyph
from ecgforge.services.layout import StyleSpec, page_geometry, round_half_away, samples_to_px
from ecgforge.services.signals import LeadId, window_indices

logger = logging.getLogger(__name__)

NAME_OFFSET_PX = (4, 4)
MASK_BACKGROUND = 255
MASK_FOREGROUND = 0


@dataclass
class RasterImage:
    """
    Búfer de píxeles con origen arriba a la izquierda

    `pixels` tiene forma (alto, ancho) en escala de grises o (alto, ancho, 3) en RGB.
    """

    pixels: np.ndarray

    @classmethod
    def blank(cls, width, height, channels=3, fill=255):
        shape = (height, width) if channels == 1 else (height, width, channels)
        pixels = np.empty(shape, dtype=np.uint8)
        pixels[...] = fill
        return cls(pixels)

    @property
    def width(self):
        return self.pixels.shape[1]

    @property
    def height(self):
        return self.pixels.shape[0]

    @property
    def channels(self):
        return 1 if self.pixels.ndim == 2 else self.pixels.shape[2]

    def tobytes(self):
        return np.ascontiguousarray(self.pixels).tobytes()

    def to_grayscale(self):
        if self.channels == 1:
            return RasterImage(self.pixels.copy())
        # ITU-R 601, redondeo entero
        r, g, b = (self.pixels[..., i].astype(np.uint32) for i in range(3))
        gray = (r * 299 + g * 587 + b * 114 + 500) // 1000
        return RasterImage(gray.astype(np.uint8))

    def crop(self, rect):
        x_min, y_min, x_max, y_max = rect
        return RasterImage(self.pixels[y_min:y_max, x_min:x_max].copy())


@dataclass(frozen=True)
class TraceEntry:
    """Píxeles pintados por una instancia de derivación (celda o tira de ritmo)"""

    lead: LeadId
    cell: object
    pixels: np.ndarray = field(repr=False)
    name_glyph_rect: Optional[Tuple[int, int, int, int]] = None

    @property
    def is_rhythm(self):
        return self.cell.is_rhythm

    @property
    def key(self):
        return (self.lead, self.is_rhythm)

    @property
    def xs(self):
        return self.pixels[:, 0]

    @property
    def ys(self):
        return self.pixels[:, 1]

    def pixel_set(self):
        return set(map(tuple, self.pixels.tolist()))


@dataclass(frozen=True)
class RenderTrace:
    width: int
    height: int
    entries: Tuple[TraceEntry, ...]

    def find(self, lead, rhythm=False):
        for entry in self.entries:
            if entry.key == (LeadId(lead), rhythm):
                return entry
        return None


def bresenham_line(x0, y0, x1, y1):
    """
    Línea de Bresenham entera entre dos puntos, extremos incluidos

    Returns:
        list: Puntos (x, y) en orden
    """
    dx, dy = abs(x1 - x0), abs(y1 - y0)
    sx = 1 if x1 >= x0 else -1
    sy = 1 if y1 >= y0 else -1
    steep = dy > dx
    major, minor = (dy, dx) if steep else (dx, dy)

    points = []
    offset = 0
    error = major
    for i in range(major + 1):
        if steep:
            points.append((x0 + sx * offset, y0 + sy * i))
        else:
            points.append((x0 + sx * i, y0 + sy * offset))
        error += 2 * minor
        if error >= 2 * major:
            error -= 2 * major
            offset += 1
    return points


def bresenham_polyline(xs, ys):
    """
    Rasteriza una polilínea con Bresenham en forma vectorizada

    Cada segmento produce los mismos píxeles que bresenham_line.

    Returns:
        tuple: (xs, ys) con repeticiones en los vértices compartidos
    """
    xs = np.asarray(xs, dtype=np.int64)
    ys = np.asarray(ys, dtype=np.int64)
    if xs.size < 2:
        return xs.copy(), ys.copy()

    x0, y0 = xs[:-1], ys[:-1]
    dx, dy = xs[1:] - x0, ys[1:] - y0
    adx, ady = np.abs(dx), np.abs(dy)
    n = np.maximum(adx, ady)
    counts = n + 1

    seg = np.repeat(np.arange(n.size), counts)
    starts = np.cumsum(counts) - counts
    i = np.arange(counts.sum()) - starts[seg]
    denom = np.maximum(n, 1)[seg]

    sx = np.where(dx >= 0, 1, -1)[seg]
    sy = np.where(dy >= 0, 1, -1)[seg]
    px = x0[seg] + sx * ((2 * i * adx[seg] + denom) // (2 * denom))
    py = y0[seg] + sy * ((2 * i * ady[seg] + denom) // (2 * denom))
    return px, py


def _brush(xs, ys, thickness, width, height, columns=None):
    """Engrosa con un pincel cuadrado, recorta a la página (y a las columnas [x0, x1) si se dan) y elimina duplicados"""
    offsets = np.arange(thickness) - (thickness - 1) // 2
    if thickness > 1:
        ox, oy = np.meshgrid(offsets, offsets)
        xs = (xs[:, None] + ox.ravel()[None, :]).ravel()
        ys = (ys[:, None] + oy.ravel()[None, :]).ravel()
    x0, x1 = columns if columns is not None else (0, width)
    inside = (xs >= max(x0, 0)) & (xs < min(x1, width)) & (ys >= 0) & (ys < height)
    linear = np.unique(ys[inside] * width + xs[inside])
    return np.stack([linear % width, linear // width], axis=1)


def render_traces(record, layout, thickness=1):
    """
    Calcula los píxeles de cada instancia de derivación sin pintar

    Args:
        record (SignalRecord): Registro fuente
        layout (LayoutSpec): Layout
        thickness (int): Grosor del trazo en píxeles

    Returns:
        tuple: (PageGeometry, RenderTrace)
    """
    geometry = page_geometry(layout)
    calibration = layout.calibration
    _, needed = window_indices(record.fs, 0.0, layout.required_duration_s)
    if needed > record.n_samples:
        raise RecordTooShort(
            f"{record.record_id}: {record.duration_s:.3f} s, el layout {layout.name} "
            f"requiere {layout.required_duration_s:.3f} s"
        )

    entries = []
    for cell in geometry.cells:
        start, stop = window_indices(record.fs, cell.t0, cell.t1)
        times = np.arange(start, stop) / record.fs
        x, y = samples_to_px(times, record.lead(cell.lead)[start:stop], cell, calibration)
        px, py = bresenham_polyline(x, y)
        pixels = _brush(px, py, thickness, geometry.width, geometry.height, (cell.left, cell.right))
        if pixels.size == 0:
            logger.warning("La derivación %s de %s quedó fuera de la página", cell.lead.name, record.record_id)
        entries.append(TraceEntry(lead=cell.lead, cell=cell, pixels=pixels))
    return geometry, RenderTrace(width=geometry.width, height=geometry.height, entries=tuple(entries))


def draw_text(image, text, anchor, font_scale=1, color=(0, 0, 0)):
    """
    Dibuja texto con la fuente 5x7 escalada

    Args:
        image (RasterImage): Imagen destino (se modifica)
        text (str): Texto con glifos de {I, V, a, R, L, F, 1..6}
        anchor (tuple): Esquina superior izquierda (x, y)
        font_scale (int): Factor de escala
        color: Color RGB o valor gris

    Returns:
        tuple: Rectángulo ajustado (x_min, y_min, x_max, y_max) de los píxeles pintados, o None
    """
    bitmaps = []
    for char in text:
        bitmap = glyph(char, font_scale)
        if bitmap is None:
            raise UnsupportedGlyph(f"Carácter sin glifo: {char!r}")
        bitmaps.append(bitmap)

    if image.channels == 1 and not np.isscalar(color):
        color = RasterImage(np.array([[color]], dtype=np.uint8)).to_grayscale().pixels[0, 0]

    ax, ay = anchor
    advance = (GLYPH_WIDTH + 1) * font_scale
    painted_x, painted_y = [], []
    for index, bitmap in enumerate(bitmaps):
        gy, gx = np.nonzero(bitmap)
        gx = gx + ax + index * advance
        gy = gy + ay
        inside = (gx >= 0) & (gx < image.width) & (gy >= 0) & (gy < image.height)
        gx, gy = gx[inside], gy[inside]
        image.pixels[gy, gx] = color
        painted_x.append(gx)
        painted_y.append(gy)

    xs = np.concatenate(painted_x) if painted_x else np.empty(0, dtype=np.int64)
    ys = np.concatenate(painted_y) if painted_y else np.empty(0, dtype=np.int64)
    if xs.size == 0:
        return None
    return (int(xs.min()), int(ys.min()), int(xs.max()) + 1, int(ys.max()) + 1)


def text_size(text, font_scale=1):
    """Tamaño de la celda de texto (sin ajustar a los píxeles pintados)"""
    n = len(text)
    return (n * GLYPH_WIDTH + max(n - 1, 0)) * font_scale, GLYPH_HEIGHT * font_scale


def _grid_positions(origin, step, limit):
    first = -int(np.floor(origin / step))
    last = int(np.ceil((limit - origin) / step))
    k = np.arange(first, last + 1)
    positions = round_half_away(origin + k * step)
    keep = (positions >= 0) & (positions < limit)
    return k[keep], positions[keep]


def _paint_grid(image, layout, style):
    box = layout.calibration.px_per_large_box
    # La rejilla arranca en la esquina superior izquierda del área de trazado
    origin_x = layout.margins_boxes[0] * box
    origin_y = round_half_away(layout.margins_boxes[2] * box)
    minor = box / 5.0

    kx, xs = _grid_positions(origin_x, minor, image.width)
    ky, ys = _grid_positions(origin_y, minor, image.height)
    image.pixels[:, xs] = style.grid_minor_color
    image.pixels[ys, :] = style.grid_minor_color
    image.pixels[:, xs[kx % 5 == 0]] = style.grid_major_color
    image.pixels[ys[ky % 5 == 0], :] = style.grid_major_color


def _paint_separators(image, geometry, style):
    for cell in geometry.cells:
        if cell.is_rhythm or cell.col == 0:
            continue
        if 0 <= cell.left < image.width:
            image.pixels[max(cell.top, 0):min(cell.bottom, image.height), cell.left] = style.separator_color


def render_page(record, layout, style=None):
    """
    Renderiza la página de visualización

    Orden de pintado: fondo, rejilla menor, rejilla mayor, separadores,
    nombres y ondas.

    Args:
        record (SignalRecord): Registro fuente
        layout (LayoutSpec): Layout
        style (StyleSpec): Estilo; por defecto StyleSpec()

    Returns:
        tuple: (RasterImage RGB, RenderTrace)
    """
    style = style or StyleSpec()
    geometry, trace = render_traces(record, layout, style.line_thickness_px)
    image = RasterImage.blank(geometry.width, geometry.height, channels=3)
    image.pixels[...] = style.background_color

    if style.show_grid:
        _paint_grid(image, layout, style)
    if style.show_separators:
        _paint_separators(image, geometry, style)

    entries = list(trace.entries)
    if style.show_lead_names:
        for index, entry in enumerate(entries):
            if entry.is_rhythm and not style.rhythm_name:
                continue
            anchor = (entry.cell.left + NAME_OFFSET_PX[0], entry.cell.top + NAME_OFFSET_PX[1])
            rect = draw_text(image, entry.lead.name, anchor, style.font_scale, style.text_color)
            entries[index] = replace(entry, name_glyph_rect=rect)

    for entry in entries:
        if entry.pixels.size:
            image.pixels[entry.ys, entry.xs] = style.waveform_color

    return image, replace(trace, entries=tuple(entries))


def paint_mask(width, height, trace, target=None, rhythm_target=False):
    """
    Pinta una máscara en escala de grises (fondo 255, onda 0) a partir de un trace

    Args:
        width (int): Ancho de página
        height (int): Alto de página
        trace (RenderTrace): Trace de la página
        target (LeadId): Solo pinta esta derivación; None pinta todas
        rhythm_target (bool): Con target, elige la instancia de la tira de ritmo

    Returns:
        tuple: (RasterImage gris, RenderTrace con las instancias pintadas)
    """
    mask = RasterImage.blank(width, height, channels=1, fill=MASK_BACKGROUND)
    if target is None:
        painted = trace.entries
    else:
        key = (LeadId(target), rhythm_target)
        painted = tuple(entry for entry in trace.entries if entry.key == key)
    for entry in painted:
        if entry.pixels.size:
            mask.pixels[entry.ys, entry.xs] = MASK_FOREGROUND
    return mask, RenderTrace(width=width, height=height, entries=tuple(painted))


def render_mask_page(record, layout, target=None, style=None, rhythm_target=False):
    """
    Renderiza la página de máscara: gris, sin rejilla, nombres ni separadores

    La geometría es idéntica a render_page para el mismo layout.

    Returns:
        tuple: (RasterImage gris, RenderTrace)
    """
    thickness = (style or StyleSpec()).line_thickness_px
    geometry, trace = render_traces(record, layout, thickness)
    return paint_mask(geometry.width, geometry.height, trace, target, rhythm_target)


__all__ = [
    'RasterImage',
    'TraceEntry',
    'RenderTrace',
    'bresenham_line',
    'bresenham_polyline',
    'render_traces',
    'render_page',
    'render_mask_page',
    'paint_mask',
    'draw_text',
    'text_size',
]
