"""
Servicio de anotaciones YOLO
Cajas de región de derivación (clase 0) y de nombre (clases 1..12)
"""
import logging
from dataclasses import dataclass

from ecgforge.errors import EmptyTrace, NameNotRendered, OutOfBounds, ParseError
from ecgforge.services.signals import LEAD_NAMES, LeadId

logger = logging.getLogger(__name__)

LEAD_REGION_CLASS = 0
CLASS_NAMES = ('lead',) + LEAD_NAMES
DEFAULT_PAD_PX = 2

_EPS = 1e-9


@dataclass(frozen=True)
class BBox:
    """Caja en píxeles, bordes máximos exclusivos"""

    x_min: int
    y_min: int
    x_max: int
    y_max: int

    def __post_init__(self):
        if not (self.x_min < self.x_max and self.y_min < self.y_max):
            raise OutOfBounds(f"Caja degenerada: {self.as_tuple()}")

    @property
    def width(self):
        return self.x_max - self.x_min

    @property
    def height(self):
        return self.y_max - self.y_min

    def as_tuple(self):
        return (self.x_min, self.y_min, self.x_max, self.y_max)

    def contains(self, x, y):
        return self.x_min <= x < self.x_max and self.y_min <= y < self.y_max

    def inside(self, width, height):
        return self.x_min >= 0 and self.y_min >= 0 and self.x_max <= width and self.y_max <= height


@dataclass(frozen=True)
class YoloAnnotation:
    c: int
    x: float
    y: float
    w: float
    h: float

    def __post_init__(self):
        if not 0 <= self.c < len(CLASS_NAMES):
            raise OutOfBounds(f"Clase fuera de rango: {self.c}")
        for value in (self.x, self.y, self.w, self.h):
            if not -_EPS <= value <= 1 + _EPS:
                raise OutOfBounds(f"Coordenada normalizada fuera de [0, 1]: {value}")
        if self.x - self.w / 2 < -_EPS or self.x + self.w / 2 > 1 + _EPS:
            raise OutOfBounds("La caja sale de la imagen en x")
        if self.y - self.h / 2 < -_EPS or self.y + self.h / 2 > 1 + _EPS:
            raise OutOfBounds("La caja sale de la imagen en y")

    def format(self):
        return f"{self.c:d} {self.x:.6f} {self.y:.6f} {self.w:.6f} {self.h:.6f}"


def pad_box(rect, pad_px, image_size):
    """Expande un rectángulo y lo recorta a la imagen"""
    width, height = image_size
    x_min, y_min, x_max, y_max = rect
    return BBox(
        max(x_min - pad_px, 0),
        max(y_min - pad_px, 0),
        min(x_max + pad_px, width),
        min(y_max + pad_px, height),
    )


def lead_region_bbox(entry, image_size, pad_px=DEFAULT_PAD_PX):
    """
    Caja ajustada a los píxeles de la onda, con margen

    Args:
        entry (TraceEntry): Instancia de derivación
        image_size (tuple): (ancho, alto) de la página
        pad_px (int): Margen en píxeles

    Returns:
        BBox: Caja recortada a la imagen
    """
    if entry.pixels.size == 0:
        raise EmptyTrace(f"La derivación {entry.lead.name} no pintó píxeles")
    xs, ys = entry.xs, entry.ys
    rect = (int(xs.min()), int(ys.min()), int(xs.max()) + 1, int(ys.max()) + 1)
    return pad_box(rect, pad_px, image_size)


def name_bbox(entry, image_size, pad_px=DEFAULT_PAD_PX):
    """Caja del nombre impreso de la derivación, con margen"""
    if entry.name_glyph_rect is None:
        raise NameNotRendered(f"El nombre de {entry.lead.name} no se dibujó")
    return pad_box(entry.name_glyph_rect, pad_px, image_size)


def name_class(lead):
    return int(LeadId(lead)) + 1


def to_yolo(bbox, c, image_width, image_height):
    """
    Normaliza una caja al formato YOLO (centro y tamaño relativos)

    Returns:
        YoloAnnotation: Anotación normalizada
    """
    if not bbox.inside(image_width, image_height):
        raise OutOfBounds(f"Caja {bbox.as_tuple()} fuera de la imagen {image_width}x{image_height}")
    return YoloAnnotation(
        c=int(c),
        x=(bbox.x_min + bbox.x_max) / (2 * image_width),
        y=(bbox.y_min + bbox.y_max) / (2 * image_height),
        w=bbox.width / image_width,
        h=bbox.height / image_height,
    )


def denormalize(annotation, image_width, image_height):
    """Convierte una anotación YOLO de vuelta a píxeles"""
    half_w = annotation.w * image_width / 2
    half_h = annotation.h * image_height / 2
    cx = annotation.x * image_width
    cy = annotation.y * image_height
    return BBox(
        int(round(cx - half_w)),
        int(round(cy - half_h)),
        int(round(cx + half_w)),
        int(round(cy + half_h)),
    )


def annotate_page(trace, image_size, pad_px=DEFAULT_PAD_PX):
    """
    Anotaciones YOLO de una página: primero regiones, luego nombres

    Args:
        trace (RenderTrace): Trace de render_page con nombres
        image_size (tuple): (ancho, alto)
        pad_px (int): Margen de las cajas

    Returns:
        list: YoloAnnotation en orden de render
    """
    width, height = image_size
    regions, names = [], []
    for entry in trace.entries:
        if entry.pixels.size == 0:
            logger.warning("Sin píxeles para %s, se omite su caja", entry.lead.name)
            continue
        regions.append(to_yolo(lead_region_bbox(entry, image_size, pad_px), LEAD_REGION_CLASS, width, height))
        if entry.name_glyph_rect is not None:
            names.append(to_yolo(name_bbox(entry, image_size, pad_px), name_class(entry.lead), width, height))
    return regions + names


def format_yolo_lines(annotations):
    return ''.join(annotation.format() + '\n' for annotation in annotations)


def parse_yolo_line(line):
    """Interpreta una línea 'c x y w h'"""
    parts = line.split()
    if len(parts) != 5:
        raise ParseError(f"Línea YOLO inválida: {line!r}")
    try:
        return YoloAnnotation(int(parts[0]), *(float(p) for p in parts[1:]))
    except ValueError:
        raise ParseError(f"Línea YOLO inválida: {line!r}")


def write_classes(path):
    with open(path, 'w', encoding='utf-8') as classes_file:
        classes_file.write(''.join(name + '\n' for name in CLASS_NAMES))
