"""
Servicio de máscaras de segmentación
Recortes de una derivación con máscara gris, máscara binaria y variante con solapamiento
"""
import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from ecgforge.errors import InvalidArgument, InvalidCrop, NotTwoTone
from ecgforge.services.annotate import BBox, DEFAULT_PAD_PX, lead_region_bbox
from ecgforge.services.layout import DEFAULT_ROW_HEIGHT_BOXES, StyleSpec
from ecgforge.services.raster import (
    MASK_BACKGROUND,
    MASK_FOREGROUND,
    RasterImage,
    paint_mask,
    render_page,
)
from ecgforge.services.signals import LeadId

logger = logging.getLogger(__name__)


@dataclass
class LeadCrop:
    """
    Recorte de una instancia de derivación

    `baseline_y` y `x0` están en coordenadas del recorte.
    """

    record_id: str
    lead: LeadId
    is_rhythm: bool
    crop_rect: BBox
    image: RasterImage
    mask_gray: RasterImage
    mask_bin: RasterImage
    signal_window: Tuple[float, float]
    overlap: bool
    baseline_y: int
    x0: int


def _clamp_rect(rect, width, height):
    x_min, y_min, x_max, y_max = rect
    x_min, y_min = max(x_min, 0), max(y_min, 0)
    x_max, y_max = min(x_max, width), min(y_max, height)
    if x_min >= x_max or y_min >= y_max:
        raise InvalidCrop(f"Recorte degenerado tras recortar a la página: {(x_min, y_min, x_max, y_max)}")
    return BBox(x_min, y_min, x_max, y_max)


def crop_lead(page, mask_page, bbox, pad_px=0):
    """
    Recorta la página y la máscara con el mismo rectángulo

    Args:
        page (RasterImage): Página de visualización
        mask_page (RasterImage): Página de máscara con la misma geometría
        bbox (BBox): Caja de la derivación
        pad_px (int): Margen adicional

    Returns:
        tuple: (BBox recortada, imagen, máscara gris)
    """
    if (page.width, page.height) != (mask_page.width, mask_page.height):
        raise InvalidCrop("La página y la máscara tienen tamaños distintos")
    rect = _clamp_rect(
        (bbox.x_min - pad_px, bbox.y_min - pad_px, bbox.x_max + pad_px, bbox.y_max + pad_px),
        page.width,
        page.height,
    )
    return rect, page.crop(rect.as_tuple()), mask_page.crop(rect.as_tuple())


def binarize_mask(mask_gray):
    """
    Convierte una máscara gris {0, 255} en binaria {1, 0}

    Returns:
        RasterImage: 1 en primer plano, 0 en fondo
    """
    pixels = mask_gray.pixels
    if not np.all((pixels == MASK_FOREGROUND) | (pixels == MASK_BACKGROUND)):
        raise NotTwoTone("La máscara contiene valores distintos de 0 y 255")
    return RasterImage((pixels == MASK_FOREGROUND).astype(np.uint8))


def _instance_key(target):
    if isinstance(target, tuple):
        lead, rhythm = target
        return (LeadId(lead), bool(rhythm))
    return (LeadId(target), False)


def classify_overlap(trace, target, crop_rect):
    """
    Indica si alguna otra instancia de derivación pinta dentro del recorte

    Args:
        trace (RenderTrace): Trace de la página completa
        target: LeadId o (LeadId, es_ritmo)
        crop_rect (BBox): Rectángulo del recorte

    Returns:
        bool: True si hay píxeles ajenos en el recorte
    """
    key = _instance_key(target)
    for entry in trace.entries:
        if entry.key == key or entry.pixels.size == 0:
            continue
        xs, ys = entry.xs, entry.ys
        inside = (
            (xs >= crop_rect.x_min) & (xs < crop_rect.x_max)
            & (ys >= crop_rect.y_min) & (ys < crop_rect.y_max)
        )
        if inside.any():
            return True
    return False


def _cell_columns(rect, cell):
    """Parte del recorte dentro de las columnas de la celda; las vecinas de la misma fila no cuentan"""
    return BBox(max(rect.x_min, cell.left), rect.y_min, min(rect.x_max, cell.right), rect.y_max)


def overlap_crop_rect(entry, image_size, pad_px=DEFAULT_PAD_PX):
    """Rectángulo de la celda completa con margen solo vertical"""
    width, height = image_size
    cell = entry.cell
    return _clamp_rect((cell.left, cell.top - pad_px, cell.right, cell.bottom + pad_px), width, height)


def _build_crop(record, entry, page, trace, rect, pad_px=0):
    mask_page, _ = paint_mask(page.width, page.height, trace, entry.lead, entry.is_rhythm)
    rect, image, mask_gray = crop_lead(page, mask_page, rect, pad_px)
    return LeadCrop(
        record_id=record.record_id,
        lead=entry.lead,
        is_rhythm=entry.is_rhythm,
        crop_rect=rect,
        image=image,
        mask_gray=mask_gray,
        mask_bin=binarize_mask(mask_gray),
        signal_window=(entry.cell.t0, entry.cell.t1),
        overlap=classify_overlap(trace, entry.key, _cell_columns(rect, entry.cell)),
        baseline_y=entry.cell.baseline_y - rect.y_min,
        x0=entry.cell.left - rect.x_min,
    )


def make_lead_crops(record, layout, style=None, bbox_pad_px=DEFAULT_PAD_PX, crop_pad_px=0, page=None, trace=None):
    """
    Recortes normales de todas las instancias de una página

    Returns:
        list: LeadCrop en orden de render
    """
    if page is None or trace is None:
        page, trace = render_page(record, layout, style or StyleSpec())
    crops = []
    for entry in trace.entries:
        if entry.pixels.size == 0:
            logger.warning("Se omite %s de %s: sin píxeles", entry.lead.name, record.record_id)
            continue
        bbox = lead_region_bbox(entry, (page.width, page.height), bbox_pad_px)
        crops.append(_build_crop(record, entry, page, trace, bbox, crop_pad_px))
    return crops


def make_overlap_sample(record, layout, target, style=None, pad_px=DEFAULT_PAD_PX, rhythm_target=False,
                        page=None, trace=None):
    """
    Recorte con solapamiento: imagen de la página completa, máscara limpia

    Args:
        record (SignalRecord): Registro
        layout (LayoutSpec): Layout con row_height reducido
        target (LeadId): Derivación objetivo
        style (StyleSpec): Estilo de la página
        pad_px (int): Margen vertical del recorte
        rhythm_target (bool): Usar la instancia de la tira de ritmo
        page, trace: Render previo de la misma página, si existe

    Returns:
        LeadCrop: Recorte con la bandera de solapamiento
    """
    if not layout.row_height_boxes < DEFAULT_ROW_HEIGHT_BOXES:
        raise InvalidArgument(
            f"El modo solapado requiere row_height_boxes < {DEFAULT_ROW_HEIGHT_BOXES} "
            f"(recibido {layout.row_height_boxes})"
        )
    if page is None or trace is None:
        page, trace = render_page(record, layout, style or StyleSpec())
    entry = trace.find(target, rhythm_target)
    if entry is None:
        raise InvalidArgument(f"La derivación {LeadId(target).name} no está en el layout {layout.name}")
    rect = overlap_crop_rect(entry, (page.width, page.height), pad_px)
    return _build_crop(record, entry, page, trace, rect)
