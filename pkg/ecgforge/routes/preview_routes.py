"""
Rutas de vista previa: página sintética renderizada al vuelo y sus etiquetas
"""
from functools import lru_cache

from flask import Blueprint, Response, abort, current_app, request

from ecgforge import limiter
from ecgforge.services.annotate import annotate_page, format_yolo_lines
from ecgforge.services.encoders import encode_png
from ecgforge.services.layout import LAYOUT_NAMES, RHYTHM_LAYOUTS, Calibration, StyleSpec, make_layout
from ecgforge.services.raster import render_page
from ecgforge.services.signals import synth_record

# Crear blueprint
preview_bp = Blueprint('preview', __name__)

_TRUE = ('1', 'true', 'yes', 'on')
_FALSE = ('0', 'false', 'no', 'off')


def _preview_limit():
    return current_app.config['PREVIEW_RATE_LIMIT']


def _flag(name, default):
    value = request.args.get(name)
    if value is None:
        return default
    if value.lower() in _TRUE:
        return True
    if value.lower() in _FALSE:
        return False
    abort(400, description=f"Parámetro booleano inválido: {name}={value!r}")


def _number(name, default, cast, minimum, maximum):
    value = request.args.get(name)
    if value is None:
        return default
    try:
        number = cast(value)
    except ValueError:
        abort(400, description=f"Parámetro numérico inválido: {name}={value!r}")
    if not minimum <= number <= maximum:
        abort(400, description=f"{name} fuera de rango [{minimum}, {maximum}]: {number}")
    return number


def _preview_params():
    """Lee y valida los parámetros de la consulta"""
    layout = request.args.get('layout', '3x4')
    if layout not in LAYOUT_NAMES:
        abort(400, description=f"Layout desconocido: {layout!r}")
    rhythm = _flag('rhythm', layout in RHYTHM_LAYOUTS)
    if rhythm and layout not in RHYTHM_LAYOUTS:
        abort(400, description=f"El layout {layout} no admite tira de ritmo")
    return (
        layout,
        _number('seed', 0, int, 0, 2 ** 32 - 1),
        rhythm,
        _flag('grid', True),
        _flag('names', True),
        _number('px_per_box', 20, int, 1, current_app.config['PREVIEW_MAX_PX_PER_BOX']),
        _number('row_height', 6.0, float, 0.5, current_app.config['PREVIEW_MAX_ROW_HEIGHT']),
    )


@lru_cache(maxsize=32)
def _render(layout_name, seed, rhythm, grid, names, px_per_box, row_height):
    layout = make_layout(
        layout_name,
        calibration=Calibration(px_per_large_box=px_per_box),
        row_height_boxes=row_height,
        rhythm=rhythm,
    )
    page, trace = render_page(synth_record(seed), layout, StyleSpec(show_grid=grid, show_lead_names=names))
    labels = format_yolo_lines(annotate_page(trace, (page.width, page.height)))
    return encode_png(page), labels


@preview_bp.route('/page.png')
@limiter.limit(_preview_limit)
def page_png():
    """
    PNG de una página sintética
    """
    png, _ = _render(*_preview_params())
    return Response(png, mimetype='image/png')


@preview_bp.route('/labels')
@limiter.limit(_preview_limit)
def labels():
    """
    Etiquetas YOLO de la misma página que /preview/page.png
    """
    _, text = _render(*_preview_params())
    return Response(text, mimetype='text/plain')
