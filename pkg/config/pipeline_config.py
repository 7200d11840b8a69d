"""
Configuración del pipeline de generación de datasets
Archivo plano `clave = valor` con comentarios `#`; los flags de la CLI
tienen prioridad sobre el archivo y el archivo sobre los valores por defecto
"""
import io
import logging
import os
from dataclasses import dataclass, field, fields, replace
from typing import Optional, Tuple

from dotenv import dotenv_values

from config.settings import env_out_dir, env_threads_cap
from ecgforge.errors import ConfigTypeError, UnknownConfigKey
from ecgforge.services.layout import DEFAULT_ROW_HEIGHT_BOXES, LAYOUT_NAMES

logger = logging.getLogger(__name__)

TASKS = ('digitization', 'detection', 'segmentation', 'overlap', 'verify')
INPUT_FORMATS = ('synth', 'wfdb', 'csv', 'json')
OVERLAP_LAYOUTS = ('12x1',)

_TRUE = {'true', 'yes', '1', 'on'}
_FALSE = {'false', 'no', '0', 'off'}


def _default_threads():
    return env_threads_cap() or os.cpu_count() or 1


@dataclass(frozen=True)
class PipelineConfig:
    task: str = 'digitization'
    input_dir: Optional[str] = None
    input_format: str = 'synth'
    out_dir: str = field(default_factory=env_out_dir)
    count: int = 8
    seed: int = 0
    layouts: Optional[Tuple[str, ...]] = None
    rhythm: bool = True
    rhythm_name: bool = True
    row_height_boxes: float = 6.0
    overlap_row_height_boxes: float = 3.0
    seconds_per_large_box: float = 0.2
    mv_per_large_box: float = 0.5
    px_per_large_box: int = 20
    margin_left: float = 1.0
    margin_right: float = 1.0
    margin_top: float = 1.0
    margin_bottom: float = 1.0
    show_grid: bool = True
    show_names: bool = True
    show_separators: bool = True
    font_scale: int = 2
    line_thickness_px: int = 1
    waveform_color: Tuple[int, int, int] = (0, 0, 0)
    grid_major_color: Tuple[int, int, int] = (240, 150, 150)
    grid_minor_color: Tuple[int, int, int] = (250, 215, 215)
    background_color: Tuple[int, int, int] = (255, 255, 255)
    text_color: Tuple[int, int, int] = (0, 0, 0)
    separator_color: Tuple[int, int, int] = (128, 128, 128)
    bbox_pad_px: int = 2
    crop_pad_px: int = 0
    train_split: float = 0.8
    val_split: float = 0.1
    test_split: float = 0.1
    jpeg: bool = False
    target_fs: Optional[float] = None
    duration_s: float = 10.0
    synth_fs: float = 500.0
    threads: int = field(default_factory=_default_threads)

    @property
    def task_layouts(self):
        """Layouts a recorrer; el solapamiento usa 12x1 salvo que se indique otro"""
        if self.layouts:
            return self.layouts
        return OVERLAP_LAYOUTS if self.task == 'overlap' else LAYOUT_NAMES

    @property
    def splits(self):
        return (self.train_split, self.val_split, self.test_split)

    @property
    def margins_boxes(self):
        return (self.margin_left, self.margin_right, self.margin_top, self.margin_bottom)


# Intérpretes de texto

def _parse_bool(key, text):
    lowered = text.strip().lower()
    if lowered in _TRUE:
        return True
    if lowered in _FALSE:
        return False
    raise ConfigTypeError(f"{key}: se esperaba un booleano, recibido {text!r}")


def _parse_int(key, text):
    try:
        return int(text)
    except ValueError:
        raise ConfigTypeError(f"{key}: se esperaba un entero, recibido {text!r}")


def _parse_float(key, text):
    try:
        return float(text)
    except ValueError:
        raise ConfigTypeError(f"{key}: se esperaba un número, recibido {text!r}")


def _parse_optional_float(key, text):
    if text.strip().lower() in ('', 'none'):
        return None
    return _parse_float(key, text)


def _parse_str(key, text):
    return text.strip()


def _parse_optional_str(key, text):
    return text.strip() or None


def _parse_list(key, text):
    items = tuple(item.strip() for item in text.split(',') if item.strip())
    if not items:
        raise ConfigTypeError(f"{key}: lista vacía")
    return items


def _parse_color(key, text):
    text = text.strip()
    try:
        if text.startswith('#') and len(text) == 7:
            color = tuple(int(text[i:i + 2], 16) for i in (1, 3, 5))
        else:
            color = tuple(int(part) for part in text.split(','))
    except ValueError:
        raise ConfigTypeError(f"{key}: color inválido {text!r}")
    if len(color) != 3 or any(not 0 <= channel <= 255 for channel in color):
        raise ConfigTypeError(f"{key}: color inválido {text!r}")
    return color


_PARSERS = {
    'task': _parse_str,
    'input_dir': _parse_optional_str,
    'input_format': _parse_str,
    'out_dir': _parse_str,
    'count': _parse_int,
    'seed': _parse_int,
    'layouts': _parse_list,
    'rhythm': _parse_bool,
    'rhythm_name': _parse_bool,
    'row_height_boxes': _parse_float,
    'overlap_row_height_boxes': _parse_float,
    'seconds_per_large_box': _parse_float,
    'mv_per_large_box': _parse_float,
    'px_per_large_box': _parse_int,
    'margin_left': _parse_float,
    'margin_right': _parse_float,
    'margin_top': _parse_float,
    'margin_bottom': _parse_float,
    'show_grid': _parse_bool,
    'show_names': _parse_bool,
    'show_separators': _parse_bool,
    'font_scale': _parse_int,
    'line_thickness_px': _parse_int,
    'waveform_color': _parse_color,
    'grid_major_color': _parse_color,
    'grid_minor_color': _parse_color,
    'background_color': _parse_color,
    'text_color': _parse_color,
    'separator_color': _parse_color,
    'bbox_pad_px': _parse_int,
    'crop_pad_px': _parse_int,
    'train_split': _parse_float,
    'val_split': _parse_float,
    'test_split': _parse_float,
    'jpeg': _parse_bool,
    'target_fs': _parse_optional_float,
    'duration_s': _parse_float,
    'synth_fs': _parse_float,
    'threads': _parse_int,
}

CONFIG_KEYS = tuple(f.name for f in fields(PipelineConfig))


def parse_config_text(text, source='<config>'):
    """
    Interpreta el texto `clave = valor` de un archivo de configuración

    La sintaxis es la de un archivo .env: comentarios `#` en línea propia o
    tras un espacio, así que `#rrggbb` sin comillas se conserva como valor.

    Args:
        text (str): Contenido del archivo
        source (str): Nombre para los mensajes de error

    Returns:
        dict: Valores ya convertidos a su tipo
    """
    values = {}
    for key, value in dotenv_values(stream=io.StringIO(text), interpolate=False).items():
        if key not in _PARSERS:
            raise UnknownConfigKey(f"{source}: clave desconocida {key!r}")
        if value is None:
            raise ConfigTypeError(f"{source}: se esperaba '{key} = valor'")
        values[key] = _PARSERS[key](key, value)
    return values


def validate_config(cfg):
    """Comprueba los invariantes; lanza ConfigTypeError si alguno falla"""
    if cfg.task not in TASKS:
        raise ConfigTypeError(f"task inválida: {cfg.task!r} (válidas: {', '.join(TASKS)})")
    if cfg.input_format not in INPUT_FORMATS:
        raise ConfigTypeError(f"input_format inválido: {cfg.input_format!r}")
    if cfg.input_format != 'synth' and not cfg.input_dir:
        raise ConfigTypeError(f"input_format={cfg.input_format} requiere input_dir")
    if cfg.input_format == 'synth' and cfg.input_dir:
        raise ConfigTypeError("input_dir requiere input_format wfdb, csv o json")
    unknown = [name for name in cfg.task_layouts if name not in LAYOUT_NAMES]
    if unknown:
        raise ConfigTypeError(f"Layouts desconocidos: {', '.join(unknown)}")
    if cfg.task == 'overlap' and not cfg.overlap_row_height_boxes < DEFAULT_ROW_HEIGHT_BOXES:
        raise ConfigTypeError(
            f"overlap_row_height_boxes debe ser menor que {DEFAULT_ROW_HEIGHT_BOXES}: {cfg.overlap_row_height_boxes}"
        )
    if cfg.count < 1:
        raise ConfigTypeError(f"count debe ser >= 1: {cfg.count}")
    if cfg.threads < 1:
        raise ConfigTypeError(f"threads debe ser >= 1: {cfg.threads}")
    positive = ('row_height_boxes', 'overlap_row_height_boxes', 'seconds_per_large_box', 'mv_per_large_box',
                'px_per_large_box', 'font_scale', 'line_thickness_px', 'duration_s', 'synth_fs')
    for key in positive:
        if not getattr(cfg, key) > 0:
            raise ConfigTypeError(f"{key} debe ser positivo: {getattr(cfg, key)}")
    if cfg.target_fs is not None and not cfg.target_fs > 0:
        raise ConfigTypeError(f"target_fs debe ser positivo: {cfg.target_fs}")
    for key in ('margin_left', 'margin_right', 'margin_top', 'margin_bottom', 'bbox_pad_px', 'crop_pad_px'):
        if getattr(cfg, key) < 0:
            raise ConfigTypeError(f"{key} no puede ser negativo: {getattr(cfg, key)}")
    if any(fraction < 0 for fraction in cfg.splits) or abs(sum(cfg.splits) - 1.0) > 1e-6:
        raise ConfigTypeError(f"Las fracciones de split deben ser >= 0 y sumar 1: {cfg.splits}")
    if cfg.waveform_color == cfg.background_color:
        raise ConfigTypeError("waveform_color no puede ser igual a background_color")
    return cfg


def load_config(path=None, overrides=None):
    """
    Construye la configuración del pipeline

    Args:
        path (str): Archivo de configuración opcional
        overrides (dict): Valores de la CLI; las entradas None se ignoran

    Returns:
        PipelineConfig: Configuración validada
    """
    values = {}
    if path:
        try:
            with open(path, 'r', encoding='utf-8') as config_file:
                values.update(parse_config_text(config_file.read(), source=path))
        except OSError as e:
            raise ConfigTypeError(f"No se pudo leer {path}: {e}")

    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if key not in _PARSERS:
            raise UnknownConfigKey(f"Clave desconocida: {key!r}")
        values[key] = _PARSERS[key](key, value) if isinstance(value, str) else value

    cfg = validate_config(replace(PipelineConfig(), **values))
    cap = env_threads_cap()
    if cap is not None and cfg.threads > cap:
        logger.warning("threads=%d supera ECGFORGE_THREADS=%d; se usan %d", cfg.threads, cap, cap)
        cfg = replace(cfg, threads=max(cap, 1))
    return cfg
