"""
Servicio de verificación
Digitaliza máscaras limpias y las compara con la señal de referencia
"""
import csv
import logging
import os
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from ecgforge.errors import EcgForgeError, EmptyMask, UndefinedCorrelation
from ecgforge.services.encoders import load_image
from ecgforge.services.layout import Calibration
from ecgforge.services.manifest import MANIFEST_NAME, Manifest
from ecgforge.services.signals import LeadWindow, load_lead_window, window_indices

logger = logging.getLogger(__name__)

REPORT_COLUMNS = ('record_id', 'lead', 'layout', 'r', 'rmse_mV', 'gap_columns')

MIN_PEARSON_R = 0.98
MAX_RMSE_MV = 0.05


@dataclass(frozen=True)
class DigitizedTrace:
    times: np.ndarray
    values: np.ndarray
    gaps: Tuple[Tuple[int, int], ...]

    @property
    def gap_columns(self):
        return sum(stop - start for start, stop in self.gaps)


@dataclass(frozen=True)
class ScoreResult:
    pearson_r: float
    rmse_mv: float


@dataclass(frozen=True)
class VerifyRow:
    record_id: str
    lead: str
    layout: str
    r: Optional[float]
    rmse_mv: float
    gap_columns: int

    @property
    def passed(self):
        return self.r is not None and self.r >= MIN_PEARSON_R and self.rmse_mv <= MAX_RMSE_MV


def _runs(flags):
    """Rangos semiabiertos [inicio, fin) donde flags es True"""
    padded = np.concatenate([[False], flags, [False]]).astype(np.int8)
    edges = np.flatnonzero(np.diff(padded))
    return tuple((int(a), int(b)) for a, b in zip(edges[0::2], edges[1::2]))


def digitize_mask(mask_bin, calibration, baseline_y, t0, x0):
    """
    Recupera una serie temporal a partir de una máscara binaria

    Cada columna con primer plano aporta la media de sus filas; las columnas
    vacías entre la primera y la última se interpolan linealmente.

    Args:
        mask_bin (RasterImage): Máscara con 1 en primer plano
        calibration (Calibration): Calibración del render
        baseline_y (float): Línea base en coordenadas de la máscara
        t0 (float): Inicio de la ventana en segundos
        x0 (float): Columna que corresponde a t0

    Returns:
        DigitizedTrace: Serie digitalizada
    """
    foreground = np.asarray(mask_bin.pixels) == 1
    counts = foreground.sum(axis=0)
    filled = np.flatnonzero(counts)
    if filled.size == 0:
        raise EmptyMask("La máscara no contiene primer plano")

    first, last = int(filled[0]), int(filled[-1])
    columns = np.arange(first, last + 1)
    rows = np.arange(foreground.shape[0])[:, None]
    sums = (foreground * rows).sum(axis=0)

    y_mean = sums[filled] / counts[filled]
    values_filled = (baseline_y - y_mean) / calibration.scale_y
    values = np.interp(columns, filled, values_filled)

    empty = counts[first:last + 1] == 0
    gaps = tuple((first + a, first + b) for a, b in _runs(empty))
    times = t0 + (columns - x0) / calibration.scale_x
    return DigitizedTrace(times=times, values=values, gaps=gaps)


def score(trace, truth):
    """
    Correlación de Pearson y RMSE frente a la referencia

    La referencia se interpola linealmente en los tiempos de columna.

    Args:
        trace (DigitizedTrace): Serie digitalizada
        truth (LeadWindow): Ventana de referencia

    Returns:
        ScoreResult: (pearson_r, rmse_mv)
    """
    reference = np.interp(trace.times, truth.times(), truth.samples)
    rmse = float(np.sqrt(np.mean((trace.values - reference) ** 2)))
    if np.ptp(trace.values) == 0 or np.ptp(reference) == 0:
        raise UndefinedCorrelation(rmse)
    r = float(np.corrcoef(trace.values, reference)[0, 1])
    return ScoreResult(pearson_r=r, rmse_mv=rmse)


def lead_window(record, lead, t0, t1):
    """Extrae la ventana de referencia de un registro en memoria"""
    start, stop = window_indices(record.fs, t0, t1)
    return LeadWindow(
        record_id=record.record_id, lead=lead, fs=record.fs, t0=t0, t1=t1,
        samples=record.lead(lead)[start:stop].copy(),
    )


def score_row(record_id, lead_name, layout_name, trace, truth):
    """Puntúa y empaqueta una fila del informe"""
    try:
        result = score(trace, truth)
        r, rmse = result.pearson_r, result.rmse_mv
    except UndefinedCorrelation as e:
        r, rmse = None, e.rmse_mv
    return VerifyRow(record_id, lead_name, layout_name, r, rmse, trace.gap_columns)


def write_report(rows, path):
    """Escribe el informe CSV de verificación"""
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, 'w', encoding='utf-8', newline='') as report_file:
        writer = csv.writer(report_file)
        writer.writerow(REPORT_COLUMNS)
        for row in rows:
            writer.writerow([
                row.record_id,
                row.lead,
                row.layout,
                '' if row.r is None else f"{row.r:.6f}",
                f"{row.rmse_mv:.6f}",
                row.gap_columns,
            ])


def verify_task_dir(task_dir):
    """
    Verifica todos los recortes de una tarea de segmentación o solapamiento

    Args:
        task_dir (str): Carpeta de la tarea (contiene manifest.csv)

    Returns:
        tuple: (filas del informe, número de recortes que fallaron al procesarse)
    """
    manifest = Manifest.read(os.path.join(task_dir, MANIFEST_NAME))
    if 'mask_bmp' not in manifest.columns:
        raise EcgForgeError(f"La tarea {manifest.task} no tiene máscaras que verificar")

    rows: List[VerifyRow] = []
    errors = 0
    for entry in manifest.rows:
        try:
            mask = load_image(os.path.join(task_dir, entry['mask_bmp']))
            truth = load_lead_window(os.path.join(task_dir, entry['signal']))
            calibration = Calibration(
                seconds_per_large_box=float(entry['seconds_per_box']),
                mv_per_large_box=float(entry['mv_per_box']),
                px_per_large_box=int(entry['px_per_box']),
            )
            trace = digitize_mask(mask, calibration, int(entry['baseline_y']), truth.t0, int(entry['x0']))
            lead_name = entry['lead'] + ('_rhythm' if entry.get('rhythm') == '1' else '')
            rows.append(score_row(entry['record_id'], lead_name, entry['layout'], trace, truth))
        except (EcgForgeError, OSError, KeyError, ValueError) as e:
            errors += 1
            logger.error("No se pudo verificar %s: %s", entry.get('id'), e)
    return rows, errors
