"""
Servicio de pipeline
Orquesta la generación de los datasets de digitalización, detección,
segmentación y solapamiento, y la verificación de ida y vuelta
"""
import hashlib
import logging
import os
import shutil
from dataclasses import dataclass, field, replace
from functools import partial
from multiprocessing import Pool
from typing import List, Tuple

import numpy as np
from tqdm import tqdm
from werkzeug.utils import secure_filename

from config.pipeline_config import validate_config
from ecgforge.errors import ConfigTypeError, EcgForgeError
from ecgforge.services.annotate import annotate_page, format_yolo_lines, write_classes
from ecgforge.services.cleanup import OutputCleanupService
from ecgforge.services.encoders import write_image
from ecgforge.services.layout import RHYTHM_LAYOUTS, Calibration, StyleSpec, make_layout
from ecgforge.services.manifest import MANIFEST_NAME, Manifest
from ecgforge.services.raster import render_page
from ecgforge.services.segmask import make_lead_crops, make_overlap_sample
from ecgforge.services.signals import (
    LeadId,
    RecordRef,
    crop_duration,
    discover_records,
    load_record,
    resample,
    save_signal_json,
)
from ecgforge.services.verify import (
    MAX_RMSE_MV,
    MIN_PEARSON_R,
    digitize_mask,
    lead_window,
    score_row,
    write_report,
)

logger = logging.getLogger(__name__)

SPLIT_NAMES = ('train', 'val', 'test')
CLASSES_NAME = 'classes.txt'
REPORT_NAME = 'report.csv'


@dataclass(frozen=True)
class SampleJob:
    index: int
    sample_id: str
    ref: RecordRef
    layout_name: str
    rhythm: bool
    seed: int
    split: str


@dataclass
class RunReport:
    """Resultado de una ejecución del pipeline"""

    task: str
    task_dir: str
    manifest: Manifest
    failures: List[Tuple[str, str]] = field(default_factory=list)

    @property
    def ok(self):
        return not self.failures


# Construcción a partir de la configuración

def build_calibration(cfg):
    return Calibration(
        seconds_per_large_box=cfg.seconds_per_large_box,
        mv_per_large_box=cfg.mv_per_large_box,
        px_per_large_box=cfg.px_per_large_box,
    )


def build_style(cfg):
    return StyleSpec(
        show_grid=cfg.show_grid,
        show_lead_names=cfg.show_names,
        show_separators=cfg.show_separators,
        rhythm_name=cfg.rhythm_name,
        font_scale=cfg.font_scale,
        waveform_color=tuple(cfg.waveform_color),
        grid_major_color=tuple(cfg.grid_major_color),
        grid_minor_color=tuple(cfg.grid_minor_color),
        background_color=tuple(cfg.background_color),
        text_color=tuple(cfg.text_color),
        separator_color=tuple(cfg.separator_color),
        line_thickness_px=cfg.line_thickness_px,
    )


def build_layout(cfg, name, rhythm):
    """Layout de una muestra; la tarea de solapamiento usa su altura de fila reducida"""
    row_height = cfg.overlap_row_height_boxes if cfg.task == 'overlap' else cfg.row_height_boxes
    return make_layout(
        name,
        calibration=build_calibration(cfg),
        row_height_boxes=row_height,
        rhythm=rhythm,
        margins_boxes=cfg.margins_boxes,
    )


def assign_split(record_id, seed, fractions):
    """
    Asigna train/val/test de forma determinista

    Usa SHA-256 de `seed:record_id`, así todas las muestras de un mismo
    registro caen en el mismo split.

    Args:
        record_id (str): Identificador del registro
        seed (int): Semilla global
        fractions (tuple): (train, val, test)

    Returns:
        str: 'train', 'val' o 'test'
    """
    digest = hashlib.sha256(f"{seed}:{record_id}".encode('utf-8')).digest()
    u = int.from_bytes(digest[:8], 'big') / 2 ** 64
    cumulative = 0.0
    for name, fraction in zip(SPLIT_NAMES, fractions):
        cumulative += fraction
        if u < cumulative:
            return name
    # Redondeo: el último split con fracción positiva
    return next(name for name, fraction in reversed(list(zip(SPLIT_NAMES, fractions))) if fraction > 0)


def sample_seed(seed, index):
    return int(np.random.SeedSequence([seed, index]).generate_state(1)[0])


def plan_samples(cfg):
    """
    Lista determinista de muestras a generar

    Los layouts se recorren cíclicamente; con archivos de entrada también
    los registros. La tira de ritmo solo se añade a 3x4 y 6x2.

    Returns:
        list: SampleJob ordenados por índice
    """
    refs = None if cfg.input_format == 'synth' else discover_records(cfg.input_dir, cfg.input_format)
    layouts = cfg.task_layouts
    jobs = []
    for index in range(cfg.count):
        seed = sample_seed(cfg.seed, index)
        ref = RecordRef(kind='synth', seed=seed) if refs is None else refs[index % len(refs)]
        layout_name = layouts[index % len(layouts)]
        jobs.append(SampleJob(
            index=index,
            sample_id=secure_filename(f"{index:06d}_{ref.record_id}_{layout_name}"),
            ref=ref,
            layout_name=layout_name,
            rhythm=cfg.rhythm and layout_name in RHYTHM_LAYOUTS,
            seed=seed,
            split=assign_split(ref.record_id, cfg.seed, cfg.splits),
        ))
    return jobs


def prepare_record(cfg, ref, required_duration_s):
    """Carga, remuestrea (si target_fs) y recorta el registro a la duración de la página"""
    record = load_record(ref, csv_fs=cfg.synth_fs, synth_fs=cfg.synth_fs, duration_s=cfg.duration_s)
    if cfg.target_fs:
        record = resample(record, cfg.target_fs)
    return crop_duration(record, required_duration_s)


# Trabajo por muestra

def _image_ext(cfg):
    return 'jpg' if cfg.jpeg else 'png'


def _page_row(job, record):
    return {
        'id': job.sample_id,
        'record_id': record.record_id,
        'layout': job.layout_name,
        'split': job.split,
        'seed': job.seed,
    }


def _crop_id(sample_id, crop):
    suffix = f"_{crop.lead.name}" + ('_rhythm' if crop.is_rhythm else '')
    return secure_filename(sample_id + suffix)


def _write_crop(cfg, cleanup, job, record, layout, crop, base_dir):
    crop_id = _crop_id(job.sample_id, crop)
    image_rel = f"{base_dir}/images/{crop_id}.{_image_ext(cfg)}"
    mask_png_rel = f"{base_dir}/masks_png/{crop_id}.png"
    mask_bmp_rel = f"{base_dir}/masks_bmp/{crop_id}.bmp"
    signal_rel = f"{base_dir}/signals/{crop_id}.json"

    write_image(crop.image, cleanup.path(image_rel), _image_ext(cfg))
    write_image(crop.mask_gray, cleanup.path(mask_png_rel), 'png')
    write_image(crop.mask_bin, cleanup.path(mask_bmp_rel), 'bmp', binary=True)
    save_signal_json(record, cleanup.path(signal_rel), lead=crop.lead, window=crop.signal_window)

    calibration = layout.calibration
    row = _page_row(job, record)
    row.update({
        'id': crop_id,
        'lead': crop.lead.name,
        'rhythm': int(crop.is_rhythm),
        'overlap': int(crop.overlap),
        'image': image_rel,
        'mask_png': mask_png_rel,
        'mask_bmp': mask_bmp_rel,
        'signal': signal_rel,
        'crop_x': crop.crop_rect.x_min,
        'crop_y': crop.crop_rect.y_min,
        'crop_w': crop.crop_rect.width,
        'crop_h': crop.crop_rect.height,
        'baseline_y': crop.baseline_y,
        'x0': crop.x0,
        'px_per_box': calibration.px_per_large_box,
        'seconds_per_box': calibration.seconds_per_large_box,
        'mv_per_box': calibration.mv_per_large_box,
    })
    return row


def _digitization_sample(cfg, cleanup, job, record, layout, style):
    page, _ = render_page(record, layout, style)
    image_rel = f"{job.split}/images/{job.sample_id}.{_image_ext(cfg)}"
    signal_rel = f"{job.split}/signals/{job.sample_id}.json"
    write_image(page, cleanup.path(image_rel), _image_ext(cfg))
    save_signal_json(record, cleanup.path(signal_rel))
    row = _page_row(job, record)
    row.update({'image': image_rel, 'signal': signal_rel})
    return [row]


def _detection_sample(cfg, cleanup, job, record, layout, style):
    page, trace = render_page(record, layout, style)
    image_rel = f"{job.split}/images/{job.sample_id}.{_image_ext(cfg)}"
    label_rel = f"{job.split}/labels/{job.sample_id}.txt"
    annotations = annotate_page(trace, (page.width, page.height), cfg.bbox_pad_px)
    write_image(page, cleanup.path(image_rel), _image_ext(cfg))
    with open(cleanup.path(label_rel), 'w', encoding='utf-8', newline='\n') as label_file:
        label_file.write(format_yolo_lines(annotations))
    row = _page_row(job, record)
    row.update({'image': image_rel, 'label': label_rel})
    return [row]


def _segmentation_sample(cfg, cleanup, job, record, layout, style):
    crops = make_lead_crops(record, layout, style, cfg.bbox_pad_px, cfg.crop_pad_px)
    return [_write_crop(cfg, cleanup, job, record, layout, crop, job.split) for crop in crops]


def _overlap_sample(cfg, cleanup, job, record, layout, style):
    page, trace = render_page(record, layout, style)
    rows = []
    for entry in trace.entries:
        if entry.pixels.size == 0:
            logger.warning("Se omite %s de %s: sin píxeles", entry.lead.name, job.sample_id)
            continue
        crop = make_overlap_sample(
            record, layout, entry.lead, style, cfg.bbox_pad_px, entry.is_rhythm, page=page, trace=trace,
        )
        subtree = 'overlap' if crop.overlap else 'no_overlap'
        rows.append(_write_crop(cfg, cleanup, job, record, layout, crop, f"{subtree}/{job.split}"))
    return rows


def _verify_sample(cfg, job, record, layout, style):
    crops = make_lead_crops(record, layout, style, cfg.bbox_pad_px, cfg.crop_pad_px)
    rows = []
    for crop in crops:
        t0, t1 = crop.signal_window
        trace = digitize_mask(crop.mask_bin, layout.calibration, crop.baseline_y, t0, crop.x0)
        truth = lead_window(record, crop.lead, t0, t1)
        lead_name = crop.lead.name + ('_rhythm' if crop.is_rhythm else '')
        rows.append(score_row(record.record_id, lead_name, layout.name, trace, truth))
    return rows


_TASK_WORKERS = {
    'digitization': _digitization_sample,
    'detection': _detection_sample,
    'segmentation': _segmentation_sample,
    'overlap': _overlap_sample,
}


def run_sample(job, cfg, task_dir):
    """
    Genera una muestra; pensado para ejecutarse en un proceso del pool

    Returns:
        tuple: (sample_id, error o None, filas)
    """
    cleanup = OutputCleanupService(task_dir)
    try:
        layout = build_layout(cfg, job.layout_name, job.rhythm)
        style = build_style(cfg)
        record = prepare_record(cfg, job.ref, layout.required_duration_s)
        if cfg.task == 'verify':
            return job.sample_id, None, _verify_sample(cfg, job, record, layout, style)
        return job.sample_id, None, _TASK_WORKERS[cfg.task](cfg, cleanup, job, record, layout, style)
    except (EcgForgeError, OSError, ValueError) as e:
        cleanup.rollback()
        logger.error("Muestra %s fallida: %s", job.sample_id, e)
        return job.sample_id, f"{type(e).__name__}: {e}", []


# Ejecución

class DatasetGenerator:
    """
    Servicio que genera el dataset de una tarea en `<out_dir>/<task>`
    """

    def __init__(self, cfg):
        """
        Inicializa el generador

        Args:
            cfg (PipelineConfig): Configuración validada
        """
        self.cfg = cfg
        self.task_dir = os.path.join(cfg.out_dir, cfg.task)

    def prepare_task_dir(self):
        """
        Vacía la carpeta de la tarea si es una salida previa de ECGForge

        Raises:
            ConfigTypeError: La carpeta existe, no está vacía y no tiene manifiesto
        """
        if os.path.isdir(self.task_dir) and os.listdir(self.task_dir):
            if not os.path.isfile(os.path.join(self.task_dir, MANIFEST_NAME)):
                raise ConfigTypeError(f"{self.task_dir} no está vacía y no es una salida de ECGForge; no se sobrescribe")
            logger.info("Eliminando salida anterior en %s", self.task_dir)
            shutil.rmtree(self.task_dir)
        os.makedirs(self.task_dir, exist_ok=True)

    def plan(self):
        return plan_samples(self.cfg)

    def _execute(self, jobs, show_progress):
        worker = partial(run_sample, cfg=self.cfg, task_dir=self.task_dir)
        processes = min(self.cfg.threads, len(jobs))
        with tqdm(total=len(jobs), desc=self.cfg.task, unit='muestra', disable=not show_progress) as progress:
            if processes <= 1:
                for job in jobs:
                    yield worker(job)
                    progress.update(1)
                return
            with Pool(processes=processes) as pool:
                for result in pool.imap_unordered(worker, jobs):
                    yield result
                    progress.update(1)

    def run(self, show_progress=False):
        """
        Ejecuta la tarea configurada

        Args:
            show_progress (bool): Mostrar barra de progreso tqdm

        Returns:
            RunReport: Manifiesto y muestras fallidas
        """
        cfg = self.cfg
        self.prepare_task_dir()
        jobs = self.plan()
        logger.info("Generando %d muestra(s) de %s con %d proceso(s)", len(jobs), cfg.task, min(cfg.threads, len(jobs)))

        collected = []
        failures = []
        for sample_id, error, rows in self._execute(jobs, show_progress):
            if error is not None:
                failures.append((sample_id, error))
            collected.extend(rows)

        if cfg.task == 'verify':
            report = self._finish_verify(collected, failures)
        else:
            manifest = Manifest.for_task(cfg.task)
            for row in collected:
                manifest.add(row)
            manifest = manifest.sorted()
            manifest.write(os.path.join(self.task_dir, MANIFEST_NAME))
            if cfg.task == 'detection':
                write_classes(os.path.join(self.task_dir, CLASSES_NAME))
            report = RunReport(cfg.task, self.task_dir, manifest, sorted(failures))

        logger.info(
            "Tarea %s completada: %d fila(s), %d fallo(s)", cfg.task, len(report.manifest.rows), len(report.failures),
        )
        return report

    def _finish_verify(self, rows, failures):
        rows = sorted(rows, key=_lead_order)
        write_report(rows, os.path.join(self.task_dir, REPORT_NAME))
        manifest = Manifest.for_task('verify')
        for row in rows:
            manifest.add({
                'id': f"{row.record_id}_{row.layout}_{row.lead}",
                'record_id': row.record_id,
                'lead': row.lead,
                'layout': row.layout,
                'r': '' if row.r is None else f"{row.r:.6f}",
                'rmse_mV': f"{row.rmse_mv:.6f}",
                'gap_columns': row.gap_columns,
            })
            if not row.passed:
                failures.append((
                    f"{row.record_id}_{row.layout}_{row.lead}",
                    f"r={row.r} rmse={row.rmse_mv:.4f} (mínimos r>={MIN_PEARSON_R}, rmse<={MAX_RMSE_MV})",
                ))
        return RunReport('verify', self.task_dir, manifest, sorted(failures))


def _lead_order(row):
    name = row.lead.split('_')[0]
    return (row.record_id, row.layout, row.lead.endswith('_rhythm'), LeadId.from_name(name).value)


def run_task(cfg, show_progress=False):
    """Ejecuta la tarea de `cfg` con un DatasetGenerator"""
    return DatasetGenerator(cfg).run(show_progress)


def run_digitization(cfg, show_progress=False):
    return run_task(_with_task(cfg, 'digitization'), show_progress)


def run_detection(cfg, show_progress=False):
    return run_task(_with_task(cfg, 'detection'), show_progress)


def run_segmentation(cfg, show_progress=False):
    return run_task(_with_task(cfg, 'segmentation'), show_progress)


def run_overlap(cfg, show_progress=False):
    return run_task(_with_task(cfg, 'overlap'), show_progress)


def run_verify(cfg, show_progress=False):
    """Ida y vuelta en memoria: render, máscara limpia, digitalización y puntuación"""
    return run_task(_with_task(cfg, 'verify'), show_progress)


def _with_task(cfg, task):
    return cfg if cfg.task == task else validate_config(replace(cfg, task=task))


__all__ = [
    'SampleJob',
    'RunReport',
    'DatasetGenerator',
    'assign_split',
    'plan_samples',
    'run_task',
    'run_digitization',
    'run_detection',
    'run_segmentation',
    'run_overlap',
    'run_verify',
]
