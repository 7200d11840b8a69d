"""
Servicio de señales ECG
Carga de registros WFDB (formato 16), CSV y JSON, síntesis de registros
de prueba y remuestreo
"""
import csv
import json
import logging
import math
import os
from dataclasses import dataclass
from enum import IntEnum
from typing import Optional

import numpy as np

from ecgforge.errors import (
    InvalidArgument,
    MissingLead,
    ParseError,
    RecordTooShort,
    TruncatedData,
    UnknownLead,
    UnsupportedFormat,
)

logger = logging.getLogger(__name__)


class LeadId(IntEnum):
    """Las 12 derivaciones estándar en orden canónico"""

    I = 0
    II = 1
    III = 2
    aVR = 3
    aVL = 4
    aVF = 5
    V1 = 6
    V2 = 7
    V3 = 8
    V4 = 9
    V5 = 10
    V6 = 11

    @property
    def label(self):
        return self.name

    @classmethod
    def from_name(cls, name):
        """
        Convierte un nombre de derivación en LeadId

        Args:
            name (str): Nombre tal como aparece en el archivo ('avr', ' V1 ', ...)

        Returns:
            LeadId: Derivación correspondiente
        """
        key = name.strip().lower()
        lead = _LEADS_BY_LOWER.get(key)
        if lead is None:
            raise UnknownLead(f"Derivación desconocida: {name!r}")
        return lead


_LEADS_BY_LOWER = {lead.name.lower(): lead for lead in LeadId}

LEAD_NAMES = tuple(lead.name for lead in LeadId)


@dataclass(frozen=True, eq=False)
class SignalRecord:
    """
    Registro ECG de 12 derivaciones en mV

    `data` tiene forma (12, n) en orden canónico.
    """

    record_id: str
    fs: float
    data: np.ndarray

    def __post_init__(self):
        if not self.fs > 0:
            raise InvalidArgument(f"Frecuencia de muestreo inválida: {self.fs}")
        data = np.asarray(self.data, dtype=np.float64)
        if data.ndim != 2 or data.shape[0] != len(LeadId):
            raise MissingLead(f"Se esperaban 12 derivaciones, forma recibida {data.shape}")
        if data.shape[1] < 1:
            raise InvalidArgument("El registro no tiene muestras")
        if not np.all(np.isfinite(data)):
            raise InvalidArgument(f"El registro {self.record_id} contiene valores no finitos")
        data.setflags(write=False)
        object.__setattr__(self, 'data', data)

    @property
    def n_samples(self):
        return self.data.shape[1]

    @property
    def duration_s(self):
        return self.n_samples / self.fs

    @property
    def leads(self):
        return {lead: self.data[lead] for lead in LeadId}

    def lead(self, lead):
        return self.data[int(lead)]

    def times(self):
        return np.arange(self.n_samples) / self.fs


@dataclass(frozen=True)
class LeadWindow:
    """Ventana de una sola derivación leída de un JSON de recorte"""

    record_id: str
    lead: LeadId
    fs: float
    t0: float
    t1: float
    samples: np.ndarray

    def times(self):
        start, _ = window_indices(self.fs, self.t0, self.t1)
        return (start + np.arange(len(self.samples))) / self.fs


@dataclass(frozen=True)
class RecordRef:
    """Referencia serializable a un registro de entrada (para los workers)"""

    kind: str
    path: Optional[str] = None
    seed: Optional[int] = None

    @property
    def record_id(self):
        if self.kind == 'synth':
            return f"synth{self.seed}"
        return os.path.splitext(os.path.basename(self.path))[0]


def window_indices(fs, t0, t1):
    """
    Índices de muestra k con t0 <= k/fs < t1

    Returns:
        tuple: (inicio, fin) semiabierto
    """
    start = int(math.ceil(t0 * fs - 1e-9))
    stop = int(math.ceil(t1 * fs - 1e-9))
    return start, stop


# WFDB

def _parse_record_line(tokens, line_no):
    if len(tokens) < 4:
        raise ParseError("Línea de registro incompleta, se espera 'NOMBRE NSIG FS NSAMP'", line=line_no)
    name = tokens[0]
    if '/' in name:
        raise UnsupportedFormat(f"Registros multisegmento no soportados: {name}")
    try:
        nsig = int(tokens[1])
        fs = float(tokens[2].split('/')[0])
        nsamp = int(tokens[3])
    except ValueError:
        raise ParseError("Campos numéricos inválidos en la línea de registro", line=line_no)
    if fs <= 0 or nsamp < 1:
        raise ParseError("FS y NSAMP deben ser positivos", line=line_no)
    return name, nsig, fs, nsamp


def _parse_gain(field, adczero, line_no):
    """Interpreta 'GAIN(BASELINE)/UNITS'"""
    units = 'mV'
    if '/' in field:
        field, units = field.split('/', 1)
    baseline = adczero
    if '(' in field:
        if not field.endswith(')'):
            raise ParseError(f"Ganancia mal formada: {field!r}", line=line_no)
        field, base = field[:-1].split('(', 1)
        try:
            baseline = int(base)
        except ValueError:
            raise ParseError(f"Línea base inválida: {base!r}", line=line_no)
    try:
        gain = float(field)
    except ValueError:
        raise ParseError(f"Ganancia inválida: {field!r}", line=line_no)
    if gain == 0:
        gain = 200.0
    return gain, baseline, units


def _parse_signal_line(tokens, line_no):
    if len(tokens) < 2:
        raise ParseError("Línea de señal incompleta", line=line_no)
    file_name, fmt = tokens[0], tokens[1]
    if fmt != '16':
        raise UnsupportedFormat(f"Formato de almacenamiento no soportado: {fmt}")
    adczero = 0
    if len(tokens) > 4:
        try:
            adczero = int(tokens[4])
        except ValueError:
            raise ParseError(f"ADCZERO inválido: {tokens[4]!r}", line=line_no)
    gain, baseline, units = (200.0, adczero, 'mV')
    if len(tokens) > 2:
        gain, baseline, units = _parse_gain(tokens[2], adczero, line_no)
    description = ' '.join(tokens[8:]) if len(tokens) > 8 else ''
    if not description:
        raise UnknownLead(f"Señal sin descripción en la línea {line_no}")
    lead = LeadId.from_name(description)
    return file_name, lead, gain, baseline, units


def load_wfdb(header_path):
    """
    Carga un registro WFDB de 12 derivaciones en formato 16

    Args:
        header_path (str): Ruta del archivo .hea

    Returns:
        SignalRecord: Registro en mV
    """
    with open(header_path, 'r', encoding='utf-8', errors='replace') as header_file:
        lines = [(i, line.strip()) for i, line in enumerate(header_file, start=1)]
    lines = [(i, line) for i, line in lines if line and not line.startswith('#')]
    if not lines:
        raise ParseError("Encabezado vacío", line=1)

    record_line_no, record_line = lines[0]
    name, nsig, fs, nsamp = _parse_record_line(record_line.split(), record_line_no)
    if nsig != len(LeadId):
        raise UnsupportedFormat(f"Se esperaban 12 señales, el encabezado declara {nsig}")
    if len(lines) - 1 < nsig:
        raise ParseError("Faltan líneas de señal", line=lines[-1][0] + 1)

    signals = [_parse_signal_line(line.split(), line_no) for line_no, line in lines[1:nsig + 1]]
    files = {file_name for file_name, *_ in signals}
    if len(files) != 1:
        raise UnsupportedFormat(f"Se esperaba un único archivo .dat, hay {len(files)}")
    leads = [lead for _, lead, *_ in signals]
    missing = [lead.name for lead in LeadId if lead not in leads]
    if missing:
        raise MissingLead(f"Derivaciones ausentes: {', '.join(missing)}")

    dat_path = os.path.join(os.path.dirname(header_path), files.pop())
    if not os.path.isfile(dat_path):
        raise TruncatedData(f"No existe el archivo de datos {dat_path}")
    raw = np.fromfile(dat_path, dtype='<i2')
    if raw.size != nsig * nsamp:
        raise TruncatedData(
            f"{dat_path}: {raw.size} muestras, el encabezado declara {nsig * nsamp}"
        )
    adc = raw.reshape(nsamp, nsig).T.astype(np.float64)

    data = np.empty((len(LeadId), nsamp), dtype=np.float64)
    for column, (_, lead, gain, baseline, units) in enumerate(signals):
        values = (adc[column] - baseline) / gain
        if units.strip().lower() == 'uv':
            values = values / 1000.0
        data[lead] = values

    logger.debug("Checksum WFDB no verificado para %s", name)
    return SignalRecord(record_id=name, fs=fs, data=data)


# CSV

def load_csv(csv_path, fs):
    """
    Carga un registro desde CSV con encabezado de nombres de derivación

    Args:
        csv_path (str): Ruta del CSV
        fs (float): Frecuencia de muestreo en Hz

    Returns:
        SignalRecord: Registro en mV
    """
    with open(csv_path, 'r', encoding='utf-8', newline='') as csv_file:
        reader = csv.reader(csv_file)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError("CSV vacío", row=1)

        columns = {}
        for col, name in enumerate(header):
            try:
                columns[LeadId.from_name(name)] = col
            except UnknownLead:
                continue
        missing = [lead.name for lead in LeadId if lead not in columns]
        if missing:
            raise MissingLead(f"Columnas ausentes: {', '.join(missing)}")

        rows = []
        for row_no, row in enumerate(reader, start=2):
            if not row:
                continue
            values = []
            for lead in LeadId:
                col = columns[lead]
                try:
                    value = float(row[col])
                except (ValueError, IndexError):
                    raise ParseError("Valor no numérico", row=row_no, col=col + 1)
                if not math.isfinite(value):
                    raise ParseError("Valor no finito", row=row_no, col=col + 1)
                values.append(value)
            rows.append(values)

    if not rows:
        raise ParseError("El CSV no tiene muestras", row=2)
    record_id = os.path.splitext(os.path.basename(csv_path))[0]
    return SignalRecord(record_id=record_id, fs=fs, data=np.array(rows, dtype=np.float64).T)


def save_csv(record, csv_path):
    """Escribe el registro en el formato CSV de intercambio"""
    with open(csv_path, 'w', encoding='utf-8', newline='') as csv_file:
        writer = csv.writer(csv_file)
        writer.writerow(LEAD_NAMES)
        writer.writerows(record.data.T.tolist())


# JSON

def save_signal_json(record, path, lead=None, window=None):
    """
    Guarda la señal en el esquema JSON del dataset

    Args:
        record (SignalRecord): Registro fuente
        path (str): Ruta de salida
        lead (LeadId): Derivación para un recorte; None para el registro completo
        window (tuple): (t0, t1) en segundos; por defecto todo el registro
    """
    t0, t1 = window if window is not None else (0.0, record.duration_s)
    payload = {
        'record_id': record.record_id,
        'lead': None if lead is None else LeadId(lead).name,
        'fs': record.fs,
        'window_s': [t0, t1],
        'units': 'mV',
    }
    start, stop = window_indices(record.fs, t0, t1)
    if lead is None:
        payload['leads'] = {name: record.data[i, start:stop].tolist() for i, name in enumerate(LEAD_NAMES)}
    else:
        payload['samples'] = record.lead(lead)[start:stop].tolist()

    with open(path, 'w', encoding='utf-8') as json_file:
        json.dump(payload, json_file)


def _read_json(path, required):
    try:
        with open(path, 'r', encoding='utf-8') as json_file:
            payload = json.load(json_file)
    except json.JSONDecodeError as e:
        raise ParseError(f"JSON inválido: {e.msg}", line=e.lineno)
    if not isinstance(payload, dict):
        raise ParseError(f"{path}: se esperaba un objeto JSON, recibido {type(payload).__name__}")
    missing = [key for key in required if key not in payload]
    if missing:
        raise ParseError(f"{path}: faltan las claves {', '.join(missing)}")
    return payload


def load_signal_json(path):
    """Lee un JSON de registro completo (lead = null)"""
    payload = _read_json(path, ('record_id', 'fs', 'leads'))
    if payload.get('lead') is not None or not isinstance(payload['leads'], dict):
        raise ParseError(f"{path} no es un JSON de registro completo")
    leads = {LeadId.from_name(name): values for name, values in payload['leads'].items()}
    missing = [lead.name for lead in LeadId if lead not in leads]
    if missing:
        raise MissingLead(f"Derivaciones ausentes: {', '.join(missing)}")
    try:
        data = np.array([leads[lead] for lead in LeadId], dtype=np.float64)
        fs = float(payload['fs'])
    except (TypeError, ValueError) as e:
        raise ParseError(f"{path}: valores no numéricos o derivaciones de distinta longitud ({e})")
    return SignalRecord(record_id=str(payload['record_id']), fs=fs, data=data)


def load_lead_window(path):
    """Lee un JSON de recorte de una sola derivación"""
    payload = _read_json(path, ('record_id', 'lead', 'fs', 'window_s', 'samples'))
    if payload['lead'] is None:
        raise ParseError(f"{path} no es un JSON de derivación")
    try:
        t0, t1 = payload['window_s']
        return LeadWindow(
            record_id=str(payload['record_id']),
            lead=LeadId.from_name(payload['lead']),
            fs=float(payload['fs']),
            t0=float(t0),
            t1=float(t1),
            samples=np.asarray(payload['samples'], dtype=np.float64),
        )
    except (TypeError, ValueError) as e:
        raise ParseError(f"{path}: campos de la ventana inválidos ({e})")


# Registros sintéticos

# (amplitud mV, desfase s respecto al pico R, ancho s)
BUMP_TABLE = {
    'P': (0.15, -0.20, 0.025),
    'Q': (-0.10, -0.04, 0.010),
    'R': (1.00, 0.00, 0.010),
    'S': (-0.25, 0.04, 0.010),
    'T': (0.35, 0.30, 0.060),
}

LIMB_SCALE = {
    LeadId.I: 0.7,
    LeadId.II: 1.0,
    LeadId.III: 0.4,
    LeadId.aVR: -0.8,
    LeadId.aVL: 0.35,
    LeadId.aVF: 0.7,
}

MAX_SYNTH_MV = 2.0


def synth_record(seed, duration_s=10.0, fs=500.0):
    """
    Genera un registro ECG sintético determinista

    Cada latido es una suma de gaussianas P, Q, R, S, T. El periodo se
    sortea una vez por registro.

    Args:
        seed (int): Semilla
        duration_s (float): Duración en segundos
        fs (float): Frecuencia de muestreo en Hz

    Returns:
        SignalRecord: Registro sintético
    """
    if not duration_s > 0 or not fs > 0:
        raise InvalidArgument(f"Duración y fs deben ser positivas ({duration_s}, {fs})")

    rng = np.random.default_rng(seed)
    period = rng.uniform(0.66, 1.0)
    first_r = rng.uniform(0.25, 0.25 + period)
    gain = rng.uniform(0.8, 1.2)
    precordial = rng.uniform(0.6, 1.4, size=6)

    n = int(round(fs * duration_s))
    t = np.arange(n) / fs
    peaks = np.arange(first_r - 2 * period, duration_s + 2 * period, period)

    beat = np.zeros(n)
    for amplitude, offset, width in BUMP_TABLE.values():
        centers = peaks + offset
        beat += amplitude * np.exp(-((t[:, None] - centers[None, :]) ** 2) / (2 * width ** 2)).sum(axis=1)

    scales = [LIMB_SCALE[lead] for lead in LeadId if lead in LIMB_SCALE] + list(precordial)
    data = gain * np.outer(scales, beat)
    peak = np.abs(data).max()
    if peak > MAX_SYNTH_MV:
        data *= MAX_SYNTH_MV / peak
    return SignalRecord(record_id=f"synth{seed}", fs=float(fs), data=data)


# Transformaciones

def resample(record, target_fs):
    """
    Remuestrea por interpolación lineal en los instantes k/target_fs

    Args:
        record (SignalRecord): Registro fuente
        target_fs (float): Nueva frecuencia en Hz

    Returns:
        SignalRecord: Registro remuestreado con la misma duración
    """
    if not target_fs > 0:
        raise InvalidArgument(f"Frecuencia destino inválida: {target_fs}")
    n_new = max(1, int(round(record.duration_s * target_fs)))
    new_times = np.arange(n_new) / target_fs
    src_times = record.times()
    data = np.array([np.interp(new_times, src_times, row) for row in record.data])
    return SignalRecord(record_id=record.record_id, fs=float(target_fs), data=data)


def crop_duration(record, duration_s):
    """Conserva los primeros round(fs·duration_s) segundos del registro"""
    n = int(round(record.fs * duration_s))
    if n > record.n_samples:
        raise RecordTooShort(
            f"{record.record_id}: {record.duration_s:.3f} s, se requieren {duration_s:.3f} s"
        )
    return SignalRecord(record_id=record.record_id, fs=record.fs, data=record.data[:, :n])


# Descubrimiento de entradas

INPUT_EXTENSIONS = {'wfdb': '.hea', 'csv': '.csv', 'json': '.json'}


def discover_records(input_dir, input_format):
    """
    Lista los registros de una carpeta de entrada en orden determinista

    Args:
        input_dir (str): Carpeta de entrada
        input_format (str): 'wfdb', 'csv' o 'json'

    Returns:
        list: RecordRef ordenados por nombre
    """
    extension = INPUT_EXTENSIONS.get(input_format)
    if extension is None:
        raise InvalidArgument(f"Formato de entrada desconocido: {input_format}")
    if not input_dir or not os.path.isdir(input_dir):
        raise InvalidArgument(f"No existe la carpeta de entrada: {input_dir}")
    refs = [
        RecordRef(kind=input_format, path=os.path.join(input_dir, name))
        for name in sorted(os.listdir(input_dir))
        if name.lower().endswith(extension)
    ]
    if not refs:
        raise InvalidArgument(f"No hay archivos {extension} en {input_dir}")
    return refs


def load_record(ref, csv_fs=500.0, synth_fs=500.0, duration_s=10.0):
    """Materializa un RecordRef"""
    if ref.kind == 'synth':
        return synth_record(ref.seed, duration_s, synth_fs)
    if ref.kind == 'wfdb':
        return load_wfdb(ref.path)
    if ref.kind == 'csv':
        return load_csv(ref.path, csv_fs)
    if ref.kind == 'json':
        return load_signal_json(ref.path)
    raise InvalidArgument(f"Tipo de registro desconocido: {ref.kind}")


__all__ = [
    'LeadId',
    'LEAD_NAMES',
    'SignalRecord',
    'LeadWindow',
    'RecordRef',
    'window_indices',
    'load_wfdb',
    'load_csv',
    'save_csv',
    'save_signal_json',
    'load_signal_json',
    'load_lead_window',
    'synth_record',
    'resample',
    'crop_duration',
    'discover_records',
    'load_record',
]
