"""
Fixtures compartidas de las pruebas
"""
import os

import numpy as np
import pytest

from ecgforge.services.signals import LEAD_NAMES, SignalRecord, synth_record

FS = 500.0
N_SAMPLES = 5000


@pytest.fixture
def synth_records():
    return [synth_record(seed) for seed in range(5)]


@pytest.fixture
def zero_record():
    return SignalRecord(record_id='zeros', fs=FS, data=np.zeros((12, N_SAMPLES)))


def pulse_data(amplitude=2.0):
    """Pulsos de +amplitud a 2 s y -amplitud a 6 s en todas las derivaciones"""
    t = np.arange(N_SAMPLES) / FS
    pulse = amplitude * (np.exp(-((t - 2.0) ** 2) / (2 * 0.05 ** 2)) - np.exp(-((t - 6.0) ** 2) / (2 * 0.05 ** 2)))
    return np.tile(pulse, (12, 1))


@pytest.fixture
def pulse_record():
    return SignalRecord(record_id='pulses', fs=FS, data=pulse_data())


@pytest.fixture
def sine_record():
    t = np.arange(N_SAMPLES) / FS
    return SignalRecord(record_id='sine', fs=FS, data=np.tile(np.sin(2 * np.pi * 1.0 * t), (12, 1)))


def write_wfdb(directory, name, adc, gains, baselines=None, units=None, fs=FS, fmt='16'):
    """
    Escribe un registro WFDB de formato 16 sin usar el lector del paquete

    Args:
        adc (ndarray): Enteros de forma (12, n)
    """
    nsig, nsamp = adc.shape
    baselines = baselines if baselines is not None else [0] * nsig
    units = units if units is not None else ['mV'] * nsig
    np.asarray(adc.T, dtype=np.int64).astype('<i2').tofile(os.path.join(directory, f"{name}.dat"))
    lines = [f"{name} {nsig} {fs:g} {nsamp}"]
    for i in range(nsig):
        lines.append(f"{name}.dat {fmt} {gains[i]:g}({baselines[i]})/{units[i]} 16 {baselines[i]} 0 0 0 {LEAD_NAMES[i]}")
    header_path = os.path.join(directory, f"{name}.hea")
    with open(header_path, 'w', encoding='utf-8') as header_file:
        header_file.write('\n'.join(lines) + '\n')
    return header_path


@pytest.fixture
def wfdb_writer():
    return write_wfdb
