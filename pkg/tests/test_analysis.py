"""Pulse detection, charge accounting, energy figures and CSV round trips."""

import io
import math

import numpy as np
import pytest

from qpsjsim.analysis import (DetectorConfig, PulseEvent, SpikeTrain,
                              detect_pulses, export_csv, firing_rate,
                              import_spikes_csv, import_waveforms_csv,
                              neuron_firing_energy, pulse_charge_quantum_check,
                              switching_energy, window_charges)
from qpsjsim.engine import WaveformSet
from qpsjsim.units import TWO_E, TWO_E_SI


def _gaussian_train(centers, areas, sigma=0.5, tmax=100.0, dt=0.01):
    t = np.arange(0.0, tmax, dt)
    v = np.zeros_like(t)
    for c, a in zip(centers, areas):
        v += a / (sigma * math.sqrt(2.0 * math.pi)) * np.exp(
            -0.5 * ((t - c) / sigma) ** 2)
    v[v < 1e-9] = 0.0  # let the pulses return exactly to baseline
    return t, v


# --- pulse detection --------------------------------------------------------

def test_detect_pulses_counts_times_and_charges():
    t, v = _gaussian_train([20.0, 50.0, 80.0], [1.0, 1.2, 0.9])
    train = detect_pulses(t, v)
    assert len(train) == 3
    assert np.allclose(train.times(), [20.0, 50.0, 80.0], atol=0.02)
    # the above-baseline window catches essentially the full gaussian area
    assert np.allclose(train.charges(), [1.0, 1.2, 0.9], rtol=2e-2)
    assert all(e.width > 0 for e in train.events)


def test_detect_pulses_ignores_subthreshold_blips():
    # a pulse below half the channel maximum is not an event
    t, v = _gaussian_train([20.0, 60.0], [1.0, 0.2])
    train = detect_pulses(t, v)
    assert len(train) == 1
    assert train.events[0].t_peak == pytest.approx(20.0, abs=0.02)


def test_detect_pulses_merges_close_events():
    t, v = _gaussian_train([50.0, 51.0], [1.0, 1.0])
    merged = detect_pulses(t, v, DetectorConfig(min_separation=5.0))
    assert len(merged) == 1
    assert merged.events[0].charge == pytest.approx(2.0, rel=2e-2)


def test_detect_pulses_nonzero_baseline():
    t, v = _gaussian_train([50.0], [1.0])
    train = detect_pulses(t, v + 3.0, DetectorConfig(baseline=3.0))
    assert len(train) == 1
    assert train.events[0].charge == pytest.approx(1.0, rel=5e-2)


def test_detect_pulses_empty_and_flat():
    t = np.arange(0.0, 10.0, 0.1)
    assert len(detect_pulses(t, np.zeros_like(t))) == 0
    assert len(detect_pulses(t, np.full_like(t, -1.0))) == 0


def test_detect_pulses_input_validation():
    with pytest.raises(ValueError):
        detect_pulses([0.0, 1.0], [1.0])
    with pytest.raises(ValueError):
        detect_pulses([], [])
    with pytest.raises(ValueError):
        detect_pulses([0.0, 1.0], [0.0, float("nan")])


def test_detector_config_validation():
    with pytest.raises(ValueError):
        DetectorConfig(threshold_fraction=0.0)
    with pytest.raises(ValueError):
        DetectorConfig(threshold_fraction=1.0)
    with pytest.raises(ValueError):
        DetectorConfig(min_separation=0.0)


# --- window integration -----------------------------------------------------

def test_window_charges_recovers_full_areas():
    t, v = _gaussian_train([30.0, 70.0], [1.5, 0.75])
    q = window_charges(t, v, [30.0, 70.0], half_width=10.0)
    assert np.allclose(q, [1.5, 0.75], rtol=1e-6)


def test_window_charges_validation():
    t, v = _gaussian_train([30.0], [1.0])
    with pytest.raises(ValueError):
        window_charges(t, v, [30.0], half_width=0.0)
    with pytest.raises(ValueError):
        window_charges(t, v, [500.0], half_width=1.0)


# --- charge quantization check ----------------------------------------------

def test_quantum_check_rounding_and_flags():
    train = SpikeTrain([
        PulseEvent(10.0, 1.0 * TWO_E, 1.0),
        PulseEvent(20.0, 2.04 * TWO_E, 1.0),
        PulseEvent(30.0, 1.49 * TWO_E, 1.0),
    ])
    checks = pulse_charge_quantum_check(train)
    assert [c.multiple for c in checks] == [1, 2, 1]
    assert checks[0].quantized and checks[0].residual == pytest.approx(0.0)
    assert checks[1].quantized and checks[1].residual == pytest.approx(0.04)
    assert not checks[2].quantized


# --- energy figures ---------------------------------------------------------

def test_switching_energy_values():
    assert switching_energy(10e-3) == pytest.approx(TWO_E_SI * 10e-3)
    # scaled call: vc in mV with 2e in aC gives zJ
    assert switching_energy(10.0, two_e=TWO_E) == pytest.approx(3.204353)
    with pytest.raises(ValueError):
        switching_energy(-1.0)


def test_neuron_firing_energy_counts_all_switches():
    assert neuron_firing_energy(10e-3, 10) == pytest.approx(
        11.0 * TWO_E_SI * 10e-3)


def test_firing_rate():
    train = SpikeTrain([PulseEvent(float(k), TWO_E, 1.0) for k in range(5)])
    assert firing_rate(train, 100.0) == pytest.approx(0.05)
    with pytest.raises(ValueError):
        firing_rate(train, 0.0)


# --- CSV round trips --------------------------------------------------------

def test_waveform_csv_roundtrip_exact():
    waves = WaveformSet(np.array([0.0, 0.1, 0.2]),
                        {"v(n1)": np.array([0.5, -1.25e-7, 3.0]),
                         "i(q1)": np.array([1.0, 2.0, -0.125])})
    buf = io.StringIO()
    export_csv(waves, buf)
    buf.seek(0)
    back = import_waveforms_csv(buf)
    assert np.array_equal(back.time, waves.time)
    for name in waves.channels:
        assert np.array_equal(back.channel(name), waves.channel(name))


def test_spike_csv_roundtrip_exact():
    train = SpikeTrain([PulseEvent(1.5, 0.3204353, 2.25),
                        PulseEvent(7.0, 0.6408706, 1.0)])
    buf = io.StringIO()
    export_csv(train, buf)
    buf.seek(0)
    back = import_spikes_csv(buf)
    assert back.events == train.events


def test_csv_export_is_deterministic(tmp_path):
    waves = WaveformSet(np.array([0.0, 1.0]), {"v(a)": np.array([0.1, 0.2])})
    p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
    export_csv(waves, p1)
    export_csv(waves, p2)
    assert p1.read_bytes() == p2.read_bytes()


def test_csv_export_rejects_unknown_objects():
    with pytest.raises(TypeError):
        export_csv({"not": "exportable"}, io.StringIO())
