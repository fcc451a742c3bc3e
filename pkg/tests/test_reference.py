"""Reference RK4 integrator: analytic checks and topology gating."""

import math

import numpy as np
import pytest

from qpsjsim.engine import tran
from qpsjsim.netlist import elaborate, parse_netlist
from qpsjsim.reference import UnsupportedTopologyError, reference_integrate


def _circ(text):
    return elaborate(parse_netlist(text))


def test_lc_tank_matches_analytic():
    # current step I into L || C: iL(t) = I*(1 - cos(w*t)), w = 1/sqrt(LC)
    circ = _circ("""t
Iin 0 n1 pulse(0 1u 0 0.001p 0.001p 1000p 2000p)
L1 n1 0 1n
C1 n1 0 1f
.tran 0.01p 30p
.end
""")
    waves = reference_integrate(circ)
    t = waves.time
    il = waves.channel("i(l1)")
    model = 1.0 * (1.0 - np.cos(t))  # w = 1 rad/ps
    assert np.max(np.abs(il - model)) < 2e-3  # uA


def test_engine_matches_reference_on_lc():
    circ = _circ("""t
Iin 0 n1 pulse(0 1u 1p 0.1p 0.1p 1000p 2000p)
L1 n1 0 1n
C1 n1 0 1f
R1 n1 0 100meg
.tran 0.01p 30p
.save v(n1) i(l1)
.end
""")
    ref = reference_integrate(circ)
    eng = tran(circ)
    err = np.sqrt(np.mean((eng.channel("i(l1)") - ref.channel("i(l1)")) ** 2))
    scale = np.sqrt(np.mean(ref.channel("i(l1)") ** 2))
    assert err / scale < 0.01


def test_qpsj_reference_transports_positive_charge():
    circ = _circ("""t
Vb n1 0 dc 1.5m
qpsj Q1 n1 0 vc=0.7m rn=10k ls=0
.tran 0.01p 20p
.end
""")
    waves = reference_integrate(circ)
    i = waves.channel("i(q1)")
    assert np.all(i > 0)  # overdriven junction conducts continuously
    assert np.trapezoid(i, waves.time) > 0


def test_qpsj_reference_accepts_series_resistor():
    circ = _circ("""t
Vb n1 0 dc 1.5m
R1 n1 n2 1k
qpsj Q1 n2 0 vc=0.7m rn=10k ls=0.05n
.tran 0.01p 20p
.end
""")
    waves = reference_integrate(circ)
    assert "i(q1)" in waves


def test_jj_reference_accepts_parallel_resistor():
    circ = _circ("""t
Ib 0 n1 dc 300u
R1 n1 0 10
jj J1 n1 0 ic=200u rn=5 cj=0.5f
.tran 0.005p 20p
.end
""")
    waves = reference_integrate(circ)
    assert "v(n1)" in waves


def test_unsupported_topology_raises():
    circ = _circ("""t
Vs n1 0 dc 1m
R1 n1 n2 1k
C1 n2 0 1f
.tran 1p 10p
.end
""")
    with pytest.raises(UnsupportedTopologyError):
        reference_integrate(circ)


def test_two_junctions_unsupported():
    circ = _circ("""t
Vb n1 0 dc 1.5m
qpsj Q1 n1 n2 vc=0.7m rn=10k ls=0
qpsj Q2 n2 0 vc=0.7m rn=10k ls=0
.tran 0.01p 10p
.end
""")
    with pytest.raises(UnsupportedTopologyError):
        reference_integrate(circ)
