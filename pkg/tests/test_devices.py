"""Device constitutive relations, stamps and the charge/flux duality."""

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qpsjsim.devices import (BACKWARD_EULER, TRAPEZOIDAL, JjParams, MjjParams,
                             QpsjParams, capacitor_stamp, damping_parameter,
                             inductor_stamp, jj_current, jj_stamp,
                             mjj_set_state, qpsj_stamp, qpsj_voltage,
                             resistor_stamp)
from qpsjsim.units import TWO_E, TWO_E_SI


# --- parameter validation ---------------------------------------------------

def test_qpsj_params_validation():
    QpsjParams(vc=0.7e-3, rn=10e3, ls=0.0)
    with pytest.raises(ValueError):
        QpsjParams(vc=0.0, rn=10e3, ls=0.0)
    with pytest.raises(ValueError):
        QpsjParams(vc=0.7e-3, rn=0.0, ls=0.0)
    with pytest.raises(ValueError):
        QpsjParams(vc=0.7e-3, rn=10e3, ls=-1e-9)


def test_jj_params_validation():
    JjParams(ic=200e-6, rn=5.0, cj=0.0)
    with pytest.raises(ValueError):
        JjParams(ic=-1e-6, rn=5.0, cj=0.0)
    with pytest.raises(ValueError):
        JjParams(ic=200e-6, rn=0.0, cj=0.0)
    with pytest.raises(ValueError):
        JjParams(ic=200e-6, rn=5.0, cj=-1e-15)


def test_mjj_params_and_state_switching():
    p = MjjParams(states=[200e-6, 300e-6], active_state=0, rn=7.0, cj=1e-15)
    assert p.ic == 200e-6
    p2 = mjj_set_state(p, 1)
    assert p2.ic == 300e-6
    assert p.ic == 200e-6  # original untouched
    assert p2.as_jj() == JjParams(300e-6, 7.0, 1e-15, 0.0)
    with pytest.raises(IndexError):
        mjj_set_state(p, 2)
    with pytest.raises(IndexError):
        MjjParams(states=(1e-6,), active_state=1, rn=7.0, cj=0.0)
    with pytest.raises(ValueError):
        MjjParams(states=(), active_state=0, rn=7.0, cj=0.0)
    with pytest.raises(ValueError):
        MjjParams(states=(1e-6, -2e-6), active_state=0, rn=7.0, cj=0.0)


# --- branch relations -------------------------------------------------------

_QP = QpsjParams(vc=0.7, rn=10.0, ls=0.1)  # scaled units
_JJ = JjParams(ic=200.0, rn=0.005, cj=1.0)


def test_qpsj_voltage_landmarks():
    assert qpsj_voltage(0.0, _QP, two_e=TWO_E) == 0.0
    assert qpsj_voltage(TWO_E / 4.0, _QP, two_e=TWO_E) == pytest.approx(0.7)
    assert qpsj_voltage(TWO_E / 2.0, _QP, two_e=TWO_E) == pytest.approx(
        0.0, abs=1e-12)


@given(st.floats(min_value=-10.0 * TWO_E, max_value=10.0 * TWO_E))
def test_qpsj_voltage_periodic_odd_bounded(q):
    v = qpsj_voltage(q, _QP, two_e=TWO_E)
    assert abs(v) <= _QP.vc + 1e-12
    assert qpsj_voltage(q + TWO_E, _QP, two_e=TWO_E) == pytest.approx(
        v, abs=1e-6 * _QP.vc)
    assert qpsj_voltage(-q, _QP, two_e=TWO_E) == pytest.approx(
        -v, abs=1e-12)


@given(st.floats(min_value=-20.0 * math.pi, max_value=20.0 * math.pi))
def test_jj_current_periodic_odd_bounded(phi):
    i = jj_current(phi, _JJ)
    assert abs(i) <= _JJ.ic + 1e-9
    assert jj_current(phi + 2.0 * math.pi, _JJ) == pytest.approx(
        i, abs=1e-6 * _JJ.ic)
    assert jj_current(-phi, _JJ) == pytest.approx(-i, abs=1e-9)


# --- damping figure of merit ------------------------------------------------

def test_damping_parameter_hand_values():
    # beta = 2*pi*Vc*L / (2e * R^2), evaluated by hand for three triples
    assert damping_parameter(0.7e-3, 10e-12, 10e3) == pytest.approx(
        1.3725796486921728e-03, rel=1e-9)
    assert damping_parameter(10e-3, 1e-9, 1e3) == pytest.approx(
        1.9608280695602474e+02, rel=1e-9)
    assert damping_parameter(1e-3, 100e-12, 500.0) == pytest.approx(
        7.843312278240988e+00, rel=1e-9)


def test_damping_parameter_rejects_nonpositive_r():
    with pytest.raises(ValueError):
        damping_parameter(0.7e-3, 1e-12, 0.0)


@given(st.floats(min_value=1e-13, max_value=1e-8),
       st.floats(min_value=0.25, max_value=64.0))
def test_damping_linear_in_inductance(l, k):
    b1 = damping_parameter(0.7e-3, l, 10e3)
    assert damping_parameter(0.7e-3, k * l, 10e3) == pytest.approx(
        k * b1, rel=1e-9)


@given(st.floats(min_value=1.0, max_value=1e6),
       st.floats(min_value=0.25, max_value=64.0))
def test_damping_inverse_square_in_resistance(r, k):
    b1 = damping_parameter(0.7e-3, 1e-12, r)
    assert damping_parameter(0.7e-3, 1e-12, k * r) == pytest.approx(
        b1 / (k * k), rel=1e-9)


# --- companion stamps -------------------------------------------------------

def test_resistor_capacitor_inductor_stamps():
    assert resistor_stamp(2.0).geq == 0.5
    s = capacitor_stamp(3.0, 0.5, v_old=2.0, i_old=1.0)
    assert s.geq == pytest.approx(12.0)
    assert s.ieq == pytest.approx(-12.0 * 2.0 - 1.0)
    s = inductor_stamp(3.0, 0.5, i_old=2.0, v_old=1.0, method=BACKWARD_EULER)
    assert s.req == pytest.approx(6.0)
    assert s.veq == pytest.approx(-12.0)


def _dual_pair(method, h, q_old, i_old, vl_old, i_at, two_e):
    """QPSJ stamp and the JJ stamp of its exact dual device.

    Under the exchange v <-> i, q <-> (2e/2pi)*phi, Vc <-> Ic,
    Rn <-> 1/Rn, Ls <-> Cj and 2e <-> Phi0 the two branch relations are
    the same equation, so the discretized update coefficients must agree:
    req(QPSJ) = geq(JJ) and veq(QPSJ) = ieq(JJ).
    """
    qp = QpsjParams(vc=0.7, rn=10.0, ls=0.1)
    jj = JjParams(ic=qp.vc, rn=1.0 / qp.rn, cj=qp.ls)
    sq = qpsj_stamp(qp, q_old, i_old, vl_old, h, method,
                    two_e=two_e, i_at=i_at)
    sj = jj_stamp(jj, 2.0 * math.pi * q_old / two_e, i_old, vl_old, h, method,
                  phi0=two_e, v_at=i_at)
    return sq, sj


@pytest.mark.parametrize("method", [TRAPEZOIDAL, BACKWARD_EULER])
def test_qpsj_jj_duality_structural(method):
    sq, sj = _dual_pair(method, h=0.01, q_old=0.05, i_old=0.3, vl_old=0.2,
                        i_at=0.4, two_e=TWO_E)
    assert sq.req == pytest.approx(sj.geq, rel=1e-9)
    assert sq.veq == pytest.approx(sj.ieq, rel=1e-9)


@given(h=st.floats(min_value=1e-4, max_value=1.0),
       q_old=st.floats(min_value=-1.0, max_value=1.0),
       i_old=st.floats(min_value=-1.0, max_value=1.0),
       vl_old=st.floats(min_value=-1.0, max_value=1.0),
       i_at=st.floats(min_value=-1.0, max_value=1.0),
       method=st.sampled_from([TRAPEZOIDAL, BACKWARD_EULER]))
def test_qpsj_jj_duality_property(h, q_old, i_old, vl_old, i_at, method):
    sq, sj = _dual_pair(method, h, q_old, i_old, vl_old, i_at, TWO_E)
    assert sq.req == pytest.approx(sj.geq, rel=1e-9, abs=1e-12)
    assert sq.veq == pytest.approx(sj.ieq, rel=1e-9, abs=1e-12)
