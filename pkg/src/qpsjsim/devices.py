"""Constitutive equations and companion-model stamps for circuit devices.

The quantum phase-slip junction (QPSJ) is the exact charge/flux dual of
the Josephson junction: where a JJ carries a supercurrent Ic*sin(phi)
with d(phi)/dt = 2*pi*v/Phi0, a QPSJ sustains a voltage
Vc*sin(2*pi*q/2e) with i = dq/dt.  The full branch relations are

    QPSJ:   v = Vc*sin(2*pi*q/2e) + Rn*dq/dt + Ls*d2q/dt2
    JJ:     i = Ic*sin(phi) + v/Rn + Cj*dv/dt,   dphi/dt = 2*pi*v/Phi0

Functions here are unit-agnostic: pass parameters in SI together with the
SI constants (the default), or scaled parameters with scaled constants.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from .units import PHI0_SI, TWO_E_SI


@dataclass(frozen=True)
class QpsjParams:
    vc: float  # critical voltage
    rn: float  # normal-state series resistance
    ls: float  # series inductance
    q0: float = 0.0  # initial charge

    def __post_init__(self):
        if not self.vc > 0:
            raise ValueError("vc must be positive")
        if not self.rn > 0:
            raise ValueError("rn must be positive")
        if self.ls < 0:
            raise ValueError("ls must be non-negative")


@dataclass(frozen=True)
class JjParams:
    ic: float  # critical current
    rn: float  # shunt resistance
    cj: float  # junction capacitance
    phi_init: float = 0.0

    def __post_init__(self):
        if not self.ic > 0:
            raise ValueError("ic must be positive")
        if not self.rn > 0:
            raise ValueError("rn must be positive")
        if self.cj < 0:
            raise ValueError("cj must be non-negative")


@dataclass(frozen=True)
class MjjParams:
    """JJ with a critical current switchable between discrete states.

    The state is written out-of-band (an external magnetic field in
    hardware); electrically the device behaves as a JJ with
    ic = states[active_state].
    """

    states: tuple  # ordered critical currents
    active_state: int
    rn: float
    cj: float
    phi_init: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        if not self.states:
            raise ValueError("states must be non-empty")
        if any(not s > 0 for s in self.states):
            raise ValueError("all states must be positive")
        if not 0 <= self.active_state < len(self.states):
            raise IndexError(f"active_state {self.active_state} out of range")
        if not self.rn > 0:
            raise ValueError("rn must be positive")

    @property
    def ic(self):
        return self.states[self.active_state]

    def as_jj(self):
        return JjParams(self.ic, self.rn, self.cj, self.phi_init)


def qpsj_voltage(q, p, *, two_e=TWO_E_SI):
    """Junction voltage Vc*sin(2*pi*q/2e); 2e-periodic and odd in q."""
    return p.vc * math.sin(2.0 * math.pi * q / two_e)


def jj_current(phi, p):
    """Supercurrent Ic*sin(phi)."""
    return p.ic * math.sin(phi)


def mjj_set_state(p, idx):
    """Return a copy of p with the active critical-current state changed."""
    if not 0 <= idx < len(p.states):
        raise IndexError(f"state index {idx} out of range for {len(p.states)} states")
    return replace(p, active_state=idx)


def damping_parameter(vc, l, r, *, two_e=TWO_E_SI):
    """RLC damping figure of merit 2*pi*Vc*L/(2e*R^2).

    Much less than 1: overdamped (clean quantized pulses); much greater
    than 1: underdamped.
    """
    if not r > 0:
        raise ValueError("r must be positive")
    return 2.0 * math.pi * vc * l / (two_e * r * r)


# --- companion stamps ------------------------------------------------------

TRAPEZOIDAL = "trapezoidal"
BACKWARD_EULER = "backward-euler"


@dataclass
class Stamp:
    """Linearized one-timestep equivalent of a device.

    For node-based devices (R, C, JJ) the branch current is
    i(v) = geq*v + ieq at the operating point.  For branch-based devices
    (L, QPSJ) the branch-row relation is v = req*i + veq.
    """

    geq: float = 0.0
    ieq: float = 0.0
    req: float = 0.0
    veq: float = 0.0


def resistor_stamp(r):
    return Stamp(geq=1.0 / r)


def capacitor_stamp(c, h, v_old, i_old, method=TRAPEZOIDAL):
    """i_new = geq*(v_new - v_old) - i_old (trap) or geq*(v_new - v_old) (BE)."""
    if method == TRAPEZOIDAL:
        geq = 2.0 * c / h
        return Stamp(geq=geq, ieq=-geq * v_old - i_old)
    geq = c / h
    return Stamp(geq=geq, ieq=-geq * v_old)


def inductor_stamp(l, h, i_old, v_old, method=TRAPEZOIDAL):
    """v_new = req*(i_new - i_old) - v_old (trap) or req*(i_new - i_old) (BE)."""
    if method == TRAPEZOIDAL:
        req = 2.0 * l / h
        return Stamp(req=req, veq=-req * i_old - v_old)
    req = l / h
    return Stamp(req=req, veq=-req * i_old)


def jj_stamp(p, phi_old, v_old, ic_old, h, method=TRAPEZOIDAL, *,
             phi0=PHI0_SI, v_at=None):
    """Linearized JJ branch current at trial voltage v_at (default v_old).

    The junction phase is integrated alongside the node voltage:
    phi_new = phi_hist + beta*v_new.
    """
    if v_at is None:
        v_at = v_old
    if method == TRAPEZOIDAL:
        beta = math.pi * h / phi0
        phi_hist = phi_old + beta * v_old
        gc = 2.0 * p.cj / h
        ic_cap = gc * (v_at - v_old) - ic_old
    else:
        beta = 2.0 * math.pi * h / phi0
        phi_hist = phi_old
        gc = p.cj / h
        ic_cap = gc * (v_at - v_old)
    phi = phi_hist + beta * v_at
    i_total = p.ic * math.sin(phi) + v_at / p.rn + ic_cap
    geq = p.ic * math.cos(phi) * beta + 1.0 / p.rn + gc
    return Stamp(geq=geq, ieq=i_total - geq * v_at)


def qpsj_stamp(p, q_old, i_old, vl_old, h, method=TRAPEZOIDAL, *,
               two_e=TWO_E_SI, i_at=None):
    """Linearized QPSJ branch relation v(i) at trial branch current i_at.

    Junction charge is integrated alongside the branch current:
    q_new = q_hist + alpha*i_new.
    """
    if i_at is None:
        i_at = i_old
    if method == TRAPEZOIDAL:
        alpha = 0.5 * h
        q_hist = q_old + 0.5 * h * i_old
        cl = 2.0 * p.ls / h
        vl = cl * (i_at - i_old) - vl_old
    else:
        alpha = h
        q_hist = q_old
        cl = p.ls / h
        vl = cl * (i_at - i_old)
    q = q_hist + alpha * i_at
    w = 2.0 * math.pi / two_e
    v_total = p.vc * math.sin(w * q) + p.rn * i_at + vl
    req = p.vc * math.cos(w * q) * w * alpha + p.rn + cl
    return Stamp(req=req, veq=v_total - req * i_at)
