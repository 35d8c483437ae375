"""Wave curves: Hugoniot shocks, contact jumps, simple waves, stationary states.

Shock curves are parameterized by ``Z = z1/z0`` with ``w = Z^(d-1)`` in
``(1/d, d)``.  The functions ``g`` and ``h`` are evaluated from the reduced
forms

    g(Z) = |w - 1| / sqrt((d-1) w (d-w)),   h(Z) = sqrt((d-1) w / (d-w)),

which are algebraically equal to the bracketed quotient forms but stay
accurate at zero strength (``Z -> 1``), where the quotient form is 0/0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .gas import DomainError, GasModel, ThermoState, pressure, specific_volume

Family = Literal["forward", "backward"]
Side = Literal["behind", "ahead"]

DOMAIN_MARGIN = 1e-12


def _family_sign(family: str) -> int:
    if family == "forward":
        return 1
    if family == "backward":
        return -1
    raise ValueError(f"family must be 'forward' or 'backward', got {family!r}")


def hugoniot_domain(d: float) -> tuple[float, float]:
    """Open interval of admissible Z for the Hugoniot functions."""
    return d ** (1.0 / (1.0 - d)), d ** (1.0 / (d - 1.0))


def _check_domain(Z, d):
    lo, hi = hugoniot_domain(d)
    Z = np.asarray(Z, dtype=float)
    bad = ~((Z > lo + DOMAIN_MARGIN) & (Z < hi - DOMAIN_MARGIN))
    if np.any(bad):
        raise DomainError(
            f"Z outside the Hugoniot domain ({lo:.17g}, {hi:.17g}): {Z[bad].ravel()[:3]}"
        )
    return Z


def hugoniot_f(Z, d: float):
    """Entropy ratio m1/m0 across a shock with z1/z0 = Z."""
    Z = _check_domain(Z, d)
    num = Z ** (d - 1.0) - 1.0 / d
    den = Z ** (d + 1.0) - Z ** (2.0 * d) / d
    out = np.sqrt(num / den)
    return float(out) if out.ndim == 0 else out


def hugoniot_g_h(Z, d: float):
    """Velocity-jump and speed factors (g, h) along the shock curve."""
    Z = _check_domain(Z, d)
    w = Z ** (d - 1.0)
    g = np.abs(w - 1.0) / np.sqrt((d - 1.0) * w * (d - w))
    h = np.sqrt((d - 1.0) * w / (d - w))
    if g.ndim == 0:
        return float(g), float(h)
    return g, h


def hugoniot_g_h_quotient(Z, d: float):
    """Direct quotient form of (g, h); loses precision as Z -> 1."""
    Z = _check_domain(Z, d)
    f2 = (Z ** (d - 1.0) - 1.0 / d) / (Z ** (d + 1.0) - Z ** (2.0 * d) / d)
    a = f2 * Z ** (1.0 + d) - 1.0
    b = 1.0 - Z ** (1.0 - d)
    g = np.sqrt(a * b) / math.sqrt(d * d - 1.0)
    h = math.sqrt((d - 1.0) / (d + 1.0)) * np.sqrt(a / b)
    return g, h


@dataclass(frozen=True)
class ShockPoint:
    Z: float
    f: float
    g: float
    h: float
    xi: float  # signed Lagrangian shock speed dx/dt
    du: float  # u1 - u0
    family: str
    side_of_1: str


def shock_connect(state0: ThermoState, Z: float, family: Family, side: Side,
                  gas: GasModel) -> tuple[ThermoState, ShockPoint]:
    """State on the other side of an admissible shock from ``state0``.

    ``side`` says where state 1 sits relative to the shock: ``behind``
    requires Z >= 1 and ``ahead`` requires Z <= 1 (Lax condition).
    """
    sgn = _family_sign(family)
    if side not in ("behind", "ahead"):
        raise ValueError(f"side must be 'behind' or 'ahead', got {side!r}")
    if (side == "behind" and Z < 1.0) or (side == "ahead" and Z > 1.0):
        raise DomainError(
            f"Lax-inconsistent shock: Z={Z!r} with state 1 {side} the shock"
        )
    d = gas.d
    f = hugoniot_f(Z, d)
    g, h = hugoniot_g_h(Z, d)
    z0, u0, m0 = state0.z, state0.u, state0.m
    du = sgn * math.copysign(1.0, Z - 1.0) * m0 * z0 * g if Z != 1.0 else 0.0
    xi = sgn * m0 * z0**d * h
    state1 = ThermoState(Z * z0, u0 + du, m0 * f)
    return state1, ShockPoint(Z, f, g, h, xi, du, family, side)


def rh_residuals(state0: ThermoState, state1: ThermoState, xi: float,
                 gas: GasModel) -> tuple[float, float, float]:
    """Relative residuals of the three Rankine-Hugoniot relations.

    Each residual is normalized by the magnitudes of the terms entering it.
    Velocities are taken relative to state 0 (the relations are Galilean
    invariant given the momentum relation).
    """
    d, gm1 = gas.d, gas.gamma - 1.0
    tau0, tau1 = specific_volume(state0.z, d), specific_volume(state1.z, d)
    p0, p1 = pressure(state0.z, state0.m, d), pressure(state1.z, state1.m, d)
    e0, e1 = p0 * tau0 / gm1, p1 * tau1 / gm1
    w = state1.u - state0.u

    def rel(lhs, rhs, scale):
        return abs(lhs - rhs) / scale if scale > 0.0 else 0.0

    mass = rel(xi * (tau1 - tau0), -w, abs(xi) * (tau0 + tau1))
    momentum = rel(xi * w, p1 - p0, abs(xi * w) + p0 + p1)
    energy = rel(
        xi * (0.5 * w * w + e1 - e0),
        w * p1,
        abs(xi) * (0.5 * w * w + e0 + e1) + abs(w) * p1,
    )
    return mass, momentum, energy


@dataclass(frozen=True)
class ContactJump:
    m_l: float
    m_r: float
    d: float

    @property
    def Q(self) -> float:
        return contact_strength(self.m_l, self.m_r, self.d)

    @property
    def kind(self) -> str:
        if self.m_r > self.m_l:
            return "3-contact"
        if self.m_r < self.m_l:
            return "1-contact"
        return "none"


def contact_strength(m_l, m_r, d):
    return (m_r / m_l) ** ((d - 1.0) / (d + 1.0))


def contact_apply(state_l: ThermoState, m_r: float, gas: GasModel) -> ThermoState:
    if not m_r > 0.0:
        raise DomainError(f"entropy variable must be positive, got {m_r!r}")
    d = gas.d
    z_r = state_l.z * (state_l.m / m_r) ** (2.0 / (d + 1.0))
    return ThermoState(z_r, state_l.u, m_r)


def contact_rs_map(r_l, s_l, Q):
    """Riemann invariants on the right of a jump from those on the left."""
    a, b = 0.5 * (1.0 + Q), 0.5 * (1.0 - Q)
    return a * r_l + b * s_l, b * r_l + a * s_l


def contact_resolve(s_l, r_r, Q):
    """Outgoing (r_l, s_r) at a jump given the incoming (s_l, r_r)."""
    r_l = (2.0 * r_r - (1.0 - Q) * s_l) / (1.0 + Q)
    s_r = 0.5 * (1.0 - Q) * r_l + 0.5 * (1.0 + Q) * s_l
    return r_l, s_r


def simple_wave_connect(state_a: ThermoState, z_b: float, family: Family,
                        gas: GasModel) -> ThermoState:
    """State behind a simple wave whose ahead state is ``state_a``.

    A forward wave keeps r = u - m z fixed, a backward wave keeps s = u + m z.
    """
    sgn = _family_sign(family)
    if not z_b > 0.0:
        raise DomainError(f"simple wave reaches the vacuum boundary (z_b={z_b!r})")
    m = state_a.m
    return ThermoState(z_b, state_a.u - sgn * m * (state_a.z - z_b), m)


def stationary_profile(m_of_x, U: float, P: float, gas: GasModel):
    """z(x) of the stationary solution with u = U and p = P."""
    if not P > 0.0:
        raise DomainError(f"stationary pressure must be positive, got {P!r}")
    m = np.asarray(m_of_x, dtype=float)
    if np.any(m <= 0.0):
        raise DomainError("entropy variable must be positive")
    d = gas.d
    return ((d + 1.0) * P / (m * m)) ** (1.0 / (1.0 + d))
