"""Gradient variables alpha, beta and their R/C character.

``alpha`` measures the forward wave and ``beta`` the backward wave:

    alpha = u_x + p_x / c,    beta = u_x - p_x / c,

so that inside an isentropic block alpha = s_x and beta = r_x.  Along
forward (resp. backward) characteristics they obey Riccati equations with
coefficients k1 = (d/2) z^(d-1) and k2 = (d-1)/(d(d+1)) z m_x.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad, solve_ivp
from scipy.interpolate import CubicSpline

from .gas import GasModel

BLOWUP_THRESHOLD = 1e8
RTOL = 1e-9
ATOL = 1e-12


def label(value, tol: float = 0.0):
    """R/C label of a gradient value; ``neutral`` inside ``[-tol, tol]``."""
    if np.ndim(value) == 0:
        if value > tol:
            return "R"
        if value < -tol:
            return "C"
        return "neutral"
    v = np.asarray(value, dtype=float)
    out = np.full(v.shape, "neutral", dtype=object)
    out[v > tol] = "R"
    out[v < -tol] = "C"
    return out


def label_codes(value, tol: float = 0.0) -> np.ndarray:
    """Integer version of :func:`label`: +1 for R, -1 for C, 0 for neutral."""
    v = np.asarray(value, dtype=float)
    return np.where(v > tol, 1, np.where(v < -tol, -1, 0)).astype(np.int8)


@dataclass(frozen=True)
class GradientPair:
    alpha: float
    beta: float

    @property
    def rc_forward(self) -> str:
        return label(self.alpha)

    @property
    def rc_backward(self) -> str:
        return label(self.beta)


def gradients_from_field(u_x, z_x, m_x, z, m, gas: GasModel) -> GradientPair:
    d = gas.d
    px_over_c = m * z_x + 2.0 / (d + 1.0) * m_x * z
    return GradientPair(u_x + px_over_c, u_x - px_over_c)


@dataclass(frozen=True)
class RiccatiCoeffs:
    k1: float
    k2: float


def riccati_coeffs(z, m_x, gas: GasModel) -> RiccatiCoeffs:
    g = gas.gamma
    k1 = (g + 1.0) / (2.0 * (g - 1.0)) * z ** (2.0 / (g - 1.0))
    k2 = (g - 1.0) / (g * (g + 1.0)) * z * m_x
    return RiccatiCoeffs(k1, k2)


def riccati_rhs(alpha, beta, k1, k2):
    """(alpha', beta') along forward and backward characteristics respectively."""
    da = k1 * (k2 * (3.0 * alpha + beta) + alpha * beta - alpha * alpha)
    db = k1 * (-k2 * (alpha + 3.0 * beta) + alpha * beta - beta * beta)
    return da, db


@dataclass(frozen=True)
class CharPath:
    """Samples along a characteristic: z, m_x and the opposite-family gradient."""

    t: np.ndarray
    z: np.ndarray
    m_x: np.ndarray
    other: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.t, dtype=float)
        if t.ndim != 1 or t.size < 2 or np.any(np.diff(t) <= 0.0):
            raise ValueError("path times must be strictly increasing with >= 2 samples")
        for name in ("z", "m_x", "other"):
            arr = np.broadcast_to(np.asarray(getattr(self, name), dtype=float), t.shape)
            object.__setattr__(self, name, np.array(arr))
        object.__setattr__(self, "t", t)


@dataclass
class RiccatiTrace:
    t: np.ndarray
    value: np.ndarray
    blowup: bool
    t_blowup: float | None = None
    bracket: tuple[float, float] | None = None
    notes: list[str] = field(default_factory=list)


def _interp(t, y):
    if np.all(y == y[0]):
        c = float(y[0])
        return lambda s: c
    if t.size < 3:
        return lambda s: float(np.interp(s, t, y))
    spline = CubicSpline(t, y)
    return lambda s: float(spline(s))


def integrate_riccati_along(path: CharPath, value0: float, family: str,
                            gas: GasModel, threshold: float = BLOWUP_THRESHOLD,
                            rtol: float = RTOL, atol: float = ATOL) -> RiccatiTrace:
    """Integrate alpha (forward) or beta (backward) along a sampled path.

    The value is integrated directly until ``|value|`` reaches a switch
    level, after which the reciprocal ``w = 1/value`` is integrated; blowup is
    the zero crossing of ``w`` (an event of the reciprocal integration).
    """
    if family not in ("forward", "backward"):
        raise ValueError(f"unknown family {family!r}")
    if not math.isfinite(value0):
        raise ValueError("initial value must be finite")
    d = gas.d
    z_f, mx_f, o_f = _interp(path.t, path.z), _interp(path.t, path.m_x), _interp(path.t, path.other)
    ksgn = 1.0 if family == "forward" else -1.0
    c2 = (d - 1.0) / (d * (d + 1.0))

    def coeffs(t):
        z = z_f(t)
        return 0.5 * d * z ** (d - 1.0), c2 * z * mx_f(t), o_f(t)

    def rhs(t, y):
        k1, k2, o = coeffs(t)
        v = y[0]
        return [k1 * (ksgn * k2 * (3.0 * v + o) + o * v - v * v)]

    def rhs_recip(t, y):
        k1, k2, o = coeffs(t)
        w = y[0]
        return [-k1 * (ksgn * k2 * (3.0 * w + o * w * w) + o * w - 1.0)]

    t0, t1 = float(path.t[0]), float(path.t[-1])
    switch = min(threshold, max(1e3, 1e3 * abs(value0)))

    def big(t, y):
        return abs(y[0]) - switch
    big.terminal = True
    big.direction = 1

    sol = solve_ivp(rhs, (t0, t1), [value0], method="RK45", rtol=rtol, atol=atol,
                    dense_output=True, events=big)
    ts = path.t
    values = np.full(ts.shape, np.nan)
    if sol.status == 0:
        values[:] = sol.sol(ts)[0]
        return RiccatiTrace(ts, values, False)

    notes = []
    if sol.status == -1:
        # step-size underflow: treat as blowup at the last reached time
        tb = float(sol.t[-1])
        mask = ts <= tb
        values[mask] = sol.sol(ts[mask])[0]
        notes.append(f"integrator stopped: {sol.message}")
        return RiccatiTrace(ts, values, True, tb, (tb, tb), notes)

    ts_switch = float(sol.t_events[0][0])
    w0 = 1.0 / float(sol.y_events[0][0][0])

    def zero(t, y):
        return y[0]
    zero.terminal = True

    rec = solve_ivp(rhs_recip, (ts_switch, t1), [w0], method="RK45", rtol=rtol,
                    atol=atol * abs(w0), dense_output=True, events=zero)
    mask = ts <= ts_switch
    values[mask] = sol.sol(ts[mask])[0]
    if rec.status == 1:
        tb = float(rec.t_events[0][0])
        m2 = (ts > ts_switch) & (ts < tb)
        if np.any(m2):
            values[m2] = 1.0 / rec.sol(ts[m2])[0]
        # bracket from the last accepted steps around the zero crossing
        lo = float(rec.t[-2]) if rec.t.size > 1 else ts_switch
        return RiccatiTrace(ts, values, True, tb, (lo, tb), notes)
    m2 = ts > ts_switch
    w = rec.sol(ts[m2])[0]
    values[m2] = 1.0 / w
    exceeded = np.abs(values[m2]) > threshold
    if np.any(exceeded):
        tb = float(ts[m2][np.argmax(exceeded)])
        notes.append("threshold exceeded without reaching the singularity")
        return RiccatiTrace(ts, values, True, tb, (ts_switch, tb), notes)
    return RiccatiTrace(ts, values, False, notes=notes)


def lax_R(z_A, z_B, d):
    return (z_A / z_B) ** (0.5 * d)


def lax_K_integral(z_of_x, x_A: float, x_B: float, z_B: float, m: float, d: float) -> float:
    """Oriented integral of K(x, B) dx from x_A to x_B along a characteristic."""
    def K(x):
        z = z_of_x(x)
        return d * lax_R(z, z_B, d) / (2.0 * m * m * z ** (d + 1.0))
    val, _ = quad(K, x_A, x_B, epsabs=0.0, epsrel=1e-13, limit=200)
    return val


def lax_growth(z_A: float, z_B: float, K_integral: float, slope_A: float,
               family: str, d: float) -> float:
    """Time-derivative slope at B from the slope at A.

    ``slope`` is the time derivative of s (forward family) or r (backward
    family).  ``K_integral`` is the oriented integral from x_A to x_B.
    Returns ``inf`` (with the sign of the focusing slope) when the reciprocal
    vanishes, i.e. the gradient blows up at B.
    """
    if slope_A == 0.0:
        return 0.0
    R = lax_R(z_A, z_B, d)
    if family == "forward":
        y = R / (-slope_A) + K_integral
        return -math.inf if y == 0.0 else -1.0 / y
    if family == "backward":
        y = R / slope_A - K_integral
        return math.inf if y == 0.0 else 1.0 / y
    raise ValueError(f"unknown family {family!r}")


def blowup_time_constant(k1: float, value0: float) -> float:
    """Blowup time of v' = -k1 v^2 from v(0) = value0 < 0 (inf otherwise)."""
    if value0 >= 0.0:
        return math.inf
    return 1.0 / (k1 * abs(value0))


# ---------------------------------------------------------------------------
# R/C structure on a computed mesh


@dataclass(frozen=True)
class RCViolation:
    track: int
    family: str
    t: float
    x: float
    before: str
    after: str
    other_seen: tuple[str, ...]
    required: str


_NAMES = {1: "R", -1: "C", 0: "neutral"}


def check_global_rc(mesh, rel_tol: float = 1e-6) -> list[RCViolation]:
    """Scan tracked characteristics for R/C changes the global structure forbids.

    With non-decreasing entropy a forward wave that changes to character X
    must be crossing backward waves of character X, and a backward wave that
    changes to X must be crossing forward waves of the opposite character.
    For non-increasing entropy the required opposite character is reversed.
    Changes into ``neutral`` (decay below tolerance) are not constrained,
    and a sub-tolerance value that grows without changing sign is not a
    change of character.
    """
    prof = mesh.profile
    if not prof.monotone:
        raise ValueError("global R/C structure requires a monotone entropy profile")
    tol = mesh.grad_tol(rel_tol)
    increasing = prof.nondecreasing
    out: list[RCViolation] = []
    for k, tr in enumerate(mesh.tracks):
        own = label_codes(tr.own, tol)
        other = label_codes(tr.other, tol)
        n = own.size
        for i in range(n - 1):
            a, b = int(own[i]), int(own[i + 1])
            if a == b or b == 0:
                continue
            if a == 0 and np.sign(tr.own[i]) == b:
                continue
            same = (tr.family == "forward") == increasing
            need = b if same else -b
            seen = {int(other[i]), int(other[i + 1])}
            if need not in seen:
                out.append(RCViolation(
                    k, tr.family, float(tr.t[i + 1]), float(tr.x[i + 1]),
                    _NAMES[a], _NAMES[b], tuple(sorted(_NAMES[v] for v in seen)),
                    _NAMES[need],
                ))
    return out
