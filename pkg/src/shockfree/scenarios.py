"""Closed-form analyses and explicit constructions.

* far-field vacuum condition and the single-contact classification,
* the reflection recurrence between a 3-contact and a 1-contact,
* a certified constructor of rarefactive data with two 3-contacts,
* the single-shock tracer with an isentropic and a stationary side.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np
from scipy.integrate import quad
from scipy.interpolate import CubicHermiteSpline, CubicSpline
from scipy.optimize import brentq

from .gas import DomainError, GasModel, ThermoState
from .mesh import EntropyProfile
from .moc import InitialData
from .waves import contact_rs_map, hugoniot_domain, hugoniot_f, hugoniot_g_h, rh_residuals


class HypothesisViolation(ValueError):
    """Scenario hypotheses are not met; ``certificate`` says which and by how much."""

    def __init__(self, message, certificate=None):
        super().__init__(message)
        self.certificate = certificate


def smooth_step(y):
    """C-infinity step: 0 for y <= 0, 1 for y >= 1, all derivatives flat at both ends."""
    y = np.clip(np.asarray(y, dtype=float), 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        a = np.where(y > 0.0, np.exp(-1.0 / np.where(y > 0.0, y, 1.0)), 0.0)
        b = np.where(y < 1.0, np.exp(-1.0 / np.where(y < 1.0, 1.0 - y, 1.0)), 0.0)
    return a / (a + b)


def smooth_step_prime(y):
    y = np.asarray(y, dtype=float)
    inside = (y > 0.0) & (y < 1.0)
    yy = np.where(inside, y, 0.5)
    a = np.exp(-1.0 / yy)
    b = np.exp(-1.0 / (1.0 - yy))
    da = a / yy**2
    db = -b / (1.0 - yy) ** 2
    out = (da * (a + b) - a * (da + db)) / (a + b) ** 2
    return np.where(inside, out, 0.0)


# ---------------------------------------------------------------------------
# vacuum condition and one contact


@dataclass(frozen=True)
class VacuumVerdict:
    holds: bool
    margin: float


def vacuum_condition(u_left, u_right, m_left, m_right, z_left, z_right) -> VacuumVerdict:
    """u(+inf) - u(-inf) >= m(-inf) z(-inf) + m(+inf) z(+inf), with signed margin."""
    margin = (u_right - u_left) - (m_left * z_left + m_right * z_right)
    return VacuumVerdict(bool(margin >= 0), float(margin))


@dataclass(frozen=True)
class SingleContactSetup:
    """Constant left state and a backward rarefaction right of a jump at x = 0.

    The right state at the jump is (z_m, u_l, m_r); the rarefaction lowers z
    smoothly from z_m to z_inf over [0, width] keeping s constant.
    """

    d: float
    Q: float
    z_inf: float
    m_r: float = 1.0
    z_m: float = 1.0
    u_l: float = 0.0
    width: float = 1.0

    def __post_init__(self):
        if not self.Q > 0.0:
            raise DomainError("Q must be positive")
        if not 0.0 < self.z_inf <= self.z_m:
            raise DomainError("need 0 < z_inf <= z_m for a backward rarefaction")

    @property
    def m_l(self) -> float:
        return self.m_r * self.Q ** (-(self.d + 1.0) / (self.d - 1.0))

    @property
    def z_l(self) -> float:
        return self.z_m * self.Q ** (2.0 / (self.d - 1.0))

    @property
    def z_star(self) -> float:
        return (self.Q - 1.0) / (2.0 * self.Q) * self.z_m

    @property
    def profile(self) -> EntropyProfile:
        return EntropyProfile((self.m_l, self.m_r), (0.0,))

    def z0(self, x):
        x = np.asarray(x, dtype=float)
        return self.z_m + (self.z_inf - self.z_m) * smooth_step(x / self.width)

    def initial_data(self, x_left: float, x_right: float) -> InitialData:
        d, ml, mr, zl, zm, ul = self.d, self.m_l, self.m_r, self.z_l, self.z_m, self.u_l
        pl = ml * ml * zl ** (d + 1.0) / (d + 1.0)
        left = InitialData.constant(x_left, 0.0, ul, pl)

        def z_x(x):
            return (self.z_inf - zm) * smooth_step_prime(np.asarray(x) / self.width) / self.width

        def u(x):
            return ul + mr * zm - mr * self.z0(x)

        def p(x):
            return mr * mr * self.z0(x) ** (d + 1.0) / (d + 1.0)

        right = InitialData(0.0, x_right, u, p,
                            lambda x: -mr * z_x(x),
                            lambda x: mr * mr * self.z0(x) ** d * z_x(x))

        def pick(name):
            def f(x):
                x = np.asarray(x, dtype=float)
                return np.where(x < 0.0, getattr(left, name)(x), getattr(right, name)(x))
            return f

        return InitialData(x_left, x_right, pick("u"), pick("p"), pick("u_x"), pick("p_x"),
                           pieces=(left, right))

    def x_star(self) -> float | None:
        if self.z_inf > self.z_star:
            return None
        if self.z_inf == self.z_star:
            return self.width
        return brentq(lambda x: float(self.z0(x)) - self.z_star, 0.0, self.width, xtol=1e-14)


@dataclass(frozen=True)
class SingleContactVerdict:
    kind: str
    margin: float
    x_star: float | None
    z_star: float
    pure_backward: bool


def classify_single_contact(initial: InitialData, profile: EntropyProfile, gas: GasModel,
                            n_check: int = 2001, rel_tol: float = 1e-9) -> SingleContactVerdict:
    """Eventually noninteracting versus asymptotic vacuum from the far field.

    Data must be nowhere compressive on both sides of the single jump at
    x = 0.  When the right side is a pure backward rarefaction (s constant)
    the threshold x*, where z drops to (Q-1)/(2Q) z(0+), is located too.
    """
    if profile.n_blocks != 2 or profile.jump_x[0] != 0.0:
        raise ValueError("single-contact classification needs exactly one jump at x = 0")
    d = gas.d
    ml, mr = profile.m_values
    Q = (mr / ml) ** ((d - 1.0) / (d + 1.0))
    sides = []
    for b, (lo, hi, m) in enumerate([(initial.x_left, 0.0, ml), (0.0, initial.x_right, mr)]):
        piece = initial.for_block(b)
        xs = np.linspace(lo, hi, n_check)
        u = np.asarray(piece.u(xs), dtype=float)
        p = np.asarray(piece.p(xs), dtype=float)
        z = ((d + 1.0) * p / (m * m)) ** (1.0 / (d + 1.0))
        ux, px = piece.slopes(xs, (hi - lo) / (n_check - 1))
        c = m * z**d
        alpha, beta = ux + px / c, ux - px / c
        sides.append((xs, u, z, alpha, beta, m))
    scale = max(max(np.max(np.abs(s[3])), np.max(np.abs(s[4]))) for s in sides)
    tol = rel_tol * max(scale, 1e-300)
    for xs, _, _, alpha, beta, _ in sides:
        if np.any(alpha < -tol) or np.any(beta < -tol):
            bad = xs[np.argmin(np.minimum(alpha, beta))]
            raise HypothesisViolation(f"data is compressive near x={bad:.6g}")
    (xl, ul, zl, _, _, _), (xr, ur, zr, ar, _, _) = sides
    verdict = vacuum_condition(ul[0], ur[-1], ml, mr, zl[0], zr[-1])
    z_m = float(zr[0])
    z_star = (Q - 1.0) / (2.0 * Q) * z_m
    pure = bool(np.all(np.abs(ar) <= tol))
    x_star = None
    if pure and zr[-1] <= z_star:
        piece = initial.for_block(1)

        def zfun(x):
            return float(((d + 1.0) * piece.p(x) / (mr * mr)) ** (1.0 / (d + 1.0)))
        k = int(np.argmax(zr <= z_star))
        x_star = float(xr[k]) if k == 0 else brentq(lambda x: zfun(x) - z_star, xr[k - 1], xr[k], xtol=1e-14)
    kind = "asymptotic-vacuum" if verdict.holds else "eventually-noninteracting"
    return SingleContactVerdict(kind, verdict.margin, x_star, z_star, pure)


# ---------------------------------------------------------------------------
# reflection recurrence between a 3-contact and a 1-contact


def as_fraction(v) -> Fraction:
    """Exact rational value of an int, float, Fraction or a 'p/q' string."""
    if isinstance(v, Fraction):
        return v
    if isinstance(v, str):
        return Fraction(v.strip())
    if isinstance(v, (int, np.integer)):
        return Fraction(int(v))
    f = float(v)
    if not math.isfinite(f):
        raise ValueError(f"non-finite value {v!r}")
    return Fraction(f)


ZETA_REL_TOL = 1e-12


@dataclass
class ReflectionTrace:
    Q: Fraction
    eta: Fraction
    zeta: Fraction
    regime: str
    z_exact: list[Fraction]
    x0: float
    x1: float
    m: float
    d: float
    N_terminal: int | None = None
    zeta_snapped: bool = False
    log_t_lower: np.ndarray = field(default_factory=lambda: np.empty(0))
    log_t_upper: np.ndarray = field(default_factory=lambda: np.empty(0))

    @property
    def n(self) -> np.ndarray:
        return np.arange(len(self.z_exact))

    @property
    def z(self) -> np.ndarray:
        return np.array([float(v) for v in self.z_exact])

    @property
    def t_lower(self) -> np.ndarray:
        with np.errstate(over="ignore"):
            return np.exp(self.log_t_lower)

    @property
    def t_upper(self) -> np.ndarray:
        with np.errstate(over="ignore"):
            return np.exp(self.log_t_upper)

    @property
    def limit(self) -> float | None:
        if self.regime == "bounded-reflection":
            return float(self.zeta / (1 - self.eta))
        if self.regime == "vacuum-in-the-limit":
            return 0.0
        return None


def closed_form_z(n: int, z0: Fraction, z1: Fraction, eta: Fraction) -> Fraction:
    return (z1 - eta * z0) / (1 - eta) + eta**n * (z0 - z1) / (1 - eta)


def reflect_recurrence(z0, z1, Q, x0: float, x1: float, d: float, n_max: int = 200,
                       m: float = 1.0) -> ReflectionTrace:
    """Iterate (1+Q) z_{n+1} = 2Q z_n + (1-Q) z_{n-1} in exact arithmetic.

    Stops at n_max, or at the first N with z_N <= 0 (that N is reported and
    not stored).  The interaction times are bracketed from the wave speeds
    at both ends of each crossing and stored as logarithms.
    """
    z0f, z1f, Qf = as_fraction(z0), as_fraction(z1), as_fraction(Q)
    if not Qf > 1:
        raise ValueError("reflection recurrence needs Q > 1")
    if not (0 < z1f < z0f):
        raise ValueError("rarefactive data requires 0 < z1 < z0")
    if not x1 > x0:
        raise ValueError("need x1 > x0")
    eta = (Qf - 1) / (Qf + 1)
    zeta = z1f - eta * z0f
    snapped = False
    if zeta != 0 and abs(zeta) <= ZETA_REL_TOL * z0f:
        z1f = eta * z0f
        zeta = Fraction(0)
        snapped = True
    regime = ("bounded-reflection" if zeta > 0 else
              "vacuum-in-the-limit" if zeta == 0 else "asymptotic-vacuum")
    zs = [z0f, z1f]
    N = None
    while len(zs) <= n_max:
        nxt = (2 * Qf * zs[-1] + (1 - Qf) * zs[-2]) / (1 + Qf)
        if nxt <= 0:
            N = len(zs)
            break
        zs.append(nxt)
    zs = zs[: n_max + 1]
    tr = ReflectionTrace(Qf, eta, zeta, regime, zs, float(x0), float(x1), float(m), float(d),
                         N, snapped)
    logz = np.array([math.log(v.numerator) - math.log(v.denominator) for v in zs])
    terms = -d * logz
    base = math.log((x1 - x0) / m)
    lo = np.full(len(zs), -np.inf)
    hi = np.full(len(zs), -np.inf)
    if len(zs) > 1:
        lo[1:] = base + np.logaddexp.accumulate(terms[:-1])
        hi[1:] = base + np.logaddexp.accumulate(terms[1:])
    tr.log_t_lower, tr.log_t_upper = lo, hi
    return tr


@dataclass(frozen=True)
class DecayFit:
    exponent: float
    sr_exponent: float
    expected: float
    sandwich_ok: bool
    worst_sandwich: float
    n_range: tuple[int, int]


def decay_rate_fit(trace: ReflectionTrace, n_range: tuple[int, int] = (10, 40),
                   rtol: float = 1e-12) -> DecayFit:
    """Power-law rate of z_n and s - r against the upper interaction times."""
    if trace.regime != "vacuum-in-the-limit":
        raise ValueError(f"decay fit needs the vacuum-in-the-limit regime, got {trace.regime}")
    lo, hi = n_range
    if not (1 <= lo < hi < len(trace.z_exact)):
        raise ValueError("n_range outside the stored trace")
    d, m = trace.d, trace.m
    logz = np.array([math.log(v.numerator) - math.log(v.denominator) for v in trace.z_exact])
    idx = np.arange(lo, hi + 1)
    lt = trace.log_t_upper[idx]
    slope = np.polyfit(lt, logz[idx], 1)[0]
    log_sr = math.log(2.0 * m) + logz[idx]
    log1pt = np.logaddexp(0.0, lt)
    sr_slope = np.polyfit(log1pt, log_sr, 1)[0]

    # two-sided bound; each side is tightest at one end of the t_n bracket
    eta = float(trace.eta)
    z0 = float(trace.z_exact[0])
    c0 = m * z0**d
    dx = trace.x1 - trace.x0
    logA = math.log(c0 * (eta ** (-d) - 1.0) / dx)
    logB = math.log(c0 * (1.0 - eta**d) / dx)
    worst = 0.0
    for n in range(1, len(trace.z_exact)):
        lower = math.log(z0) - np.logaddexp(0.0, trace.log_t_lower[n] + logA) / d
        upper = math.log(z0) - np.logaddexp(0.0, trace.log_t_upper[n] + logB) / d
        worst = max(worst, lower - logz[n], logz[n] - upper)
    return DecayFit(float(slope), float(sr_slope), -1.0 / d, bool(worst <= rtol), float(worst),
                    (lo, hi))


def reflection_far_field(z0, z1, Q, m=1, u_x1=0, z_left=None) -> dict:
    """Far-field states implied by the first two reflections, in exact arithmetic.

    Outside the strip the waves are simple and the entropy is m/Q^((d+1)/(d-1))
    on both sides; only the products m_out z_out enter, so the jump
    relations m z = Q m_out z_out fix the outer states.  ``z_left`` is the
    free far-left value (default: the state reached at x0- at t1).  All
    returned values are Fractions.
    """
    z0, z1, Q, m, u_x1 = (as_fraction(v) for v in (z0, z1, Q, m, u_x1))
    m_out = m / Q  # scaled so that m_out z_out = m z / Q
    z_x0m = m * z1 / (Q * m_out)
    u_x0p = u_x1 - m * (z0 - z1)
    zl = z_x0m if z_left is None else as_fraction(z_left)
    u_left = u_x0p - m_out * (zl - z_x0m)
    z_right = (m / Q) * z0 / m_out
    return {"u_left": u_left, "u_right": u_x1, "m_left": m_out, "m_right": m_out,
            "z_left": zl, "z_right": z_right}


# ---------------------------------------------------------------------------
# two 3-contacts: certified construction of shock-free rarefactive data


class LinearZ:
    def __init__(self, Z0: float, Z1: float, T: float):
        self.Z0, self.Z1, self.T = float(Z0), float(Z1), float(T)

    def __call__(self, t):
        t = np.clip(np.asarray(t, dtype=float), 0.0, self.T)
        return self.Z0 + (self.Z1 - self.Z0) * t / self.T

    def dot(self, t):
        t = np.asarray(t, dtype=float)
        inside = (t >= 0.0) & (t <= self.T)
        return np.where(inside, (self.Z1 - self.Z0) / self.T, 0.0)


class SmoothZ:
    """C-infinity monotone transition from Z0 at t = 0 to Z1 at t = T."""

    def __init__(self, Z0: float, Z1: float, T: float):
        self.Z0, self.Z1, self.T = float(Z0), float(Z1), float(T)

    def __call__(self, t):
        return self.Z0 + (self.Z1 - self.Z0) * smooth_step(np.asarray(t, dtype=float) / self.T)

    def dot(self, t):
        return (self.Z1 - self.Z0) / self.T * smooth_step_prime(np.asarray(t, dtype=float) / self.T)


@dataclass(frozen=True)
class CertCheck:
    name: str
    lhs: float
    rhs: float
    ok: bool

    @property
    def margin(self) -> float:
        return self.rhs - self.lhs


@dataclass
class Certificate:
    checks: list[CertCheck]
    constants: dict

    @property
    def passed(self) -> bool:
        return all(c.ok for c in self.checks)

    @property
    def failed(self) -> list[str]:
        return [c.name for c in self.checks if not c.ok]


@dataclass
class TwoContactConstruction:
    profile: EntropyProfile
    initial: InitialData
    certificate: Certificate
    x: np.ndarray
    u: np.ndarray
    p: np.ndarray
    z: np.ndarray
    X_star: float
    T_star: float
    x_left: float
    x_right: float


def _check(name, lhs, rhs, strict=True):
    ok = bool(lhs < rhs) if strict else bool(lhs <= rhs)
    return CertCheck(name, float(lhs), float(rhs), ok)


def two_contact_certificate(Q0, Q1, x0, x1, T, Z, d, Z_upper=None, Z_lower=None,
                            n_eval: int = 2001) -> Certificate:
    """Evaluate every inequality of the two-contact construction."""
    Q0, Q1, T = float(Q0), float(Q1), float(T)
    e = 2.0 / (d - 1.0)
    ts = np.linspace(0.0, T, n_eval)
    Zs = np.asarray(Z(ts), dtype=float)
    Zd = np.asarray(Z.dot(ts), dtype=float)
    Z0, ZT = float(Zs[0]), float(Zs[-1])
    Zu = Z0 if Z_upper is None else float(Z_upper)
    Zl = ZT * (Q0 * Q1) ** (-e) if Z_lower is None else float(Z_lower)
    m0 = 1.0
    m1 = m0 * Q0 ** ((d + 1.0) / (d - 1.0))
    m2 = m1 * Q1 ** ((d + 1.0) / (d - 1.0))
    L = x1 - x0
    minR = (Zl / Zu) ** (0.5 * d)
    Rratio = (Zu / Zl) ** (0.5 * d)
    maxK1 = d * Rratio / (2.0 * m1 * m1 * Zl ** (d + 1.0))
    maxK2 = d * Rratio / (2.0 * m2 * m2 * Zl ** (d + 1.0))
    C1 = m1 * Zu**d
    c_min1 = m1 * Zl**d
    c_max2 = m2 * Zu**d
    cbar2 = m1 * (ZT * Q0 ** (-e)) ** d
    X_minus_x1 = c_max2 * (T + L / cbar2)
    K1 = minR / ((1.0 + Q0) * maxK1)
    K2 = 2.0 * minR**2 * c_min1 / ((Q1 - 1.0) * (Q0 - 1.0) * maxK2 * c_max2) if Q1 > 1 and Q0 > 1 else math.inf
    slope = float(np.max(-Zd))
    checks = [
        _check("Q0>1", 1.0, Q0),
        _check("Q1>1", 1.0, Q1),
        _check("Z>0", 0.0, float(np.min(Zs))),
        _check("Z decreasing", float(np.max(Zd)), 0.0, strict=False),
        _check("range: Z(0)<=Z^*", Z0, Zu * (1 + 1e-15), strict=False),
        _check("range: Z(T)<=Z(0)", ZT, Z0, strict=False),
        _check("range: Z(T)>=(Q0 Q1)^(2/(d-1)) Z_*", (Q0 * Q1) ** e * Zl, ZT * (1 + 1e-15), strict=False),
        _check("geometric: x1-x0>=C1 T", C1 * T, L, strict=False),
        _check("z1", slope, minR / (L * (1.0 + Q0) * maxK1)),
        _check("z2", slope, 2.0 * minR**2 / ((Q1 - 1.0) * (Q0 - 1.0) * X_minus_x1 * maxK2)
               if Q1 > 1 and Q0 > 1 else math.inf),
        _check("zeq", slope, min(K1 / L, K2 / (L + cbar2 * T))),
    ]
    constants = dict(d=d, Q0=Q0, Q1=Q1, x0=x0, x1=x1, T=T, Z_upper=Zu, Z_lower=Zl,
                     m0=m0, m1=m1, m2=m2, minR=minR, maxK1=maxK1, maxK2=maxK2, C1=C1,
                     cbar2=cbar2, c_min1=c_min1, c_max2=c_max2, K1=K1, K2=K2,
                     X_minus_x1_bound=X_minus_x1, max_neg_Zdot=slope)
    return Certificate(checks, constants)


def _goursat(tb, sb, rb, m, d):
    """Characteristic grid of a Cauchy problem posed on a line x = const.

    ``tb`` are increasing boundary times with invariants (sb, rb).  Node
    (i, j), i < j, is the crossing of the forward characteristic leaving the
    boundary at tb[i] and the backward one through tb[j]; it carries s = sb[i]
    and r = rb[j] exactly.  Returns displacement X (from the line) and time
    arrays with NaN below the diagonal.
    """
    n = tb.size
    X = np.full((n, n), np.nan)
    Tt = np.full((n, n), np.nan)
    idx = np.arange(n)
    X[idx, idx] = 0.0
    Tt[idx, idx] = tb
    c = m * np.maximum((sb[:, None] - rb[None, :]) / (2.0 * m), 0.0) ** d
    for k in range(1, n):
        i = np.arange(n - k)
        j = i + k
        cA, cB, cP = c[i, j - 1], c[i + 1, j], c[i, j]
        cf = 0.5 * (cA + cP)
        cb = 0.5 * (cB + cP)
        xA, tA = X[i, j - 1], Tt[i, j - 1]
        xB, tB = X[i + 1, j], Tt[i + 1, j]
        tP = (xB + cb * tB - xA + cf * tA) / (cf + cb)
        X[i, j] = xA + cf * (tP - tA)
        Tt[i, j] = tP
    return X, Tt


def _trace_t0(X, Tt, sb, rb):
    """Points where backward characteristics cross t = 0: (x, s, r)."""
    xs, ss, rs = [], [], []
    n = sb.size
    for j in range(1, n):
        t_col = Tt[:j + 1, j][::-1]   # i = j, j-1, ..., 0: t decreasing, x increasing
        x_col = X[:j + 1, j][::-1]
        s_col = sb[:j + 1][::-1]
        k = np.flatnonzero((t_col[:-1] >= 0.0) & (t_col[1:] < 0.0))
        if k.size == 0:
            continue
        k = k[0]
        w = t_col[k] / (t_col[k] - t_col[k + 1])
        xs.append(x_col[k] + w * (x_col[k + 1] - x_col[k]))
        ss.append(s_col[k] + w * (s_col[k + 1] - s_col[k]))
        rs.append(rb[j])
    return np.array(xs), np.array(ss), np.array(rs)


def _crossing(X, Tt, sb, rb, L):
    """Along each forward characteristic, the point where it reaches x = L."""
    ts, ss, rs = [], [], []
    n = sb.size
    for i in range(n - 1):
        x_row = X[i, i:]
        t_row = Tt[i, i:]
        k = np.flatnonzero((x_row[:-1] <= L) & (x_row[1:] > L))
        if k.size == 0:
            continue
        k = k[0]
        w = (L - x_row[k]) / (x_row[k + 1] - x_row[k])
        ts.append(t_row[k] + w * (t_row[k + 1] - t_row[k]))
        rs.append(rb[i + k] + w * (rb[i + k + 1] - rb[i + k]))
        ss.append(sb[i])
    return np.array(ts), np.array(ss), np.array(rs)


def construct_shockfree_two_contacts(Q0, Q1, x0, x1, T, Z, gas: GasModel,
                                     Z_upper=None, Z_lower=None, n_grid: int = 600,
                                     pad: float = 0.5) -> TwoContactConstruction:
    """Certified rarefactive initial data with 3-contacts at x0 and x1.

    The data on x0- is s = 0, r = -2 Z(t) with m = 1 to the left.  After every
    inequality passes, the Cauchy data are evolved in x across both jumps and
    the t = 0 trace is returned.  Violations raise HypothesisViolation.
    """
    d = gas.d
    cert = two_contact_certificate(Q0, Q1, x0, x1, T, Z, d, Z_upper, Z_lower)
    if not cert.passed:
        worst = [c for c in cert.checks if not c.ok]
        msg = "; ".join(f"{c.name}: {c.lhs:.6g} vs {c.rhs:.6g}" for c in worst)
        raise HypothesisViolation(f"construction hypotheses violated: {msg}", cert)
    k = cert.constants
    m0, m1, m2 = k["m0"], k["m1"], k["m2"]
    L = x1 - x0
    c_lo = min(m1, m2) * k["Z_lower"] ** d
    span2 = k["X_minus_x1_bound"] * 1.2 + pad
    W = 1.2 * (L + span2) / c_lo

    # block 1: Cauchy data on x0+ from s = 0, r = -2 Z at x0-
    tb = np.linspace(-W, T + W, n_grid)
    Zb = np.asarray(Z(tb), dtype=float)
    r_plus, s_plus = contact_rs_map(-2.0 * Zb, np.zeros_like(Zb), Q0)
    X1, T1 = _goursat(tb, s_plus, r_plus, m1, d)
    xa, sa, ra = _trace_t0(X1, T1, s_plus, r_plus)
    keep = (xa >= 0.0) & (xa <= L)
    xa, sa, ra = xa[keep] + x0, sa[keep], ra[keep]
    tc, sc, rc = _crossing(X1, T1, s_plus, r_plus, L)
    # exact end states at x0+ and x1- (both at t = 0)
    xa = np.concatenate([[x0], xa, [x1]])
    sa = np.concatenate([[np.interp(0.0, tb, s_plus)], sa, [np.interp(0.0, tc, sc)]])
    ra = np.concatenate([[np.interp(0.0, tb, r_plus)], ra, [np.interp(0.0, tc, rc)]])

    # block 2: Cauchy data on x1+ from the forward crossings of x1
    r2, s2 = contact_rs_map(rc, sc, Q1)
    X2, T2 = _goursat(tc, s2, r2, m2, d)
    xb, sb_, rb_ = _trace_t0(X2, T2, s2, r2)
    keep = (xb >= 0.0) & (xb <= span2)
    xb, sb_, rb_ = xb[keep] + x1, sb_[keep], rb_[keep]
    xb = np.concatenate([[x1], xb])
    sb_ = np.concatenate([[np.interp(0.0, tc, s2)], sb_])
    rb_ = np.concatenate([[np.interp(0.0, tc, r2)], rb_])
    if xb.size < 8 or xa.size < 8:
        raise HypothesisViolation("characteristic grid too coarse to resolve the trace", cert)

    iT = int(np.argmin(np.abs(tb - T)))
    T_star = float(np.interp(L, X1[iT, iT:], T1[iT, iT:]))
    r_far = rb_[-1]
    moving = np.abs(rb_ - r_far) > 1e-12 * max(1.0, abs(r_far))
    X_star = float(xb[np.flatnonzero(moving)[-1]]) if np.any(moving) else x1

    Z0 = float(Z(0.0))
    x_left = x0 - pad
    x_right = max(X_star, x1) + pad
    xa, ra, sa = _dedupe(xa, ra, sa)
    xb, rb_, sb_ = _dedupe(xb, rb_, sb_)
    if xb[-1] < x_right:
        # far-right constant state
        xe = np.linspace(xb[-1], x_right, 8)[1:]
        xb = np.concatenate([xb, xe])
        rb_ = np.concatenate([rb_, np.full(xe.size, rb_[-1])])
        sb_ = np.concatenate([sb_, np.full(xe.size, sb_[-1])])
    p_left = m0 * m0 * Z0 ** (d + 1.0) / (d + 1.0)
    left = InitialData.constant(x_left, x0, -Z0, p_left)
    mid = InitialData.from_invariants(xa, ra, sa, m1, d)
    right = InitialData.from_invariants(xb, rb_, sb_, m2, d)
    edges = np.array([x0, x1])

    def pick(name):
        parts = (left, mid, right)

        def f(x):
            x = np.asarray(x, dtype=float)
            b = np.searchsorted(edges, x, side="right")
            out = np.empty(x.shape)
            for k_, part in enumerate(parts):
                sel = b == k_
                if np.any(sel):
                    out[sel] = getattr(part, name)(x[sel])
            return out
        return f

    init = InitialData(x_left, x_right, pick("u"), pick("p"), pick("u_x"), pick("p_x"),
                       pieces=(left, mid, right))
    xs = np.concatenate([np.linspace(x_left, x0, 8)[:-1], xa, xb])
    us = init.u(xs)
    ps = init.p(xs)
    ms = np.where(xs < x0, m0, np.where(xs < x1, m1, m2))
    zs = ((d + 1.0) * ps / ms**2) ** (1.0 / (d + 1.0))
    prof = EntropyProfile((m0, m1, m2), (x0, x1))
    return TwoContactConstruction(prof, init, cert, xs, us, ps, zs, X_star, T_star,
                                  x_left, x_right)


def _dedupe(x, *ys):
    order = np.argsort(x)
    x = x[order]
    keep = np.concatenate([[True], np.diff(x) > 1e-12 * max(1.0, np.max(np.abs(x)))])
    return (x[keep], *(y[order][keep] for y in ys))


# ---------------------------------------------------------------------------
# single shock with a stationary state behind it


@dataclass
class ShockTrace:
    a: np.ndarray
    x: np.ndarray
    dx_da: np.ndarray
    t: np.ndarray
    z0: np.ndarray
    u0: np.ndarray
    M0: float
    z1: np.ndarray
    U1: float
    P1: float
    m1: np.ndarray
    xi: np.ndarray
    r_x: np.ndarray
    s_x: np.ndarray
    rh_max: float
    family: str
    a_range: tuple[float, float]
    truncation: str | None
    focusing_time: float
    within_bound: bool | None
    x_of_a: Callable = field(repr=False, default=None)
    dx_of_a: Callable = field(repr=False, default=None)
    d: float = 2.0


def _shock_side_state(a, P1, M0, U1, fam, d):
    f = hugoniot_f(a, d)
    g, h = hugoniot_g_h(a, d)
    z0 = ((d + 1.0) * P1 / (M0 * M0 * f * f * a ** (d + 1.0))) ** (1.0 / (d + 1.0))
    u0 = U1 - fam * M0 * z0 * g
    xi = fam * M0 * z0**d * h
    return f, g, h, z0, u0, xi


def shock_invariant_derivatives(a, P1, M0, U1, fam, d):
    """d r0/da and d s0/da on the isentropic side, in closed form."""
    a = np.asarray(a, dtype=float)
    f, g, h, z0, u0, xi = _shock_side_state(a, P1, M0, U1, fam, d)
    w = a ** (d - 1.0)
    dw = (d - 1.0) * a ** (d - 2.0)
    dlnf2 = (d / (d * w - 1.0) - 1.0 / w + 1.0 / (d - w)) * dw - 2.0 / a
    dlnz0 = -dlnf2 / (d + 1.0) - 1.0 / a
    dlng = dw * (1.0 / (w - 1.0) - 0.5 / w + 0.5 / (d - w))
    dz0 = z0 * dlnz0
    dg = g * dlng
    du0 = -fam * M0 * (dz0 * g + z0 * dg)
    return du0 - M0 * dz0, du0 + M0 * dz0


def trace_single_shock(x_of_a, a_range, U1: float, P1: float, M0: float, family: str,
                       gas: GasModel, dx_da=None, n: int = 201, a_ref: float | None = None,
                       t_ref: float = 0.0, focusing_bound: float | None = None,
                       quad_tol: float = 1e-12) -> ShockTrace:
    """Shock curve parameterized by a = z1/z0 with a stationary state behind.

    ``x_of_a`` is either a callable (with ``dx_da`` its derivative) or a pair
    of arrays ``(a_samples, x_samples)`` (optionally a triple with slopes).
    """
    d = gas.d
    fam = 1 if family == "forward" else -1 if family == "backward" else None
    if fam is None:
        raise ValueError(f"unknown family {family!r}")
    if not (P1 > 0.0 and M0 > 0.0):
        raise DomainError("P1 and M0 must be positive")
    if callable(x_of_a):
        xf = x_of_a
        if dx_da is None:
            def dxf(a, _f=xf):
                eps = 1e-6 * np.maximum(1.0, np.abs(a))
                return (_f(a + eps) - _f(a - eps)) / (2 * eps)
        else:
            dxf = dx_da
    else:
        arrs = [np.asarray(v, dtype=float) for v in x_of_a]
        a_s = arrs[0]
        if a_s.size < 2 or np.any(np.diff(a_s) <= 0.0):
            raise ValueError("shock parameter samples must be strictly increasing (a varies)")
        sp = CubicHermiteSpline(a_s, arrs[1], arrs[2]) if len(arrs) > 2 else CubicSpline(a_s, arrs[1])
        xf, dxf = sp, sp.derivative()
        a_range = (max(a_range[0], a_s[0]), min(a_range[1], a_s[-1]))

    lo_dom, hi_dom = hugoniot_domain(d)
    lo, hi = float(a_range[0]), float(a_range[1])
    reasons = []
    eps = 1e-9
    if lo <= 1.0 + eps:
        reasons.append(f"lower end {lo:.6g} moved inside (1, ...)")
        lo = 1.0 + max(eps, 1e-6)
    if hi >= hi_dom - eps:
        reasons.append(f"upper end {hi:.6g} moved inside the Hugoniot domain")
        hi = hi_dom * (1.0 - 1e-6)
    if not hi > lo:
        raise DomainError("empty parameter range after truncation")
    a = np.linspace(lo, hi, n)
    x = np.asarray(xf(a), dtype=float)
    xp = np.asarray(dxf(a), dtype=float)
    f, g, h, z0, u0, xi = _shock_side_state(a, P1, M0, U1, fam, d)
    if np.any(xi == 0.0):
        raise DomainError("zero shock speed encountered")
    z1 = a * z0
    m1 = M0 * f

    def integrand(s):
        _, _, _, _, _, xis = _shock_side_state(s, P1, M0, U1, fam, d)
        return float(dxf(s)) / xis

    a_ref = lo if a_ref is None else float(a_ref)
    t = np.empty(n)
    # cumulative quadrature between consecutive samples, anchored at a_ref
    seg = np.array([quad(integrand, a[k], a[k + 1], epsabs=0.0, epsrel=quad_tol, limit=200)[0]
                    for k in range(n - 1)])
    t[0] = 0.0
    t[1:] = np.cumsum(seg)
    shift = quad(integrand, lo, a_ref, epsabs=0.0, epsrel=quad_tol, limit=200)[0] if a_ref != lo else 0.0
    t = t_ref + t - shift

    dr, ds = shock_invariant_derivatives(a, P1, M0, U1, fam, d)
    with np.errstate(divide="ignore", invalid="ignore"):
        r_x = dr / (xp * (1.0 + fam / h))
        s_x = ds / (xp * (1.0 - fam / h))
    rh = 0.0
    for k in range(n):
        s0 = ThermoState(float(z0[k]), float(u0[k]), M0)
        s1 = ThermoState(float(z1[k]), U1, float(m1[k]))
        rh = max(rh, *rh_residuals(s0, s1, float(xi[k]), gas))
    k1 = 0.5 * d * z0 ** (d - 1.0)
    comp = np.concatenate([np.where(r_x < 0, 1.0 / (k1 * np.abs(r_x)), np.inf),
                           np.where(s_x < 0, 1.0 / (k1 * np.abs(s_x)), np.inf)])
    focus = float(np.min(comp)) if comp.size else math.inf
    within = None
    if focusing_bound is not None:
        within = bool(np.all(np.abs(r_x) <= focusing_bound) and np.all(np.abs(s_x) <= focusing_bound))
    return ShockTrace(a, x, xp, t, z0, u0, M0, z1, U1, P1, m1, xi, r_x, s_x, rh, family,
                      (lo, hi), "; ".join(reasons) or None, focus, within, xf, dxf, d)


def log_divergence_check(trace: ShockTrace, delta: float, eps: float, bound: float | None = None,
                         n: int = 2001):
    """Check x(1+delta) - x(1+eps) >= nu log(delta/eps) on the trace.

    With a gradient ``bound`` B, nu is the a-priori rate
    inf (a-1) |dr/da| / (B |1 + fam/h|) (and the s counterpart), which any
    trace with |r_x|, |s_x| <= B must respect.  Without a bound nu is the
    observed inf (a-1) x'(a), a diagnostic only.
    """
    if not 0.0 < eps < delta:
        raise ValueError("need 0 < eps < delta")
    aa = np.linspace(1.0 + eps, 1.0 + delta, n)
    if bound is None:
        nu = float(np.min((aa - 1.0) * np.asarray(trace.dx_of_a(aa), dtype=float)))
    else:
        if not bound > 0.0:
            raise ValueError("gradient bound must be positive")
        d = trace.d
        fam = 1 if trace.family == "forward" else -1
        _, _, h, _, _, _ = _shock_side_state(aa, trace.P1, trace.M0, trace.U1, fam, d)
        dr, ds = shock_invariant_derivatives(aa, trace.P1, trace.M0, trace.U1, fam, d)
        need = np.maximum(np.abs(dr) / np.abs(1.0 + fam / h), np.abs(ds) / np.abs(1.0 - fam / h))
        nu = float(np.min((aa - 1.0) * need)) / bound
    lhs = float(trace.x_of_a(1.0 + delta) - trace.x_of_a(1.0 + eps))
    rhs = nu * math.log(delta / eps)
    return lhs, rhs, nu, bool(nu > 0.0 and lhs >= rhs * (1.0 - 1e-9))
