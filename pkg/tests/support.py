"""Scenario builders and independent oracles shared by the test modules."""

from __future__ import annotations

import math
import time
from contextlib import contextmanager

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq, minimize_scalar

from shockfree.gas import gas_from_d
from shockfree.gradients import CharPath
from shockfree.mesh import CharMesh, CharTrack, EntropyProfile, Snapshot
from shockfree.moc import InitialData
from shockfree.scenarios import smooth_step, smooth_step_prime


# ---------------------------------------------------------------------------
# physical-variable oracles (written from p = K exp(S/c_v) tau^-gamma directly)


def physical_hugoniot(tau0, p0, tau1, gamma):
    """p1 on the Hugoniot locus through (tau0, p0), from the energy relation."""
    gp, gm = gamma + 1.0, gamma - 1.0
    return p0 * (gp * tau0 - gm * tau1) / (gp * tau1 - gm * tau0)


def physical_shock(Z, d, z0=1.0, m0=1.0):
    """(f, g, h) for a shock with z1/z0 = Z, computed in (tau, p) variables."""
    gamma = (d + 1.0) / (d - 1.0)
    tau0 = z0 ** (1.0 - d) / (d - 1.0)
    tau1 = (Z * z0) ** (1.0 - d) / (d - 1.0)
    p0 = m0 * m0 * z0 ** (d + 1.0) / (d + 1.0)
    p1 = physical_hugoniot(tau0, p0, tau1, gamma)
    f = math.sqrt(p1 * tau1**gamma / (p0 * tau0**gamma))
    g = math.sqrt(-(p1 - p0) * (tau1 - tau0)) / (m0 * z0)
    h = math.sqrt((p1 - p0) / (tau0 - tau1)) / (m0 * z0**d)
    return f, g, h


# ---------------------------------------------------------------------------
# simple waves


def simple_wave_data(amp=0.4, d=2.0, m=1.0, r0=-1.0, x_left=0.0, x_right=4.0, centre=0.5):
    """Forward simple wave: r = r0 everywhere, z = 1 + amp * step(x - centre).

    ``amp > 0`` is rarefactive, ``amp < 0`` compressive.
    """
    def z(x):
        return 1.0 + amp * smooth_step(np.asarray(x, dtype=float) - centre)

    def zx(x):
        return amp * smooth_step_prime(np.asarray(x, dtype=float) - centre)

    init = InitialData(
        x_left, x_right,
        lambda x: r0 + m * z(x),
        lambda x: m * m * z(x) ** (d + 1.0) / (d + 1.0),
        lambda x: m * zx(x),
        lambda x: m * m * z(x) ** d * zx(x),
    )
    return init, z, zx


def simple_wave_exact_z(z0, x, t, d=2.0, m=1.0):
    """z(x, t) of the forward simple wave by inverting x = xi + c(xi) t."""
    out = np.empty(np.shape(x))
    for k, xx in enumerate(np.ravel(x)):
        out.flat[k] = z0(brentq(lambda xi: xi + m * float(z0(xi)) ** d * t - xx, xx - 10.0, xx + 1.0,
                                xtol=1e-15))
    return out


def simple_wave_shock_time(zx, z, d=2.0, m=1.0, lo=0.5, hi=1.5):
    """Earliest gradient blowup of a compressive forward simple wave.

    Along each forward characteristic alpha = 2 m z_x solves
    alpha' = -k1 alpha^2 with constant k1, so the blowup time is
    1 / (k1 |alpha0|) minimized over the starting point.
    """
    def tb(x):
        a = 2.0 * m * float(zx(x))
        if a >= 0.0:
            return math.inf
        return 1.0 / (0.5 * d * float(z(x)) ** (d - 1.0) * abs(a))

    xs = np.linspace(lo, hi, 2001)
    k = int(np.argmin([tb(x) for x in xs]))
    res = minimize_scalar(tb, bracket=(xs[max(k - 1, 0)], xs[k], xs[min(k + 1, xs.size - 1)]),
                          tol=1e-12)
    return float(res.fun)


# ---------------------------------------------------------------------------
# characteristic paths for the Riccati / Lax comparison


def isentropic_path(d, family, b0, b1, omega=3.0, length=0.8, z_start=1.0, m=1.0, n=1001):
    """A consistent path with opposite-family gradient b0 + b1 sin(omega x).

    In an isentropic region the z-change along a forward path is
    dz/dx = -beta/m and along a backward path dz/dx = alpha/m, so z(x) is
    known in closed form; t(x) follows from dx/dt = +-c.
    """
    sg = 1.0 if family == "forward" else -1.0

    def other(x):
        return b0 + b1 * np.sin(omega * np.asarray(x, dtype=float))

    def z_of_x(x):
        x = np.asarray(x, dtype=float)
        prim = b0 * x - b1 * (np.cos(omega * x) - 1.0) / omega
        return z_start - sg * prim / m

    x_end = sg * length
    sol = solve_ivp(lambda x, t: [sg / (m * float(z_of_x(x)) ** d)], (0.0, x_end), [0.0],
                    rtol=1e-13, atol=1e-15, dense_output=True)
    xs = np.linspace(0.0, x_end, n)
    ts = sol.sol(xs)[0]
    return CharPath(ts, z_of_x(xs), 0.0, other(xs)), z_of_x, x_end


# ---------------------------------------------------------------------------
# two-block data with a compressive backward wave right of the jump


def backward_compression_data(m_l, m_r, d, amp=0.4, s0=2.0, x_left=-1.0, x_right=3.0, centre=0.5):
    """Constant state left of x = 0 and a compressive backward wave to the right.

    u and p are continuous; for x > 0 the invariant s = u + m_r z is constant
    and z rises with x, so r_x = -2 m_r z_x < 0.
    """
    def z(x):
        return 1.0 + amp * smooth_step(np.asarray(x, dtype=float) - centre)

    def zx(x):
        return amp * smooth_step_prime(np.asarray(x, dtype=float) - centre)

    init = InitialData(
        x_left, x_right,
        lambda x: s0 - m_r * z(x),
        lambda x: m_r * m_r * z(x) ** (d + 1.0) / (d + 1.0),
        lambda x: -m_r * zx(x),
        lambda x: m_r * m_r * z(x) ** d * zx(x),
    )
    return init, EntropyProfile((m_l, m_r), (0.0,))


def forward_rarefaction_data(m_l, m_r, d, amp=0.2, r0=-1.0, x_left=-3.0, x_right=2.0, centre=-2.0):
    """Forward rarefaction left of a jump at x = 0, constant state beyond.

    On the left r = r0 and z = z_l(x) rises; the state is carried across
    the jump with continuous u and p.
    """
    def z(x):
        return 1.0 + amp * smooth_step(np.asarray(x, dtype=float) - centre)

    def zx(x):
        return amp * smooth_step_prime(np.asarray(x, dtype=float) - centre)

    init = InitialData(
        x_left, x_right,
        lambda x: r0 + m_l * z(x),
        lambda x: m_l * m_l * z(x) ** (d + 1.0) / (d + 1.0),
        lambda x: m_l * zx(x),
        lambda x: m_l * m_l * z(x) ** d * zx(x),
    )
    return init, EntropyProfile((m_l, m_r), (0.0,))


# ---------------------------------------------------------------------------
# strip data between a 3-contact at x0 and a 1-contact at x1


def strip_data(d=2.0, Q=2.0, m=1.0, zA=1.0, zB=0.9, du=0.3, x0=0.0, x1=1.0, x_left=-1.0, x_right=2.0):
    """Rarefactive data u: 0 -> du, z: zA -> zB across [x0, x1].

    The entropy is m inside the strip and m Q^(-(d+1)/(d-1)) outside, so
    x0 is a 3-contact and x1 a 1-contact; u and p are continuous.
    """
    m_out = m * Q ** (-(d + 1.0) / (d - 1.0))
    w = x1 - x0

    def y(x):
        return (np.asarray(x, dtype=float) - x0) / w

    def z(x):
        return zA + (zB - zA) * smooth_step(y(x))

    def zx(x):
        return (zB - zA) * smooth_step_prime(y(x)) / w

    init = InitialData(
        x_left, x_right,
        lambda x: du * smooth_step(y(x)),
        lambda x: m * m * z(x) ** (d + 1.0) / (d + 1.0),
        lambda x: du * smooth_step_prime(y(x)) / w,
        lambda x: m * m * z(x) ** d * zx(x),
    )
    return init, EntropyProfile((m_out, m, m_out), (x0, x1))


def strip_first_reflection(zA, zB, du, Q, m=1.0):
    """z at x1 after the first reflection, from the invariants of the corner waves."""
    return zA / (1.0 + Q) + Q / (1.0 + Q) * (zB - du / m)


# ---------------------------------------------------------------------------
# synthetic meshes for the R/C checker


def synthetic_track(family, own, other, t=None, x=None):
    own = np.asarray(own, dtype=float)
    other = np.asarray(other, dtype=float)
    n = own.size
    t = np.linspace(0.0, 1.0, n) if t is None else np.asarray(t, dtype=float)
    x = np.linspace(0.0, 0.5, n) if x is None else np.asarray(x, dtype=float)
    alpha, beta = (own, other) if family == "forward" else (other, own)
    ones = np.ones(n)
    return CharTrack(family, float(x[0]), t, x, ones, -ones, alpha, beta, ones, ones,
                     np.zeros(n, dtype=int))


def synthetic_mesh(tracks, m_values=(1.0, 2.0), jump_x=(0.0,), grad_scale=1.0, d=2.0):
    prof = EntropyProfile(tuple(m_values), tuple(jump_x))
    snap = Snapshot(0.0, np.zeros(1), np.zeros(1, dtype=int), *(np.ones(1) for _ in range(7)))
    return CharMesh(prof, d, -1.0, 1.0, 1.0, 1.0, [snap], [], list(tracks), grad_scale)


def unit_gas_d(d):
    return gas_from_d(float(d))


# ---------------------------------------------------------------------------
# acceptance reporting


ACCEPTANCE_LINES: list[str] = []


@contextmanager
def criterion(number, limit, what):
    """Time one acceptance criterion and record a single pass/fail line."""
    t0 = time.perf_counter()
    note = {}
    try:
        yield note
    except BaseException as exc:
        status, extra = "FAIL", f"{type(exc).__name__}: {str(exc).splitlines()[0] if str(exc) else ''}"
        raise
    else:
        elapsed = time.perf_counter() - t0
        status = "PASS" if elapsed < limit else "FAIL"
        extra = "" if status == "PASS" else f"runtime {elapsed:.2f} s exceeds {limit} s"
        if status == "FAIL":
            raise AssertionError(extra)
    finally:
        elapsed = time.perf_counter() - t0
        detail = ", ".join(f"{k}={v}" for k, v in note.items())
        line = f"criterion {number}: {status} [{elapsed:.2f} s < {limit} s] {what}"
        line += f" ({detail})" if detail else ""
        line += f" {extra}" if extra else ""
        ACCEPTANCE_LINES.append(line)
        print(line)
