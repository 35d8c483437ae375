"""Characteristic solver for shock-free flow over piecewise-constant entropy.

Each entropy block carries its own uniform Lagrangian grid; the nodes at an
entropy jump are duplicated so the left and right one-sided states are kept
separately.  Every node stores the Riemann invariants (s, r) together with
their x-derivatives (alpha, beta).  A time step traces the forward and
backward characteristics through each node back to the previous time level
(trapezoidal positions, fixed-point iteration), interpolates s and r there by
cubic Hermite interpolation using alpha and beta as slopes, and advances the
gradients with the exact solution of their Riccati equation with
step-averaged coefficients.  Jump nodes are resolved with the linear
invariant map; outer boundaries admit no incoming waves.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.interpolate import CubicSpline, PchipInterpolator
from scipy.special import exprel

from .gas import GasModel, pressure
from .mesh import CharMesh, CharTrack, ContactColumn, EntropyProfile, Snapshot
from .waves import contact_resolve


class SolverError(RuntimeError):
    """The characteristic iteration failed even after step refinement."""


def _fd4(f, x, eps):
    return (-f(x + 2 * eps) + 8 * f(x + eps) - 8 * f(x - eps) + f(x - 2 * eps)) / (12 * eps)


@dataclass
class InitialData:
    """Velocity and pressure on [x_left, x_right]; both continuous across jumps."""

    x_left: float
    x_right: float
    u: Callable
    p: Callable
    u_x: Callable | None = None
    p_x: Callable | None = None
    pieces: Sequence["InitialData"] | None = None  # optional per-block data

    def for_block(self, b: int) -> "InitialData":
        return self if self.pieces is None else self.pieces[b]

    @classmethod
    def from_samples(cls, x, u, p) -> "InitialData":
        x = np.asarray(x, dtype=float)
        su, sp = CubicSpline(x, u), CubicSpline(x, p)
        return cls(float(x[0]), float(x[-1]), su, sp, su.derivative(), sp.derivative())

    @classmethod
    def from_invariants(cls, x, r, s, m: float, d: float) -> "InitialData":
        """Monotone (PCHIP) interpolation of r and s inside one block.

        Monotone samples give gradients of one sign, so rarefactive samples
        stay rarefactive between the nodes.
        """
        x = np.asarray(x, dtype=float)
        ir, is_ = PchipInterpolator(x, r), PchipInterpolator(x, s)
        dr, ds = ir.derivative(), is_.derivative()

        def z(q):
            return (is_(q) - ir(q)) / (2.0 * m)

        return cls(float(x[0]), float(x[-1]),
                   lambda q: 0.5 * (ir(q) + is_(q)),
                   lambda q: m * m * z(q) ** (d + 1.0) / (d + 1.0),
                   lambda q: 0.5 * (dr(q) + ds(q)),
                   lambda q: 0.5 * m * z(q) ** d * (ds(q) - dr(q)))

    @classmethod
    def constant(cls, x_left, x_right, u0, p0) -> "InitialData":
        return cls(x_left, x_right,
                   lambda x: np.full(np.shape(x), float(u0)),
                   lambda x: np.full(np.shape(x), float(p0)),
                   lambda x: np.zeros(np.shape(x)),
                   lambda x: np.zeros(np.shape(x)))

    def slopes(self, x, h):
        eps = 1e-3 * h
        ux = self.u_x(x) if self.u_x is not None else _fd4(self.u, x, eps)
        px = self.p_x(x) if self.p_x is not None else _fd4(self.p, x, eps)
        return np.asarray(ux, dtype=float), np.asarray(px, dtype=float)


@dataclass
class MocOptions:
    h: float = 0.02
    block_h: Sequence[float] | None = None
    cfl: float = 0.8
    tol: float = 1e-11
    max_iter: int = 50
    max_halvings: int = 10
    grad_sweeps: int = 3
    blowup_threshold: float = 1e8
    blowup_lookahead: float = 20.0  # declare blowup when predicted within this many steps
    quiet_rel: float = 1e-9
    n_snapshots: int = 100
    n_tracks: int = 32
    track_starts: Sequence[tuple[float, str]] | None = None
    track_samples: int = 2000
    zigzag: Sequence[tuple[float, str, float, float]] = ()
    stop_on_blowup: bool = True
    max_steps: int = 2_000_000


@dataclass
class ShockEvent:
    x: float
    t: float
    family: str


@dataclass
class ZigzagTrack:
    """A characteristic that reflects between two jump locations."""

    x_lo: float
    x_hi: float
    bounce_t: list[float] = field(default_factory=list)
    bounce_x: list[float] = field(default_factory=list)
    bounce_z: list[float] = field(default_factory=list)


@dataclass
class RunOutcome:
    status: str
    mesh: CharMesh
    shock: ShockEvent | None = None
    T_noninteracting: float | None = None
    vacuum: "VacuumReport | None" = None
    n_steps: int = 0
    zigzags: list[ZigzagTrack] = field(default_factory=list)

    def summary(self) -> dict:
        out = {
            "status": self.status,
            "t_end": self.mesh.t_end,
            "horizon": self.mesh.horizon,
            "n_steps": self.n_steps,
            "n_contacts": len(self.mesh.contacts),
        }
        if self.shock is not None:
            out.update(shock_x=self.shock.x, shock_t=self.shock.t, shock_family=self.shock.family)
        if self.T_noninteracting is not None:
            out["T_noninteracting"] = self.T_noninteracting
        if self.vacuum is not None:
            out["vacuum_kind"] = self.vacuum.kind
            if self.vacuum.x_star is not None:
                out["vacuum_x_star"] = self.vacuum.x_star
        return out


# ---------------------------------------------------------------------------
# grid helpers


class _Grid:
    def __init__(self, profile: EntropyProfile, x_left, x_right, opts: MocOptions):
        edges = [x_left, *profile.jump_x, x_right]
        if any(b <= a for a, b in zip(edges, edges[1:])):
            raise ValueError("entropy jumps must lie strictly inside the domain")
        nb = profile.n_blocks
        hs = list(opts.block_h) if opts.block_h is not None else [opts.h] * nb
        if len(hs) != nb:
            raise ValueError("block_h needs one spacing per entropy block")
        xs, blk, first, last, x0, hb, ncell = [], [], [], [], [], [], []
        n = 0
        for b in range(nb):
            a, e = edges[b], edges[b + 1]
            k = max(4, int(math.ceil((e - a) / hs[b] - 1e-9)))
            xb = np.linspace(a, e, k + 1)
            xs.append(xb)
            blk.append(np.full(k + 1, b))
            first.append(n)
            last.append(n + k)
            x0.append(a)
            hb.append((e - a) / k)
            ncell.append(k)
            n += k + 1
        self.edges = edges
        self.x = np.concatenate(xs)
        self.blk = np.concatenate(blk)
        self.first = np.array(first)
        self.last = np.array(last)
        self.x0 = np.array(x0)
        self.hb = np.array(hb)
        self.ncell = np.array(ncell)
        self.m = np.asarray(profile.m_values)[self.blk]
        self.N = n
        is_first = np.zeros(n, bool)
        is_first[self.first] = True
        is_last = np.zeros(n, bool)
        is_last[self.last] = True
        self.fi = np.flatnonzero(~is_first)
        self.bi = np.flatnonzero(~is_last)
        self.jl = self.last[:-1]   # left-side node of each jump
        self.jr = self.first[1:]   # right-side node of each jump

    def locate(self, xq, bq):
        h = self.hb[bq]
        j = np.clip(np.floor((xq - self.x0[bq]) / h), 0, self.ncell[bq] - 1).astype(int)
        theta = (xq - self.x0[bq]) / h - j
        return self.first[bq] + j, theta, h

    @staticmethod
    def hermite_basis(theta, h):
        t2 = theta * theta
        t3 = t2 * theta
        val = (2 * t3 - 3 * t2 + 1, (t3 - 2 * t2 + theta) * h, 3 * t2 - 2 * t3, (t3 - t2) * h)
        der = ((6 * t2 - 6 * theta) / h, 3 * t2 - 4 * theta + 1, (6 * theta - 6 * t2) / h, 3 * t2 - 2 * theta)
        return val, der

    @staticmethod
    def hermite_apply(gi, basis, f, fx):
        (v0, v1, v2, v3), (w0, w1, w2, w3) = basis
        f0, f1, d0, d1 = f[gi], f[gi + 1], fx[gi], fx[gi + 1]
        return v0 * f0 + v1 * d0 + v2 * f1 + v3 * d1, w0 * f0 + w1 * d0 + w2 * f1 + w3 * d1

    def sample(self, xq, bq, S, R, A, B):
        gi, th, h = self.locate(xq, bq)
        basis = self.hermite_basis(th, h)
        s, sx = self.hermite_apply(gi, basis, S, A)
        r, rx = self.hermite_apply(gi, basis, R, B)
        return s, r, sx, rx, th


def _logistic(v0, a, b, dt):
    """Solution at dt of v' = a v - b v^2 and the blowup time (inf if none)."""
    ad = a * dt
    E = dt * exprel(ad)
    den = 1.0 + b * v0 * E
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        v = v0 * np.exp(ad) / den
        arg = -a / (b * v0)
        tau_a = np.where(np.abs(ad) > 1e-12, np.log1p(np.where(arg > -1, arg, -1.0)) / np.where(a == 0, 1, a), 0.0)
        tau0 = -1.0 / (b * v0)
        tau = np.where(np.abs(ad) > 1e-12, tau_a, tau0)
    blow = den <= 0.0
    tau = np.where(blow, np.clip(tau, 0.0, dt), np.inf)
    return v, tau


# ---------------------------------------------------------------------------
# characteristic tracking


class _Tracks:
    def __init__(self, grid: _Grid, starts, zigzag, t_max, n_samples):
        self.grid = grid
        n_plain = len(starts)
        xs = [float(x) for x, _ in starts] + [float(z[0]) for z in zigzag]
        fams = [f for _, f in starts] + [z[1] for z in zigzag]
        self.n_plain = n_plain
        self.x = np.array(xs, dtype=float)
        self.sig = np.array([1.0 if f == "forward" else -1.0 for f in fams])
        self.x_start = self.x.copy()
        self.fam0 = list(fams)
        self.blk = np.searchsorted(np.asarray(grid.edges[1:-1]), self.x, side="right")
        # a start on a jump moves into the block it is heading to
        for k, x in enumerate(self.x):
            for j, xj in enumerate(grid.edges[1:-1]):
                if x == xj:
                    self.blk[k] = j + 1 if self.sig[k] > 0 else j
        self.active = np.ones(len(xs), bool)
        self.t_exit = [None] * len(xs)
        self.crossings = [[] for _ in xs]
        self.zig = [ZigzagTrack(float(z[2]), float(z[3])) for z in zigzag]
        self.rec = {k: [] for k in ("t", "x", "s", "r", "alpha", "beta", "z", "c", "block")}
        self.next_sample = 0.0
        self.dt_sample = t_max / max(n_samples, 1)

    def speed(self, xq, bq, S, R, A, B):
        g = self.grid
        s, r, _, _, _ = g.sample(xq, bq, S, R, A, B)
        m = np.asarray(g.m[g.first[bq]])
        z = np.maximum((s - r) / (2.0 * m), 0.0)
        return m * z ** self._d

    def record(self, t, S, R, A, B, force=False):
        if not force and t < self.next_sample - 1e-14 * max(1.0, t):
            return
        self.next_sample = t + self.dt_sample
        g = self.grid
        s, r, sx, rx, _ = g.sample(self.x, self.blk, S, R, A, B)
        m = g.m[g.first[self.blk]]
        z = (s - r) / (2.0 * m)
        self.rec["t"].append(np.full(self.x.shape, t))
        self.rec["x"].append(self.x.copy())
        self.rec["s"].append(np.where(self.active, s, np.nan))
        self.rec["r"].append(np.where(self.active, r, np.nan))
        self.rec["alpha"].append(np.where(self.active, sx, np.nan))
        self.rec["beta"].append(np.where(self.active, rx, np.nan))
        self.rec["z"].append(np.where(self.active, z, np.nan))
        self.rec["c"].append(np.where(self.active, m * np.maximum(z, 0.0) ** self._d, np.nan))
        self.rec["block"].append(self.blk.copy())

    def _contact_z(self, j, side, theta, old, new):
        g = self.grid
        node = g.jl[j] if side == "left" else g.jr[j]
        zo = (old[0][node] - old[1][node]) / (2.0 * g.m[node])
        zn = (new[0][node] - new[1][node]) / (2.0 * g.m[node])
        return (1.0 - theta) * zo + theta * zn, g.m[node]

    def advance(self, t, dt, old, new):
        """Move every active track from t to t+dt; old/new are (S, R, A, B)."""
        g = self.grid
        idx = np.flatnonzero(self.active)
        if idx.size == 0:
            return
        x0, b0, sg = self.x[idx], self.blk[idx], self.sig[idx]
        c0 = self.speed(x0, b0, *old)
        xn = x0 + sg * dt * c0
        lo, hi = np.asarray(g.edges)[b0], np.asarray(g.edges)[b0 + 1]
        for _ in range(30):
            inside = (xn >= lo) & (xn <= hi)
            xq = np.clip(xn, lo, hi)
            c1 = self.speed(xq, b0, *new)
            x_upd = x0 + sg * dt * 0.5 * (c0 + c1)
            if np.max(np.abs(x_upd - xn)) < 1e-13 * (1.0 + np.max(np.abs(x0))):
                xn = x_upd
                break
            xn = x_upd
        inside = (xn >= lo) & (xn <= hi)
        ok = idx[inside]
        self.x[ok] = xn[inside]
        for k in idx[~inside]:
            self._advance_crossing(k, t, dt, old, new)

    def _advance_crossing(self, k, t, dt, old, new):
        g = self.grid
        nb = len(g.edges) - 1
        rem, tt = dt, 0.0
        for _ in range(8):
            b = int(self.blk[k])
            sg = self.sig[k]
            edge_idx = b + 1 if sg > 0 else b
            xe = g.edges[edge_idx]
            xa = self.x[k]
            c0 = self._speed_at(xa, b, tt / dt, old, new)
            tau = rem
            for _ in range(40):
                ce = self._speed_at(xe, b, (tt + tau) / dt, old, new)
                tau_new = 2.0 * abs(xe - xa) / max(c0 + ce, 1e-300)
                if abs(tau_new - tau) < 1e-14 * dt:
                    tau = tau_new
                    break
                tau = tau_new
            if tau >= rem:
                # does not actually reach the edge in this step
                ce = c0
                xn = xa + sg * rem * c0
                for _ in range(40):
                    ce = self._speed_at(np.clip(xn, g.edges[b], g.edges[b + 1]), b, 1.0, old, new)
                    xn = xa + sg * rem * 0.5 * (c0 + ce)
                self.x[k] = float(np.clip(xn, g.edges[b], g.edges[b + 1]))
                return
            tt += tau
            rem -= tau
            self.x[k] = xe
            t_hit = t + tt
            if edge_idx == 0 or edge_idx == nb:
                self.active[k] = False
                self.t_exit[k] = t_hit
                return
            j = edge_idx - 1
            zig = k - self.n_plain
            if zig >= 0 and (xe == self.zig[zig].x_lo or xe == self.zig[zig].x_hi):
                zr = self.zig[zig]
                side = "left" if sg > 0 else "right"
                zc, _ = self._contact_z(j, side, tt / dt, old, new)
                zr.bounce_t.append(t_hit)
                zr.bounce_x.append(xe)
                zr.bounce_z.append(float(zc))
                self.sig[k] = -sg
            else:
                self.crossings[k].append((j, t_hit))
                self.blk[k] = b + 1 if sg > 0 else b - 1
            if rem <= 1e-15 * dt:
                return
        raise SolverError("characteristic crossed too many jumps within one step")

    def _speed_at(self, xq, b, theta, old, new):
        xq = np.array([xq])
        bq = np.array([b])
        c_old = self.speed(xq, bq, *old)[0]
        c_new = self.speed(xq, bq, *new)[0]
        return (1.0 - theta) * c_old + theta * c_new

    def build(self):
        if not self.rec["t"]:
            return []
        arr = {k: np.array(v) for k, v in self.rec.items()}
        out = []
        for k in range(self.n_plain):
            out.append(CharTrack(
                family=self.fam0[k], x_start=float(self.x_start[k]),
                t=arr["t"][:, k], x=arr["x"][:, k], s=arr["s"][:, k], r=arr["r"][:, k],
                alpha=arr["alpha"][:, k], beta=arr["beta"][:, k], z=arr["z"][:, k],
                c=arr["c"][:, k], block=arr["block"][:, k],
                crossings=list(self.crossings[k]), t_exit=self.t_exit[k],
            ))
        return out


def _default_starts(grid: _Grid, n: int):
    if n <= 0:
        return []
    xl, xr = grid.edges[0], grid.edges[-1]
    xs = xl + (xr - xl) * (np.arange(n) + 0.5) / n
    return [(float(x), "forward") for x in xs] + [(float(x), "backward") for x in xs]


# ---------------------------------------------------------------------------
# the solver


def solve_ibvp(initial: InitialData, profile: EntropyProfile, t_max: float,
               gas: GasModel, options: MocOptions | None = None) -> RunOutcome:
    opts = options or MocOptions()
    if not t_max > 0.0:
        raise ValueError("t_max must be positive")
    d = gas.d
    g = _Grid(profile, initial.x_left, initial.x_right, opts)
    x, m = g.x, g.m
    u0, p0, ux, px = (np.empty(g.N) for _ in range(4))
    for b in range(profile.n_blocks):
        sl = slice(g.first[b], g.last[b] + 1)
        piece = initial.for_block(b)
        u0[sl] = piece.u(x[sl])
        p0[sl] = piece.p(x[sl])
        ux[sl], px[sl] = piece.slopes(x[sl], float(g.hb[b]))
    if np.any(p0 <= 0.0):
        raise ValueError("initial pressure must be positive")
    z = ((d + 1.0) * p0 / (m * m)) ** (1.0 / (d + 1.0))
    c = m * z**d
    S, R = u0 + m * z, u0 - m * z
    A, B = ux + px / c, ux - px / c
    grad_scale = float(max(np.max(np.abs(A)), np.max(np.abs(B))))
    grad_floor = 64.0 * np.finfo(float).eps * float(max(np.max(np.abs(S)), np.max(np.abs(R)))) / float(np.min(g.hb))
    s_left, r_right = S[0], R[-1]
    Qs = [(profile.m_values[j + 1] / profile.m_values[j]) ** ((d - 1.0) / (d + 1.0))
          for j in range(profile.n_blocks - 1)]
    Qs = np.array(Qs)

    starts = list(opts.track_starts) if opts.track_starts is not None else _default_starts(g, opts.n_tracks)
    tracks = _Tracks(g, starts, opts.zigzag, t_max, opts.track_samples)
    tracks._d = d

    snaps: list[Snapshot] = []
    snap_dt = t_max / max(opts.n_snapshots, 1)
    next_snap = 0.0

    hist_t: list[float] = []
    hist: list[np.ndarray] = []

    def take_snapshot(t):
        zz = (S - R) / (2.0 * m)
        snaps.append(Snapshot(t, x.copy(), g.blk.copy(), zz, 0.5 * (S + R), m.copy(),
                              R.copy(), S.copy(), A.copy(), B.copy()))

    def record_contacts(t):
        hist_t.append(t)
        hist.append(np.stack([S[g.jl], R[g.jl], A[g.jl], B[g.jl],
                              S[g.jr], R[g.jr], A[g.jr], B[g.jr]], axis=1))

    t = 0.0
    take_snapshot(t)
    next_snap = snap_dt
    record_contacts(t)
    tracks.record(t, S, R, A, B, force=True)

    shock: ShockEvent | None = None
    vac_event = None
    n_steps = 0
    while t < t_max * (1.0 - 1e-14) and n_steps < opts.max_steps:
        zc = np.maximum((S - R) / (2.0 * m), 0.0)
        cc = m * zc**d
        cmax = np.array([np.max(cc[g.first[b]:g.last[b] + 1]) for b in range(len(g.first))])
        with np.errstate(divide="ignore"):
            dt = opts.cfl * float(np.min(np.where(cmax > 0, g.hb / cmax, np.inf)))
        if not math.isfinite(dt):
            dt = t_max - t
        dt = min(dt, t_max - t)
        for halving in range(opts.max_halvings + 1):
            res = _step(g, S, R, A, B, cc, dt, d, Qs, s_left, r_right, opts)
            if res is not None:
                break
            dt *= 0.5
        else:
            raise SolverError(
                f"characteristic iteration did not converge at t={t:.6g} "
                f"after {opts.max_halvings} step halvings")
        Sn, Rn, An, Bn, blow, vac = res
        n_steps += 1
        if vac is not None:
            vac_event = (float(x[vac]), t + dt)
            t += dt
            break
        if blow is not None:
            node, tau, fam = blow
            shock = ShockEvent(float(x[node]), t + tau, fam)
            if opts.stop_on_blowup:
                t += dt
                S, R, A, B = Sn, Rn, An, Bn
                break
        old = (S, R, A, B)
        S, R, A, B = Sn, Rn, An, Bn
        tracks.advance(t, dt, old, (S, R, A, B))
        t += dt
        record_contacts(t)
        tracks.record(t, S, R, A, B)
        if t >= next_snap - 1e-12 * max(1.0, t):
            take_snapshot(t)
            next_snap = t + snap_dt
    if not snaps or snaps[-1].t != t:
        take_snapshot(t)
    tracks.record(t, S, R, A, B, force=True)

    contacts = []
    if hist:
        H = np.array(hist)
        ht = np.array(hist_t)
        for j in range(len(Qs)):
            ml, mr = profile.m_values[j], profile.m_values[j + 1]
            left = _column_side(H[:, j, 0], H[:, j, 1], H[:, j, 2], H[:, j, 3], ml, d)
            right = _column_side(H[:, j, 4], H[:, j, 5], H[:, j, 6], H[:, j, 7], mr, d)
            contacts.append(ContactColumn(profile.jump_x[j], float(Qs[j]), ml, mr, ht, left, right))

    mesh = CharMesh(profile, d, g.edges[0], g.edges[-1], t, t_max, snaps, contacts,
                    tracks.build(), grad_scale, float(np.max(g.hb)), grad_floor)
    outcome = RunOutcome("shock-free-to-horizon", mesh, shock=shock, n_steps=n_steps,
                         zigzags=tracks.zig)
    if shock is not None:
        outcome.status = "shock-formed"
        return outcome
    if vac_event is not None:
        outcome.status = "asymptotic-vacuum"
        outcome.vacuum = VacuumReport("vacuum-boundary", vac_event[0], [], vac_event)
        return outcome
    report = detect_asymptotic_vacuum(mesh)
    if report is not None:
        outcome.status = "asymptotic-vacuum"
        outcome.vacuum = report
        return outcome
    ni = detect_noninteracting(mesh, opts.quiet_rel)
    if ni is not None:
        outcome.status = "eventually-noninteracting"
        outcome.T_noninteracting = ni.T
    return outcome


def _column_side(s, r, a, b, m, d):
    z = (s - r) / (2.0 * m)
    c = m * np.maximum(z, 0.0) ** d
    return {"s": s, "r": r, "alpha": a, "beta": b, "z": z, "u": 0.5 * (s + r),
            "p": pressure(np.maximum(z, 0.0), m, d), "c": c}


def _step(g: _Grid, S, R, A, B, c_old, dt, d, Qs, s_left, r_right, opts):
    """One time step; returns None when the foot iteration fails to converge."""
    x, m = g.x, g.m
    fi, bi = g.fi, g.bi
    bf, bb = g.blk[fi], g.blk[bi]
    xf = x[fi] - dt * c_old[fi]
    xb = x[bi] + dt * c_old[bi]
    Sn, Rn = S.copy(), R.copy()
    tol = opts.tol * max(1.0, g.edges[-1] - g.edges[0])
    converged = False
    for _ in range(opts.max_iter):
        sF, rF, sxF, rxF, thF = g.sample(xf, bf, S, R, A, B)
        sB, rB, sxB, rxB, thB = g.sample(xb, bb, S, R, A, B)
        Sn[fi] = sF
        Rn[bi] = rB
        Sn[0] = s_left
        Rn[-1] = r_right
        if Qs.size:
            rl, sr = contact_resolve(Sn[g.jl], Rn[g.jr], Qs)
            Rn[g.jl] = rl
            Sn[g.jr] = sr
        zn = (Sn - Rn) / (2.0 * m)
        if np.any(zn <= 0.0):
            return S, R, A, B, None, int(np.argmin(zn))
        cn = m * zn**d
        zF = np.maximum((sF - rF) / (2.0 * m[fi]), 0.0)
        zB = np.maximum((sB - rB) / (2.0 * m[bi]), 0.0)
        cF = m[fi] * zF**d
        cB = m[bi] * zB**d
        xf_new = x[fi] - 0.5 * dt * (cn[fi] + cF)
        xb_new = x[bi] + 0.5 * dt * (cn[bi] + cB)
        err = max(np.max(np.abs(xf_new - xf)) if fi.size else 0.0,
                  np.max(np.abs(xb_new - xb)) if bi.size else 0.0)
        xf, xb = xf_new, xb_new
        if err < tol:
            converged = True
            break
    if not converged:
        return None
    sF, rF, sxF, rxF, thF = g.sample(xf, bf, S, R, A, B)
    sB, rB, sxB, rxB, thB = g.sample(xb, bb, S, R, A, B)
    if np.any(thF < -1e-9) or np.any(thB > 1.0 + 1e-9):
        return None  # foot left its block: the step is too large
    Sn[fi] = sF
    Rn[bi] = rB
    if Qs.size:
        rl, sr = contact_resolve(Sn[g.jl], Rn[g.jr], Qs)
        Rn[g.jl] = rl
        Sn[g.jr] = sr
    zn = (Sn - Rn) / (2.0 * m)
    if np.any(zn <= 0.0):
        return S, R, A, B, None, int(np.argmin(zn))
    cn = m * zn**d
    k1n = 0.5 * d * zn ** (d - 1.0)
    k1F = 0.5 * d * np.maximum((sF - rF) / (2.0 * m[fi]), 0.0) ** (d - 1.0)
    k1B = 0.5 * d * np.maximum((sB - rB) / (2.0 * m[bi]), 0.0) ** (d - 1.0)
    bF = 0.5 * (k1F + k1n[fi])
    bB = 0.5 * (k1B + k1n[bi])

    An = A.copy()
    Bn = B.copy()
    An[fi] = sxF
    Bn[bi] = rxB
    tauF = tauB = None
    for _ in range(max(1, opts.grad_sweeps)):
        aF = 0.5 * (k1F * rxF + k1n[fi] * Bn[fi])
        An[fi], tauF = _logistic(sxF, aF, bF, dt)
        aB = 0.5 * (k1B * sxB + k1n[bi] * An[bi])
        Bn[bi], tauB = _logistic(rxB, aB, bB, dt)
        An[0] = 0.0
        Bn[-1] = 0.0
        if Qs.size:
            jl, jr = g.jl, g.jr
            sdot_l = -cn[jl] * An[jl]
            rdot_r = cn[jr] * Bn[jr]
            rdot_l = (2.0 * rdot_r - (1.0 - Qs) * sdot_l) / (1.0 + Qs)
            sdot_r = 0.5 * (1.0 - Qs) * rdot_l + 0.5 * (1.0 + Qs) * sdot_l
            Bn[jl] = rdot_l / cn[jl]
            An[jr] = -sdot_r / cn[jr]

    blow = None
    thr = opts.blowup_threshold
    cand = []
    # Riccati prediction from the new nodal values over the next few steps:
    # a front narrower than the grid spacing is smeared by interpolation at
    # the feet, so the prediction is taken before that happens
    look = max(1.0, opts.blowup_lookahead) * dt
    _, tFn = _logistic(An[fi], k1n[fi] * Bn[fi], k1n[fi], look)
    _, tBn = _logistic(Bn[bi], k1n[bi] * An[bi], k1n[bi], look)
    for tn, idx, fam in ((tFn, fi, "forward"), (tBn, bi, "backward")):
        if idx.size and np.any(np.isfinite(tn)):
            k = int(np.argmin(tn))
            cand.append((dt + float(tn[k]), int(idx[k]), fam))
    if fi.size and np.any(np.isfinite(tauF)):
        k = int(np.argmin(tauF))
        cand.append((float(tauF[k]), int(fi[k]), "forward"))
    if bi.size and np.any(np.isfinite(tauB)):
        k = int(np.argmin(tauB))
        cand.append((float(tauB[k]), int(bi[k]), "backward"))
    # same-family characteristics that cross within the step
    for feet, idx, fam in ((xf, fi, "forward"), (xb, bi, "backward")):
        if idx.size < 2:
            continue
        gap = np.diff(feet)
        same = np.diff(g.blk[idx]) == 0
        bad = np.flatnonzero(same & (gap <= 0.0))
        if bad.size:
            k = bad[np.argmin(gap[bad])]
            h = g.hb[g.blk[idx[k]]]
            cand.append((dt * float(-gap[k] / (h - gap[k])), int(idx[k]), fam))
    big_a = np.abs(An) > thr
    big_b = np.abs(Bn) > thr
    if np.any(big_a):
        cand.append((dt, int(np.argmax(np.abs(An))), "forward"))
    if np.any(big_b):
        cand.append((dt, int(np.argmax(np.abs(Bn))), "backward"))
    if cand:
        tau, node, fam = min(cand)
        blow = (node, tau, fam)
    return Sn, Rn, An, Bn, blow, None


# ---------------------------------------------------------------------------
# post-run diagnostics


@dataclass
class Noninteraction:
    T: float
    T_jumps: list[float]
    pending_waves: bool


def detect_noninteracting(mesh: CharMesh, quiet_rel: float = 1e-9) -> Noninteraction | None:
    """Smallest recorded time after which every jump column stays quiet.

    Returns None when a column is still active at the end of the run or when
    the final snapshot still holds a wave that will reach a jump (a forward
    wave left of the last jump or a backward wave right of the first one).
    """
    tol = mesh.grad_tol(quiet_rel)
    T_j = []
    for col in mesh.contacts:
        act = np.zeros(col.t.shape, bool)
        for side in (col.left, col.right):
            act |= (np.abs(side["alpha"]) > tol) | (np.abs(side["beta"]) > tol)
        if act[-1]:
            return None
        idx = np.flatnonzero(act)
        T_j.append(float(col.t[idx[-1] + 1]) if idx.size else float(col.t[0]))
    snap = mesh.snapshots[-1]
    pending = False
    if mesh.contacts:
        xs = [c.x for c in mesh.contacts]
        left_of_last = (snap.x < xs[-1]) | ((snap.x == xs[-1]) & (snap.block < len(xs)))
        right_of_first = (snap.x > xs[0]) | ((snap.x == xs[0]) & (snap.block > 0))
        pending = bool(np.any(np.abs(snap.alpha[left_of_last]) > tol)
                       or np.any(np.abs(snap.beta[right_of_first]) > tol))
    if pending:
        return None
    return Noninteraction(max(T_j) if T_j else 0.0, T_j, pending)


def interaction_boundary_is_forward(mesh: CharMesh, ni: Noninteraction,
                                    slack: float = 0.05) -> tuple[bool, list[dict]]:
    """Check that successive jump quiet times are linked by forward travel.

    For neighbouring jumps j, j+1 the quiet-time difference must lie between
    the forward crossing times of the block between them computed with the
    largest and smallest sound speed seen there after T_j.
    """
    rows = []
    ok = True
    for j in range(len(mesh.contacts) - 1):
        a, b = mesh.contacts[j], mesh.contacts[j + 1]
        Ta, Tb = ni.T_jumps[j], ni.T_jumps[j + 1]
        cs = []
        for sn in mesh.snapshots:
            if sn.t >= Ta - 1e-12:
                sel = sn.block == j + 1
                cs.append(sn.m[sel] * np.maximum(sn.z[sel], 0.0) ** mesh.d)
        ta = a.t >= Ta
        cs.append(a.right["c"][ta])
        cs.append(b.left["c"][b.t >= Ta])
        call = np.concatenate([np.ravel(v) for v in cs])
        lo = (b.x - a.x) / call.max()
        hi = (b.x - a.x) / call.min()
        dT = Tb - Ta
        good = lo * (1.0 - slack) - slack * mesh.h <= dT <= hi * (1.0 + slack) + slack * mesh.h
        ok &= bool(good)
        rows.append({"jump": j, "dT": dT, "lower": lo, "upper": hi, "ok": bool(good)})
    return ok, rows


@dataclass
class StalledChar:
    track: int
    family: str
    x_start: float
    x_final: float
    x_asymptote: float
    exponent: float


@dataclass
class VacuumReport:
    kind: str
    x_star: float | None
    stalled: list[StalledChar]
    event: tuple[float, float] | None = None
    note: str = "asymptotic vacuum (numerical): horizon-limited diagnostic"


def detect_asymptotic_vacuum(mesh: CharMesh, min_exponent: float = 1.1,
                             min_samples: int = 16) -> VacuumReport | None:
    """Flag tracked characteristics that appear to approach a vertical asymptote.

    Over the final half of the run, log c is fitted against log t.  A track
    is stalled when c decreases monotonically over the final quarter, decays
    faster than t^-min_exponent, and the travel still available from the
    fitted power law is shorter than the distance to the next jump or
    boundary in its direction of motion.
    """
    T = mesh.t_end
    if T <= 0.0:
        return None
    walls = np.array([mesh.x_left, *mesh.profile.jump_x, mesh.x_right])
    stalled = []
    for k, tr in enumerate(mesh.tracks):
        if tr.t_exit is not None:
            continue
        sel = (tr.t >= 0.5 * T) & np.isfinite(tr.c) & (tr.t > 0)
        if np.count_nonzero(sel) < min_samples:
            continue
        tt, cc = tr.t[sel], tr.c[sel]
        if np.any(cc <= 0.0):
            continue
        q = tt >= 0.75 * T
        if np.count_nonzero(q) < 4 or np.any(np.diff(cc[q]) > 0.0):
            continue
        slope = np.polyfit(np.log(tt), np.log(cc), 1)[0]
        if slope > -min_exponent:
            continue
        sig = 1.0 if tr.family == "forward" else -1.0
        xf = float(tr.x[-1])
        remaining = cc[-1] * tt[-1] / (-slope - 1.0)
        ahead = walls[walls > xf + 1e-12] if sig > 0 else walls[walls < xf - 1e-12]
        if ahead.size == 0:
            continue
        gap = float(np.min(np.abs(ahead - xf)))
        if remaining < gap:
            stalled.append(StalledChar(k, tr.family, tr.x_start, xf, xf + sig * remaining, float(slope)))
    if not stalled:
        return None
    back = [s.x_start for s in stalled if s.family == "backward"]
    x_star = min(back) if back else None
    return VacuumReport("stalled-characteristics", x_star, stalled)
