"""Command line front end: ``shockfree <command> --config run.toml --out dir``.

Every command reads one TOML file with a ``[gas]`` table (``gamma``
required, ``K`` optional; without ``K`` the unit normalization is used),
a ``[scenario]`` table with command specific keys and an optional
``[mesh]`` table for the solver.  Results go to CSV files plus a sorted
``summary.json`` in the output directory.

Exit codes: 0 success, 2 config error, 3 numerical failure,
4 scenario hypothesis violated.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from . import __version__
from .gas import DomainError, GasModel, ThermoState, derived, make_gas, state_from_physical, unit_gas
from .gradients import check_global_rc, label
from .mesh import EntropyProfile
from .moc import (InitialData, MocOptions, SolverError, detect_noninteracting,
                  interaction_boundary_is_forward, solve_ibvp)
from .scenarios import (HypothesisViolation, LinearZ, SingleContactSetup, SmoothZ,
                        classify_single_contact, construct_shockfree_two_contacts,
                        decay_rate_fit, log_divergence_check, reflect_recurrence, reflection_far_field,
                        smooth_step, smooth_step_prime, trace_single_shock, vacuum_condition)
from .waves import ContactJump, contact_apply, hugoniot_domain, hugoniot_f, hugoniot_g_h

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_HYPOTHESIS = 0, 2, 3, 4

COMMANDS = {
    "gas-eval": "Evaluate canonical and physical variables of gas states.",
    "hugoniot-curve": "Tabulate the shock functions f, g, h over a grid of Z = z1/z0.",
    "contact-jump": "Carry a state across an entropy jump and report Q and the contact kind.",
    "simulate": "Run the characteristic solver on a scenario and write its mesh output.",
    "classify": "Single-contact far-field classification, optionally confirmed by simulation.",
    "reflect": "Iterate the reflection recurrence between a 3-contact and a 1-contact.",
    "vacuum-check": "Evaluate the far-field vacuum condition and its margin.",
    "construct": "Certified shock-free data with two 3-contacts.",
    "shock-trace": "Trace a single shock with a stationary state behind it.",
}


class ConfigError(ValueError):
    """Invalid or incomplete run configuration."""


# ---------------------------------------------------------------------------
# config


@dataclass
class MeshConfig:
    h: float = 0.02
    block_h: list[float] | None = None
    cfl: float = 0.8
    tol: float = 1e-11
    horizon: float = 10.0
    n_snapshots: int = 50
    n_tracks: int = 16
    quiet_rel: float = 1e-9

    def options(self, refine: int = 0, **extra) -> MocOptions:
        k = 2.0**refine
        bh = None if self.block_h is None else [v / k for v in self.block_h]
        return MocOptions(h=self.h / k, block_h=bh, cfl=self.cfl, tol=self.tol,
                          quiet_rel=self.quiet_rel, n_snapshots=self.n_snapshots,
                          n_tracks=self.n_tracks, **extra)


@dataclass
class RunConfig:
    command: str
    gas: GasModel
    scenario: dict[str, Any] = field(default_factory=dict)
    mesh: MeshConfig = field(default_factory=MeshConfig)
    out: Path = Path("out")
    seed: int = 0
    refine: int = 0


def _number(tbl, key, where, default=None, positive=False):
    if key not in tbl:
        if default is None:
            raise ConfigError(f"{where}.{key}: missing required field")
        return default
    v = tbl[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{where}.{key}: expected a number, got {v!r}")
    v = float(v)
    if not math.isfinite(v):
        raise ConfigError(f"{where}.{key}: must be finite")
    if positive and not v > 0.0:
        raise ConfigError(f"{where}.{key}: must be positive, got {v!r}")
    return v


def parse_gas(tbl: dict) -> GasModel:
    if not isinstance(tbl, dict):
        raise ConfigError("gas: missing [gas] table")
    gamma = _number(tbl, "gamma", "gas")
    if not gamma > 1.0:
        raise ConfigError(f"gas.gamma: must exceed 1, got {gamma!r}")
    if "K" in tbl:
        return make_gas(gamma, _number(tbl, "K", "gas", positive=True),
                        _number(tbl, "c_v", "gas", 1.0, positive=True))
    return unit_gas(gamma)


def parse_mesh(tbl: dict) -> MeshConfig:
    known = set(MeshConfig.__dataclass_fields__)
    extra = set(tbl) - known
    if extra:
        raise ConfigError(f"mesh: unknown field(s) {sorted(extra)}")
    mc = MeshConfig()
    for k in known:
        if k in tbl:
            v = tbl[k]
            if k == "block_h":
                if not isinstance(v, list) or not all(isinstance(q, (int, float)) and q > 0 for q in v):
                    raise ConfigError("mesh.block_h: expected a list of positive numbers")
                setattr(mc, k, [float(q) for q in v])
            elif k in ("n_snapshots", "n_tracks"):
                if not isinstance(v, int) or isinstance(v, bool) or v < 0:
                    raise ConfigError(f"mesh.{k}: expected a non-negative integer")
                setattr(mc, k, v)
            else:
                setattr(mc, k, _number(tbl, k, "mesh", positive=True))
    return mc


def load_config(path: str | Path, command: str, out: str | None = None, seed: int | None = None,
                refine: int | None = None, horizon: float | None = None) -> RunConfig:
    try:
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"config is not valid TOML: {exc}") from exc
    if "command" in raw and raw["command"] != command:
        raise ConfigError(f"command: config is for {raw['command']!r}, not {command!r}")
    gas = parse_gas(raw.get("gas"))
    mesh = parse_mesh(raw.get("mesh", {}))
    if horizon is not None:
        if not horizon > 0:
            raise ConfigError("--horizon must be positive")
        mesh.horizon = float(horizon)
    scen = raw.get("scenario", {})
    if not isinstance(scen, dict):
        raise ConfigError("scenario: expected a table")
    out_dir = Path(out if out is not None else raw.get("output", {}).get("dir", "out"))
    seed_v = seed if seed is not None else raw.get("seed", 0)
    if not isinstance(seed_v, int) or isinstance(seed_v, bool):
        raise ConfigError("seed: expected an integer")
    ref = refine if refine is not None else raw.get("refine", 0)
    if not isinstance(ref, int) or ref < 0:
        raise ConfigError("refine: expected a non-negative integer")
    return RunConfig(command, gas, scen, mesh, out_dir, seed_v, ref)


# ---------------------------------------------------------------------------
# output


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return "%.17g" % float(v)
    if v is None:
        return ""
    return str(v)


def emit_csv(header: Sequence[str], rows, path: str | Path) -> Path:
    """Write a rectangular table: header first, 17 significant digits, LF endings."""
    header = list(header)
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            row = list(row)
            if len(row) != len(header):
                raise ValueError(f"row has {len(row)} fields, header has {len(header)}")
            w.writerow([_fmt(v) for v in row])
    return path


def _columns(cols: dict[str, np.ndarray]):
    names = list(cols)
    arrs = [np.asarray(cols[k]) for k in names]
    n = len(arrs[0]) if arrs else 0
    if any(len(a) != n for a in arrs):
        raise ValueError("columns differ in length")
    return names, (tuple(a[i].item() if hasattr(a[i], "item") else a[i] for a in arrs) for i in range(n))


def emit_columns(cols: dict, path) -> Path:
    names, rows = _columns(cols)
    return emit_csv(names, rows, path)


def _clean(v):
    if isinstance(v, dict):
        return {str(k): _clean(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_clean(x) for x in v]
    if isinstance(v, (np.floating, float)):
        f = float(v)
        return f if math.isfinite(f) else str(f)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, np.bool_):
        return bool(v)
    if isinstance(v, np.ndarray):
        return _clean(v.tolist())
    return v


def write_summary(summary: dict, out: Path) -> Path:
    path = out / "summary.json"
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(_clean(summary), fh, sort_keys=True, indent=2)
        fh.write("\n")
    return path


# ---------------------------------------------------------------------------
# scenario helpers


def _get(scen, key, default=None, positive=False):
    return _number(scen, key, "scenario", default, positive)


def _fraction_or_number(scen, key):
    if key not in scen:
        raise ConfigError(f"scenario.{key}: missing required field")
    v = scen[key]
    if isinstance(v, str):
        try:
            from fractions import Fraction
            return Fraction(v.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ConfigError(f"scenario.{key}: cannot parse {v!r} as a rational") from exc
    return _get(scen, key)


def _z_profile(scen):
    tbl = scen.get("Z")
    if not isinstance(tbl, dict):
        raise ConfigError("scenario.Z: missing table with kind, Z0, Z1")
    kind = tbl.get("kind", "smooth")
    Z0 = _number(tbl, "Z0", "scenario.Z", positive=True)
    Z1 = _number(tbl, "Z1", "scenario.Z", positive=True)
    T = _get(scen, "T", positive=True)
    if kind == "linear":
        return LinearZ(Z0, Z1, T)
    if kind == "smooth":
        return SmoothZ(Z0, Z1, T)
    raise ConfigError(f"scenario.Z.kind: expected 'linear' or 'smooth', got {kind!r}")


def _single_contact(cfg: RunConfig):
    sc = cfg.scenario
    d = cfg.gas.d
    Q = _get(sc, "Q", positive=True)
    if "z_inf" in sc:
        z_inf = _get(sc, "z_inf", positive=True)
    else:
        ratio = _get(sc, "z_inf_over_z_star", positive=True)
        z_inf = ratio * (Q - 1.0) / (2.0 * Q) * _get(sc, "z_m", 1.0, positive=True)
    setup = SingleContactSetup(d, Q, z_inf, m_r=_get(sc, "m_r", 1.0, positive=True),
                               z_m=_get(sc, "z_m", 1.0, positive=True), u_l=_get(sc, "u_l", 0.0),
                               width=_get(sc, "width", 1.0, positive=True))
    x_left = _get(sc, "x_left", -1.0)
    x_right = _get(sc, "x_right", setup.width + 0.5)
    return setup, setup.initial_data(x_left, x_right)


def _strip(cfg: RunConfig):
    """Rarefactive data on (x0, x1) between a 3-contact and a 1-contact."""
    sc = cfg.scenario
    d = cfg.gas.d
    Q = _get(sc, "Q", positive=True)
    m = _get(sc, "m", 1.0, positive=True)
    x0, x1 = _get(sc, "x0", 0.0), _get(sc, "x1", 1.0)
    zA, zB = _get(sc, "z_left", positive=True), _get(sc, "z_right", positive=True)
    du = _get(sc, "du")
    if du < m * abs(zB - zA):
        raise HypothesisViolation("strip data is compressive: need du >= m |z_right - z_left|")
    m_out = m * Q ** (-(d + 1.0) / (d - 1.0))
    L = x1 - x0
    if not L > 0:
        raise ConfigError("scenario.x1 must exceed scenario.x0")

    def z(x):
        return zA + (zB - zA) * smooth_step((np.asarray(x) - x0) / L)

    init = InitialData(
        _get(sc, "x_left", x0 - 1.0), _get(sc, "x_right", x1 + 1.0),
        lambda x: du * smooth_step((np.asarray(x) - x0) / L),
        lambda x: m * m * z(x) ** (d + 1.0) / (d + 1.0),
        lambda x: du * smooth_step_prime((np.asarray(x) - x0) / L) / L,
        lambda x: m * m * z(x) ** d * (zB - zA) * smooth_step_prime((np.asarray(x) - x0) / L) / L,
    )
    return EntropyProfile((m_out, m, m_out), (x0, x1)), init, (x0, x1)


def _simple_wave(cfg: RunConfig):
    sc = cfg.scenario
    d = cfg.gas.d
    m = _get(sc, "m", 1.0, positive=True)
    r0 = _get(sc, "r", -1.0)
    z_base, amp = _get(sc, "z_base", 1.0, positive=True), _get(sc, "amplitude", 0.4)
    c0, w = _get(sc, "center", 0.5), _get(sc, "width", 1.0, positive=True)
    x_left, x_right = _get(sc, "x_left", 0.0), _get(sc, "x_right", 4.0)

    def z(x):
        return z_base + amp * smooth_step((np.asarray(x) - c0) / w)

    def zx(x):
        return amp * smooth_step_prime((np.asarray(x) - c0) / w) / w

    init = InitialData(x_left, x_right, lambda x: r0 + m * z(x),
                       lambda x: m * m * z(x) ** (d + 1.0) / (d + 1.0),
                       lambda x: m * zx(x), lambda x: m * m * z(x) ** d * zx(x))
    return EntropyProfile.constant(m), init


def _mesh_tables(out: Path, outcome, quiet_rel: float, prefix="") -> list[str]:
    mesh = outcome.mesh
    files = []
    sn = mesh.snapshots[-1]
    d = mesh.d
    zc = np.maximum(sn.z, 0.0)
    tol = mesh.grad_tol(quiet_rel)
    files.append(emit_columns({"t": np.full(sn.x.size, sn.t), "x": sn.x, "block": sn.block, "z": sn.z,
                               "u": sn.u, "m": sn.m, "p": sn.m**2 * zc ** (d + 1.0) / (d + 1.0),
                               "c": sn.m * zc**d, "r": sn.r, "s": sn.s, "alpha": sn.alpha, "beta": sn.beta,
                               "fwd_label": label(sn.alpha, tol), "bwd_label": label(sn.beta, tol)},
                              out / f"{prefix}final_state.csv").name)
    rows = []
    for j, col in enumerate(mesh.contacts):
        for i in range(col.t.size):
            rows.append((j, col.x, col.t[i], col.left["z"][i], col.right["z"][i],
                         col.left["alpha"][i], col.left["beta"][i],
                         col.right["alpha"][i], col.right["beta"][i]))
    files.append(emit_csv(["jump", "x", "t", "z_left", "z_right", "alpha_left", "beta_left",
                           "alpha_right", "beta_right"], rows, out / f"{prefix}contacts.csv").name)
    rows = []
    for k, tr in enumerate(mesh.tracks):
        for i in range(tr.t.size):
            rows.append((k, tr.family, tr.x_start, tr.t[i], tr.x[i], tr.z[i], tr.own[i], tr.other[i]))
    files.append(emit_csv(["track", "family", "x_start", "t", "x", "z", "own_gradient",
                           "other_gradient"], rows, out / f"{prefix}tracks.csv").name)
    return files


# ---------------------------------------------------------------------------
# commands


def cmd_gas_eval(cfg: RunConfig) -> dict:
    sc, gas = cfg.scenario, cfg.gas
    states = []
    if "z" in sc:
        zs, us, ms = (np.atleast_1d(np.asarray(sc.get(k, dv), dtype=float)) for k, dv in
                      (("z", None), ("u", 0.0), ("m", 1.0)))
        zs, us, ms = np.broadcast_arrays(zs, us, ms)
        states = [ThermoState(float(a), float(b), float(c)) for a, b, c in zip(zs, us, ms)]
    elif "tau" in sc:
        ts, us, Ss = (np.atleast_1d(np.asarray(sc.get(k, dv), dtype=float)) for k, dv in
                      (("tau", None), ("u", 0.0), ("S", 0.0)))
        ts, us, Ss = np.broadcast_arrays(ts, us, Ss)
        states = [state_from_physical(float(a), float(b), float(c), gas) for a, b, c in zip(ts, us, Ss)]
    n_rand = int(sc.get("random_states", 0))
    if n_rand:
        rng = np.random.default_rng(cfg.seed)
        for _ in range(n_rand):
            states.append(ThermoState(float(rng.uniform(0.1, 3.0)), float(rng.normal()),
                                      float(rng.uniform(0.2, 3.0))))
    if not states:
        raise ConfigError("scenario: give z (with u, m), tau (with u, S) or random_states")
    rows = []
    for st in states:
        dv = derived(st, gas)
        rows.append((st.z, st.u, st.m, dv.tau, dv.p, dv.c, dv.r, dv.s))
    emit_csv(["z", "u", "m", "tau", "p", "c", "r", "s"], rows, cfg.out / "states.csv")
    return {"status": "ok", "n_states": len(rows), "d": gas.d, "files": ["states.csv"]}


def cmd_hugoniot_curve(cfg: RunConfig) -> dict:
    sc, d = cfg.scenario, cfg.gas.d
    lo_dom, hi_dom = hugoniot_domain(d)
    n = int(sc.get("n", 100))
    if n < 2:
        raise ConfigError("scenario.n: need at least 2 points")
    lo = _get(sc, "Z_min", lo_dom * (1.0 + 1e-6))
    hi = _get(sc, "Z_max", hi_dom * (1.0 - 1e-6))
    if not (lo_dom < lo < hi < hi_dom):
        raise ConfigError(f"scenario.Z_min/Z_max: need {lo_dom:.6g} < Z_min < Z_max < {hi_dom:.6g}")
    Z = np.linspace(lo, hi, n)
    if lo <= 1.0 <= hi:
        Z[np.argmin(np.abs(Z - 1.0))] = 1.0
    f = hugoniot_f(Z, d)
    g, h = hugoniot_g_h(Z, d)
    emit_columns({"Z": Z, "f": f, "g": g, "h": h}, cfg.out / "hugoniot.csv")
    return {"status": "ok", "n": n, "d": d, "Z_domain": [lo_dom, hi_dom], "files": ["hugoniot.csv"]}


def cmd_contact_jump(cfg: RunConfig) -> dict:
    sc, gas = cfg.scenario, cfg.gas
    left = ThermoState(_get(sc, "z", positive=True), _get(sc, "u", 0.0), _get(sc, "m", positive=True))
    m_r = _get(sc, "m_right", positive=True)
    right = contact_apply(left, m_r, gas)
    jump = ContactJump(left.m, m_r, gas.d)
    p_l, p_r = derived(left, gas).p, derived(right, gas).p
    emit_csv(["side", "z", "u", "m", "p", "r", "s"],
             [("left", left.z, left.u, left.m, p_l, left.r, left.s),
              ("right", right.z, right.u, right.m, p_r, right.r, right.s)], cfg.out / "contact.csv")
    return {"status": "ok", "Q": jump.Q, "kind": jump.kind, "files": ["contact.csv"]}


def _simulate_scenario(cfg: RunConfig):
    kind = cfg.scenario.get("kind")
    zig = ()
    if kind == "single-contact":
        setup, init = _single_contact(cfg)
        prof = setup.profile
    elif kind == "strip":
        prof, init, (x0, x1) = _strip(cfg)
        zig = ((x1, "backward", x0, x1),)
    elif kind == "simple-wave":
        prof, init = _simple_wave(cfg)
    elif kind == "two-contact":
        con = _construct(cfg)
        prof, init = con.profile, con.initial
    else:
        raise ConfigError("scenario.kind: expected one of single-contact, strip, simple-wave, two-contact")
    return kind, prof, init, zig


def cmd_simulate(cfg: RunConfig) -> dict:
    kind, prof, init, zig = _simulate_scenario(cfg)
    opts = cfg.mesh.options(cfg.refine, zigzag=zig)
    outcome = solve_ibvp(init, prof, cfg.mesh.horizon, cfg.gas, opts)
    files = _mesh_tables(cfg.out, outcome, cfg.mesh.quiet_rel)
    summary = {"kind": kind, "h": opts.h, "horizon": cfg.mesh.horizon}
    summary.update(outcome.summary())
    if outcome.zigzags:
        zz = outcome.zigzags[0]
        emit_columns({"n": np.arange(1, len(zz.bounce_t) + 1), "t": zz.bounce_t, "x": zz.bounce_x,
                      "z": zz.bounce_z}, cfg.out / "zigzag.csv")
        files.append("zigzag.csv")
    if prof.monotone and outcome.status != "shock-formed":
        summary["rc_violations"] = len(check_global_rc(outcome.mesh))
    ni = detect_noninteracting(outcome.mesh, cfg.mesh.quiet_rel)
    if ni is not None and len(ni.T_jumps) > 1:
        summary["interaction_boundary_forward"] = interaction_boundary_is_forward(outcome.mesh, ni)[0]
    summary["files"] = files
    return summary


def cmd_classify(cfg: RunConfig) -> dict:
    setup, init = _single_contact(cfg)
    verdict = classify_single_contact(init, setup.profile, cfg.gas)
    summary = {"status": verdict.kind, "margin": verdict.margin, "z_star": verdict.z_star,
               "x_star": verdict.x_star, "pure_backward": verdict.pure_backward}
    if cfg.scenario.get("simulate", False):
        outcome = solve_ibvp(init, setup.profile, cfg.mesh.horizon, cfg.gas, cfg.mesh.options(cfg.refine))
        summary["simulation_status"] = outcome.status
        summary.update({f"simulation_{k}": v for k, v in outcome.summary().items() if k != "status"})
        summary["files"] = _mesh_tables(cfg.out, outcome, cfg.mesh.quiet_rel)
    return summary


def cmd_reflect(cfg: RunConfig) -> dict:
    sc = cfg.scenario
    z0, z1, Q = (_fraction_or_number(sc, k) for k in ("z0", "z1", "Q"))
    x0, x1 = _get(sc, "x0", 0.0), _get(sc, "x1", 1.0)
    n_max = int(sc.get("n_max", 200))
    m = _get(sc, "m", 1.0, positive=True)
    try:
        tr = reflect_recurrence(z0, z1, Q, x0, x1, cfg.gas.d, n_max, m)
    except ValueError as exc:
        raise HypothesisViolation(str(exc)) from exc
    emit_columns({"n": tr.n, "z": tr.z, "t_lower": tr.t_lower, "t_upper": tr.t_upper},
                 cfg.out / "reflection.csv")
    summary = {"status": tr.regime, "regime": tr.regime, "eta": float(tr.eta), "zeta": float(tr.zeta),
               "zeta_exact": str(tr.zeta), "zeta_snapped": tr.zeta_snapped, "limit": tr.limit,
               "N_terminal": tr.N_terminal, "n_stored": len(tr.z_exact), "files": ["reflection.csv"]}
    if tr.regime == "vacuum-in-the-limit" and len(tr.z_exact) > 41:
        fit = decay_rate_fit(tr)
        summary.update({"fit_exponent": fit.exponent, "fit_sr_exponent": fit.sr_exponent,
                        "expected_exponent": fit.expected, "sandwich_ok": fit.sandwich_ok})
    return summary


def cmd_vacuum_check(cfg: RunConfig) -> dict:
    sc = cfg.scenario
    if "z0" in sc:
        ff = reflection_far_field(*(_fraction_or_number(sc, k) for k in ("z0", "z1", "Q")),
                                  _get(sc, "m", 1.0, positive=True), _get(sc, "u_x1", 0.0),
                                  _get(sc, "z_left") if "z_left" in sc else None)
    else:
        ff = {k: _get(sc, k, positive=k.startswith(("m_", "z_"))) for k in
              ("u_left", "u_right", "m_left", "m_right", "z_left", "z_right")}
    v = vacuum_condition(ff["u_left"], ff["u_right"], ff["m_left"], ff["m_right"], ff["z_left"], ff["z_right"])
    ff = {k: float(x) for k, x in ff.items()}
    emit_csv(list(sorted(ff)) + ["margin", "holds"], [[ff[k] for k in sorted(ff)] + [v.margin, v.holds]],
             cfg.out / "vacuum.csv")
    return {"status": "holds" if v.holds else "fails", "margin": v.margin, "far_field": ff,
            "files": ["vacuum.csv"]}


def _construct(cfg: RunConfig):
    sc = cfg.scenario
    Z = _z_profile(sc)
    return construct_shockfree_two_contacts(
        _get(sc, "Q0", positive=True), _get(sc, "Q1", positive=True), _get(sc, "x0", 0.0),
        _get(sc, "x1"), _get(sc, "T", positive=True), Z, cfg.gas,
        Z_upper=_get(sc, "Z_upper") if "Z_upper" in sc else None,
        Z_lower=_get(sc, "Z_lower") if "Z_lower" in sc else None,
        n_grid=int(sc.get("n_grid", 1200)))


def _certificate_table(cert, out: Path):
    emit_csv(["check", "lhs", "rhs", "margin", "ok"],
             [(c.name, c.lhs, c.rhs, c.margin, c.ok) for c in cert.checks], out / "certificate.csv")


def cmd_construct(cfg: RunConfig) -> dict:
    try:
        con = _construct(cfg)
    except HypothesisViolation as exc:
        if exc.certificate is not None:
            _certificate_table(exc.certificate, cfg.out)
        raise
    _certificate_table(con.certificate, cfg.out)
    emit_columns({"x": con.x, "u": con.u, "p": con.p, "z": con.z}, cfg.out / "initial_data.csv")
    summary = {"status": "certified", "X_star": con.X_star, "T_star": con.T_star,
               "constants": con.certificate.constants, "files": ["certificate.csv", "initial_data.csv"]}
    if cfg.scenario.get("simulate", False):
        outcome = solve_ibvp(con.initial, con.profile, cfg.mesh.horizon, cfg.gas, cfg.mesh.options(cfg.refine))
        summary["simulation_status"] = outcome.status
        summary["files"] += _mesh_tables(cfg.out, outcome, cfg.mesh.quiet_rel)
    return summary


def cmd_shock_trace(cfg: RunConfig) -> dict:
    sc = cfg.scenario
    fam = sc.get("family", "backward")
    a_range = sc.get("a_range")
    if not (isinstance(a_range, list) and len(a_range) == 2):
        raise ConfigError("scenario.a_range: expected [a_lo, a_hi]")
    x_tbl = sc.get("x_of_a")
    if not isinstance(x_tbl, dict):
        raise ConfigError("scenario.x_of_a: missing table")
    if x_tbl.get("kind", "log") == "log":
        nu = _number(x_tbl, "nu", "scenario.x_of_a", positive=True)
        x_ref = _number(x_tbl, "x_ref", "scenario.x_of_a", 0.0)

        def xf(a):
            return x_ref + nu * np.log(np.asarray(a) - 1.0)

        def dxf(a):
            return nu / (np.asarray(a) - 1.0)
        src = xf
    elif x_tbl["kind"] == "samples":
        a_s = np.asarray(x_tbl.get("a", []), dtype=float)
        x_s = np.asarray(x_tbl.get("x", []), dtype=float)
        if a_s.size != x_s.size or a_s.size < 2:
            raise ConfigError("scenario.x_of_a: a and x must be equal-length lists (>= 2)")
        if np.any(np.diff(a_s) <= 0):
            raise HypothesisViolation("shock strength samples must be strictly increasing")
        src, dxf = (a_s, x_s), None
    else:
        raise ConfigError("scenario.x_of_a.kind: expected 'log' or 'samples'")
    bound = _get(sc, "focusing_bound") if "focusing_bound" in sc else None
    tr = trace_single_shock(src, (float(a_range[0]), float(a_range[1])), _get(sc, "U1", 0.0),
                            _get(sc, "P1", positive=True), _get(sc, "M0", positive=True), fam,
                            cfg.gas, dx_da=dxf, n=int(sc.get("n", 201)), focusing_bound=bound)
    emit_columns({"a": tr.a, "x": tr.x, "t": tr.t, "z0": tr.z0, "u0": tr.u0, "z1": tr.z1, "m1": tr.m1,
                  "xi": tr.xi, "r_x": tr.r_x, "s_x": tr.s_x}, cfg.out / "shock_trace.csv")
    dt = np.diff(tr.t)
    summary = {"status": "ok", "rh_max": tr.rh_max, "a_range": list(tr.a_range), "truncation": tr.truncation,
               "t_monotone": bool(np.all(dt > 0) or np.all(dt < 0)), "focusing_time": tr.focusing_time,
               "within_focusing_bound": tr.within_bound, "files": ["shock_trace.csv"]}
    lo, hi = tr.a_range
    if bound is not None and hi - 1.0 > 2.0 * (lo - 1.0):
        lhs, rhs, nu, ok = log_divergence_check(tr, hi - 1.0, lo - 1.0, bound=bound)
        summary["log_divergence"] = {"x_spread": lhs, "required": rhs, "nu": nu, "ok": ok}
    return summary


HANDLERS = {
    "gas-eval": cmd_gas_eval,
    "hugoniot-curve": cmd_hugoniot_curve,
    "contact-jump": cmd_contact_jump,
    "simulate": cmd_simulate,
    "classify": cmd_classify,
    "reflect": cmd_reflect,
    "vacuum-check": cmd_vacuum_check,
    "construct": cmd_construct,
    "shock-trace": cmd_shock_trace,
}


def run(cfg: RunConfig) -> tuple[int, dict]:
    """Execute one configured command; returns (exit code, summary)."""
    cfg.out.mkdir(parents=True, exist_ok=True)
    base = {"command": cfg.command, "version": __version__, "seed": cfg.seed,
            "gamma": cfg.gas.gamma, "refine": cfg.refine}
    try:
        summary = HANDLERS[cfg.command](cfg)
        code = EXIT_OK
    except ConfigError as exc:
        summary, code = {"status": "config-error", "error": str(exc)}, EXIT_CONFIG
    except HypothesisViolation as exc:
        summary = {"status": "hypothesis-violated", "error": str(exc)}
        if exc.certificate is not None:
            summary["failed_checks"] = exc.certificate.failed
        code = EXIT_HYPOTHESIS
    except (SolverError, DomainError, FloatingPointError, ArithmeticError) as exc:
        summary, code = {"status": "numerical-failure", "error": str(exc)}, EXIT_NUMERIC
    summary.update(base)
    write_summary(summary, cfg.out)
    return code, summary


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="shockfree", description=__doc__.splitlines()[0],
                                formatter_class=argparse.RawDescriptionHelpFormatter,
                                epilog="commands:\n" + "\n".join(f"  {k:15s} {v}" for k, v in COMMANDS.items()))
    p.add_argument("--version", action="version", version=f"shockfree {__version__}")
    sub = p.add_subparsers(dest="command", required=True, metavar="command")
    for name, help_text in COMMANDS.items():
        sp = sub.add_parser(name, help=help_text, description=help_text)
        sp.add_argument("--config", required=True, help="TOML run configuration")
        sp.add_argument("--out", help="output directory (default: [output].dir or ./out)")
        sp.add_argument("--horizon", type=float, help="final simulation time (overrides [mesh].horizon)")
        sp.add_argument("--refine", type=int, help="halve the mesh width k times")
        sp.add_argument("--seed", type=int, help="seed for randomized sampling")
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, args.command, args.out, args.seed, args.refine, args.horizon)
    except (ConfigError, DomainError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    code, summary = run(cfg)
    json.dump(_clean(summary), sys.stdout, sort_keys=True)
    sys.stdout.write("\n")
    if code != EXIT_OK:
        print(f"{summary['status']}: {summary.get('error', '')}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
