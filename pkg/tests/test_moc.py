import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from shockfree.gas import gas_from_d
from shockfree.gradients import check_global_rc
from shockfree.mesh import EntropyProfile
from shockfree.moc import (InitialData, MocOptions, detect_noninteracting,
                           interaction_boundary_is_forward, solve_ibvp)
from shockfree.scenarios import reflect_recurrence, smooth_step, smooth_step_prime

from support import (backward_compression_data, forward_rarefaction_data, simple_wave_data,
                     simple_wave_exact_z, simple_wave_shock_time, strip_data, strip_first_reflection)

GAS2 = gas_from_d(2.0)
# frozen from simple_wave_shock_time for amp = -0.4, d = 2, m = 1
T_SHOCK_SIMPLE = 0.7448131761645559


def simple_wave_error(h, amp=0.4, t_end=1.0):
    init, z0, _ = simple_wave_data(amp)
    out = solve_ibvp(init, EntropyProfile.constant(1.0), t_end, GAS2, MocOptions(h=h, n_tracks=4))
    sn = out.mesh.snapshots[-1]
    sel = (sn.x > 0.3) & (sn.x < 3.7)
    return out, float(np.max(np.abs(sn.z[sel] - simple_wave_exact_z(z0, sn.x[sel], sn.t))))


def test_shock_time_oracle_is_frozen():
    _, z, zx = simple_wave_data(-0.4)
    assert simple_wave_shock_time(zx, z) == pytest.approx(T_SHOCK_SIMPLE, rel=1e-10)


def test_constant_state_is_noninteracting_from_the_start():
    d = 2.0
    prof = EntropyProfile((1.0, 3.0), (0.0,))
    out = solve_ibvp(InitialData.constant(-1.0, 1.0, 0.2, 0.7), prof, 2.0, GAS2,
                     MocOptions(h=0.05, n_tracks=4))
    assert out.status == "eventually-noninteracting"
    assert out.T_noninteracting == 0.0
    sn = out.mesh.snapshots[-1]
    assert np.allclose(sn.u, 0.2, atol=1e-13)
    assert np.allclose(sn.m * sn.m * sn.z ** (d + 1) / (d + 1), 0.7, rtol=1e-12)


def test_rarefactive_simple_wave_converges():
    _, e1 = simple_wave_error(0.04)
    out, e2 = simple_wave_error(0.02)
    assert out.status in ("eventually-noninteracting", "shock-free-to-horizon")
    assert e2 < 1e-4
    assert e1 / e2 >= 3.5


def test_riemann_invariant_of_the_wave_family_is_untouched():
    out, _ = simple_wave_error(0.02)
    for sn in out.mesh.snapshots:
        assert np.max(np.abs(sn.r + 1.0)) < 1e-12


def test_invariants_conserved_along_tracks_at_scheme_order():
    devs = []
    for h in (0.04, 0.02):
        out, _ = simple_wave_error(h)
        devs.append(max(np.max(np.abs(tr.s - tr.s[0])) if tr.family == "forward"
                        else np.max(np.abs(tr.r - tr.r[0])) for tr in out.mesh.tracks))
    assert devs[1] < 1e-6
    assert devs[0] / devs[1] >= 3.5


def transport_residual(h):
    # s_t + c alpha at fixed x; snapshot times are uneven, so use the
    # three-point derivative for nonuniform spacing
    init, _, _ = simple_wave_data(0.4)
    out = solve_ibvp(init, EntropyProfile.constant(1.0), 0.6, GAS2,
                     MocOptions(h=h, n_tracks=0, n_snapshots=300))
    snaps = out.mesh.snapshots
    worst = 0.0
    for k in range(1, len(snaps) - 1, 10):
        a, b, c_ = snaps[k - 1], snaps[k], snaps[k + 1]
        h1, h2 = b.t - a.t, c_.t - b.t
        st_ = (-h2 / (h1 * (h1 + h2)) * a.s + (h2 - h1) / (h1 * h2) * b.s
               + h1 / (h2 * (h1 + h2)) * c_.s)
        worst = max(worst, float(np.max(np.abs(st_ + b.m * b.z**2 * b.alpha))))
    return worst


def test_time_derivative_consistent_with_transport():
    coarse, fine = transport_residual(0.02), transport_residual(0.01)
    assert fine < 3e-3
    assert coarse / fine >= 3.5


def test_compressive_simple_wave_forms_shock_near_oracle_time():
    init, _, _ = simple_wave_data(-0.4)
    for h in (0.04, 0.02):
        out = solve_ibvp(init, EntropyProfile.constant(1.0), 2.0, GAS2, MocOptions(h=h, n_tracks=2))
        assert out.status == "shock-formed"
        assert out.shock.family == "forward"
        assert out.shock.t == pytest.approx(T_SHOCK_SIMPLE, rel=0.02)


def test_compression_with_nonincreasing_entropy_forms_shock():
    init, prof = backward_compression_data(2.0, 1.0, 2.0)
    assert prof.nonincreasing
    out = solve_ibvp(init, prof, 5.0, GAS2, MocOptions(h=0.02, n_tracks=4))
    assert out.status == "shock-formed"
    assert out.shock.family == "backward"
    # backward simple wave: beta = -2 m z_x, the forward-wave oracle applies with z_x -> -z_x
    z = lambda x: 1.0 + 0.4 * smooth_step(np.asarray(x) - 0.5)
    zx = lambda x: -0.4 * smooth_step_prime(np.asarray(x) - 0.5)
    assert out.shock.t == pytest.approx(simple_wave_shock_time(zx, z), rel=0.02)


def test_forward_rarefaction_reflects_compression_at_3_contact():
    d, Q = 2.0, 1.5
    m_r = Q ** ((d + 1) / (d - 1))
    init, prof = forward_rarefaction_data(1.0, m_r, d)
    out = solve_ibvp(init, prof, 4.0, GAS2, MocOptions(h=0.02, n_tracks=8))
    col = out.mesh.contacts[0]
    a, b = col.left["alpha"], col.left["beta"]
    assert a.max() > 0.1
    assert b.min() < -0.01
    assert np.allclose(b, -(Q - 1) / (Q + 1) * a, atol=1e-12)
    assert out.status == "eventually-noninteracting"
    assert check_global_rc(out.mesh) == []


def test_interaction_boundary_on_single_jump_is_trivially_forward():
    d, Q = 2.0, 1.5
    init, prof = forward_rarefaction_data(1.0, Q ** 3, d)
    out = solve_ibvp(init, prof, 4.0, GAS2, MocOptions(h=0.04, n_tracks=0))
    ni = detect_noninteracting(out.mesh)
    assert ni is not None and len(ni.T_jumps) == 1
    assert interaction_boundary_is_forward(out.mesh, ni) == (True, [])


def test_initial_data_helpers():
    x = np.linspace(0, 1, 11)
    u = x**2
    p = 1 + x
    init = InitialData.from_samples(x, u, p)
    assert init.u_x(0.5) == pytest.approx(1.0, rel=1e-6)
    inv = InitialData.from_invariants(x, -1 + 0.1 * x, 1 + 0.2 * x, 1.0, 2.0)
    assert float(inv.u(0.5)) == pytest.approx(0.075)
    assert float(inv.u_x(0.5)) == pytest.approx(0.15)
    with pytest.raises(ValueError):
        solve_ibvp(InitialData.constant(0, 1, 0, 1), EntropyProfile.constant(), 0.0, GAS2)
    with pytest.raises(ValueError):
        solve_ibvp(InitialData.constant(0, 1, 0, 1), EntropyProfile((1, 2), (1.5,)), 1.0, GAS2)


@settings(max_examples=8)
@given(st.floats(0.05, 0.5), st.floats(0.6, 1.4), st.sampled_from([1.5, 2.0, 3.0]))
def test_rarefactive_smooth_data_stay_rarefactive(amp, centre, d):
    # flat at both ends, so the outer boundaries see no waves
    init, _, _ = simple_wave_data(amp, d=d, x_right=3.0, centre=centre)
    out = solve_ibvp(init, EntropyProfile.constant(1.0), 1.0, gas_from_d(d),
                     MocOptions(h=0.025, n_tracks=0))
    assert out.status != "shock-formed"
    for sn in out.mesh.snapshots:
        # interpolation undershoot at the wave edges, O(h^2) or better
        assert np.min(sn.alpha) > -4e-3 * out.mesh.grad_scale
        assert np.max(np.abs(sn.beta)) < 1e-10


# ---------------------------------------------------------------------------
# reflection between a 3-contact and a 1-contact

def zigzag_run(h, du, t_end):
    init, prof = strip_data(du=du)
    return solve_ibvp(init, prof, t_end, GAS2,
                      MocOptions(h=h, n_tracks=4, zigzag=[(1.0, "backward", 0.0, 1.0)]))


@pytest.mark.slow
def test_zigzag_follows_reflection_recurrence():
    out = zigzag_run(0.01, 0.3, 12.0)
    zz = out.zigzags[0]
    zs = np.concatenate([[0.9], zz.bounce_z])
    assert zs.size >= 5
    tr = reflect_recurrence(float(zs[0]), float(zs[1]), 2.0, 0.0, 1.0, 2.0, n_max=zs.size - 1)
    assert np.max(np.abs(tr.z - zs) / zs) < 1e-6


@pytest.mark.slow
def test_first_reflection_converges_to_corner_formula():
    exact = strip_first_reflection(1.0, 0.9, 0.95, 2.0)
    assert exact == pytest.approx(0.3, rel=1e-14)  # eta z0 with eta = 1/3: zeta = 0
    errs = [abs(zigzag_run(h, 0.95, 6.0).zigzags[0].bounce_z[0] - exact) for h in (0.02, 0.01)]
    assert errs[1] < 1e-5
    assert errs[0] / errs[1] > 4.0
