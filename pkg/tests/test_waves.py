import math

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from shockfree.gas import DomainError, ThermoState, gas_from_d
from shockfree.waves import (ContactJump, contact_apply, contact_resolve, contact_rs_map,
                             contact_strength, hugoniot_domain, hugoniot_f, hugoniot_g_h,
                             hugoniot_g_h_quotient, rh_residuals, shock_connect,
                             simple_wave_connect, stationary_profile)

from support import physical_shock

ds = st.sampled_from([1.5, 2.0, 3.0, 4.0, 6.0])


def interior(d, frac):
    lo, hi = hugoniot_domain(d)
    return lo + (hi - lo) * frac


def test_zero_strength_limits():
    for d in (2.0, 3.0, 4.0):
        assert hugoniot_f(1.0, d) == pytest.approx(1.0, abs=1e-15)
        g, h = hugoniot_g_h(1.0, d)
        assert g == 0.0
        assert h == pytest.approx(1.0, abs=1e-15)


@pytest.mark.parametrize("d", [2.0, 3.0, 4.0])
def test_one_sided_limits_of_quotient_form(d):
    for side in (+1, -1):
        Z = 1.0 + side * 1e-6
        g, h = hugoniot_g_h_quotient(Z, d)
        assert abs(g) < 1e-5
        assert h == pytest.approx(1.0, abs=1e-4)


def test_golden_shock_functions():
    # independent (tau, p) oracle at Z = 6/5, d = 2
    f, g, h = physical_shock(1.2, 2.0)
    assert hugoniot_f(1.2, 2.0) == pytest.approx(f, rel=1e-13)
    assert hugoniot_g_h(1.2, 2.0) == (pytest.approx(g, rel=1e-12), pytest.approx(h, rel=1e-12))
    # exact rationals for d = 2: f^2 = 875/864, g^2 = 1/24, h^2 = 3/2
    assert (f, g, h) == (pytest.approx(math.sqrt(875 / 864), rel=1e-14),
                         pytest.approx(math.sqrt(1 / 24), rel=1e-14),
                         pytest.approx(math.sqrt(1.5), rel=1e-14))


@given(ds, st.floats(0.02, 0.98))
def test_shock_functions_match_physical_oracle(d, frac):
    Z = interior(d, frac)
    assume(abs(Z - 1.0) > 1e-3)
    f, g, h = physical_shock(Z, d, z0=1.3, m0=0.7)
    assert hugoniot_f(Z, d) == pytest.approx(f, rel=1e-10)
    gg, hh = hugoniot_g_h(Z, d)
    assert gg == pytest.approx(g, rel=1e-9)
    assert hh == pytest.approx(h, rel=1e-10)


@given(ds, st.floats(0.02, 0.98))
def test_reduced_and_quotient_forms_agree_away_from_one(d, frac):
    Z = interior(d, frac)
    assume(abs(Z - 1.0) > 1e-2)
    g1, h1 = hugoniot_g_h(Z, d)
    g2, h2 = hugoniot_g_h_quotient(Z, d)
    assert g1 == pytest.approx(float(g2), rel=1e-9)
    assert h1 == pytest.approx(float(h2), rel=1e-9)


@given(ds, st.floats(0.01, 0.99))
def test_entropy_increases_across_admissible_shocks(d, frac):
    Z = interior(d, frac)
    f = hugoniot_f(Z, d)
    if Z > 1.0:
        assert f >= 1.0 - 1e-14
    else:
        assert f <= 1.0 + 1e-14


def test_domain_edges_rejected():
    lo, hi = hugoniot_domain(2.0)
    assert (lo, hi) == (pytest.approx(0.5), pytest.approx(2.0))
    for Z in (lo, hi, 0.0, 5.0):
        with pytest.raises(DomainError):
            hugoniot_f(Z, 2.0)


@given(ds, st.floats(0.01, 0.99), st.sampled_from(["forward", "backward"]),
       st.floats(0.2, 3.0), st.floats(-2, 2), st.floats(0.2, 3.0))
def test_shock_connect_satisfies_jump_relations(d, frac, family, z0, u0, m0):
    Z = interior(d, frac)
    side = "behind" if Z >= 1.0 else "ahead"
    gas = gas_from_d(d)
    s0 = ThermoState(z0, u0, m0)
    s1, pt = shock_connect(s0, Z, family, side, gas)
    assert max(rh_residuals(s0, s1, pt.xi, gas)) <= 1e-10
    assert math.copysign(1.0, pt.xi) == (1.0 if family == "forward" else -1.0)


def test_lax_inconsistent_side_rejected():
    gas = gas_from_d(2.0)
    with pytest.raises(DomainError):
        shock_connect(ThermoState(1, 0, 1), 1.2, "forward", "ahead", gas)
    with pytest.raises(ValueError):
        shock_connect(ThermoState(1, 0, 1), 1.2, "sideways", "behind", gas)


def test_contact_strength_and_kind():
    cj = ContactJump(1.0, 8.0, 3.0)  # Q = 8^(1/2)
    assert cj.Q == pytest.approx(math.sqrt(8.0))
    assert cj.kind == "3-contact"
    assert ContactJump(2.0, 1.0, 3.0).kind == "1-contact"
    assert ContactJump(1.0, 1.0, 3.0).kind == "none"


@given(ds, st.floats(0.2, 3), st.floats(-2, 2), st.floats(0.2, 3), st.floats(0.2, 3))
def test_contact_apply_preserves_pressure_and_velocity(d, z, u, ml, mr):
    gas = gas_from_d(d)
    left = ThermoState(z, u, ml)
    right = contact_apply(left, mr, gas)
    pl = ml * ml * z ** (d + 1) / (d + 1)
    pr = mr * mr * right.z ** (d + 1) / (d + 1)
    assert pr == pytest.approx(pl, rel=1e-12)
    assert right.u == u
    # m z scales by Q
    Q = contact_strength(ml, mr, d)
    assert mr * right.z == pytest.approx(Q * ml * z, rel=1e-12)
    r, s = contact_rs_map(left.r, left.s, Q)
    assert (r, s) == (pytest.approx(right.r, abs=1e-12), pytest.approx(right.s, abs=1e-12))


@given(st.floats(-3, 3), st.floats(-3, 3), st.floats(0.2, 5))
def test_contact_resolve_inverts_the_map(s_l, r_r, Q):
    r_l, s_r = contact_resolve(s_l, r_r, Q)
    r2, s2 = contact_rs_map(r_l, s_l, Q)
    assert r2 == pytest.approx(r_r, abs=1e-12)
    assert s2 == pytest.approx(s_r, abs=1e-12)


def test_simple_wave_connect_keeps_invariant():
    gas = gas_from_d(2.0)
    a = ThermoState(1.0, 0.3, 2.0)
    fwd = simple_wave_connect(a, 0.7, "forward", gas)
    bwd = simple_wave_connect(a, 0.7, "backward", gas)
    assert fwd.r == pytest.approx(a.r)
    assert bwd.s == pytest.approx(a.s)
    with pytest.raises(DomainError):
        simple_wave_connect(a, 0.0, "forward", gas)


def test_stationary_profile_has_constant_pressure():
    gas = gas_from_d(3.0)
    m = np.array([0.5, 1.0, 2.0])
    z = stationary_profile(m, 0.0, 1.5, gas)
    assert m * m * z**4 / 4 == pytest.approx(np.full(3, 1.5))
    with pytest.raises(DomainError):
        stationary_profile(m, 0.0, -1.0, gas)
