import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from shockfree.gas import DomainError, gas_from_d
from shockfree.scenarios import log_divergence_check, shock_invariant_derivatives, trace_single_shock

NU = 0.5


def log_x(a):
    return NU * np.log(np.asarray(a) - 1.0)


def log_dx(a):
    return NU / (np.asarray(a) - 1.0)


def trace(d=2.0, family="backward", a_range=(1.01, 1.5), n=201, **kw):
    return trace_single_shock(log_x, a_range, 0.0, 1.0, 1.0, family, gas_from_d(d),
                              dx_da=log_dx, n=n, **kw)


@pytest.mark.parametrize("d", [2.0, 3.0, 4.0])
@pytest.mark.parametrize("family", ["forward", "backward"])
def test_trace_satisfies_jump_relations_and_is_monotone(d, family):
    tr = trace(d, family)
    assert tr.rh_max <= 1e-10
    dt = np.diff(tr.t)
    assert np.all(dt > 0) or np.all(dt < 0)


def test_stationary_side_is_constant():
    d = 3.0
    tr = trace(d)
    p1 = tr.m1**2 * tr.z1 ** (d + 1) / (d + 1)
    assert np.allclose(p1, 1.0, rtol=1e-12)
    assert tr.U1 == 0.0


def test_quadrature_converges_under_halving():
    a, b = trace(n=101), trace(n=201)
    assert np.max(np.abs(a.t - b.t[::2])) <= 1e-8


@settings(max_examples=20)
@given(st.sampled_from([2.0, 3.0, 4.0]), st.floats(1.001, 1.2), st.floats(0.1, 0.4))
def test_invariant_derivatives_match_finite_differences(d, a, span):
    lo = a
    hi = min(a + span, 0.999 * d ** (1 / (d - 1)))
    aa = np.linspace(lo, hi, 5)[1:-1]
    eps = 1e-6
    for fam in (1, -1):
        dr, ds = shock_invariant_derivatives(aa, 1.3, 0.8, 0.2, fam, d)
        rp, sp = _invariants(aa + eps, fam, d)
        rm, sm = _invariants(aa - eps, fam, d)
        assert np.allclose(dr, (rp - rm) / (2 * eps), rtol=1e-5, atol=1e-8)
        assert np.allclose(ds, (sp - sm) / (2 * eps), rtol=1e-5, atol=1e-8)


def _invariants(a, fam, d, P1=1.3, M0=0.8, U1=0.2):
    from shockfree.waves import hugoniot_f, hugoniot_g_h
    f = hugoniot_f(a, d)
    g, _ = hugoniot_g_h(a, d)
    z0 = ((d + 1) * P1 / (M0 * M0 * f * f * a ** (d + 1))) ** (1 / (d + 1))
    u0 = U1 - fam * M0 * z0 * g
    return u0 - M0 * z0, u0 + M0 * z0


def test_bounded_gradients_force_logarithmic_divergence():
    tr = trace(a_range=(1.0001, 1.5), n=401, focusing_bound=50.0)
    assert tr.within_bound
    lhs, rhs, nu, ok = log_divergence_check(tr, 0.4, 1e-3, bound=50.0)
    assert ok and 0.0 < nu <= NU
    assert lhs == pytest.approx(NU * math.log(400.0), rel=1e-12)
    # observed rate (a-1) x'(a) is NU exactly for the logarithmic trace
    assert log_divergence_check(tr, 0.4, 1e-3)[2] == pytest.approx(NU, rel=1e-9)


def test_linear_parameterization_has_unbounded_gradient():
    # x(a) linear: the isentropic-side gradient grows like 1/(a-1)
    tr = trace_single_shock(lambda a: np.asarray(a) - 1.0, (1.0 + 1e-8, 1.5), 0.0, 1.0, 1.0, "backward",
                            gas_from_d(2.0), dx_da=lambda a: np.ones_like(np.asarray(a)), n=401,
                            focusing_bound=50.0)
    assert not tr.within_bound
    # a bounded gradient would need a logarithmic spread that x(a) lacks
    # once log(delta/eps) is large enough
    assert not log_divergence_check(tr, 0.4, 1e-7, bound=50.0)[3]


def test_sampled_parameterization():
    a = np.linspace(1.01, 1.5, 60)
    tr = trace_single_shock((a, log_x(a)), (1.0, 2.0), 0.0, 1.0, 1.0, "backward", gas_from_d(2.0), n=51)
    assert tr.a_range == (pytest.approx(1.01), pytest.approx(1.5))
    assert tr.rh_max <= 1e-10
    with pytest.raises(ValueError):
        trace_single_shock((np.full(5, 1.2), np.linspace(0, 1, 5)), (1.1, 1.3), 0.0, 1.0, 1.0,
                           "backward", gas_from_d(2.0))


def test_range_truncation_and_errors():
    tr = trace(a_range=(0.9, 5.0), n=21)
    assert tr.truncation is not None
    lo, hi = tr.a_range
    assert lo > 1.0 and hi < 2.0
    with pytest.raises(ValueError):
        trace(family="sideways")
    with pytest.raises(DomainError):
        trace_single_shock(log_x, (1.1, 1.2), 0.0, -1.0, 1.0, "backward", gas_from_d(2.0), dx_da=log_dx)
    with pytest.raises(ValueError):
        log_divergence_check(trace(n=21), 1e-3, 0.4)
