import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eislab.aggregator import (CobbDouglas, EpsteinZin, as_custom, consumption_devaluation,
                               check_euler_identity, check_homogeneous, check_increasing,
                               make_aggregator, monotone_transform, substitution_elasticity)
from eislab.errors import DomainError


def fd_partials(agg, c, v):
    # wider steps for second differences: roundoff scales like eps / h^2
    hc1 = 1e-6 * max(abs(c), 1.0)
    hv1 = 1e-6 * max(abs(v), 1.0)
    hc2 = 2e-4 * max(abs(c), 1.0)
    hv2 = 2e-4 * max(abs(v), 1.0)
    fc = (agg.f(c + hc1, v) - agg.f(c - hc1, v)) / (2 * hc1)
    fv = (agg.f(c, v + hv1) - agg.f(c, v - hv1)) / (2 * hv1)
    fcc = (agg.f(c + hc2, v) - 2 * agg.f(c, v) + agg.f(c - hc2, v)) / hc2**2
    fvv = (agg.f(c, v + hv2) - 2 * agg.f(c, v) + agg.f(c, v - hv2)) / hv2**2
    fcv = (agg.f(c + hc2, v + hv2) - agg.f(c + hc2, v - hv2)
           - agg.f(c - hc2, v + hv2) + agg.f(c - hc2, v - hv2)) / (4 * hc2 * hv2)
    return fc, fv, fcc, fcv, fvv


@pytest.mark.parametrize("agg", [
    EpsteinZin(0.5, 2.0),
    EpsteinZin(0.3, 0.5),
    EpsteinZin(0.9, 1.5),
    EpsteinZin(0.6, 0.25),
    CobbDouglas(0.5),
    CobbDouglas(0.8),
])
def test_analytic_partials_match_finite_differences(agg):
    for c, v in [(0.5, 1.5), (2.0, 0.3), (1.0, 1.0), (0.1, 4.0)]:
        fc, fv, fcc, fcv, fvv = fd_partials(agg, c, v)
        assert agg.f_c(c, v) == pytest.approx(fc, rel=1e-6)
        assert agg.f_v(c, v) == pytest.approx(fv, rel=1e-6)
        assert agg.f_cc(c, v) == pytest.approx(fcc, rel=1e-4, abs=1e-8)
        assert agg.f_cv(c, v) == pytest.approx(fcv, rel=1e-4, abs=1e-8)
        assert agg.f_vv(c, v) == pytest.approx(fvv, rel=1e-4, abs=1e-8)


def test_ces_formula_matches_definition():
    beta, psi = 0.4, 2.0
    agg = EpsteinZin(beta, psi)
    r = 1 - 1 / psi
    c, v = 1.3, 0.7
    expected = ((1 - beta) * c**r + beta * v**r) ** (1 / r)
    assert agg.f(c, v) == pytest.approx(expected, rel=1e-14)


def test_cobb_douglas_is_unit_elasticity_limit():
    beta = 0.5
    cd = CobbDouglas(beta)
    near = EpsteinZin(beta, 1.0 + 1e-7)
    for c, v in [(0.5, 1.5), (2.0, 0.3)]:
        assert cd.f(c, v) == pytest.approx(near.f(c, v), rel=1e-6)
    assert cd.f(0.8, 1.1) == pytest.approx(0.8**0.5 * 1.1**0.5, rel=1e-15)


def test_make_aggregator_collapses_to_cobb_douglas():
    assert isinstance(make_aggregator(0.5, 1.0), CobbDouglas)
    assert isinstance(make_aggregator(0.5, 1.0 + 1e-12), CobbDouglas)
    assert isinstance(make_aggregator(0.5, 2.0), EpsteinZin)


@given(beta=st.floats(0.1, 0.9), psi=st.floats(0.2, 5.0),
       lam=st.floats(0.1, 10.0), c=st.floats(0.05, 5.0), v=st.floats(0.05, 5.0))
@settings(max_examples=60, deadline=None)
def test_degree_one_homogeneity_and_euler(beta, psi, lam, c, v):
    agg = make_aggregator(beta, psi)
    f = agg.f(c, v)
    assert agg.f(lam * c, lam * v) == pytest.approx(lam * f, rel=1e-10)
    euler = c * agg.f_c(c, v) + v * agg.f_v(c, v)
    assert euler == pytest.approx(f, rel=1e-8)


def test_sampled_checks():
    rng = np.random.default_rng(1)
    agg = EpsteinZin(0.5, 2.0)
    assert check_increasing(agg, rng)
    assert check_homogeneous(agg, rng) < 1e-10
    assert check_euler_identity(agg, rng) < 1e-8


def test_zero_limits():
    for agg in [EpsteinZin(0.5, 2.0), EpsteinZin(0.5, 0.5), CobbDouglas(0.5)]:
        assert agg.f(0.0, 0.0) == 0.0
        assert agg.f(0.0, 1.0) >= 0.0


def test_substitution_elasticity_is_parameter_for_ces():
    for psi in (0.25, 0.5, 2.0, 3.7):
        agg = EpsteinZin(0.45, psi)
        assert substitution_elasticity(agg, 1.2, 0.6) == pytest.approx(psi, rel=1e-10)
    assert substitution_elasticity(CobbDouglas(0.3), 0.7, 1.9) == pytest.approx(1.0, rel=1e-12)


def test_monotone_transform_partials_follow_chain_rule():
    base = EpsteinZin(0.5, 0.5)
    wrapped = monotone_transform(base, lambda u: u**3, lambda u: 3 * u**2, lambda u: 6 * u)
    c, v = 0.9, 1.4
    assert wrapped.f(c, v) == pytest.approx(base.f(c, v) ** 3, rel=1e-14)
    fc, fv, fcc, fcv, fvv = fd_partials(wrapped, c, v)
    assert wrapped.f_c(c, v) == pytest.approx(fc, rel=1e-6)
    assert wrapped.f_v(c, v) == pytest.approx(fv, rel=1e-6)
    assert wrapped.f_cc(c, v) == pytest.approx(fcc, rel=1e-4)
    assert wrapped.f_cv(c, v) == pytest.approx(fcv, rel=1e-4)
    assert wrapped.f_vv(c, v) == pytest.approx(fvv, rel=1e-4)
    # ordinal ranking preserved even though cardinal curvature changes
    assert not wrapped.homogeneous_degree_one


def test_consumption_devaluation_chain_rule():
    base = EpsteinZin(0.5, 2.0)
    shocked = consumption_devaluation(base, 1.25)
    c, v = 1.1, 0.8
    assert shocked.f(c, v) == pytest.approx(base.f(c / 1.25, v), rel=1e-14)
    assert shocked.f(c, v) <= base.f(c, v)
    fc, fv, fcc, fcv, fvv = fd_partials(shocked, c, v)
    assert shocked.f_c(c, v) == pytest.approx(fc, rel=1e-6)
    assert shocked.f_cv(c, v) == pytest.approx(fcv, rel=1e-4)
    assert shocked.homogeneous_degree_one
    assert substitution_elasticity(shocked, c, v) == pytest.approx(2.0, rel=1e-10)


def test_devaluation_below_one_rejected():
    with pytest.raises(DomainError):
        consumption_devaluation(EpsteinZin(0.5, 2.0), 0.9)


def test_as_custom_round_trip():
    base = EpsteinZin(0.5, 2.0)
    opaque = as_custom(base)
    assert opaque.f(1.0, 2.0) == base.f(1.0, 2.0)
    assert opaque.homogeneous_degree_one and opaque.inada


def test_parameter_validation():
    with pytest.raises(DomainError):
        EpsteinZin(1.1, 2.0)
    with pytest.raises(DomainError):
        EpsteinZin(0.5, -1.0)
    with pytest.raises(DomainError):
        EpsteinZin(0.5, 1.0)
    with pytest.raises(DomainError):
        CobbDouglas(0.0)
