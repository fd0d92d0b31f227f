import numpy as np
import pytest

from eislab.aggregator import CobbDouglas, EpsteinZin, as_custom, make_aggregator
from eislab.certainty import crra
from eislab.environment import ShockPath
from eislab.errors import GridRangeError, NonHomotheticError
from eislab.setting import IncomeBlock, LinearTerminal, Setting
from eislab.solver import (HomotheticSolution, RatioInterpolant, WealthGrid,
                           continuation_value, load_solution_cache, path_environment,
                           save_solution_cache, solution_to_csv, solve_backward,
                           solve_homothetic)
from eislab.twoperiod import TwoPeriodProblem, solve_two_period

GRID = WealthGrid.logspaced(0.05, 20.0, 192)


def riskless_setting(horizon, rf=1.5, beta=0.5, psi=2.0, gamma=2.0, terminal=1.0):
    return Setting.iid(make_aggregator(beta, psi), crra(gamma),
                       np.array([[rf]]), [1.0], horizon, terminal_scale=terminal)


def risky_setting(horizon=3, beta=0.9, psi=2.0, gamma=4.0):
    returns = np.array([[1.07, 0.97], [1.20, 0.82], [1.02, 1.02]])
    return Setting.iid(make_aggregator(beta, psi), crra(gamma), returns,
                       [0.5, 0.5], horizon)


def test_ratio_interpolant_exact_on_linear_data():
    nodes = np.geomspace(0.1, 10.0, 32)
    interp = RatioInterpolant(nodes, 3.7 * nodes)
    w = np.array([0.05, 0.123, 1.0, 7.7, 10.0])
    assert np.allclose(interp.value(w), 3.7 * w, rtol=1e-14)
    assert np.allclose(interp.deriv(w), 3.7, rtol=1e-12)
    assert np.allclose(interp.second(w), 0.0, atol=1e-12)
    with pytest.raises(GridRangeError):
        interp.value(10.5)


def test_ratio_interpolant_accuracy_on_concave_data():
    nodes = np.geomspace(0.1, 10.0, 96)
    interp = RatioInterpolant(nodes, nodes**0.6)
    w = np.geomspace(0.12, 9.5, 50)
    assert np.max(np.abs(interp.value(w) - w**0.6) / w**0.6) < 1e-8
    assert np.max(np.abs(interp.deriv(w) - 0.6 * w**-0.4) / (0.6 * w**-0.4)) < 1e-4
    second = 0.6 * (-0.4) * w**-1.4
    assert np.max(np.abs(interp.second(w) - second) / np.abs(second)) < 1e-2


def test_homothetic_single_period_recursion_example():
    # T-1 slope with riskless R=1.5, beta=0.5, psi=2: b^(psi-1) = 0.25 + 0.25*1.5
    sol = solve_homothetic(riskless_setting(1))
    assert sol.b[0] == pytest.approx(0.625, rel=1e-12)
    assert sol.share[0] == pytest.approx(0.4, rel=1e-12)
    assert sol.cont_slope[0] == pytest.approx(1.5, rel=1e-14)


def test_homothetic_matches_two_period_closed_form():
    for psi in (0.5, 1.0, 2.0):
        sol = solve_homothetic(riskless_setting(1, psi=psi))
        p = TwoPeriodProblem(1.0, 0.0, 1.5, 1.0, make_aggregator(0.5, psi))
        assert sol.consumption(0, 1.0) == pytest.approx(solve_two_period(p).c1, rel=1e-12)


def test_unit_elasticity_share_is_constant():
    sol = solve_homothetic(risky_setting(horizon=6, psi=1.0, beta=0.9))
    assert np.allclose(sol.share, 0.1, rtol=1e-13)


def test_deterministic_return_recursion():
    # R=1, terminal 1, psi != 1: b_t = ((1-b)^psi + b^psi b_{t+1}^(psi-1))^(1/(psi-1))
    beta, psi, T = 0.5, 2.0, 5
    sol = solve_homothetic(riskless_setting(T, rf=1.0, beta=beta, psi=psi))
    expected = 1.0
    for t in reversed(range(T)):
        expected = ((1 - beta) ** psi + beta ** psi * expected ** (psi - 1.0)) ** (1.0 / (psi - 1.0))
    assert sol.b[0] == pytest.approx(expected, rel=1e-12)


def test_homothetic_rejects_income_and_nonlinear_terminal():
    s = risky_setting()
    income = IncomeBlock(1.0, tuple(np.array([1.0, 1.0]) for _ in range(3)),
                         tuple(np.array([1.0, 1.0]) for _ in range(3)))
    with pytest.raises(NonHomotheticError):
        solve_homothetic(Setting(s.periods, LinearTerminal(1.0), income=income))


def test_grid_solver_matches_homothetic_route():
    setting = risky_setting(horizon=4)
    hom = solve_homothetic(setting)
    grid_sol = solve_backward(setting, GRID)
    for t in range(4):
        nodes = grid_sol.tables[t].nodes
        shares = grid_sol.tables[t].consumption / nodes
        assert np.max(np.abs(shares - hom.share[t])) < 1e-6
        assert np.max(np.abs(grid_sol.tables[t].value - hom.b[t] * nodes)
                      / (hom.b[t] * nodes)) < 1e-8


def test_grid_solver_share_constant_across_wealth():
    sol = solve_backward(risky_setting(horizon=2), GRID)
    shares = sol.tables[0].consumption / sol.tables[0].nodes
    assert shares.max() - shares.min() < 1e-4


def test_grid_matches_two_period_closed_form_at_nodes():
    setting = riskless_setting(1, rf=1.5, beta=0.5, psi=2.0)
    sol = solve_backward(setting, GRID)
    for w in (0.1, 1.0, 5.0):
        p = TwoPeriodProblem(w, 0.0, 1.5, 1.0, EpsteinZin(0.5, 2.0))
        assert float(sol.consumption(0, w)) == pytest.approx(solve_two_period(p).c1, rel=1e-6)


def test_grid_solver_monotone_and_interior():
    sol = solve_backward(risky_setting(horizon=3), GRID)
    for tab in sol.tables:
        assert np.all(np.diff(tab.value) > 0)
        assert np.all(np.diff(tab.consumption) > 0)
        assert np.all(tab.consumption > 0)
        assert np.all(tab.consumption < tab.nodes)


def test_grid_homogeneity_doubling():
    setting = risky_setting(horizon=3)
    sol = solve_backward(setting, GRID)
    w = np.geomspace(0.1, 5.0, 9)
    v1 = np.array([float(sol.value(0, x)) for x in w])
    v2 = np.array([float(sol.value(0, 2 * x)) for x in w])
    assert np.max(np.abs(v2 - 2 * v1) / np.abs(2 * v1)) < 1e-6


def test_zero_probability_pruning_is_irrelevant():
    base = risky_setting(horizon=2)
    # append a third state that almost never happens, with harmless returns
    probs = [0.5, 0.5 - 1e-13, 1e-13]
    returns = np.array([[1.07, 0.97, 1.0], [1.20, 0.82, 1.0], [1.02, 1.02, 1.0]])
    padded = Setting.iid(base.periods[0].aggregator, base.periods[0].ce, returns, probs, 2)
    a = solve_homothetic(base)
    b = solve_homothetic(padded)
    assert np.allclose(a.b, b.b, rtol=1e-9)
    assert np.allclose(a.share, b.share, rtol=1e-9)


def test_custom_homogeneous_aggregator_share_path():
    setting = Setting.iid(as_custom(EpsteinZin(0.5, 2.0)), crra(2.0),
                          np.array([[1.5]]), [1.0], 1)
    sol = solve_homothetic(setting)
    assert sol.share[0] == pytest.approx(0.4, rel=1e-9)


def test_income_reduction_against_two_period_closed_form():
    # deterministic income at the terminal date reproduces the saver problem:
    # c solves max f(c, rho(Rf(e1-c) + e2)) with e2 = tau
    beta, psi, rf, e2 = 0.5, 2.0, 1.25, 0.5
    income = IncomeBlock(1.0, (np.array([e2]),), (np.array([1.0]),))
    setting = Setting.iid(make_aggregator(beta, psi), crra(2.0), np.array([[rf]]),
                          [1.0], 1, income=income)
    sol = solve_backward(setting, WealthGrid.logspaced(0.05, 30.0, 384))
    p = TwoPeriodProblem(1.0, e2, rf, 1.0, make_aggregator(beta, psi))
    expected = solve_two_period(p).c1
    got = float(sol.consumption(0, 1.0, 1.0))
    assert got == pytest.approx(expected, rel=2e-5)


def test_income_reduction_homogeneous_in_w_and_p():
    income = IncomeBlock(1.0, tuple(np.array([0.6, 1.4]) for _ in range(3)),
                         tuple(np.array([0.9, 1.1]) for _ in range(3)))
    setting = Setting.iid(make_aggregator(0.9, 0.8), crra(3.0),
                          np.array([[1.05, 0.99], [1.15, 0.9]]), [0.5, 0.5], 3,
                          income=income)
    sol = solve_backward(setting, GRID)
    lam = 1.7
    v1 = sol.value(1, 2.0, 1.0)
    v2 = sol.value(1, lam * 2.0, lam * 1.0)
    assert v2 == pytest.approx(lam * v1, rel=1e-10)


def test_income_tensor_cross_checks_reduction():
    income = IncomeBlock(1.0, tuple(np.array([0.7, 1.3]) for _ in range(2)),
                         tuple(np.array([0.95, 1.05]) for _ in range(2)))
    setting = Setting.iid(make_aggregator(0.9, 1.5), crra(2.0),
                          np.array([[1.04, 1.0]]), [0.5, 0.5], 2, income=income)
    reduced = solve_backward(setting, WealthGrid.logspaced(0.05, 25.0, 256))
    from eislab.income import solve_income_tensor
    tensor = solve_income_tensor(setting, WealthGrid.logspaced(0.05, 25.0, 96))
    for w, p in [(1.0, 1.0), (2.0, 0.8), (4.0, 1.2)]:
        assert tensor.value(0, w, p) == pytest.approx(float(reduced.value(0, w, p)), rel=2e-3)


def test_path_environment_homothetic_endpoints():
    base = risky_setting(horizon=3)
    shocked = Setting.iid(base.periods[0].aggregator, base.periods[0].ce,
                          base.periods[0].returns * 0.9, [0.5, 0.5], 3)
    path = ShockPath(base, shocked)
    env = path_environment(path)
    assert env.homothetic
    g0 = solve_homothetic(shocked).cont_slope[0]
    g1 = solve_homothetic(base).cont_slope[0]
    assert env.g(0.0) == pytest.approx(g0, rel=1e-12)
    assert env.g(1.0) == pytest.approx(g1, rel=1e-12)
    # linear-in-alpha blend: exact alpha-derivatives
    w = 2.0
    assert env.v_alpha(w, 0.5) == pytest.approx((g1 - g0) * w, rel=1e-12)
    assert env.v_walpha(w, 0.5) == pytest.approx(g1 - g0, rel=1e-12)


def test_continuation_value_endpoints_reproduce_solutions():
    base = risky_setting(horizon=2)
    shocked = Setting.iid(base.periods[0].aggregator, base.periods[0].ce,
                          base.periods[0].returns * 0.95, [0.5, 0.5], 2)
    path = ShockPath(base, shocked)
    lo = solve_backward(shocked, GRID)
    hi = solve_backward(base, GRID)
    w = 1.3
    at0 = continuation_value(path, lo, hi, 0, w, 0.0)
    at1 = continuation_value(path, lo, hi, 0, w, 1.0)
    assert at0["v"] == pytest.approx(float(lo.continuation(0, w)), rel=1e-14)
    assert at1["v"] == pytest.approx(float(hi.continuation(0, w)), rel=1e-14)
    mid = continuation_value(path, lo, hi, 0, w, 0.5)
    assert mid["v"] == pytest.approx(0.5 * (at0["v"] + at1["v"]), rel=1e-14)
    with pytest.raises(Exception):
        continuation_value(path, lo, hi, 0, w, 1.5)


def test_csv_and_cache_round_trip(tmp_path):
    setting = risky_setting(horizon=2)
    sol = solve_backward(setting, WealthGrid.logspaced(0.1, 10.0, 64))
    csv_path = tmp_path / "solution.csv"
    solution_to_csv(sol, csv_path)
    header = csv_path.read_text().splitlines()[0]
    assert header == "t,w,V,c,theta_index"
    out = save_solution_cache(sol, tmp_path)
    assert out.exists()
    again = load_solution_cache(setting, tmp_path)
    assert again is not None
    w = 1.23
    assert float(again.value(0, w)) == pytest.approx(float(sol.value(0, w)), rel=1e-12)
    assert load_solution_cache(risky_setting(horizon=3), tmp_path) is None


def test_homothetic_csv_needs_grid(tmp_path):
    sol = solve_homothetic(risky_setting(horizon=2))
    solution_to_csv(sol, tmp_path / "hom.csv", grid=WealthGrid.logspaced(0.1, 10.0, 8))
    rows = (tmp_path / "hom.csv").read_text().splitlines()
    assert len(rows) == 1 + 2 * 8
