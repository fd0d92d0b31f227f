"""Finite-horizon backward induction: value, policy, and continuation-value functions.

Two routes:

* ``solve_homothetic`` exploits degree-one homogeneity: with a homogeneous
  aggregator, a positively homogeneous certainty equivalent, and linear terminal
  utility, value functions are linear, V_t(w) = b_t w, with

      b_t = max over shares s in [0,1] of f_t(s, (1-s) * mu_t),
      mu_t = max over portfolios of M_t(b_{t+1} R_{t+1}(theta)),

  and for the CES family the share maximization collapses to the closed recursion
  b_t^(psi-1) = (1-beta)^psi + beta^psi mu_t^(psi-1) with consumption share
  (1-beta)^psi b_t^(1-psi).

* ``solve_backward`` tabulates on a log-spaced wealth grid.  Interpolation is
  monotone piecewise-cubic in log-wealth applied to the value-to-wealth ratio
  (exact on linear data, so the two routes coincide to machine precision on
  homothetic settings).  Settings with an income block are solved in
  wealth-to-permanent-income units when homogeneity permits, and on a full
  (wealth x permanent-income) tensor grid otherwise.

Per-period grid upper bounds grow with the largest gross return so evaluation
never leaves the tabulated range; querying outside it raises instead of
extrapolating.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.interpolate import PchipInterpolator, RectBivariateSpline

from .aggregator import Aggregator, CobbDouglas, EpsteinZin
from .certainty import eval_certainty_equivalent, is_positively_homogeneous
from .environment import Environment, ShockPath
from .errors import DomainError, EislabError, GridRangeError, NonHomotheticError
from .numerics import golden_max, refine_foc
from .setting import LinearTerminal, Setting

# relative jump in the interpolated marginal value marking a non-smooth node
KINK_JUMP_TOL = 1e-2


@dataclass(frozen=True)
class WealthGrid:
    """Log-spaced wealth nodes in (0, w_max]; order flag is informational."""

    nodes: np.ndarray
    order: str = "cubic"

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        if nodes.ndim != 1 or nodes.size < 4:
            raise DomainError("wealth grid needs at least four nodes")
        if nodes[0] <= 0.0 or np.any(np.diff(nodes) <= 0.0):
            raise DomainError("wealth grid must be strictly increasing and positive")
        object.__setattr__(self, "nodes", nodes)

    @property
    def n(self) -> int:
        return self.nodes.size

    @staticmethod
    def logspaced(w_min: float, w_max: float, n: int) -> "WealthGrid":
        if w_min <= 0 or w_max <= w_min:
            raise DomainError("need 0 < w_min < w_max")
        return WealthGrid(np.geomspace(w_min, w_max, n))


class RatioInterpolant:
    """Monotone piecewise-cubic interpolation of (V - v0)/w against log-wealth.

    Evaluation below the grid extends linearly through the anchor v0 (the exact
    value at zero wealth); evaluation above the top node raises GridRangeError.
    """

    def __init__(self, nodes: np.ndarray, values: np.ndarray, v0: float = 0.0):
        self.nodes = np.asarray(nodes, dtype=float)
        self.values = np.asarray(values, dtype=float)
        self.v0 = float(v0)
        self._x = np.log(self.nodes)
        q = (self.values - self.v0) / self.nodes
        self._q = PchipInterpolator(self._x, q, extrapolate=False)
        self._dq = self._q.derivative(1)
        self._d2q = self._q.derivative(2)
        self._q_lo = q[0]

    @property
    def w_max(self) -> float:
        return float(self.nodes[-1])

    def _clamp(self, w):
        w = np.asarray(w, dtype=float)
        top = self.w_max
        if np.any(w > top * (1.0 + 1e-9)):
            raise GridRangeError(
                f"wealth {float(np.max(w)):.6g} above tabulated maximum {top:.6g}")
        return np.minimum(w, top)

    def value(self, w):
        w = self._clamp(w)
        below = w < self.nodes[0]
        out = np.empty_like(w)
        if below.any():
            out[below] = self.v0 + w[below] * self._q_lo
        if (~below).any():
            x = np.log(w[~below])
            out[~below] = self.v0 + w[~below] * self._q(x)
        return out if out.ndim else float(out)

    def deriv(self, w):
        w = self._clamp(w)
        below = w < self.nodes[0]
        out = np.empty_like(w)
        if below.any():
            out[below] = self._q_lo
        if (~below).any():
            x = np.log(w[~below])
            out[~below] = self._q(x) + self._dq(x)
        return out if out.ndim else float(out)

    def second(self, w):
        w = self._clamp(w)
        below = w < self.nodes[0]
        out = np.empty_like(w)
        if below.any():
            out[below] = 0.0
        if (~below).any():
            x = np.log(w[~below])
            out[~below] = (self._dq(x) + self._d2q(x)) / w[~below]
        return out if out.ndim else float(out)


# ---------------------------------------------------------------------------
# Homothetic route
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HomotheticSolution:
    """Linear value/policy functions: V_t(w) = b_t w, c_t(w) = share_t w."""

    setting: Setting
    b: np.ndarray           # value slope per decision period
    share: np.ndarray       # consumption share per decision period
    cont_slope: np.ndarray  # continuation slope mu_t: v_t(s) = mu_t s
    theta: np.ndarray       # chosen portfolio index per period

    kind = "homothetic"
    homothetic = True

    def value(self, t: int, w):
        return self.b[t] * np.asarray(w, dtype=float)

    def consumption(self, t: int, w):
        return self.share[t] * np.asarray(w, dtype=float)

    def continuation(self, t: int, s):
        return self.cont_slope[t] * np.asarray(s, dtype=float)

    def continuation_derivs(self, t: int, s):
        g = float(self.cont_slope[t])
        return g * float(s), g, 0.0

    def smooth_at(self, t: int, s: float) -> bool:
        return True


def require_homothetic(setting: Setting) -> None:
    for t, period in enumerate(setting.periods):
        if not period.aggregator.homogeneous_degree_one:
            raise NonHomotheticError(f"aggregator at period {t} is not homogeneous of degree one")
        if not is_positively_homogeneous(period.ce):
            raise NonHomotheticError(f"certainty equivalent at period {t} is not positively homogeneous")
    if not isinstance(setting.terminal, LinearTerminal):
        raise NonHomotheticError("terminal utility must be linear in consumption")
    if setting.income is not None:
        raise NonHomotheticError("income block breaks linearity of the value in wealth alone")


def portfolio_certainty_slopes(setting: Setting, t: int, b_next) -> np.ndarray:
    """M_t(b_{t+1} R_{t+1}(theta)) for every portfolio; b_next is scalar or per-state."""
    period = setting.periods[t]
    slopes = np.empty(period.n_portfolios)
    for k in range(period.n_portfolios):
        vals = np.asarray(b_next, dtype=float) * period.returns[k]
        slopes[k] = eval_certainty_equivalent(period.ce, vals, period.states.probs)
    return slopes


def optimal_share(aggregator: Aggregator, mu: float) -> tuple[float, float]:
    """max over shares of f(s, (1-s) mu); returns (share, value)."""
    if isinstance(aggregator, EpsteinZin):
        beta, psi = aggregator.beta, aggregator.psi
        b = ((1.0 - beta) ** psi + beta ** psi * mu ** (psi - 1.0)) ** (1.0 / (psi - 1.0))
        return (1.0 - beta) ** psi * b ** (1.0 - psi), b
    if isinstance(aggregator, CobbDouglas):
        beta = aggregator.beta
        b = (1.0 - beta) ** (1.0 - beta) * beta ** beta * mu ** beta
        return 1.0 - beta, b
    obj = lambda s: aggregator.f(s, (1.0 - s) * mu)
    share = golden_max(obj, 1e-12, 1.0 - 1e-12, rel_tol=1e-13)
    foc = lambda s: aggregator.f_c(s, (1.0 - s) * mu) - mu * aggregator.f_v(s, (1.0 - s) * mu)
    share = refine_foc(foc, share, 1e-12, 1.0 - 1e-12)
    return float(share), float(obj(share))


def solve_homothetic(setting: Setting) -> HomotheticSolution:
    """Backward recursion on value slopes; rejects non-homothetic settings."""
    require_homothetic(setting)
    T = setting.horizon
    b = np.empty(T)
    share = np.empty(T)
    slope = np.empty(T)
    theta = np.empty(T, dtype=int)

    b_next = setting.terminal_scale()
    for t in reversed(range(T)):
        slopes = portfolio_certainty_slopes(setting, t, b_next)
        k = int(np.argmax(slopes))  # ties -> lowest index
        mu = float(slopes[k])
        share[t], b[t] = optimal_share(setting.periods[t].aggregator, mu)
        slope[t] = mu
        theta[t] = k
        b_next = b[t]
    return HomotheticSolution(setting, b, share, slope, theta)


# ---------------------------------------------------------------------------
# Grid route
# ---------------------------------------------------------------------------

@dataclass
class PeriodTable:
    nodes: np.ndarray
    value: np.ndarray
    consumption: np.ndarray
    cont_value: np.ndarray       # continuation on the same nodes read as savings
    cont_at_zero: float
    portfolio: np.ndarray        # argmax portfolio per savings node
    value_interp: RatioInterpolant
    cont_interp: RatioInterpolant
    kink_spans: list             # (s_lo, s_hi) intervals flagged non-smooth


@dataclass
class GridSolution:
    """Tabulated solution; write-once after construction."""

    setting: Setting
    tables: list

    kind = "grid"
    homothetic = False

    def value(self, t: int, w):
        return self.tables[t].value_interp.value(w)

    def consumption(self, t: int, w):
        tab = self.tables[t]
        interp = PchipInterpolator(np.log(tab.nodes), tab.consumption, extrapolate=False)
        w = np.asarray(w, dtype=float)
        return interp(np.log(w))

    def continuation(self, t: int, s):
        return self.tables[t].cont_interp.value(s)

    def continuation_derivs(self, t: int, s):
        tab = self.tables[t]
        return (float(tab.cont_interp.value(s)), float(tab.cont_interp.deriv(s)),
                float(tab.cont_interp.second(s)))

    def smooth_at(self, t: int, s: float) -> bool:
        return not any(lo <= s <= hi for lo, hi in self.tables[t].kink_spans)


def _period_grids(setting: Setting, grid: WealthGrid, income: bool) -> list:
    """Per-period node arrays with upper bounds grown so evaluation stays in range."""
    T = setting.horizon
    nodes0 = grid.nodes
    lo = nodes0[0]
    hi = nodes0[-1]
    grids = [nodes0]
    for t in range(1, T):
        period = setting.periods[t - 1]
        growth = max(float(period.returns.max()), 1.0)
        if income:
            eta_min = float(setting.income.eta[t - 1].min())
            tau_max = float(setting.income.tau[t - 1].max())
            hi = growth * hi / eta_min + tau_max
            lo = min(lo, 0.5 * float(setting.income.tau[t - 1].min()))
        else:
            hi = growth * hi
        grids.append(np.geomspace(lo, hi, grid.n))
    return grids


def _maximize_consumption(agg: Aggregator, w: float, cont: RatioInterpolant,
                          allow_corner: bool) -> tuple[float, float]:
    """argmax over c of f(c, v(w - c)), honoring the c <= w constraint."""
    lo = 1e-12 * w
    hi = w * (1.0 - 1e-12)

    def objective(c):
        return agg.f(c, cont.value(w - c))

    c_star = golden_max(objective, lo, hi, rel_tol=1e-11)

    def foc(c):
        s = w - c
        v = cont.value(s)
        return agg.f_c(c, v) - cont.deriv(s) * agg.f_v(c, v)

    c_star = float(refine_foc(foc, c_star, lo, hi))
    f_star = float(objective(c_star))
    if allow_corner:
        f_corner = float(agg.f(w, cont.v0))
        if f_corner > f_star:
            return w, f_corner
    return c_star, f_star


def _kink_spans(nodes: np.ndarray, portfolio: np.ndarray,
                cont: RatioInterpolant) -> list:
    spans = []
    dv = cont.deriv(nodes)
    for j in range(nodes.size - 1):
        switch = portfolio[j] != portfolio[j + 1]
        jump = abs(dv[j + 1] - dv[j]) > KINK_JUMP_TOL * max(abs(dv[j]), abs(dv[j + 1]))
        if switch and jump:
            spans.append((float(nodes[j]), float(nodes[j + 1])))
    return spans


def solve_backward(setting: Setting, grid: WealthGrid) -> "GridSolution | IncomeSolution":
    """Tabulated backward induction.

    Pure-portfolio settings solve on wealth directly.  Income settings solve in
    wealth-to-permanent-income units when every aggregator is homogeneous and
    every certainty equivalent positively homogeneous (the two-state problem is
    degree-one homogeneous in (w, p)); otherwise they fall back to a tensor grid
    (see ``solve_income_tensor``).
    """
    if setting.income is not None:
        homogeneous = all(p.aggregator.homogeneous_degree_one and is_positively_homogeneous(p.ce)
                          for p in setting.periods)
        if homogeneous and isinstance(setting.terminal, LinearTerminal):
            return _solve_income_units(setting, grid)
        from .income import solve_income_tensor
        return solve_income_tensor(setting, grid)

    T = setting.horizon
    grids = _period_grids(setting, grid, income=False)
    b_T = setting.terminal_scale()
    tables: list = [None] * T
    next_interp: RatioInterpolant | None = None

    for t in reversed(range(T)):
        period = setting.periods[t]
        nodes = grids[t]
        n = nodes.size
        cont = np.empty(n)
        portfolio = np.empty(n, dtype=int)
        for j, s in enumerate(nodes):
            best_val, best_k = -np.inf, 0
            for k in range(period.n_portfolios):
                w_next = period.returns[k] * s
                if t == T - 1:
                    util = b_T * w_next
                else:
                    util = np.maximum(next_interp.value(w_next), 0.0)
                m = eval_certainty_equivalent(period.ce, util, period.states.probs)
                if m > best_val:
                    best_val, best_k = m, k
            cont[j] = best_val
            portfolio[j] = best_k
        cont_interp = RatioInterpolant(nodes, cont, v0=0.0)

        value = np.empty(n)
        consumption = np.empty(n)
        for i, w in enumerate(nodes):
            c_star, f_star = _maximize_consumption(period.aggregator, w, cont_interp,
                                                   allow_corner=False)
            consumption[i] = c_star
            value[i] = f_star
        value_interp = RatioInterpolant(nodes, value, v0=0.0)
        tables[t] = PeriodTable(nodes, value, consumption, cont, 0.0, portfolio,
                                value_interp, cont_interp,
                                _kink_spans(nodes, portfolio, cont_interp))
        next_interp = value_interp

    return GridSolution(setting, tables)


@dataclass
class IncomeSolution:
    """Solution of an income setting in wealth-to-permanent-income units.

    Tables live in x = w/p units; V(w, p) = p * Vhat(w/p) and the continuation
    value of savings s at permanent income p is p * vhat(s/p).
    """

    setting: Setting
    tables: list

    kind = "income_units"
    homothetic = False

    def value(self, t: int, w, p: float):
        if p <= 0.0:
            raise DomainError("permanent income must be positive here; use p=0 branch upstream")
        return p * self.tables[t].value_interp.value(np.asarray(w, dtype=float) / p)

    def consumption(self, t: int, w, p: float):
        tab = self.tables[t]
        interp = PchipInterpolator(np.log(tab.nodes), tab.consumption, extrapolate=False)
        x = np.asarray(w, dtype=float) / p
        return p * interp(np.log(x))

    def continuation(self, t: int, s, p: float):
        return p * self.tables[t].cont_interp.value(np.asarray(s, dtype=float) / p)

    def continuation_derivs(self, t: int, s, p: float):
        """(v, v_w, v_ww, v_p) at savings s and permanent income p."""
        tab = self.tables[t]
        x = float(s) / p
        vhat = float(tab.cont_interp.value(x))
        dvhat = float(tab.cont_interp.deriv(x))
        d2vhat = float(tab.cont_interp.second(x))
        # v(s, p) = p vhat(s/p): v_w = vhat', v_ww = vhat''/p, v_p = vhat - x vhat'
        return p * vhat, dvhat, d2vhat / p, vhat - x * dvhat

    def smooth_at(self, t: int, s: float, p: float = 1.0) -> bool:
        x = s / p
        return not any(lo <= x <= hi for lo, hi in self.tables[t].kink_spans)


def _solve_income_units(setting: Setting, grid: WealthGrid) -> IncomeSolution:
    T = setting.horizon
    income = setting.income
    grids = _period_grids(setting, grid, income=True)
    b_T = setting.terminal_scale()
    tables: list = [None] * T
    next_interp: RatioInterpolant | None = None
    next_v0 = 0.0

    for t in reversed(range(T)):
        period = setting.periods[t]
        tau = income.tau[t]
        eta = income.eta[t]
        nodes = grids[t]
        n = nodes.size

        def cont_at(s: float) -> tuple[float, int]:
            best_val, best_k = -np.inf, 0
            for k in range(period.n_portfolios):
                x_next = period.returns[k] * s / eta + tau
                if t == T - 1:
                    util = eta * b_T * x_next
                else:
                    util = eta * np.maximum(_interp_value(next_interp, next_v0, x_next), 0.0)
                m = eval_certainty_equivalent(period.ce, util, period.states.probs)
                if m > best_val:
                    best_val, best_k = m, k
            return best_val, best_k

        cont = np.empty(n)
        portfolio = np.empty(n, dtype=int)
        for j, s in enumerate(nodes):
            cont[j], portfolio[j] = cont_at(s)
        cont0, _ = cont_at(0.0)
        cont_interp = RatioInterpolant(nodes, cont, v0=cont0)

        value = np.empty(n)
        consumption = np.empty(n)
        agg = period.aggregator
        for i, x in enumerate(nodes):
            c_star, f_star = _maximize_consumption(agg, x, cont_interp, allow_corner=True)
            consumption[i] = c_star
            value[i] = f_star
        v_at_zero = float(agg.f(0.0, cont0))
        value_interp = RatioInterpolant(nodes, value, v0=v_at_zero)
        tables[t] = PeriodTable(nodes, value, consumption, cont, cont0, portfolio,
                                value_interp, cont_interp,
                                _kink_spans(nodes, portfolio, cont_interp))
        next_interp = value_interp
        next_v0 = v_at_zero

    return IncomeSolution(setting, tables)


def _interp_value(interp: RatioInterpolant, v0: float, w):
    return interp.value(w)


# ---------------------------------------------------------------------------
# Shock-path continuation values and environments
# ---------------------------------------------------------------------------

def solve_for_path(path: ShockPath, grid: WealthGrid | None = None):
    """Solve both endpoint settings, preferring the homothetic route."""

    def one(setting):
        try:
            return solve_homothetic(setting)
        except NonHomotheticError:
            if grid is None:
                raise
            return solve_backward(setting, grid)

    return one(path.shocked), one(path.baseline)


def continuation_value(path: ShockPath, sol_low, sol_high, t: int, w: float,
                       alpha: float) -> dict:
    """Blend endpoint continuation values per the convex-combination rule.

    Wealth derivatives come from the endpoint evaluators; alpha derivatives are
    exact because the blend is linear in alpha.
    """
    lam = path.weight(alpha)
    dlam = 1.0 / (path.alpha1 - path.alpha0)
    v0, vw0, vww0 = sol_low.continuation_derivs(t, w)
    v1, vw1, vww1 = sol_high.continuation_derivs(t, w)
    return {
        "v": lam * v1 + (1.0 - lam) * v0,
        "v_w": lam * vw1 + (1.0 - lam) * vw0,
        "v_ww": lam * vww1 + (1.0 - lam) * vww0,
        "v_alpha": (v1 - v0) * dlam,
        "v_walpha": (vw1 - vw0) * dlam,
    }


def path_environment(path: ShockPath, grid: WealthGrid | None = None, t: int = 0,
                     solutions: tuple | None = None) -> Environment:
    """One-period environment (f_t, v_t(., alpha)) induced by a shock path."""
    if solutions is None:
        solutions = solve_for_path(path, grid)
    sol_low, sol_high = solutions
    agg = path.baseline.periods[t].aggregator
    dlam = 1.0 / (path.alpha1 - path.alpha0)

    if getattr(sol_low, "homothetic", False) and getattr(sol_high, "homothetic", False):
        g0 = float(sol_low.cont_slope[t])
        g1 = float(sol_high.cont_slope[t])
        if g1 < g0 - 1e-12 * max(abs(g0), 1.0):
            raise EislabError("path not normalized: baseline continuation below shocked")

        def g(alpha):
            lam = path.weight(alpha)
            return lam * g1 + (1.0 - lam) * g0

        from .environment import homothetic_environment
        return homothetic_environment(agg, g, lambda alpha: (g1 - g0) * dlam,
                                      alpha_lo=path.alpha0, alpha_hi=path.alpha1,
                                      label="path(homothetic)")

    def blended(w, alpha):
        return continuation_value(path, sol_low, sol_high, t, float(w), float(alpha))

    lo = max(sol_low.tables[t].nodes[0], sol_high.tables[t].nodes[0])
    hi = min(sol_low.tables[t].nodes[-1], sol_high.tables[t].nodes[-1])

    def smooth(w, alpha):
        return sol_low.smooth_at(t, w) and sol_high.smooth_at(t, w)

    return Environment(
        aggregator=agg,
        v=lambda w, a: blended(w, a)["v"],
        v_w=lambda w, a: blended(w, a)["v_w"],
        v_ww=lambda w, a: blended(w, a)["v_ww"],
        v_alpha=lambda w, a: blended(w, a)["v_alpha"],
        v_walpha=lambda w, a: blended(w, a)["v_walpha"],
        alpha_lo=path.alpha0, alpha_hi=path.alpha1,
        homothetic=False, wealth_range=(lo, hi), smooth_at=smooth,
        label="path(grid)",
    )


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def solution_to_csv(sol, path, grid: WealthGrid | None = None) -> None:
    """Rows (t, w, V, c, theta_index); homothetic solutions are tabulated on ``grid``."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "w", "V", "c", "theta_index"])
        if getattr(sol, "homothetic", False):
            if grid is None:
                raise DomainError("homothetic solutions need a grid for tabulation")
            for t in range(sol.setting.horizon):
                for w in grid.nodes:
                    writer.writerow([t, f"{w:.17g}", f"{sol.value(t, w):.17g}",
                                     f"{sol.consumption(t, w):.17g}", int(sol.theta[t])])
            return
        for t, tab in enumerate(sol.tables):
            for i, w in enumerate(tab.nodes):
                s = w - tab.consumption[i]
                j = int(np.searchsorted(tab.nodes, s))
                j = min(max(j, 0), tab.nodes.size - 1)
                writer.writerow([t, f"{w:.17g}", f"{tab.value[i]:.17g}",
                                 f"{tab.consumption[i]:.17g}", int(tab.portfolio[j])])


def save_solution_cache(sol, directory) -> Path:
    """Binary cache keyed by the setting digest (grid solutions only)."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    key = sol.setting.digest()
    payload = {}
    for t, tab in enumerate(sol.tables):
        payload[f"nodes_{t}"] = tab.nodes
        payload[f"value_{t}"] = tab.value
        payload[f"consumption_{t}"] = tab.consumption
        payload[f"cont_{t}"] = tab.cont_value
        payload[f"portfolio_{t}"] = tab.portfolio
        payload[f"cont0_{t}"] = np.array([tab.cont_at_zero])
    out = directory / f"{key}.npz"
    np.savez(out, meta=json.dumps({"kind": sol.kind, "T": sol.setting.horizon}), **payload)
    return out


def load_solution_cache(setting: Setting, directory):
    """Rebuild a cached grid solution; returns None when absent."""
    path = Path(directory) / f"{setting.digest()}.npz"
    if not path.exists():
        return None
    data = np.load(path, allow_pickle=False)
    meta = json.loads(str(data["meta"]))
    tables = []
    for t in range(meta["T"]):
        nodes = data[f"nodes_{t}"]
        cont0 = float(data[f"cont0_{t}"][0])
        cont = data[f"cont_{t}"]
        value = data[f"value_{t}"]
        cont_interp = RatioInterpolant(nodes, cont, v0=cont0)
        if meta["kind"] == "grid":
            v0 = 0.0
        else:
            v0 = float(setting.periods[t].aggregator.f(0.0, cont0))
        value_interp = RatioInterpolant(nodes, value, v0=v0)
        portfolio = data[f"portfolio_{t}"]
        tables.append(PeriodTable(nodes, value, data[f"consumption_{t}"], cont, cont0,
                                  portfolio, value_interp, cont_interp,
                                  _kink_spans(nodes, portfolio, cont_interp)))
    cls = GridSolution if meta["kind"] == "grid" else IncomeSolution
    return cls(setting, tables)
