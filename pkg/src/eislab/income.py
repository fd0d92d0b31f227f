"""Tensor-grid solver for income settings that do not admit the ratio reduction.

State is (wealth, permanent income).  Values are tabulated on a log-log tensor
grid and interpolated with a bicubic spline; this path trades the exactness of
the homogeneous reduction for generality and is also used as an independent
cross-check of that reduction.  Spline values are clamped at zero before they
enter certainty equivalents (bicubic fits can undershoot near the origin).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import RectBivariateSpline

from .certainty import eval_certainty_equivalent
from .errors import DomainError, GridRangeError
from .numerics import golden_max
from .setting import Setting
from .solver import WealthGrid

P_GRID_PAD = 2.0  # pad factor around the reachable permanent-income range
N_P_NODES = 17


class _Spline2D:
    def __init__(self, w_nodes, p_nodes, values):
        self._lw = np.log(w_nodes)
        self._lp = np.log(p_nodes)
        self._s = RectBivariateSpline(self._lw, self._lp, values, kx=3, ky=3)
        self.w_max = w_nodes[-1]
        self.p_range = (p_nodes[0], p_nodes[-1])

    def value(self, w, p):
        w = np.asarray(w, dtype=float)
        if np.any(w > self.w_max * (1.0 + 1e-9)):
            raise GridRangeError(f"wealth {float(np.max(w)):.6g} above tensor grid top {self.w_max:.6g}")
        w = np.minimum(np.maximum(w, np.exp(self._lw[0])), self.w_max)
        p = np.minimum(np.maximum(p, self.p_range[0]), self.p_range[1])
        return self._s(np.log(w), np.log(p), grid=False)


@dataclass
class TensorSolution:
    """Tabulated (wealth x permanent income) solution."""

    setting: Setting
    w_grids: list
    p_grids: list
    values: list        # arrays (n_w, n_p) per period
    consumptions: list  # arrays (n_w, n_p) per period
    splines: list

    kind = "income_tensor"
    homothetic = False

    def value(self, t: int, w: float, p: float) -> float:
        return float(self.splines[t].value(w, p))

    def consumption(self, t: int, w: float, p: float) -> float:
        spl = _Spline2D(self.w_grids[t], self.p_grids[t], self.consumptions[t])
        return float(spl.value(w, p))

    def continuation(self, t: int, s: float, p: float) -> float:
        next_spline = None if t == self.setting.horizon - 1 else self.splines[t + 1]
        return _continuation(self.setting, t, s, p, next_spline)


def _continuation(setting: Setting, t: int, s: float, p: float, next_spline) -> float:
    period = setting.periods[t]
    income = setting.income
    tau, eta = income.tau[t], income.eta[t]
    T = setting.horizon
    best = -np.inf
    for k in range(period.n_portfolios):
        w_next = period.returns[k] * s + p * eta * tau
        p_next = p * eta
        if t == T - 1:
            util = setting.terminal_scale() * w_next
        else:
            util = np.maximum(next_spline.value(w_next, p_next), 0.0)
        m = eval_certainty_equivalent(period.ce, util, period.states.probs)
        best = max(best, m)
    return best


def solve_income_tensor(setting: Setting, grid: WealthGrid,
                        n_p: int = N_P_NODES) -> TensorSolution:
    """Backward induction on a (wealth, permanent income) tensor grid."""
    if setting.income is None:
        raise DomainError("tensor income solver needs an income block")
    T = setting.horizon
    income = setting.income
    p0 = income.p0
    if p0 <= 0.0:
        raise DomainError("tensor solver needs strictly positive initial permanent income")

    # reachable permanent-income range per period, padded for off-path queries
    p_lo, p_hi = p0 / P_GRID_PAD, p0 * P_GRID_PAD
    p_grids = [np.geomspace(p_lo, p_hi, n_p)]
    for t in range(1, T):
        p_lo *= float(income.eta[t - 1].min())
        p_hi *= float(income.eta[t - 1].max())
        p_grids.append(np.geomspace(p_lo, p_hi, n_p))

    w_lo, w_hi = grid.nodes[0], grid.nodes[-1]
    w_grids = [grid.nodes]
    for t in range(1, T):
        period = setting.periods[t - 1]
        growth = max(float(period.returns.max()), 1.0)
        y_max = p_grids[t - 1][-1] * float((income.eta[t - 1] * income.tau[t - 1]).max())
        w_hi = growth * w_hi + y_max
        w_lo = min(w_lo, 0.25 * p_grids[t][0] * float(income.tau[t - 1].min())
                   if t < T else w_lo)
        w_grids.append(np.geomspace(w_lo, w_hi, grid.n))

    values: list = [None] * T
    consumptions: list = [None] * T
    splines: list = [None] * T
    next_spline = None

    for t in reversed(range(T)):
        period = setting.periods[t]
        agg = period.aggregator
        wn, pn = w_grids[t], p_grids[t]
        V = np.empty((wn.size, pn.size))
        C = np.empty((wn.size, pn.size))
        for j, p in enumerate(pn):
            for i, w in enumerate(wn):
                def objective(c):
                    return agg.f(c, max(_continuation(setting, t, w - c, p, next_spline), 0.0))

                c_star = golden_max(objective, 1e-10 * w, w * (1.0 - 1e-10), rel_tol=1e-9)
                f_star = objective(c_star)
                f_corner = agg.f(w, max(_continuation(setting, t, 0.0, p, next_spline), 0.0))
                if f_corner > f_star:
                    c_star, f_star = w, f_corner
                C[i, j] = c_star
                V[i, j] = f_star
        values[t] = V
        consumptions[t] = C
        splines[t] = _Spline2D(wn, pn, V)
        next_spline = splines[t]

    return TensorSolution(setting, w_grids, p_grids, values, consumptions, splines)
