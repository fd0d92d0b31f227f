"""Two-date consumption problem with a risk-free asset, in closed and numeric form.

The agent consumes c today, c2 = Rf (e1 - c) + e2 tomorrow, and ranks plans by
f(c, rho * c2).  For the CES family the demand is available in closed form:

    c = (1-beta)^psi (e1 + e2/Rf) / ((1-beta)^psi + beta^psi (rho Rf)^(psi-1)),

which also covers the unit-elasticity case (the second denominator term becomes
beta).  Custom aggregators are solved by bracketed golden-section maximization
refined on the first-order condition f_c = rho Rf f_v.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .aggregator import Aggregator, CobbDouglas, EpsteinZin
from .errors import DomainError, NonConvergenceError
from .numerics import golden_max, refine_foc

FD_REL_STEP = 1e-5  # central differences for rate/scale responses


@dataclass(frozen=True)
class TwoPeriodProblem:
    e1: float
    e2: float
    rf: float
    rho: float
    aggregator: Aggregator

    def __post_init__(self):
        if self.e1 < 0.0 or self.e2 < 0.0:
            raise DomainError("endowments must be nonnegative")
        if self.rf <= 0.0:
            raise DomainError("gross risk-free rate must be positive")
        if self.rho <= 0.0:
            raise DomainError("continuation scale must be positive")
        if self.lifetime_wealth <= 0.0:
            raise DomainError("lifetime wealth must be positive")

    @property
    def lifetime_wealth(self) -> float:
        return self.e1 + self.e2 / self.rf


@dataclass(frozen=True)
class TwoPeriodSolution:
    c1: float
    c2: float
    utility: float
    foc_residual: float


def _closed_form_c(p: TwoPeriodProblem) -> float:
    agg = p.aggregator
    beta, psi = agg.beta, agg.psi
    wealth = p.lifetime_wealth
    denom = (1.0 - beta) ** psi + beta ** psi * (p.rho * p.rf) ** (psi - 1.0)
    return (1.0 - beta) ** psi * wealth / denom


def solve_numeric(p: TwoPeriodProblem, detect_multimodal: bool = True,
                  scan_points: int = 200) -> TwoPeriodSolution:
    """Golden-section + first-order-condition refinement on c in (0, lifetime wealth).

    Borrowing against e2 is allowed up to the natural limit c2 > 0.  A coarse scan
    flags non-quasi-concave objectives (multiple interior local maxima).
    """
    agg = p.aggregator
    wealth = p.lifetime_wealth

    def cont(c):
        return p.rf * (p.e1 - c) + p.e2

    def objective(c):
        return agg.f(c, p.rho * cont(c))

    lo, hi = 1e-12 * wealth, wealth * (1.0 - 1e-12)
    if detect_multimodal:
        cs = np.linspace(wealth * 1e-6, wealth * (1.0 - 1e-6), scan_points)
        vals = np.asarray(objective(cs))
        interior = (vals[1:-1] > vals[:-2]) & (vals[1:-1] > vals[2:])
        n_modes = int(np.count_nonzero(interior))
        if n_modes > 1:
            # tolerate plateaus from floating noise, reject genuine multimodality
            peaks = vals[1:-1][interior]
            if peaks.max() - peaks.min() > 1e-10 * max(1.0, abs(peaks.max())):
                raise NonConvergenceError(
                    f"objective has {n_modes} interior local maxima; aggregator not quasi-concave")

    c_star = golden_max(objective, lo, hi, rel_tol=1e-12)

    def foc(c):
        v = p.rho * cont(c)
        return agg.f_c(c, v) - p.rho * p.rf * agg.f_v(c, v)

    c_star = refine_foc(foc, c_star, lo, hi)
    resid = float(foc(c_star))
    scale = abs(agg.f_c(c_star, p.rho * cont(c_star))) + 1e-300
    if abs(resid) / scale > 1e-6:
        raise NonConvergenceError(f"first-order condition residual {resid:.3e} above tolerance")
    return TwoPeriodSolution(c_star, float(cont(c_star)), float(objective(c_star)), resid)


def solve_two_period(p: TwoPeriodProblem) -> TwoPeriodSolution:
    """Closed form for the CES family, bracketed maximization otherwise."""
    agg = p.aggregator
    if isinstance(agg, (EpsteinZin, CobbDouglas)):
        c = _closed_form_c(p)
        c2 = p.rf * (p.e1 - c) + p.e2
        v = p.rho * c2
        resid = float(agg.f_c(c, v) - p.rho * p.rf * agg.f_v(c, v))
        return TwoPeriodSolution(float(c), float(c2), float(agg.f(c, v)), resid)
    return solve_numeric(p)


@dataclass(frozen=True)
class TwoPeriodSigns:
    dc_drho_sign: int
    dc_drf_sign: int
    epsilon: float
    psi: float
    dc_drho_fd: float
    dc_drf_fd: float


def _psi_at_optimum(p: TwoPeriodProblem, sol: TwoPeriodSolution) -> float:
    agg = p.aggregator
    if isinstance(agg, (EpsteinZin, CobbDouglas)):
        return agg.psi
    from .statics import eis_at_point  # local import: statics depends on nothing here
    return eis_at_point(agg, sol.c1, p.rho * sol.c2)


def _fd_response(p: TwoPeriodProblem, attr: str) -> float:
    base = getattr(p, attr)
    h = FD_REL_STEP * max(abs(base), 1.0)
    lo = TwoPeriodProblem(**{**_fields(p), attr: base - h})
    hi = TwoPeriodProblem(**{**_fields(p), attr: base + h})
    return (solve_two_period(hi).c1 - solve_two_period(lo).c1) / (2.0 * h)


def _fields(p: TwoPeriodProblem) -> dict:
    return {"e1": p.e1, "e2": p.e2, "rf": p.rf, "rho": p.rho, "aggregator": p.aggregator}


def two_period_signs(p: TwoPeriodProblem, sign_tol: float = 1e-6) -> TwoPeriodSigns:
    """Predicted response signs plus central-difference verification.

    The continuation-scale response is signed by 1 - psi; the rate response by
    1 - eps * psi with eps = (e1 - c + e2/Rf) / (e1 - c).  Zero savers (e1 = c)
    leave eps undefined and raise.
    """
    sol = solve_two_period(p)
    savings = p.e1 - sol.c1
    if abs(savings) < 1e-12 * max(p.e1, 1.0):
        raise DomainError("zero saver: e1 - c vanishes, wealth-effect ratio undefined")
    eps = (savings + p.e2 / p.rf) / savings
    psi = _psi_at_optimum(p, sol)

    rho_sign = int(np.sign(1.0 - psi))
    rf_sign = int(np.sign(1.0 - eps * psi))
    fd_rho = _fd_response(p, "rho")
    fd_rf = _fd_response(p, "rf")

    if abs(1.0 - psi) > sign_tol and int(np.sign(fd_rho)) != rho_sign:
        raise NonConvergenceError("continuation-scale response sign disagrees with finite differences")
    if abs(1.0 - eps * psi) > sign_tol and int(np.sign(fd_rf)) != rf_sign:
        raise NonConvergenceError("risk-free-rate response sign disagrees with finite differences")

    return TwoPeriodSigns(rho_sign, rf_sign, float(eps), float(psi), fd_rho, fd_rf)


# ---------------------------------------------------------------------------
# Budget lines, optimal bundles, and indifference curves across rate panels
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CurvePoint:
    panel: str
    curve_id: str
    c1: float
    c2: float


def _trace_indifference(agg: Aggregator, rho: float, target: float,
                        c_grid: np.ndarray) -> np.ndarray:
    """Solve f(c, rho*c2) = target for c2 on each grid point by bisection.

    Monotonicity in the second argument makes the root unique; NaN marks grid
    points where the level set does not cross the positive quadrant.
    """
    out = np.full(c_grid.size, np.nan)
    for i, c in enumerate(c_grid):
        if c <= 0.0:
            continue
        lo, hi = 0.0, 1.0
        f_lo = agg.f(c, rho * lo)
        if f_lo > target:
            continue  # already above the level set at c2 = 0
        for _ in range(200):
            if agg.f(c, rho * hi) >= target:
                break
            hi *= 2.0
        else:
            continue  # asymptote: level never reached (strong complements)
        for _ in range(100):
            mid = 0.5 * (lo + hi)
            if agg.f(c, rho * mid) < target:
                lo = mid
            else:
                hi = mid
        out[i] = 0.5 * (lo + hi)
    return out


def figure1_data(betas, psis, rates, e1: float = 1.0, e2: float = 0.0,
                 rho: float = 1.0, grid_points: int = 101) -> list[CurvePoint]:
    """Budget segments, optimal bundles, and indifference curves per (psi, Rf) panel."""
    from .aggregator import make_aggregator

    psis = list(psis)
    rates = list(rates)
    betas = list(betas)
    if not psis or not rates:
        raise DomainError("need at least one elasticity and one rate")

    points: list[CurvePoint] = []
    for beta in betas:
        for psi in psis:
            agg = make_aggregator(beta, psi)
            panel = f"beta={beta:g};psi={psi:g}"
            for rf in rates:
                prob = TwoPeriodProblem(e1, e2, rf, rho, agg)
                wealth = prob.lifetime_wealth
                tag = f"Rf={rf:g}"
                c_grid = np.linspace(0.0, wealth, grid_points)
                for c in c_grid:
                    points.append(CurvePoint(panel, f"{tag};budget", float(c),
                                             float(rf * (e1 - c) + e2)))
                sol = solve_two_period(prob)
                points.append(CurvePoint(panel, f"{tag};optimum", sol.c1, sol.c2))
                target = sol.utility
                interior = np.linspace(wealth * 1e-3, wealth * (1 - 1e-3), grid_points)
                c2s = _trace_indifference(agg, rho, target, interior)
                for c, c2 in zip(interior, c2s):
                    if np.isfinite(c2):
                        points.append(CurvePoint(panel, f"{tag};indifference", float(c), float(c2)))
    return points


def write_curves_csv(points: list[CurvePoint], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["panel", "curve_id", "c1", "c2"])
        for pt in points:
            writer.writerow([pt.panel, pt.curve_id, f"{pt.c1:.17g}", f"{pt.c2:.17g}"])
