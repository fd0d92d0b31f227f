"""One-period reduced environments (f, v(., alpha)) and shock paths between settings.

An environment packages the current-period aggregator with a continuation value
function of savings and a shock index alpha, normalized so v(w, .) is increasing.
Closed forms are used where available (homothetic: v = g(alpha) w); otherwise the
solver supplies tabulated interpolants.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .aggregator import Aggregator
from .errors import DomainError, EislabError
from .setting import Setting


@dataclass(frozen=True)
class Environment:
    """Aggregator plus continuation value v(w, alpha) with derivative evaluators."""

    aggregator: Aggregator
    v: Callable
    v_w: Callable
    v_ww: Callable
    v_alpha: Callable
    v_walpha: Callable
    alpha_lo: float = 0.0
    alpha_hi: float = 1.0
    homothetic: bool = False
    g: Callable | None = None
    g_prime: Callable | None = None
    wealth_range: tuple | None = None
    smooth_at: Callable | None = None  # (w, alpha) -> bool; None means smooth everywhere
    label: str = ""

    def check_alpha(self, alpha: float) -> None:
        if not self.alpha_lo - 1e-12 <= alpha <= self.alpha_hi + 1e-12:
            raise DomainError(f"alpha={alpha} outside [{self.alpha_lo}, {self.alpha_hi}]")

    def is_smooth_at(self, w: float, alpha: float) -> bool:
        return True if self.smooth_at is None else bool(self.smooth_at(w, alpha))


def homothetic_environment(aggregator: Aggregator, g: Callable, g_prime: Callable,
                           alpha_lo: float = 0.0, alpha_hi: float = 1.0,
                           label: str = "homothetic") -> Environment:
    """v(w, alpha) = g(alpha) w with g > 0 increasing."""

    return Environment(
        aggregator=aggregator,
        v=lambda w, a: g(a) * w,
        v_w=lambda w, a: g(a) * np.ones_like(np.asarray(w, dtype=float)) if np.ndim(w) else g(a),
        v_ww=lambda w, a: 0.0 * np.asarray(w, dtype=float),
        v_alpha=lambda w, a: g_prime(a) * w,
        v_walpha=lambda w, a: g_prime(a) * np.ones_like(np.asarray(w, dtype=float)) if np.ndim(w) else g_prime(a),
        alpha_lo=alpha_lo, alpha_hi=alpha_hi,
        homothetic=True, g=g, g_prime=g_prime, label=label,
    )


def power_environment(aggregator: Aggregator, g: Callable, g_prime: Callable,
                      kappa: float, m: Callable, m_prime: Callable,
                      alpha_lo: float = 0.0, alpha_hi: float = 1.0,
                      label: str = "power") -> Environment:
    """v(w, alpha) = g(alpha) w^kappa + m(alpha), kappa in (0, 1], m >= 0.

    Concave in wealth by construction (v_ww <= 0), the hypothesis under which the
    local sign law is exact.
    """
    if not 0.0 < kappa <= 1.0:
        raise DomainError(f"kappa must lie in (0, 1], got {kappa}")
    return Environment(
        aggregator=aggregator,
        v=lambda w, a: g(a) * w ** kappa + m(a),
        v_w=lambda w, a: g(a) * kappa * w ** (kappa - 1.0),
        v_ww=lambda w, a: g(a) * kappa * (kappa - 1.0) * w ** (kappa - 2.0),
        v_alpha=lambda w, a: g_prime(a) * w ** kappa + m_prime(a),
        v_walpha=lambda w, a: g_prime(a) * kappa * w ** (kappa - 1.0),
        alpha_lo=alpha_lo, alpha_hi=alpha_hi,
        homothetic=(kappa == 1.0 and m(alpha_lo) == 0.0 and m(alpha_hi) == 0.0),
        g=g if kappa == 1.0 else None,
        g_prime=g_prime if kappa == 1.0 else None,
        label=label,
    )


@dataclass(frozen=True)
class ShockPath:
    """Convex-combination bridge between two settings.

    alpha0 carries the low-continuation-value endpoint (the shocked setting for an
    adverse shock) and alpha1 the baseline, so v(w, .) is increasing in alpha:

        v(w, alpha) = lam v(w, alpha1) + (1 - lam) v(w, alpha0),
        lam = (alpha - alpha0) / (alpha1 - alpha0).
    """

    baseline: Setting
    shocked: Setting
    alpha0: float = 0.0
    alpha1: float = 1.0

    def __post_init__(self):
        if not self.alpha1 > self.alpha0:
            raise DomainError("shock path needs alpha1 > alpha0")

    def weight(self, alpha: float) -> float:
        lam = (alpha - self.alpha0) / (self.alpha1 - self.alpha0)
        if not -1e-12 <= lam <= 1.0 + 1e-12:
            raise DomainError(f"alpha={alpha} outside [{self.alpha0}, {self.alpha1}]")
        return float(min(max(lam, 0.0), 1.0))


def combine_endpoint_values(path: ShockPath, low: float, high: float, alpha: float) -> float:
    lam = path.weight(alpha)
    return lam * high + (1.0 - lam) * low


def validate_environment(env: Environment, rng: np.random.Generator,
                         w_lo: float = 0.2, w_hi: float = 5.0, n: int = 32,
                         rel_tol: float = 1e-8) -> None:
    """Sampled invariant checks; raises on violation.

    Checks: v strictly increasing in wealth, v(w, .) increasing in alpha, and the
    linear form v = g(alpha) w when the environment claims homotheticity.
    """
    if env.wealth_range is not None:
        w_lo = max(w_lo, env.wealth_range[0])
        w_hi = min(w_hi, env.wealth_range[1])
    w = rng.uniform(w_lo, w_hi, n)
    alphas = rng.uniform(env.alpha_lo, env.alpha_hi, n)
    for wi, ai in zip(w, alphas):
        if not env.v_w(wi, ai) > 0.0:
            raise EislabError(f"continuation value not increasing in wealth at ({wi}, {ai})")
        if env.v_alpha(wi, ai) < 0.0:
            raise EislabError(f"continuation value not increasing in alpha at ({wi}, {ai})")
        if env.homothetic:
            lhs = env.v(wi, ai)
            rhs = env.g(ai) * wi
            if abs(lhs - rhs) > rel_tol * max(1.0, abs(rhs)):
                raise EislabError("homothetic environment violates v = g(alpha) w")
