"""Certainty equivalents of finite-support continuation-utility distributions.

Three kinds:

* quasi-arithmetic under risk:      M(U) = phi^-1(E[phi(U)])
* two-layer smooth ambiguity:       M(U) = vphi^-1(E_mu[vphi(phi^-1(E_pi[phi(U)]))])
* worst case over a prior set:      M(U) = min over priors of phi^-1(E_pi[phi(U)])

Power curvature is stored in the strictly increasing normalization
phi(x) = x^(1-gamma)/(1-gamma) (log at gamma = 1), so the worst case really is the
minimum for every gamma >= 0.  Utility values live in R+; a zero value with
gamma >= 1 is outside phi's domain and raises.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DistributionError, DomainError

# |gamma - 1| below this selects the logarithmic branch (avoids cancellation).
_LOG_BRANCH_TOL = 1e-10

PROB_TOL = 1e-12


def validate_probs(probs, n: int | None = None) -> np.ndarray:
    p = np.asarray(probs, dtype=float)
    if p.ndim != 1 or p.size == 0:
        raise DistributionError("probability vector must be one-dimensional and nonempty")
    if n is not None and p.size != n:
        raise DistributionError(f"probability vector length {p.size} != expected {n}")
    if np.any(p <= 0.0) or np.any(p > 1.0):
        raise DistributionError("probabilities must lie in (0, 1]")
    if abs(p.sum() - 1.0) > PROB_TOL:
        raise DistributionError(f"probabilities sum to {p.sum():.17g}, not 1")
    return p


@dataclass(frozen=True)
class CRRACurvature:
    """Power curvature x^(1-gamma)/(1-gamma), logarithmic exactly at gamma = 1."""

    gamma: float

    def __post_init__(self):
        if self.gamma < 0.0:
            raise DomainError(f"curvature coefficient must be >= 0, got {self.gamma}")

    @property
    def log_branch(self) -> bool:
        return abs(self.gamma - 1.0) < _LOG_BRANCH_TOL

    def phi(self, x):
        x = np.asarray(x, dtype=float)
        if self.log_branch:
            return np.log(x)
        e = 1.0 - self.gamma
        return x ** e / e

    def phi_inv(self, y):
        y = np.asarray(y, dtype=float)
        if self.log_branch:
            return np.exp(y)
        e = 1.0 - self.gamma
        return (e * y) ** (1.0 / e)

    def mean(self, values: np.ndarray, probs: np.ndarray) -> float:
        """phi^-1(E[phi(U)]) computed in scale-free form (no overflow for large gamma)."""
        if self.log_branch:
            return float(np.exp(probs @ np.log(values)))
        e = 1.0 - self.gamma
        ref = values.max() if e > 0 else values.min()
        return float(ref * (probs @ (values / ref) ** e) ** (1.0 / e))


@dataclass(frozen=True)
class CustomCurvature:
    """User-supplied strictly increasing curvature with explicit inverse."""

    phi_fn: Callable
    phi_inv_fn: Callable
    label: str = "custom"
    defined_at_zero: bool = True

    def phi(self, x):
        return self.phi_fn(x)

    def phi_inv(self, y):
        return self.phi_inv_fn(y)

    def mean(self, values: np.ndarray, probs: np.ndarray) -> float:
        return float(self.phi_inv(probs @ self.phi(values)))


Curvature = CRRACurvature | CustomCurvature


def _curvature_rejects_zero(curv: Curvature) -> bool:
    if isinstance(curv, CRRACurvature):
        return curv.gamma >= 1.0 - _LOG_BRANCH_TOL
    return not curv.defined_at_zero


@dataclass(frozen=True)
class QuasiArithmetic:
    """Risk-only certainty equivalent M(U) = phi^-1(E[phi(U)])."""

    curvature: Curvature

    kind = "quasi_arithmetic"

    @property
    def n_states(self) -> int | None:
        return None  # any state dimension; probabilities supplied at evaluation


@dataclass(frozen=True)
class SmoothAmbiguity:
    """Two-layer certainty equivalent: risk curvature inside, ambiguity curvature outside."""

    risk: Curvature
    ambiguity: Curvature
    prior_weights: np.ndarray
    priors: np.ndarray  # (n_priors, n_states), each row a distribution

    kind = "smooth_ambiguity"

    def __post_init__(self):
        priors = np.asarray(self.priors, dtype=float)
        if priors.ndim != 2:
            raise DistributionError("priors must form a (n_priors, n_states) array")
        for row in priors:
            validate_probs(row, priors.shape[1])
        weights = validate_probs(self.prior_weights, priors.shape[0])
        object.__setattr__(self, "priors", priors)
        object.__setattr__(self, "prior_weights", weights)

    @property
    def n_states(self) -> int:
        return self.priors.shape[1]


@dataclass(frozen=True)
class MultiPrior:
    """Worst-case certainty equivalent over a finite prior set."""

    curvature: Curvature
    priors: np.ndarray  # (n_priors, n_states)

    kind = "multi_prior"

    def __post_init__(self):
        priors = np.asarray(self.priors, dtype=float)
        if priors.ndim != 2:
            raise DistributionError("priors must form a (n_priors, n_states) array")
        for row in priors:
            validate_probs(row, priors.shape[1])
        object.__setattr__(self, "priors", priors)

    @property
    def n_states(self) -> int:
        return self.priors.shape[1]


CertaintyEquivalent = QuasiArithmetic | SmoothAmbiguity | MultiPrior


def crra(gamma: float) -> QuasiArithmetic:
    return QuasiArithmetic(CRRACurvature(gamma))


def _check_values(ce: CertaintyEquivalent, values) -> np.ndarray:
    values = np.asarray(values, dtype=float)
    if values.ndim != 1 or values.size == 0:
        raise DistributionError("utility vector must be one-dimensional and nonempty")
    if np.any(values < 0.0) or not np.all(np.isfinite(values)):
        raise DomainError("utility values must be finite and nonnegative")
    expected = ce.n_states
    if expected is not None and values.size != expected:
        raise DistributionError(f"utility vector length {values.size} != prior dimension {expected}")
    return values


def eval_certainty_equivalent(ce: CertaintyEquivalent, values, probs=None) -> float:
    """Certainty equivalent of a utility-per-state vector.

    ``probs`` is required for the quasi-arithmetic kind and optional (dimension
    check only) for the ambiguity kinds, whose priors are part of the functional.
    Degenerate vectors return their common value exactly.
    """
    values = _check_values(ce, values)
    if probs is not None:
        probs = validate_probs(probs, values.size)
    if np.all(values == values[0]):
        return float(values[0])  # certainty equivalence, exact

    zero_present = bool(np.any(values == 0.0))

    if isinstance(ce, QuasiArithmetic):
        if probs is None:
            raise DistributionError("quasi-arithmetic certainty equivalent needs probabilities")
        if zero_present and _curvature_rejects_zero(ce.curvature):
            raise DomainError("curvature undefined at zero utility with a zero value present")
        return ce.curvature.mean(values, probs)

    if isinstance(ce, SmoothAmbiguity):
        if zero_present and (_curvature_rejects_zero(ce.risk) or _curvature_rejects_zero(ce.ambiguity)):
            raise DomainError("curvature undefined at zero utility with a zero value present")
        inner = np.array([ce.risk.mean(values, row) for row in ce.priors])
        if np.all(inner == inner[0]):
            return float(inner[0])
        return ce.ambiguity.mean(inner, ce.prior_weights)

    if isinstance(ce, MultiPrior):
        if zero_present and _curvature_rejects_zero(ce.curvature):
            raise DomainError("curvature undefined at zero utility with a zero value present")
        return float(min(ce.curvature.mean(values, row) for row in ce.priors))

    raise TypeError(f"unknown certainty equivalent kind: {ce!r}")


def is_positively_homogeneous(ce: CertaintyEquivalent) -> bool:
    """True when M(lam U) = lam M(U), the property the fast homothetic solver needs."""
    if isinstance(ce, QuasiArithmetic):
        return isinstance(ce.curvature, CRRACurvature)
    if isinstance(ce, SmoothAmbiguity):
        return isinstance(ce.risk, CRRACurvature) and isinstance(ce.ambiguity, CRRACurvature)
    if isinstance(ce, MultiPrior):
        return isinstance(ce.curvature, CRRACurvature)
    return False


def is_smooth(ce: CertaintyEquivalent) -> bool:
    """Worst-case functionals are only piecewise smooth at prior-switch points."""
    return not isinstance(ce, MultiPrior)
