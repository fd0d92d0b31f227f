"""Intertemporal aggregators f(c, v) combining current consumption with continuation value.

Built-in families are the CES form

    f(c, v) = ((1 - beta) c^r + beta v^r)^(1/r),   r = 1 - 1/psi,  psi != 1,

and its unit-elasticity limit f(c, v) = c^(1-beta) v^beta.  Both are homogeneous of
degree one and keep the marginal rate of substitution f_c/f_v unbounded as c -> 0,
which is what interior-solution arguments need.  Custom aggregators supply analytic
partials; nothing in this package differentiates aggregators numerically (finite
differences are reserved for oracle roles in the test suite).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError

# CES curvature this close to unity is treated as the Cobb-Douglas limit.
PSI_UNIT_TOL = 1e-10


def _pair(c, v):
    c = np.asarray(c, dtype=float)
    v = np.asarray(v, dtype=float)
    scalar = c.ndim == 0 and v.ndim == 0
    c, v = np.broadcast_arrays(np.atleast_1d(c), np.atleast_1d(v))
    return c, v, scalar


def _unwrap(x, scalar):
    return float(x[0]) if scalar else x


class _CESBase:
    """Shared second-derivative identities for the degree-one CES family.

    With r = 1 - 1/psi the second partials reduce to products of the first
    partials:  f_cc = (r-1) f_c f_v v / (c f),  f_cv = (1-r) f_c f_v / f,
    f_vv = (r-1) f_c f_v c / (v f).  The identities hold at r = 0 as well.
    """

    homogeneous_degree_one = True
    inada = True

    def f_cc(self, c, v):
        return (self._r - 1.0) * self.f_c(c, v) * self.f_v(c, v) * v / (c * self.f(c, v))

    def f_cv(self, c, v):
        return (1.0 - self._r) * self.f_c(c, v) * self.f_v(c, v) / self.f(c, v)

    def f_vv(self, c, v):
        return (self._r - 1.0) * self.f_c(c, v) * self.f_v(c, v) * c / (v * self.f(c, v))


@dataclass(frozen=True)
class EpsteinZin(_CESBase):
    """CES aggregator with discount factor ``beta`` and substitution elasticity ``psi``."""

    beta: float
    psi: float

    def __post_init__(self):
        if not 0.0 < self.beta < 1.0:
            raise DomainError(f"discount factor must lie in (0, 1), got {self.beta}")
        if not self.psi > 0.0:
            raise DomainError(f"substitution elasticity must be positive, got {self.psi}")
        if abs(self.psi - 1.0) < PSI_UNIT_TOL:
            raise DomainError("psi == 1 is the Cobb-Douglas limit; use make_aggregator/CobbDouglas")

    @property
    def family(self) -> str:
        return "epstein_zin"

    @property
    def _r(self) -> float:
        return 1.0 - 1.0 / self.psi

    def f(self, c, v):
        c, v, scalar = _pair(c, v)
        r = self._r
        m = np.maximum(c, v)
        out = np.zeros_like(m)
        ok = m > 0
        if ok.any():
            with np.errstate(divide="ignore"):
                s = (1.0 - self.beta) * (c[ok] / m[ok]) ** r + self.beta * (v[ok] / m[ok]) ** r
            out[ok] = m[ok] * s ** (1.0 / r)
        return _unwrap(out, scalar)

    def f_c(self, c, v):
        c, v, scalar = _pair(c, v)
        with np.errstate(divide="ignore", over="ignore"):
            out = (1.0 - self.beta) * (self.f(c, v) / c) ** (1.0 / self.psi)
        return _unwrap(out, scalar)

    def f_v(self, c, v):
        c, v, scalar = _pair(c, v)
        with np.errstate(divide="ignore", over="ignore"):
            out = self.beta * (self.f(c, v) / v) ** (1.0 / self.psi)
        return _unwrap(out, scalar)


@dataclass(frozen=True)
class CobbDouglas(_CESBase):
    """Unit-elasticity aggregator f(c, v) = c^(1-beta) v^beta."""

    beta: float

    def __post_init__(self):
        if not 0.0 < self.beta < 1.0:
            raise DomainError(f"discount factor must lie in (0, 1), got {self.beta}")

    @property
    def family(self) -> str:
        return "cobb_douglas"

    @property
    def psi(self) -> float:
        return 1.0

    @property
    def _r(self) -> float:
        return 0.0

    def f(self, c, v):
        c, v, scalar = _pair(c, v)
        out = c ** (1.0 - self.beta) * v ** self.beta
        return _unwrap(out, scalar)

    def f_c(self, c, v):
        c, v, scalar = _pair(c, v)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = (1.0 - self.beta) * self.f(c, v) / c
        return _unwrap(out, scalar)

    def f_v(self, c, v):
        c, v, scalar = _pair(c, v)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = self.beta * self.f(c, v) / v
        return _unwrap(out, scalar)


@dataclass(frozen=True)
class CustomAggregator:
    """Opaque aggregator handle: value plus analytic partials up to second order."""

    value: Callable
    d_c: Callable
    d_v: Callable
    d_cc: Callable
    d_cv: Callable
    d_vv: Callable
    homogeneous_degree_one: bool = False
    inada: bool = False
    label: str = "custom"

    @property
    def family(self) -> str:
        return "custom"

    def f(self, c, v):
        return self.value(c, v)

    def f_c(self, c, v):
        return self.d_c(c, v)

    def f_v(self, c, v):
        return self.d_v(c, v)

    def f_cc(self, c, v):
        return self.d_cc(c, v)

    def f_cv(self, c, v):
        return self.d_cv(c, v)

    def f_vv(self, c, v):
        return self.d_vv(c, v)


Aggregator = EpsteinZin | CobbDouglas | CustomAggregator


def make_aggregator(beta: float, psi: float) -> Aggregator:
    """CES aggregator, collapsing to Cobb-Douglas when psi is (numerically) one."""
    if abs(psi - 1.0) < PSI_UNIT_TOL:
        return CobbDouglas(beta)
    return EpsteinZin(beta, psi)


def as_custom(agg: Aggregator) -> CustomAggregator:
    """Re-wrap any aggregator as an opaque handle (hides the parametric family)."""
    return CustomAggregator(
        value=agg.f, d_c=agg.f_c, d_v=agg.f_v,
        d_cc=agg.f_cc, d_cv=agg.f_cv, d_vv=agg.f_vv,
        homogeneous_degree_one=agg.homogeneous_degree_one,
        inada=agg.inada,
        label=f"opaque({getattr(agg, 'family', '?')})",
    )


def monotone_transform(agg: Aggregator, big_f: Callable, d1: Callable, d2: Callable,
                       label: str = "transformed") -> CustomAggregator:
    """Compose F(f(c, v)) for strictly increasing smooth F; ordinal properties survive.

    The transform destroys homogeneity in general, so the flag is cleared.
    """

    def val(c, v):
        return big_f(agg.f(c, v))

    def dc(c, v):
        return d1(agg.f(c, v)) * agg.f_c(c, v)

    def dv(c, v):
        return d1(agg.f(c, v)) * agg.f_v(c, v)

    def dcc(c, v):
        u = agg.f(c, v)
        return d2(u) * agg.f_c(c, v) ** 2 + d1(u) * agg.f_cc(c, v)

    def dcv(c, v):
        u = agg.f(c, v)
        return d2(u) * agg.f_c(c, v) * agg.f_v(c, v) + d1(u) * agg.f_cv(c, v)

    def dvv(c, v):
        u = agg.f(c, v)
        return d2(u) * agg.f_v(c, v) ** 2 + d1(u) * agg.f_vv(c, v)

    return CustomAggregator(val, dc, dv, dcc, dcv, dvv,
                            homogeneous_degree_one=False, inada=agg.inada, label=label)


def consumption_devaluation(agg: Aggregator, factor: float) -> CustomAggregator:
    """Aggregator c |-> f(c / factor, v) for factor >= 1 (future spending worth less).

    A constant factor keeps homogeneity, the Inada property, and the substitution
    elasticity of the base aggregator.
    """
    if factor < 1.0:
        raise DomainError(f"devaluation factor must be >= 1, got {factor}")
    k = float(factor)
    return CustomAggregator(
        value=lambda c, v: agg.f(c / k, v),
        d_c=lambda c, v: agg.f_c(c / k, v) / k,
        d_v=lambda c, v: agg.f_v(c / k, v),
        d_cc=lambda c, v: agg.f_cc(c / k, v) / k ** 2,
        d_cv=lambda c, v: agg.f_cv(c / k, v) / k,
        d_vv=lambda c, v: agg.f_vv(c / k, v),
        homogeneous_degree_one=agg.homogeneous_degree_one,
        inada=agg.inada,
        label=f"devalued(x{k:g})",
    )


def substitution_elasticity(agg: Aggregator, c: float, v: float) -> float:
    """Local elasticity of substitution (f_cv f / (f_c f_v))^(-1) at a point.

    Exact and constant for the CES family; for general aggregators this is the
    local curvature statistic used by the global monotonicity condition.
    """
    num = agg.f_cv(c, v) * agg.f(c, v)
    den = agg.f_c(c, v) * agg.f_v(c, v)
    if num <= 0.0:
        raise DomainError("cross-partial must be positive on the positive orthant")
    return den / num


def check_increasing(agg: Aggregator, rng: np.random.Generator, n: int = 64) -> bool:
    """Sampled check that f is strictly increasing in both arguments."""
    c = rng.uniform(0.05, 5.0, n)
    v = rng.uniform(0.05, 5.0, n)
    return bool(np.all(agg.f_c(c, v) > 0) and np.all(agg.f_v(c, v) > 0))


def check_homogeneous(agg: Aggregator, rng: np.random.Generator, n: int = 64) -> float:
    """Max relative error of f(lam*c, lam*v) = lam*f(c, v) over sampled points."""
    c = rng.uniform(0.05, 5.0, n)
    v = rng.uniform(0.05, 5.0, n)
    lam = rng.uniform(0.1, 10.0, n)
    base = agg.f(c, v)
    scaled = agg.f(lam * c, lam * v)
    return float(np.max(np.abs(scaled - lam * base) / np.abs(lam * base)))


def check_euler_identity(agg: Aggregator, rng: np.random.Generator, n: int = 64) -> float:
    """Max relative error of f = c f_c + v f_v over sampled points (degree-one test)."""
    c = rng.uniform(0.05, 5.0, n)
    v = rng.uniform(0.05, 5.0, n)
    f = agg.f(c, v)
    resid = c * agg.f_c(c, v) + v * agg.f_v(c, v) - f
    return float(np.max(np.abs(resid) / np.abs(f)))
