"""Small shared numerical routines: bracketed maximization and adaptive quadrature."""

from __future__ import annotations

import math
from typing import Callable

from scipy.optimize import brentq

from .errors import NonConvergenceError

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0
_INVPHI2 = (3.0 - math.sqrt(5.0)) / 2.0


def golden_max(fn: Callable[[float], float], lo: float, hi: float,
               rel_tol: float = 1e-11, max_iter: int = 200) -> float:
    """Golden-section maximization of a unimodal function on [lo, hi]."""
    a, b = float(lo), float(hi)
    h = b - a
    if h <= 0:
        raise NonConvergenceError("empty bracket")
    c = a + _INVPHI2 * h
    d = a + _INVPHI * h
    fc, fd = fn(c), fn(d)
    for _ in range(max_iter):
        if h <= rel_tol * max(abs(a), abs(b), 1.0):
            break
        if fc > fd:
            b, d, fd = d, c, fc
            h = b - a
            c = a + _INVPHI2 * h
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            h = b - a
            d = a + _INVPHI * h
            fd = fn(d)
    return 0.5 * (a + b)


def refine_foc(foc: Callable[[float], float], c0: float, lo: float, hi: float,
               xtol_rel: float = 1e-14) -> float:
    """Polish a maximizer by root-finding the first-order condition near c0.

    Expands a bracket around c0 until the condition changes sign; falls back to
    c0 when no sign change exists inside [lo, hi] (corner or flat stretch).
    """
    span = hi - lo
    delta = max(1e-9 * span, 1e-14)
    left, right = c0, c0
    f0 = foc(c0)
    for _ in range(60):
        left = max(lo, c0 - delta)
        right = min(hi, c0 + delta)
        fl, fr = foc(left), foc(right)
        if fl == 0.0:
            return left
        if fr == 0.0:
            return right
        if fl > 0.0 > fr:
            return float(brentq(foc, left, right, xtol=xtol_rel * max(abs(c0), 1.0), rtol=8.9e-16))
        if fl < 0.0 < fr:
            return float(brentq(foc, left, right, xtol=xtol_rel * max(abs(c0), 1.0), rtol=8.9e-16))
        if left == lo and right == hi:
            break
        delta *= 8.0
    _ = f0
    return float(c0)


def adaptive_simpson(fn: Callable[[float], float], a: float, b: float,
                     tol: float = 1e-10, n_panels: int = 8, max_depth: int = 24) -> float:
    """Adaptive Simpson quadrature starting from ``n_panels`` uniform panels."""
    if b == a:
        return 0.0

    def simpson(x0, x2, f0, f1, f2):
        return (x2 - x0) / 6.0 * (f0 + 4.0 * f1 + f2)

    def recurse(x0, x2, f0, f1, f2, whole, eps, depth):
        xm_l = 0.5 * (x0 + 0.5 * (x0 + x2))
        xm_r = 0.5 * (0.5 * (x0 + x2) + x2)
        x1 = 0.5 * (x0 + x2)
        fl, fr = fn(xm_l), fn(xm_r)
        left = simpson(x0, x1, f0, fl, f1)
        right = simpson(x1, x2, f1, fr, f2)
        if depth >= max_depth or abs(left + right - whole) <= 15.0 * eps:
            return left + right + (left + right - whole) / 15.0
        return (recurse(x0, x1, f0, fl, f1, left, eps / 2.0, depth + 1)
                + recurse(x1, x2, f1, fr, f2, right, eps / 2.0, depth + 1))

    total = 0.0
    edges = [a + (b - a) * i / n_panels for i in range(n_panels + 1)]
    for x0, x2 in zip(edges[:-1], edges[1:]):
        x1 = 0.5 * (x0 + x2)
        f0, f1, f2 = fn(x0), fn(x1), fn(x2)
        whole = simpson(x0, x2, f0, f1, f2)
        total += recurse(x0, x2, f0, f1, f2, whole, tol / n_panels, 0)
    return total
