"""Problem settings: horizon, shocks, portfolios, terminal utility, optional blocks.

A setting has decision dates t = 0..T-1 and a terminal date T.  Period t carries the
aggregator and certainty equivalent used at t, the finite portfolio set, and the
gross-return table R[theta, omega] realized at t+1 on the period's finite state
space.  Terminal utility is linear, u_T(c) = b_T c, with b_T a per-state vector on
the last period's states (a custom terminal map is accepted for diagnostics only).

The optional income block makes wealth evolve as
w' = R(theta, omega) (w - c) + p * eta(omega) * tau(omega) with p' = p * eta(omega);
tau and eta are per-state vectors so returns can hedge income risk.  The optional
entrepreneur block records production/financing primitives from which a composite
portfolio return table is rebuilt (see shocks.entrepreneur_reduce).
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .aggregator import Aggregator
from .certainty import (CertaintyEquivalent, CRRACurvature, MultiPrior, QuasiArithmetic,
                        SmoothAmbiguity, is_positively_homogeneous, is_smooth, validate_probs)
from .errors import DistributionError, DomainError


@dataclass(frozen=True)
class StateSpace:
    """Finite outcome set with strictly positive probabilities summing to one."""

    probs: np.ndarray
    labels: tuple | None = None

    def __post_init__(self):
        p = validate_probs(self.probs)
        object.__setattr__(self, "probs", p)
        if self.labels is not None and len(self.labels) != p.size:
            raise DistributionError("state labels do not match probability vector")

    @property
    def n(self) -> int:
        return self.probs.size

    @staticmethod
    def uniform(n: int) -> "StateSpace":
        return StateSpace(np.full(n, 1.0 / n))

    @staticmethod
    def product(a: "StateSpace", b: "StateSpace") -> "StateSpace":
        """Independent product; index order is (i_a * n_b + i_b)."""
        return StateSpace(np.outer(a.probs, b.probs).ravel())


@dataclass(frozen=True)
class LinearTerminal:
    """u_T(c) = b_T c with per-state scale b_T > 0 (scalar broadcasts)."""

    scale: np.ndarray | float = 1.0

    def scale_vector(self, n_states: int) -> np.ndarray:
        b = np.asarray(self.scale, dtype=float)
        if b.ndim == 0:
            b = np.full(n_states, float(b))
        if b.size != n_states:
            raise DistributionError(f"terminal scale length {b.size} != terminal states {n_states}")
        if np.any(b <= 0.0):
            raise DomainError("terminal utility scale must be strictly positive")
        return b


@dataclass(frozen=True)
class CustomTerminal:
    """Arbitrary terminal map, accepted for regularity diagnostics only."""

    fn: Callable
    smooth: bool = True


Terminal = LinearTerminal | CustomTerminal


@dataclass(frozen=True)
class IncomeBlock:
    """Permanent/transitory labor income riding on the per-period state spaces.

    ``tau`` and ``eta`` hold one strictly positive vector per decision period,
    aligned with that period's states (realized at t+1).  The borrowing
    constraint c <= w is structural: savings cannot go negative.
    """

    p0: float
    tau: tuple  # per period, arrays over the period's states
    eta: tuple

    def __post_init__(self):
        if self.p0 < 0.0:
            raise DomainError("initial permanent income must be nonnegative")
        object.__setattr__(self, "tau", tuple(np.asarray(x, dtype=float) for x in self.tau))
        object.__setattr__(self, "eta", tuple(np.asarray(x, dtype=float) for x in self.eta))
        for name, seq in (("transitory", self.tau), ("permanent", self.eta)):
            for arr in seq:
                if np.any(arr <= 0.0):
                    raise DomainError(f"{name} income shocks must be strictly positive")


@dataclass(frozen=True)
class CobbDouglasTechnology:
    """y = z k^alpha_k l^(1-alpha_k); labor demand and operating profit in closed form."""

    alpha_k: float

    def __post_init__(self):
        if not 0.0 < self.alpha_k < 1.0:
            raise DomainError("capital exponent must lie in (0, 1)")

    def optimal_labor(self, k, z, nu):
        a = self.alpha_k
        return k * ((1.0 - a) * z / nu) ** (1.0 / a)

    def profit(self, k, z, nu):
        """max_l z k^a l^(1-a) - nu l, per the first-order condition."""
        a = self.alpha_k
        return a * (1.0 - a) ** ((1.0 - a) / a) * z ** (1.0 / a) * nu ** (-(1.0 - a) / a) * k


@dataclass(frozen=True)
class GeneralTechnology:
    """Degree-one technology y = z g(k, l) given as a callable; labor solved numerically."""

    g: Callable
    label: str = "general"


Technology = CobbDouglasTechnology | GeneralTechnology


@dataclass(frozen=True)
class EntrepreneurBlock:
    """Production and financing primitives shared by every decision period.

    Per-state vectors (aligned with each period's states): productivity ``z``,
    wage ``nu``, depreciation ``delta``, next-period capital price ``pk_next``,
    and the net financial return table ``r_fin`` with one row per financial
    portfolio.  Scalars: today's capital price, leverage cap, debt rate, tax.
    """

    technology: Technology
    z: np.ndarray
    nu: np.ndarray
    delta: np.ndarray
    pk: float
    pk_next: np.ndarray
    r_fin: np.ndarray  # (n_financial, n_states) net returns
    leverage_cap: float
    r_debt: float
    tax: float
    mixes: tuple  # composite portfolios (fin_index, a, k, b) per unit of savings

    def __post_init__(self):
        for name in ("z", "nu", "delta", "pk_next", "r_fin"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        if np.any(self.z <= 0.0) or np.any(self.nu <= 0.0):
            raise DomainError("productivity and wages must be strictly positive")
        if np.any(self.delta < 0.0) or np.any(self.delta >= 1.0):
            raise DomainError("depreciation rates must lie in [0, 1)")
        if not 0.0 < self.leverage_cap < 1.0:
            raise DomainError("leverage cap must lie in (0, 1)")
        if not 0.0 <= self.tax < 1.0:
            raise DomainError("capital tax rate must lie in [0, 1)")
        if self.pk <= 0.0 or np.any(self.pk_next <= 0.0):
            raise DomainError("capital prices must be strictly positive")

    @property
    def n_states(self) -> int:
        return self.z.size

    def default_free_margin(self) -> float:
        """min over states of P_k'(1-delta') - lambda P_k (1+r_b); must stay positive."""
        return float(np.min(self.pk_next * (1.0 - self.delta)
                            - self.leverage_cap * self.pk * (1.0 + self.r_debt)))


@dataclass(frozen=True)
class Period:
    """One decision date: preferences, portfolio set, and the return table to t+1."""

    aggregator: Aggregator
    ce: CertaintyEquivalent
    returns: np.ndarray  # (n_portfolios, n_states), strictly positive gross returns
    states: StateSpace
    portfolio_labels: tuple | None = None

    def __post_init__(self):
        r = np.asarray(self.returns, dtype=float)
        if r.ndim != 2 or r.size == 0:
            raise DistributionError("return table must be (n_portfolios, n_states)")
        if r.shape[1] != self.states.n:
            raise DistributionError(f"return table has {r.shape[1]} states, state space has {self.states.n}")
        if np.any(r <= 0.0) or not np.all(np.isfinite(r)):
            raise DomainError("gross returns must be strictly positive and bounded")
        expected = self.ce.n_states
        if expected is not None and expected != self.states.n:
            raise DistributionError("certainty-equivalent prior dimension does not match state space")
        object.__setattr__(self, "returns", r)

    @property
    def n_portfolios(self) -> int:
        return self.returns.shape[0]


@dataclass(frozen=True)
class Setting:
    """Full finite-horizon problem description."""

    periods: tuple
    terminal: Terminal = field(default_factory=LinearTerminal)
    income: IncomeBlock | None = None
    entrepreneur: EntrepreneurBlock | None = None

    def __post_init__(self):
        object.__setattr__(self, "periods", tuple(self.periods))
        if not self.periods:
            raise DomainError("a setting needs at least one decision period")
        if isinstance(self.terminal, LinearTerminal):
            self.terminal.scale_vector(self.periods[-1].states.n)
        if self.income is not None:
            if len(self.income.tau) != self.horizon or len(self.income.eta) != self.horizon:
                raise DistributionError("income block needs one tau and eta vector per period")
            for t, period in enumerate(self.periods):
                if self.income.tau[t].size != period.states.n or self.income.eta[t].size != period.states.n:
                    raise DistributionError(f"income vectors at period {t} do not match its state space")

    @property
    def horizon(self) -> int:
        return len(self.periods)

    def terminal_scale(self) -> np.ndarray:
        if not isinstance(self.terminal, LinearTerminal):
            raise DomainError("solvers require a linear terminal utility")
        return self.terminal.scale_vector(self.periods[-1].states.n)

    @staticmethod
    def iid(aggregator: Aggregator, ce: CertaintyEquivalent, returns, probs,
            horizon: int, terminal_scale=1.0, income: IncomeBlock | None = None,
            entrepreneur: EntrepreneurBlock | None = None) -> "Setting":
        """Replicate one period description across the horizon."""
        states = StateSpace(np.asarray(probs, dtype=float))
        period = Period(aggregator, ce, np.asarray(returns, dtype=float), states)
        return Setting(tuple(period for _ in range(horizon)),
                       LinearTerminal(terminal_scale), income, entrepreneur)

    def canonical(self) -> dict:
        """Stable plain-data form used for hashing and caching."""

        def enc(x):
            if isinstance(x, np.ndarray):
                return [float(v).hex() for v in x.ravel()] + [list(x.shape)]
            if isinstance(x, float):
                return float(x).hex()
            return x

        periods = []
        for p in self.periods:
            agg = p.aggregator
            ce = p.ce
            periods.append({
                "aggregator": {"family": getattr(agg, "family", "custom"),
                               "beta": enc(float(getattr(agg, "beta", float("nan")))),
                               "psi": enc(float(getattr(agg, "psi", float("nan"))))},
                "ce": {"kind": ce.kind,
                       "gamma": enc(float(ce.curvature.gamma))
                       if isinstance(ce, (QuasiArithmetic, MultiPrior)) and isinstance(ce.curvature, CRRACurvature)
                       else None},
                "returns": enc(p.returns),
                "probs": enc(p.states.probs),
            })
        data = {"periods": periods}
        if isinstance(self.terminal, LinearTerminal):
            data["terminal"] = enc(np.asarray(self.terminal.scale, dtype=float))
        if self.income is not None:
            data["income"] = {"p0": enc(float(self.income.p0)),
                              "tau": [enc(x) for x in self.income.tau],
                              "eta": [enc(x) for x in self.income.eta]}
        if self.entrepreneur is not None:
            e = self.entrepreneur
            data["entrepreneur"] = {k: enc(getattr(e, k)) for k in
                                    ("z", "nu", "delta", "pk", "pk_next", "r_fin",
                                     "leverage_cap", "r_debt", "tax")}
        return data

    def digest(self) -> str:
        return hashlib.sha256(json.dumps(self.canonical(), sort_keys=True).encode()).hexdigest()


# ---------------------------------------------------------------------------
# Regularity diagnostics
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RegularityCheck:
    name: str
    passed: bool
    detail: str = ""
    warning: bool = False  # warnings do not block the overall certificate


@dataclass(frozen=True)
class RegularityReport:
    checks: tuple

    @property
    def strongly_regular_ae(self) -> bool:
        return all(c.passed for c in self.checks if not c.warning)

    @property
    def warnings(self) -> tuple:
        return tuple(c for c in self.checks if c.warning and not c.passed)

    def failed(self) -> tuple:
        return tuple(c for c in self.checks if not c.passed and not c.warning)

    def summary(self) -> str:
        lines = []
        for c in self.checks:
            status = "ok" if c.passed else ("warn" if c.warning else "FAIL")
            lines.append(f"[{status:4s}] {c.name}" + (f": {c.detail}" if c.detail else ""))
        verdict = "strongly regular (a.e.)" if self.strongly_regular_ae else "not certified"
        lines.append(f"=> {verdict}")
        return "\n".join(lines)


def _aggregator_zero_limit(agg: Aggregator) -> float:
    # degree-one aggregators vanish along the diagonal by homogeneity
    if agg.homogeneous_degree_one:
        return 0.0
    h = 1e-9
    return float(agg.f(h, h))


def validate_setting(setting: Setting) -> RegularityReport:
    """Report which discrete/interior/smooth conditions the setting satisfies.

    Diagnostic only: nothing raises.  The overall certificate requires every
    non-warning clause; portfolio-switch kinks keep smoothness almost-everywhere
    rather than everywhere, which is all the certificate claims.
    """
    checks: list[RegularityCheck] = []
    rng = np.random.default_rng(0)

    checks.append(RegularityCheck("state spaces discrete with valid probabilities", True,
                                  f"{setting.horizon} period(s)"))
    checks.append(RegularityCheck("portfolio sets discrete", True,
                                  f"sizes {[p.n_portfolios for p in setting.periods]}"))

    from .aggregator import check_increasing  # local import avoids cycle at module load

    for t, period in enumerate(setting.periods):
        agg = period.aggregator
        inc = check_increasing(agg, rng)
        checks.append(RegularityCheck(f"aggregator[{t}] strictly increasing (sampled)", inc))
        zero = _aggregator_zero_limit(agg)
        checks.append(RegularityCheck(f"aggregator[{t}] normalized f(0,0)=0", abs(zero) < 1e-6,
                                      f"f(0,0) -> {zero:.3g}"))
        if not agg.inada:
            checks.append(RegularityCheck(f"aggregator[{t}] Inada condition", False,
                                          "missing Inada flag: interiority not guaranteed",
                                          warning=True))
        else:
            checks.append(RegularityCheck(f"aggregator[{t}] Inada condition", True))

        if not is_smooth(period.ce):
            checks.append(RegularityCheck(
                f"certainty equivalent[{t}] smooth", False,
                "worst-case functional is only piecewise smooth at prior switches",
                warning=True))
        else:
            checks.append(RegularityCheck(f"certainty equivalent[{t}] smooth", True))
        from .certainty import eval_certainty_equivalent
        m0 = eval_certainty_equivalent(period.ce, np.zeros(period.states.n),
                                       period.states.probs)
        checks.append(RegularityCheck(f"certainty equivalent[{t}] normalized M(0)=0", m0 == 0.0))

        rmin, rmax = float(period.returns.min()), float(period.returns.max())
        checks.append(RegularityCheck(f"returns[{t}] strictly positive and bounded",
                                      rmin > 0.0 and np.isfinite(rmax),
                                      f"range [{rmin:.4g}, {rmax:.4g}]"))

    if isinstance(setting.terminal, LinearTerminal):
        b = setting.terminal.scale_vector(setting.periods[-1].states.n)
        checks.append(RegularityCheck("terminal utility normalized u_T(0)=0", True, "linear"))
        checks.append(RegularityCheck("terminal utility strictly increasing",
                                      bool(np.all(b > 0.0))))
    else:
        u0 = float(setting.terminal.fn(0.0))
        checks.append(RegularityCheck("terminal utility normalized u_T(0)=0", abs(u0) < 1e-12,
                                      f"u_T(0) = {u0:.6g}"))
        w = np.linspace(0.1, 5.0, 16)
        vals = np.array([setting.terminal.fn(x) for x in w])
        checks.append(RegularityCheck("terminal utility strictly increasing",
                                      bool(np.all(np.diff(vals) > 0.0))))

    if setting.income is None:
        checks.append(RegularityCheck("continuation wealth normalized W(0,theta)=0", True,
                                      "pure portfolio wealth map"))
    else:
        checks.append(RegularityCheck("continuation wealth normalized W(0,theta)=0", False,
                                      "income floor keeps W(0,theta) > 0; interiority of "
                                      "consumption at the borrowing constraint is not guaranteed",
                                      warning=True))

    if setting.entrepreneur is not None:
        margin = setting.entrepreneur.default_free_margin()
        checks.append(RegularityCheck("entrepreneur debt default-free", margin > 0.0,
                                      f"margin {margin:.4g}"))

    return RegularityReport(tuple(checks))
