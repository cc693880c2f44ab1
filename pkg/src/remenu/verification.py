"""Independent audits of solved menus.

These checkers deliberately avoid the solvers' own shortcuts: incentive
compatibility and participation are tested entry-against-entry, general
candidate indirect utilities are integrated by brute-force quadrature, and
expected profit is re-estimated by Monte Carlo self-selection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .change_loss import assumption_check
from .errors import AssumptionError, DomainError
from .menus import GenericMenu
from .risk_model import CostFunctional, KProfile
from .type_space import TypeDistribution

IC_TOL = 1e-9


# -- candidate indirect utilities ---------------------------------------


@dataclass(frozen=True)
class PiecewiseLinearConvexUtility:
    """v(a) = sum_i w_i (a - t_i)_+ with t_1 < ... < t_n and w_i >= 0.

    Membership in the feasible class requires sum w_i <= 1, which makes v
    increasing, convex, 1-Lipschitz, and zero at the origin.
    """

    kinks: tuple[float, ...]
    weights: tuple[float, ...]

    def __post_init__(self) -> None:
        t = np.asarray(self.kinks, dtype=float)
        w = np.asarray(self.weights, dtype=float)
        if len(t) != len(w):
            raise DomainError("kinks and weights must have equal length")
        if len(t) and np.any(np.diff(t) <= 0.0):
            raise DomainError("kink locations must be strictly increasing")
        if len(t) and t[0] < 0.0:
            raise DomainError("kink locations must be >= 0")
        if np.any(w < 0.0):
            raise DomainError("slope increments must be nonnegative")
        if w.sum() > 1.0 + 1e-12:
            raise DomainError("slope increments must sum to at most 1 (1-Lipschitz)")

    def value(self, a):
        a = np.asarray(a, dtype=float)
        out = np.zeros_like(a)
        for t, w in zip(self.kinks, self.weights):
            out = out + w * np.maximum(a - t, 0.0)
        return out

    __call__ = value

    def slope_plus(self, a):
        """Right derivative: sum of increments at kinks t_i <= a."""
        a = np.asarray(a, dtype=float)
        out = np.zeros_like(a)
        for t, w in zip(self.kinks, self.weights):
            out = out + w * (a >= t)
        return out

    def slope_minus(self, a):
        """Left derivative: sum of increments at kinks t_i < a."""
        a = np.asarray(a, dtype=float)
        out = np.zeros_like(a)
        for t, w in zip(self.kinks, self.weights):
            out = out + w * (a > t)
        return out

    @classmethod
    def single_kink(cls, t: float) -> "PiecewiseLinearConvexUtility":
        """The elementary candidate (a - t)_+."""
        return cls((float(t),), (1.0,))


def bl_decompose(v: PiecewiseLinearConvexUtility) -> list[tuple[float, float]]:
    """Kinks with slope increments; sum_i w_i (a - t_i)_+ reconstructs v."""
    return [(float(t), float(w)) for t, w in zip(v.kinks, v.weights) if w != 0.0]


def j_general(
    v: PiecewiseLinearConvexUtility,
    dist: TypeDistribution,
    cost: CostFunctional,
    solver_class: str,
) -> float:
    """Reinsurer's expected profit of the menu generated by v, by quadrature.

    The per-type profit is slope(a) * (a - ref_k) - v(a), where ref_k is
    H[X_k] for the quota-share class and xi_k for the change-loss class;
    the right slope applies where a >= ref_k and the left slope below.
    """
    profile = KProfile(cost, dist.family)
    if solver_class == "quota_share":
        ref = profile.full_cost
    elif solver_class == "change_loss":
        report = assumption_check(dist, cost)
        if not report.holds:
            raise AssumptionError(
                "general change-loss evaluation requires sup theta* <= lowest risk level"
            )
        ref = profile.xi
    else:
        raise DomainError(f"j_general supports quota_share/change_loss, got {solver_class!r}")

    def integrand(a, k):
        r = ref(k)
        slope = np.where(a >= r, v.slope_plus(a), v.slope_minus(a))
        return slope * (a - r) - v.value(a)

    return dist.integrate(integrand, breakpoints=v.kinks)


# -- menu audits --------------------------------------------------------


def indirect_utility(menu: GenericMenu, a) -> np.ndarray:
    """Largest risk reduction available from the menu (outside option 0)."""
    if len(menu) == 0:
        raise DomainError("indirect utility of an empty menu is undefined")
    a = np.asarray(a, dtype=float)
    best = menu.value_matrix(a).max(axis=0)
    return np.maximum(best, 0.0)


@dataclass(frozen=True)
class ViolationReport:
    """Audit outcome: worst slack found and the records exceeding tol."""

    check: str
    n_checked: int
    max_violation: float
    passed: bool
    violations: tuple[dict, ...] = field(default_factory=tuple)

    def to_dict(self) -> dict:
        return {
            "check": self.check,
            "n_checked": self.n_checked,
            "max_violation": self.max_violation,
            "passed": self.passed,
            "violations": list(self.violations),
        }


def _sample_pairs(menu, dist: TypeDistribution, n_pairs: int, rng) -> tuple:
    if rng is None:
        rng = np.random.default_rng(0)
    a_own, k_own = dist.sample(n_pairs, rng)
    a_alt, k_alt = dist.sample(n_pairs, rng)
    return a_own, k_own, a_alt, k_alt


def check_ic(
    menu,
    dist: TypeDistribution | None = None,
    n_pairs: int = 10000,
    rng: np.random.Generator | None = None,
    tol: float = IC_TOL,
) -> ViolationReport:
    """Own entry at least as good as any other sampled type's entry.

    Rule menus are probed at type pairs sampled from dist; a finite
    GenericMenu is probed at sampled pairs of its own rows.
    """
    if isinstance(menu, GenericMenu):
        if len(menu) == 0:
            raise DomainError("cannot audit an empty menu")
        if rng is None:
            rng = np.random.default_rng(0)
        i_own = rng.integers(0, len(menu), n_pairs)
        i_alt = rng.integers(0, len(menu), n_pairs)
        a_own = np.array([menu.entries[i].a for i in i_own])
        k_own = np.array([menu.entries[i].k for i in i_own])
        a_alt = np.array([menu.entries[i].a for i in i_alt])
        k_alt = np.array([menu.entries[i].k for i in i_alt])
        own_vals = np.array(
            [float(menu.entries[i].risk_reduction(a)) for i, a in zip(i_own, a_own)]
        )
        alt_vals = np.array(
            [float(menu.entries[i].risk_reduction(a)) for i, a in zip(i_alt, a_own)]
        )
        slack = alt_vals - own_vals
        worst = float(slack.max()) if n_pairs else 0.0
        bad = np.nonzero(slack > tol)[0][:20]
        records = tuple(
            {
                "own_type": [float(a_own[i]), float(k_own[i])],
                "alt_type": [float(a_alt[i]), float(k_alt[i])],
                "violation": float(slack[i]),
            }
            for i in bad
        )
        return ViolationReport("incentive_compatibility", n_pairs, worst, worst <= tol, records)
    a_own, k_own, a_alt, k_alt = _sample_pairs(menu, dist, n_pairs, rng)
    own_vals = np.empty(n_pairs)
    alt_vals = np.empty(n_pairs)
    for i in range(n_pairs):
        own = menu.entry(float(a_own[i]), float(k_own[i]))
        alt = menu.entry(float(a_alt[i]), float(k_alt[i]))
        own_vals[i] = float(own.risk_reduction(a_own[i]))
        alt_vals[i] = float(alt.risk_reduction(a_own[i]))
    slack = alt_vals - own_vals
    worst = float(slack.max()) if n_pairs else 0.0
    bad = np.nonzero(slack > tol)[0][:20]
    records = tuple(
        {
            "own_type": [float(a_own[i]), float(k_own[i])],
            "alt_type": [float(a_alt[i]), float(k_alt[i])],
            "violation": float(slack[i]),
        }
        for i in bad
    )
    return ViolationReport("incentive_compatibility", n_pairs, worst, worst <= tol, records)


def check_ir(
    menu,
    dist: TypeDistribution | None = None,
    n_types: int = 10000,
    rng: np.random.Generator | None = None,
    tol: float = IC_TOL,
) -> ViolationReport:
    """Every sampled type weakly prefers its own entry to no contract."""
    if isinstance(menu, GenericMenu):
        if len(menu) == 0:
            raise DomainError("cannot audit an empty menu")
        a_own = np.array([e.a for e in menu.entries])
        k_own = np.array([e.k for e in menu.entries])
        vals = np.array([float(e.risk_reduction(e.a)) for e in menu.entries])
        n_types = len(menu)
    else:
        if rng is None:
            rng = np.random.default_rng(0)
        a_own, k_own = dist.sample(n_types, rng)
        vals = np.empty(n_types)
        for i in range(n_types):
            own = menu.entry(float(a_own[i]), float(k_own[i]))
            vals[i] = float(own.risk_reduction(a_own[i]))
    slack = -vals
    worst = float(slack.max()) if n_types else 0.0
    bad = np.nonzero(slack > tol)[0][:20]
    records = tuple(
        {"own_type": [float(a_own[i]), float(k_own[i])], "violation": float(slack[i])}
        for i in bad
    )
    return ViolationReport("individual_rationality", n_types, worst, worst <= tol, records)


# -- first-best failure demo --------------------------------------------


@dataclass(frozen=True)
class FirstBestReport:
    """Why full surplus extraction breaks once types are private.

    The full-information benchmark (within the deductible class) offers each
    type d = theta*_k when a >= xi_k, at the premium extracting the entire
    risk reduction.  A lower-risk type's contract then strictly attracts a
    higher-risk type whenever its deductible bites below a1, and mimicry
    caps the profit earned on the high type below its benchmark level.
    """

    a1: float
    k1: float
    a2: float
    k2: float
    deductible_1: float
    deductible_2: float
    premium_1: float
    premium_2: float
    risk_reduction_1: float
    risk_reduction_2: float
    mimic_gain: float
    mimic_profit: float
    first_best_profit_1: float
    first_best_profit_2: float

    @property
    def profit_inequality_holds(self) -> bool:
        return self.mimic_profit <= self.first_best_profit_1 + 1e-12

    def to_dict(self) -> dict:
        return {
            "type_1": [self.a1, self.k1],
            "type_2": [self.a2, self.k2],
            "deductibles": [self.deductible_1, self.deductible_2],
            "premiums": [self.premium_1, self.premium_2],
            "risk_reductions": [self.risk_reduction_1, self.risk_reduction_2],
            "mimic_gain": self.mimic_gain,
            "mimic_profit": self.mimic_profit,
            "first_best_profits": [self.first_best_profit_1, self.first_best_profit_2],
            "profit_inequality_holds": self.profit_inequality_holds,
        }


def first_best_demo(
    a1: float,
    k1: float,
    a2: float,
    k2: float,
    dist: TypeDistribution,
    cost: CostFunctional,
) -> FirstBestReport:
    """Evaluate the mimicry chain for a pair of types with a2 < a1."""
    if a2 >= a1:
        raise DomainError(f"need a2 < a1, got a1={a1}, a2={a2}")
    family = dist.family

    def fb(a: float, k: float) -> tuple[float, float, float]:
        """Full-information deductible, premium, and reinsurer profit."""
        loss = family.model(k)
        ts = cost.theta_star(loss)
        xi = cost.xi(loss) if math.isfinite(ts) else math.inf
        if a >= xi:
            prem = max(a - ts, 0.0)
            return ts, prem, prem - cost.stop_loss_cost(loss, ts)
        return math.inf, 0.0, 0.0

    d1, p1, profit1 = fb(a1, k1)
    d2, p2, profit2 = fb(a2, k2)
    # Risk reduction at the intended type is zero by construction.
    rr1 = max(a1 - d1, 0.0) - p1 if math.isfinite(d1) else 0.0
    rr2 = max(a2 - d2, 0.0) - p2 if math.isfinite(d2) else 0.0
    if math.isfinite(d2):
        gain = (max(a1 - d2, 0.0) - p2) - (max(a2 - d2, 0.0) - p2)
        mimic_profit = p2 - cost.stop_loss_cost(family.model(k1), d2)
    else:
        gain = 0.0
        mimic_profit = 0.0
    return FirstBestReport(
        a1, k1, a2, k2, d1, d2, p1, p2, rr1, rr2, gain, mimic_profit, profit1, profit2
    )


# -- Monte Carlo profit -------------------------------------------------


def _contract_profit(profile: KProfile, entry, k) -> np.ndarray:
    """P - H[I(X_k)] for one entry across an array of scales k."""
    c = entry.contract
    if c.lam == 0.0 or math.isinf(c.deductible):
        return np.full_like(np.asarray(k, dtype=float), entry.premium)
    return entry.premium - c.lam * profile.stop_loss_cost(k, c.deductible)


def monte_carlo_profit(
    menu,
    dist: TypeDistribution,
    cost: CostFunctional,
    n: int,
    seed: int,
) -> tuple[float, float]:
    """Estimate the expected profit by sampled self-selection.

    Each sampled type picks the entry maximizing its risk reduction (its
    own entry wins ties; staying out beats any negative value); the profit
    P - H[I(X_k)] of the chosen entry is evaluated analytically.  Returns
    (estimate, standard error); deterministic given the seed.
    """
    if n < 1:
        raise DomainError(f"sample size must be >= 1, got {n}")
    rng = np.random.default_rng(seed)
    a, k = dist.sample(n, rng)
    if isinstance(menu, GenericMenu):
        profits = np.zeros(n)
        values = menu.value_matrix(a)          # (entries, n)
        best = values.max(axis=0)
        tie_tol = 1e-12 * np.maximum(1.0, np.abs(best))
        profile = KProfile(cost, dist.family)
        entry_profits = np.stack(
            [_contract_profit(profile, e, k) for e in menu.entries]
        )                                      # (entries, n)
        own = np.full(n, -1, dtype=int)
        for j, e in enumerate(menu.entries):
            match = (a == e.a) & (k == e.k) & (own < 0)
            own[match] = j
        choice = np.argmax(values, axis=0)
        has_own = own >= 0
        own_ok = has_own & (values[np.maximum(own, 0), np.arange(n)] >= best - tie_tol)
        choice = np.where(own_ok, np.maximum(own, 0), choice)
        take = best >= -tie_tol
        profits = np.where(take, entry_profits[choice, np.arange(n)], 0.0)
    else:
        profits = np.asarray(menu.profit_per_type(a, k), dtype=float)
    est = float(profits.mean())
    se = float(profits.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    return est, se


def random_utilities(
    n: int,
    lo: float,
    hi: float,
    rng: np.random.Generator,
    max_kinks: int = 5,
) -> list[PiecewiseLinearConvexUtility]:
    """Random feasible candidates: kinks uniform on [lo, hi], increments
    Dirichlet-scaled so their sum is at most 1."""
    out = []
    for _ in range(n):
        m = int(rng.integers(1, max_kinks + 1))
        kinks = np.sort(rng.uniform(lo, hi, m))
        while len(np.unique(kinks)) < m:
            kinks = np.sort(rng.uniform(lo, hi, m))
        w = rng.dirichlet(np.ones(m)) * rng.uniform(0.2, 1.0)
        out.append(PiecewiseLinearConvexUtility(tuple(kinks), tuple(w)))
    return out
