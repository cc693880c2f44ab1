import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from remenu import (
    AssumptionError,
    Contract,
    CostFunctional,
    DiscreteTypes,
    Distortion,
    DomainError,
    GenericMenu,
    MenuEntry,
    PiecewiseLinearConvexUtility,
    bl_decompose,
    change_loss,
    check_ic,
    check_ir,
    first_best_demo,
    indirect_utility,
    j_general,
    monte_carlo_profit,
    quota_share,
    stop_loss,
)
from remenu.verification import random_utilities


class TestPiecewiseLinearConvexUtility:
    def test_value_and_slopes(self):
        v = PiecewiseLinearConvexUtility((10.0, 20.0), (0.3, 0.2))
        assert v.value(5.0) == 0.0
        assert v.value(15.0) == pytest.approx(1.5)
        assert v.value(30.0) == pytest.approx(0.3 * 20.0 + 0.2 * 10.0)
        assert v.slope_plus(10.0) == pytest.approx(0.3)
        assert v.slope_minus(10.0) == 0.0
        assert v.slope_plus(25.0) == pytest.approx(0.5)

    def test_validation(self):
        with pytest.raises(DomainError):
            PiecewiseLinearConvexUtility((20.0, 10.0), (0.1, 0.1))  # unordered
        with pytest.raises(DomainError):
            PiecewiseLinearConvexUtility((10.0,), (-0.1,))  # negative increment
        with pytest.raises(DomainError):
            PiecewiseLinearConvexUtility((10.0, 20.0), (0.6, 0.6))  # not 1-Lipschitz

    @settings(max_examples=50, deadline=None)
    @given(
        data=st.lists(
            st.tuples(st.floats(0.0, 1e5), st.floats(0.0, 0.2)), min_size=1, max_size=5
        )
    )
    def test_membership_properties(self, data):
        kinks = sorted({round(t, 6) for t, _ in data})
        weights = [w for _, w in data][: len(kinks)]
        kinks = kinks[: len(weights)]
        v = PiecewiseLinearConvexUtility(tuple(kinks), tuple(weights))
        a = np.linspace(0.0, 2e5, 201)
        vals = v.value(a)
        assert vals[0] == 0.0
        d = np.diff(vals)
        da = np.diff(a)
        assert np.all(d >= -1e-12)  # increasing
        assert np.all(d <= da + 1e-9)  # 1-Lipschitz
        slopes = d / da
        assert np.all(np.diff(slopes) >= -1e-12)  # convex


class TestBlDecompose:
    def test_single_kink(self):
        v = PiecewiseLinearConvexUtility.single_kink(42.0)
        assert bl_decompose(v) == [(42.0, 1.0)]

    def test_linear(self):
        v = PiecewiseLinearConvexUtility((0.0,), (1.0,))
        assert bl_decompose(v) == [(0.0, 1.0)]

    def test_two_kinks(self):
        v = PiecewiseLinearConvexUtility((10.0, 20.0), (0.3, 0.2))
        assert bl_decompose(v) == [(10.0, 0.3), (20.0, 0.2)]

    @settings(max_examples=30, deadline=None)
    @given(seed=st.integers(0, 10_000))
    def test_reconstruction(self, seed):
        rng = np.random.default_rng(seed)
        (v,) = random_utilities(1, 1000.0, 50000.0, rng)
        a = np.linspace(0.0, 80000.0, 97)
        rebuilt = sum(w * np.maximum(a - t, 0.0) for t, w in bl_decompose(v))
        assert np.max(np.abs(rebuilt - v.value(a))) <= 1e-12 * 80000.0


class TestJGeneral:
    def test_zero_utility(self, cost, product_dist):
        v = PiecewiseLinearConvexUtility((), ())
        assert j_general(v, product_dist, cost, "quota_share") == pytest.approx(0.0, abs=1e-12)

    def test_single_kink_equals_j_phi(self, cost, product_dist):
        t = 32000.0
        v = PiecewiseLinearConvexUtility.single_kink(t)
        assert j_general(v, product_dist, cost, "quota_share") == pytest.approx(
            quota_share.j_phi(t, product_dist, cost), rel=1e-9
        )
        assert j_general(v, product_dist, cost, "change_loss") == pytest.approx(
            change_loss.j_phi_cl(t, product_dist, cost), rel=1e-9
        )

    def test_mixture_is_weighted_average(self, cost, product_dist):
        v = PiecewiseLinearConvexUtility((18000.0, 42000.0), (0.5, 0.5))
        lhs = j_general(v, product_dist, cost, "quota_share")
        rhs = 0.5 * quota_share.j_phi(18000.0, product_dist, cost) + 0.5 * quota_share.j_phi(
            42000.0, product_dist, cost
        )
        assert lhs == pytest.approx(rhs, rel=1e-8)

    def test_unknown_class_rejected(self, cost, product_dist):
        v = PiecewiseLinearConvexUtility.single_kink(30000.0)
        with pytest.raises(DomainError):
            j_general(v, product_dist, cost, "stop_loss")

    def test_assumption_gate(self, product_dist):
        cost = CostFunctional(10.0, Distortion.identity())
        v = PiecewiseLinearConvexUtility.single_kink(30000.0)
        with pytest.raises(AssumptionError):
            j_general(v, product_dist, cost, "change_loss")

    def test_discrete_one_sided_slopes(self, cost):
        # A single atom exactly at the kink: the right slope applies because
        # a0 >= H[X_k], so the atom participates.
        dist = DiscreteTypes([(math.exp(-3), 10000.0, 1.0)])  # a0 = 30000
        v = PiecewiseLinearConvexUtility.single_kink(30000.0)
        got = j_general(v, dist, cost, "quota_share")
        assert got == pytest.approx(30000.0 - 11000.0)


class TestIndirectUtility:
    def test_empty_menu_rejected(self):
        with pytest.raises(DomainError):
            indirect_utility(GenericMenu.from_entries([]), 1.0)

    def test_outside_option_floor(self):
        entry = MenuEntry(100.0, 1.0, Contract("stop_loss", 1.0, 50.0), 40.0)
        menu = GenericMenu.from_entries([entry])
        # At a = 60 the contract is worth (60-50) - 40 < 0: stay out.
        assert indirect_utility(menu, np.array([60.0]))[0] == 0.0
        assert indirect_utility(menu, np.array([100.0]))[0] == pytest.approx(10.0)

    def test_feasible_menu_utility_shape(self, cost, product_dist):
        menu = stop_loss.solve(product_dist, cost)
        rng = np.random.default_rng(9)
        pairs = list(zip(*product_dist.sample(300, rng)))
        gm = menu.entries_for(pairs)
        a = np.linspace(5000.0, 80000.0, 301)
        vals = indirect_utility(gm, a)
        d = np.diff(vals)
        da = np.diff(a)
        assert np.all(d >= -1e-9)
        assert np.all(d <= da + 1e-9)
        slopes = d / da
        assert np.all(np.diff(slopes) >= -1e-9)

    def test_value_independent_of_k_at_fixed_a(self, cost, product_dist):
        menu = stop_loss.solve(product_dist, cost)
        tau = menu.tau_star
        a = tau + 5000.0
        vals = [
            float(menu.entry(a, k).risk_reduction(a))
            for k in (8000.0, 12000.0, 20000.0)
        ]
        assert max(vals) - min(vals) <= 1e-9


class TestICIRAudits:
    def test_solved_menu_passes(self, cost, product_dist):
        menu = quota_share.solve(product_dist, cost)
        rng = np.random.default_rng(8)
        assert check_ic(menu, product_dist, 3000, rng).passed
        assert check_ir(menu, product_dist, 3000, rng).passed

    def test_overpriced_entry_fails_ir(self):
        entry = MenuEntry(100.0, 1.0, Contract("stop_loss", 1.0, 50.0), 90.0)
        menu = GenericMenu.from_entries([entry])
        report = check_ir(menu)
        assert not report.passed
        assert report.max_violation == pytest.approx(40.0)

    def test_null_entry_passes_with_equality(self):
        menu = GenericMenu.from_entries([MenuEntry(100.0, 1.0, Contract.null(), 0.0)])
        report = check_ir(menu)
        assert report.passed
        assert report.max_violation == 0.0

    def test_cross_subsidized_menu_fails_ic(self):
        # Entry 2 is strictly better for type 1 than its own entry.
        e1 = MenuEntry(100.0, 1.0, Contract("stop_loss", 1.0, 50.0), 45.0)
        e2 = MenuEntry(120.0, 2.0, Contract("stop_loss", 1.0, 10.0), 60.0)
        menu = GenericMenu.from_entries([e1, e2])
        report = check_ic(menu, n_pairs=500)
        assert not report.passed
        assert report.violations

    def test_report_serializes(self, cost, product_dist):
        import json

        menu = stop_loss.solve(product_dist, cost)
        rng = np.random.default_rng(10)
        json.dumps(check_ic(menu, product_dist, 100, rng).to_dict())


class TestFirstBest:
    def test_reference_pair_has_positive_mimic_gain(self, cost, product_dist):
        r = first_best_demo(45000.0, 15000.0, 30000.0, 15000.0, product_dist, cost)
        assert r.risk_reduction_1 == 0.0
        assert r.risk_reduction_2 == 0.0
        assert r.mimic_gain == pytest.approx(15000.0, rel=1e-9)
        assert r.profit_inequality_holds

    def test_unserved_low_type_gives_zero_gain(self, cost, product_dist):
        # a2 below its break-even level: the low type gets no contract, so
        # there is nothing to mimic.
        r = first_best_demo(45000.0, 15000.0, 12000.0, 15000.0, product_dist, cost)
        assert math.isinf(r.deductible_2)
        assert r.mimic_gain == 0.0

    def test_order_violation_rejected(self, cost, product_dist):
        with pytest.raises(DomainError):
            first_best_demo(30000.0, 15000.0, 30000.0, 15000.0, product_dist, cost)

    def test_signs_hold_for_random_pairs(self, cost, product_dist):
        rng = np.random.default_rng(12)
        a, k = product_dist.sample(40, rng)
        for i in range(0, 40, 2):
            a1, a2 = max(a[i], a[i + 1]), min(a[i], a[i + 1])
            if a1 == a2:
                continue
            r = first_best_demo(float(a1), float(k[i]), float(a2), float(k[i + 1]), product_dist, cost)
            assert r.mimic_gain >= -1e-12
            if r.deductible_2 < a1:
                assert r.mimic_gain > 1e-12
            assert r.mimic_profit <= r.first_best_profit_1 + 1e-12


class TestMonteCarlo:
    def test_deterministic_given_seed(self, cost, product_dist):
        menu = stop_loss.solve(product_dist, cost)
        one = monte_carlo_profit(menu, product_dist, cost, 5000, seed=77)
        two = monte_carlo_profit(menu, product_dist, cost, 5000, seed=77)
        assert one == two

    def test_within_three_sigma_of_objective(self, cost, product_dist):
        menu = stop_loss.solve(product_dist, cost)
        est, se = monte_carlo_profit(menu, product_dist, cost, 200000, seed=42)
        assert abs(est - menu.objective_value) <= 3.0 * se

    def test_generic_menu_matches_rule_menu_on_atoms(self, cost, discrete_dist):
        menu = stop_loss.solve(discrete_dist, cost)
        pairs = [(float(a), float(k)) for a, k in zip(discrete_dist.a_vals, discrete_dist.ks)]
        gm = menu.entries_for(pairs)
        est_rule, _ = monte_carlo_profit(menu, discrete_dist, cost, 20000, seed=5)
        est_gen, _ = monte_carlo_profit(gm, discrete_dist, cost, 20000, seed=5)
        assert est_gen == pytest.approx(est_rule, rel=1e-12)

    def test_invalid_sample_size(self, cost, product_dist):
        menu = stop_loss.solve(product_dist, cost)
        with pytest.raises(DomainError):
            monte_carlo_profit(menu, product_dist, cost, 0, seed=1)
