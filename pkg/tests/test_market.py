from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from leontief.errors import Unbounded, ZeroPrices
from leontief.market import (
    check_allocation_eps_equilibrium,
    check_eps_equilibrium,
    check_equilibrium,
    check_strict_eps_equilibrium,
    economy,
    equilibrium_allocation,
    leontief_utility,
    measured_eps,
    normalize_prices,
    optimal_bundle,
    strict_from_loose,
    trader_utility_max,
)


def test_economy_invariants():
    with pytest.raises(ValueError):
        economy([[1, 0]], [[-1, 1]])
    with pytest.raises(ValueError):
        economy(np.eye(2), [[0, 1], [0, 0]])  # trader 0 demands nothing
    with pytest.raises(ValueError):
        economy([[0.5, 0.4]], [[1, 1]], normalized_supply=True)
    econ = economy([[0.5, 0.5]], [[1, 1]], normalized_supply=True)
    assert econ.m == 1 and econ.n == 2
    np.testing.assert_array_equal(econ.supply, [1.0])


class TestLeontiefUtility:
    def test_single_good(self):
        assert leontief_utility(economy([[1]], [[1]]), 0, [2]) == 2

    def test_zero_demand_coordinates_ignored(self, swap_econ):
        assert leontief_utility(swap_econ, 0, [0.3, 0.7]) == pytest.approx(0.7)

    def test_min_of_ratios(self):
        econ = economy([[1], [0]], [[2], [4]])
        assert leontief_utility(econ, 0, [1, 2]) == pytest.approx(0.5)


class TestTraderUtilityMax:
    def test_half_over_half(self, swap_econ):
        assert trader_utility_max(swap_econ, [0.5, 0.5], 0) == pytest.approx(1.0)

    def test_zero_budget(self, swap_econ):
        assert trader_utility_max(swap_econ, [0.0, 1.0], 0) == 0

    def test_unbounded(self, swap_econ):
        with pytest.raises(Unbounded):
            trader_utility_max(swap_econ, [1.0, 0.0], 0)


class TestOptimalBundle:
    def test_swap(self, swap_econ):
        np.testing.assert_allclose(optimal_bundle(swap_econ, [0.5, 0.5], 0), [0, 1])

    def test_zero_budget(self, swap_econ):
        np.testing.assert_array_equal(optimal_bundle(swap_econ, [0.0, 1.0], 0), [0, 0])

    def test_formula_exact(self):
        econ = economy([[1], [0]], [[2], [4]], exact=True)
        w = [Fraction(1, 2), Fraction(1, 2)]
        assert trader_utility_max(econ, w, 0) == Fraction(1, 6)
        bundle = optimal_bundle(econ, w, 0)
        assert list(bundle) == [Fraction(1, 3), Fraction(2, 3)]
        assert leontief_utility(econ, 0, bundle) == Fraction(1, 6)


class TestCheckEquilibrium:
    def test_swap_passes(self, swap_econ):
        assert check_equilibrium(swap_econ, [1, 1], [0.5, 0.5], 1e-9).passed

    def test_homogeneous(self, swap_econ):
        assert check_equilibrium(swap_econ, [1, 1], [1, 1], 1e-9).passed

    def test_budget_violation(self, swap_econ):
        rep = check_equilibrium(swap_econ, [1.2, 1], [0.5, 0.5], 1e-9)
        assert not rep.passed
        assert rep.failed_conditions() == ["budget_equality", "supply"]
        assert rep.condition("budget_equality").index == 0

    def test_supply_computed_from_endowments(self):
        # rows of E sum to 2: the same utilities fit twice the demand
        econ = economy(2 * np.eye(2), [[0, 1], [1, 0]])
        assert check_equilibrium(econ, [2, 2], [0.5, 0.5], 1e-9).passed

    def test_unbounded_trader_reported(self, swap_econ):
        rep = check_equilibrium(swap_econ, [1, 1], [1, 0])
        assert not rep.passed
        assert rep.condition("budget_equality").slack == float("-inf")


class TestCheckEpsEquilibrium:
    def test_exact_with_zero_eps(self, swap_econ):
        assert check_eps_equilibrium(swap_econ, [1, 1], [0.5, 0.5], 0).passed

    def test_inflated_utilities(self, swap_econ_exact):
        u = [Fraction(11, 10)] * 2
        w = [Fraction(1, 2)] * 2
        rep = check_eps_equilibrium(swap_econ_exact, u, w, Fraction(5, 100))
        assert rep.failed_conditions() == ["budget_upper", "supply"]
        assert check_eps_equilibrium(swap_econ_exact, u, w, Fraction(12, 100)).passed

    def test_unbounded_propagates(self, swap_econ):
        with pytest.raises(Unbounded):
            check_eps_equilibrium(swap_econ, [1, 1], [1, 0], 0.1)

    def test_measured_eps(self, swap_econ_exact):
        u = [Fraction(11, 10), Fraction(1)]
        w = [Fraction(1, 2)] * 2
        e = measured_eps(swap_econ_exact, u, w)
        assert e == Fraction(1, 10)
        assert check_eps_equilibrium(swap_econ_exact, u, w, e).passed
        assert not check_eps_equilibrium(swap_econ_exact, u, w, e - Fraction(1, 10**9)).passed


class TestAllocation:
    X = np.array([[0.0, 1.0], [1.0, 0.0]])

    def test_exact(self, swap_econ):
        assert check_allocation_eps_equilibrium(swap_econ, self.X, [0.5, 0.5], 0).passed

    def test_doubled_fails_supply(self, swap_econ):
        rep = check_allocation_eps_equilibrium(swap_econ, 2 * self.X, [0.5, 0.5], 0.5)
        assert "supply" in rep.failed_conditions()

    def test_scaled_down_passes(self, swap_econ):
        assert check_allocation_eps_equilibrium(swap_econ, 0.95 * self.X, [0.5, 0.5], 0.1).passed

    def test_strict_exact(self, swap_econ):
        assert check_strict_eps_equilibrium(swap_econ, self.X, [0.5, 0.5], 0).passed

    def test_strict_budget_overrun(self, swap_econ):
        rep = check_strict_eps_equilibrium(swap_econ, 1.01 * self.X, [0.5, 0.5], 0.1)
        assert "budget" in rep.failed_conditions()

    def test_strict_from_scaled_down_allocation(self, swap_econ_exact):
        # an (eps/2)-approximate allocation sitting at 1 - eps/2 of the optimum
        eps = Fraction(1, 10)
        X = np.array([[0, 1], [1, 0]], dtype=object) * (1 - eps / 2)
        w = [Fraction(1, 2)] * 2
        assert check_allocation_eps_equilibrium(swap_econ_exact, X, w, eps / 2).passed
        assert check_strict_eps_equilibrium(swap_econ_exact, X / (1 - eps / 2), w, eps).passed

    def test_divided_allocation_can_break_budget(self, swap_econ_exact):
        eps = Fraction(1, 10)
        X = np.array([[0, 1], [1, 0]], dtype=object)
        w = [Fraction(1, 2)] * 2
        assert check_allocation_eps_equilibrium(swap_econ_exact, X, w, eps / 2).passed
        assert not check_strict_eps_equilibrium(swap_econ_exact, X / (1 - eps / 2), w, eps).passed
        assert check_strict_eps_equilibrium(swap_econ_exact, strict_from_loose(X, eps), w, eps).passed


class TestNormalizePrices:
    def test_scale(self):
        pv = normalize_prices([2, 2])
        np.testing.assert_allclose(pv.w, [0.5, 0.5])
        assert pv.normalized

    def test_idempotent(self):
        np.testing.assert_array_equal(normalize_prices([1, 0, 0]).w, [1, 0, 0])

    def test_zero(self):
        with pytest.raises(ZeroPrices):
            normalize_prices([0, 0])


# --- properties -----------------------------------------------------------

small_pos = st.integers(1, 9)
small_nonneg = st.integers(0, 9)


@st.composite
def exact_instances(draw):
    m = draw(st.integers(1, 3))
    n = draw(st.integers(1, 3))
    E = [[Fraction(draw(small_nonneg)) for _ in range(n)] for _ in range(m)]
    D = [[Fraction(draw(small_nonneg)) for _ in range(n)] for _ in range(m)]
    for j in range(n):
        if all(D[i][j] == 0 for i in range(m)):
            D[draw(st.integers(0, m - 1))][j] = Fraction(draw(small_pos))
    w = [Fraction(draw(small_pos), draw(small_pos)) for _ in range(m)]
    u = [Fraction(draw(small_nonneg), draw(small_pos)) for _ in range(n)]
    return economy(E, D, exact=True), u, w


@settings(max_examples=60, deadline=None)
@given(exact_instances(), st.sampled_from([Fraction(1, 1000), Fraction(1), Fraction(1000), Fraction(7, 3)]))
def test_homogeneity_exact(inst, alpha):
    econ, u, w = inst
    scaled = [alpha * v for v in w]
    assert check_equilibrium(econ, u, w) == check_equilibrium(econ, u, scaled)
    assert check_eps_equilibrium(econ, u, w, Fraction(1, 10)) == check_eps_equilibrium(
        econ, u, scaled, Fraction(1, 10)
    )


@settings(max_examples=60, deadline=None)
@given(exact_instances(), st.fractions(0, 2), st.fractions(0, 2))
def test_monotone_in_eps(inst, e1, e2):
    econ, u, w = inst
    lo, hi = sorted((e1, e2))
    if check_eps_equilibrium(econ, u, w, lo).passed:
        assert check_eps_equilibrium(econ, u, w, hi).passed


@settings(max_examples=60, deadline=None)
@given(exact_instances())
def test_bundle_utility_consistency(inst):
    econ, _, w = inst
    for j in range(econ.n):
        b = optimal_bundle(econ, w, j)
        assert leontief_utility(econ, j, b) == trader_utility_max(econ, w, j)
        # every demanded good is priced here, so the budget binds
        assert b @ np.array(w, dtype=object) == econ.E[:, j] @ np.array(w, dtype=object)


@settings(max_examples=40, deadline=None)
@given(
    st.lists(st.fractions(Fraction(95, 100), Fraction(105, 100)), min_size=2, max_size=2),
    st.sampled_from([Fraction(1, 10), Fraction(1, 5)]),
)
def test_loose_to_strict_bridge(factors, eps):
    econ = economy(np.eye(2, dtype=int), [[0, 1], [1, 0]], exact=True)
    w = [Fraction(1, 2)] * 2
    X = np.array([[0, 1], [1, 0]], dtype=object) * np.array(factors, dtype=object)
    if check_allocation_eps_equilibrium(econ, X, w, eps / 2).passed:
        assert check_strict_eps_equilibrium(econ, strict_from_loose(X, eps), w, eps).passed


def test_float_relative_tolerance_scale_free(swap_econ):
    for alpha in (1e-3, 1.0, 1e3):
        assert check_equilibrium(swap_econ, [1, 1], [0.5 * alpha, 0.5 * alpha]).passed


def test_equilibrium_allocation_matches_bundles(swap_econ):
    X = equilibrium_allocation(swap_econ, [0.5, 0.5])
    np.testing.assert_allclose(X, [[0, 1], [1, 0]])
