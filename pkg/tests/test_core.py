"""Tests for ground-set arithmetic, the oracle contract and exhaustive checks."""

import pickle

import numpy as np
import pytest

from submodmm.core import (
    ArgumentError,
    BudgetExceededError,
    DomainError,
    GroundSet,
    ModularVector,
    RemappedOracle,
    SetFunctionOracle,
    SubsetMask,
    check_element,
    curvature,
    evaluate_table,
    gain,
    gray_code_masks,
    insertion_gains,
    is_monotone,
    is_submodular,
    membership_matrix,
    probe_monotone,
    removal_gains,
)
from submodmm.functions import CardinalityFn, ConcaveOverModularFn, IwataTestFn, ModularFn, random_instance


class CallbackOracle(SetFunctionOracle):
    """Generic oracle without a vectorised table."""

    def __init__(self, n, func):
        super().__init__(n)
        self.func = func

    def _evaluate(self, X):
        return self.func(X)


class TestSubsetMask:
    def test_external_ids_round_trip(self):
        """Test conversion between 1-based ids and bitmasks."""
        X = SubsetMask.from_external([1, 6, 7], 10)
        assert X.indices == (0, 5, 6)
        assert X.to_external() == [1, 6, 7]
        assert X.cardinality == 3
        assert str(X) == "{1,6,7}"

    def test_set_algebra(self):
        """Test union, intersection, difference, complement and order."""
        n = 6
        A = SubsetMask.from_indices([0, 1, 2], n)
        B = SubsetMask.from_indices([2, 3], n)
        assert (A | B).indices == (0, 1, 2, 3)
        assert (A & B).indices == (2,)
        assert (A - B).indices == (0, 1)
        assert (A ^ B).indices == (0, 1, 3)
        assert A.complement().indices == (3, 4, 5)
        assert (A & B) <= A
        assert A >= (A & B)
        assert not A.issubset(B)
        assert 2 in A and 4 not in A
        assert list(A) == [0, 1, 2]
        assert len(A) == 3

    def test_add_remove(self):
        """Test single-element updates are pure."""
        X = SubsetMask.empty(4)
        Y = X.add(2)
        assert X.cardinality == 0
        assert Y.indices == (2,)
        assert Y.remove(2) == X
        assert Y.remove(3) == Y

    def test_bool_array(self):
        """Test boolean array conversion."""
        X = SubsetMask.from_bool_array([True, False, True])
        np.testing.assert_array_equal(X.to_bool_array(), [True, False, True])

    def test_rejects_bits_outside_ground_set(self):
        """Test that masks cannot carry bits beyond n."""
        with pytest.raises(ArgumentError, match="do not fit"):
            SubsetMask(1 << 4, 4)

    def test_rejects_bad_ids(self):
        """Test invalid element ids."""
        with pytest.raises(ArgumentError, match="out of range"):
            SubsetMask.from_indices([5], 5)
        with pytest.raises(ArgumentError, match="out of range"):
            SubsetMask.from_external([0], 5)
        with pytest.raises(ArgumentError, match="must be an integer"):
            check_element(5, 1.5)

    def test_ground_mismatch(self):
        """Test that sets over different ground sets do not combine."""
        with pytest.raises(ArgumentError, match="mismatch"):
            SubsetMask.empty(3) | SubsetMask.empty(4)

    def test_ground_set(self):
        """Test the ground set helper."""
        V = GroundSet(3)
        assert len(V) == 3
        assert V.full().indices == (0, 1, 2)
        assert V.empty().cardinality == 0
        with pytest.raises(ArgumentError):
            GroundSet(0)


class TestModularVector:
    def test_evaluation(self):
        """Test w(X) and the empty-set value."""
        w = ModularVector([1.0, -2.0, 3.5])
        assert w(SubsetMask.from_indices([0, 2], 3)) == pytest.approx(4.5)
        assert w(SubsetMask.empty(3)) == 0.0
        assert w[1] == -2.0

    def test_read_only(self):
        """Test that weights cannot be mutated after construction."""
        source = np.array([1.0, 2.0])
        w = ModularVector(source)
        source[0] = 9.0
        assert w[0] == 1.0
        with pytest.raises(ValueError):
            w.w[0] = 5.0

    def test_rejects_non_finite(self):
        """Test NaN weights are rejected."""
        with pytest.raises(ArgumentError, match="finite"):
            ModularVector([1.0, np.nan])


class TestOracle:
    def test_eval_count(self):
        """Test that every evaluation is counted."""
        f = ModularFn([1.0, 2.0, 3.0])
        f(f.empty())
        f.evaluate(f.full())
        assert f.eval_count == 2

    def test_memoize_still_counts(self):
        """Test memoized oracles count repeated calls."""
        f = ModularFn([1.0, 2.0], memoize=True)
        X = f.full()
        assert f(X) == f(X) == pytest.approx(3.0)
        assert f.eval_count == 2

    def test_rejects_foreign_sets(self):
        """Test evaluation of a set over a different ground set."""
        f = ModularFn([1.0, 2.0])
        with pytest.raises(ArgumentError, match="Expected a SubsetMask over 2"):
            f.evaluate(SubsetMask.empty(3))

    def test_pickle_round_trip(self):
        """Test oracles survive pickling for worker processes."""
        f = IwataTestFn(4)
        g = pickle.loads(pickle.dumps(f))
        X = SubsetMask.from_indices([1, 3], 4)
        assert g(X) == f(X)

    def test_gains(self):
        """Test marginal gain helpers on Iwata's function with n = 2."""
        f = IwataTestFn(2)
        assert f(SubsetMask.from_external([1], 2)) == pytest.approx(0.0)
        assert f(SubsetMask.from_external([2], 2)) == pytest.approx(-5.0)
        assert f(f.full()) == pytest.approx(-7.0)
        assert gain(f, 1, f.empty()) == pytest.approx(-5.0)
        assert gain(f, 0, f.full()) == 0.0
        np.testing.assert_allclose(insertion_gains(f, f.empty()), [0.0, -5.0])
        np.testing.assert_allclose(removal_gains(f, f.full()), [-2.0, -7.0])

    @pytest.mark.parametrize("family", ["CM", "CCM", "BN", "WC", "BS", "DR", "IWATA", "CARD"])
    def test_gain_telescoping(self, family):
        """Test f(S) plus the chain gains from S to T equals f(T) in any insertion order."""
        rng = np.random.default_rng(41)
        for seed in range(10):
            f = random_instance(family, 9, seed=seed)
            T = SubsetMask.from_bool_array(rng.random(9) < 0.7)
            S = SubsetMask.from_bool_array(T.to_bool_array() & (rng.random(9) < 0.4))
            total, X = f(S), S
            for j in rng.permutation(list((T - S).indices)):
                total += gain(f, int(j), X)
                X = X.add(int(j))
            assert X == T
            assert total == pytest.approx(f(T), abs=1e-9)


class TestTables:
    def test_membership_matrix(self):
        """Test row r of the membership matrix encodes bitmask r."""
        M = membership_matrix(0, 8, 3)
        assert M.shape == (8, 3)
        np.testing.assert_array_equal(M[5], [True, False, True])

    def test_gray_code(self):
        """Test Gray code visits every mask once with single-bit steps."""
        masks = list(gray_code_masks(4))
        assert sorted(masks) == list(range(16))
        assert all(bin(a ^ b).count("1") == 1 for a, b in zip(masks, masks[1:]))

    def test_vectorised_matches_generic(self):
        """Test the vectorised table agrees with per-set evaluation."""
        f = ConcaveOverModularFn([3, 9, 17, 14], [-9, 4, 6, -1])
        generic = CallbackOracle(4, f.evaluate)
        np.testing.assert_allclose(evaluate_table(f), evaluate_table(generic))
        assert generic.eval_count == 16

    def test_budget(self):
        """Test the enumeration budget."""
        with pytest.raises(BudgetExceededError):
            evaluate_table(IwataTestFn(6), limit=5)


class TestRemappedOracle:
    def test_restriction(self):
        """Test restricting a function to a subset of its ground set."""
        f = ModularFn([1.0, 2.0, 4.0, 8.0])
        g = RemappedOracle(f, [3, 1])
        assert g.n == 2
        assert g(SubsetMask.from_indices([0], 2)) == pytest.approx(8.0)
        np.testing.assert_allclose(evaluate_table(g), [0.0, 8.0, 2.0, 10.0])

    def test_relabeling_preserves_submodularity(self):
        """Test a permuted Iwata function stays submodular."""
        g = RemappedOracle(IwataTestFn(5), [4, 2, 0, 3, 1])
        assert is_submodular(g)

    def test_rejects_duplicates(self):
        """Test remapping with repeated elements."""
        with pytest.raises(ArgumentError, match="distinct"):
            RemappedOracle(ModularFn([1.0, 2.0]), [0, 0])


class TestChecks:
    def test_submodular_families(self):
        """Test exhaustive submodularity of zoo members."""
        assert is_submodular(IwataTestFn(6))
        assert is_submodular(ConcaveOverModularFn([3, 9, 17, 14, 14], [-9, 4, 6, -1, 10]))
        assert is_submodular(CardinalityFn(5, np.sqrt(np.arange(6))))

    def test_supermodular_detected(self):
        """Test that a convex cardinality function fails the check."""
        assert not is_submodular(CardinalityFn(4, np.arange(5) ** 2))

    def test_monotone(self):
        """Test exhaustive and probe monotonicity."""
        f = CardinalityFn(4, np.sqrt(np.arange(5)))
        assert is_monotone(f)
        assert probe_monotone(f)
        g = IwataTestFn(4)
        assert not is_monotone(g)
        assert not probe_monotone(g)

    def test_curvature(self):
        """Test curvature values at the extremes and for sqrt(|X|)."""
        assert curvature(ModularFn([1.0, 2.0, 3.0])) == pytest.approx(0.0)
        assert curvature(CardinalityFn(3, [0, 1, 1, 1])) == pytest.approx(1.0)
        assert curvature(CardinalityFn(4, np.sqrt(np.arange(5)))) == pytest.approx(np.sqrt(3) - 1, abs=1e-12)

    def test_curvature_undefined(self):
        """Test curvature requires positive singletons and monotonicity."""
        with pytest.raises(DomainError, match="curvature undefined"):
            curvature(ModularFn([1.0, 0.0]))
        with pytest.raises(DomainError, match="not monotone"):
            curvature(CardinalityFn(2, [0.0, 1.0, 0.5]))
