"""Tests for the function zoo and instance generation."""

import numpy as np
import pytest

from submodmm.core import ArgumentError, SubsetMask, evaluate_table, is_monotone, is_submodular
from submodmm.functions import (
    BestSetFn,
    BipartiteNeighborhoodFn,
    CardinalityFn,
    ClusteredConcaveModularFn,
    ConcaveOverModularFn,
    DiversityRelevanceFn,
    WorstCaseFn,
    build_best_set,
    build_bipartite_neighborhood,
    build_cardinality,
    build_clustered_concave_modular,
    build_concave_modular,
    build_diversity_relevance,
    build_from_problem,
    build_iwata,
    build_modular,
    build_worst_case,
    canonical_family,
    family_names,
    random_instance,
)

W1 = [3, 9, 17, 14, 14, 10, 16, 4, 13, 2]
W2 = [-9, 4, 6, -1, 10, -4, -6, -1, 2, -8]

ALL_FAMILIES = ["CM", "CCM", "BN", "WC", "BS", "DR", "IWATA", "MODULAR", "CARD"]


class TestFamilyNames:
    def test_short_codes_resolve(self):
        """Test short codes map to canonical names."""
        assert canonical_family("CM") == "concave_modular"
        assert canonical_family("dr") == "diversity_relevance"
        assert canonical_family("Best_Set") == "best_set"

    def test_unknown_family(self):
        """Test unknown names list the known ones."""
        with pytest.raises(ArgumentError, match="Unknown function family 'XYZ'"):
            canonical_family("XYZ")

    def test_family_names(self):
        """Test the listing holds long names and short codes."""
        names = family_names()
        assert "iwata" in names and "IWATA" in names


class TestConcaveOverModular:
    def test_worked_example_values(self):
        """Test f(X) = sqrt(w1(X)) + w2(X) on a few sets."""
        f = ConcaveOverModularFn(W1, W2)
        assert f(SubsetMask.from_external([1], 10)) == pytest.approx(np.sqrt(3) - 9)
        X = SubsetMask.from_external([1, 6, 7, 8, 10], 10)
        assert f(X) == pytest.approx(np.sqrt(3 + 10 + 16 + 4 + 2) - 9 - 4 - 6 - 1 - 8)

    def test_complement_mode(self):
        """Test the modular term on V - X with a lam multiplier."""
        f = ConcaveOverModularFn([1.0, 4.0], [2.0, 3.0], mode="complement", lam=0.5)
        assert f(f.empty()) == 0.0
        assert f(f.full()) == pytest.approx(np.sqrt(5.0) - 0.5 * 5.0)

    def test_power_kind(self):
        """Test the power concave kind."""
        f = ConcaveOverModularFn([1.0, 3.0], concave_kind="power", exponent=0.25)
        assert f(f.full()) == pytest.approx(4.0**0.25)

    def test_validation(self):
        """Test parameter errors."""
        with pytest.raises(ArgumentError, match="nonnegative"):
            ConcaveOverModularFn([-1.0, 2.0])
        with pytest.raises(ArgumentError, match="Unknown mode"):
            ConcaveOverModularFn([1.0], mode="sideways")
        with pytest.raises(ArgumentError, match="Exponent"):
            ConcaveOverModularFn([1.0], concave_kind="power", exponent=1.5)
        with pytest.raises(ArgumentError, match="lam"):
            ConcaveOverModularFn([1.0], lam=-1.0)


class TestOtherFamilies:
    def test_clustered(self):
        """Test clustered concave-modular sums per cluster."""
        f = ClusteredConcaveModularFn([[0, 1], [2]], [1.0, 3.0, 9.0])
        assert f(f.full()) == pytest.approx(2.0 + 3.0)

    def test_bipartite_neighborhood(self):
        """Test the neighborhood term and the complement modular term."""
        adjacency = [[True, False], [True, True]]
        f = BipartiteNeighborhoodFn(adjacency, [4.0, 5.0], [1.0, 2.0], lam=1.0)
        X = SubsetMask.from_indices([0], 2)
        np.testing.assert_array_equal(f.neighborhood(X), [True, False])
        assert f(X) == pytest.approx(2.0 - 1.0)
        assert f(f.full()) == pytest.approx(3.0 - 3.0)

    def test_worst_case_parameters(self):
        """Test alpha, beta and |R| of the canonical worst-case instance."""
        f = build_worst_case(16, epsilon=0.1, rng=np.random.default_rng(0))
        assert f.alpha == pytest.approx(16**0.6)
        assert f.beta == pytest.approx(16**0.2)
        assert f.R.cardinality == 5

    def test_worst_case_value(self):
        """Test f(X) = min(|X|, |X - R| + beta, alpha)."""
        R = SubsetMask.from_indices([0, 1, 2], 5)
        f = WorstCaseFn(R, alpha=2.5, beta=1.5)
        assert f(R) == pytest.approx(1.5)
        assert f(SubsetMask.from_indices([3], 5)) == pytest.approx(1.0)
        assert f(f.full()) == pytest.approx(2.5)

    def test_best_set_modes(self):
        """Test penalty and monotone Best Set variants."""
        R = SubsetMask.from_indices([0, 1], 4)
        w = [0.5, 0.25, 0.1, 0.2]
        penalty = BestSetFn(R, w)
        assert penalty(R) == pytest.approx(1.0 - 0.75)
        monotone = BestSetFn(R, w, mode="monotone")
        assert monotone(R) == pytest.approx(1.0)
        assert monotone(monotone.full()) == pytest.approx(1.0 + 0.3)
        assert is_monotone(monotone)
        with pytest.raises(ArgumentError, match="nonempty"):
            BestSetFn(SubsetMask.empty(4), w)

    def test_diversity_relevance_nonnegative(self):
        """Test DR is nonnegative for lam up to 1."""
        rng = np.random.default_rng(3)
        s = (lambda u: (u + u.T) / 2)(rng.random((8, 8)))
        np.fill_diagonal(s, 1.0)
        for lam in (0.5, 0.75, 1.0):
            assert evaluate_table(DiversityRelevanceFn(s, lam)).min() >= -1e-9

    def test_diversity_relevance_validation(self):
        """Test DR input checks."""
        with pytest.raises(ArgumentError, match="square"):
            DiversityRelevanceFn(np.ones((2, 3)))
        with pytest.raises(ArgumentError, match="nonnegative"):
            DiversityRelevanceFn(-np.ones((2, 2)))

    def test_cardinality_table_size(self):
        """Test the cardinality table length check."""
        with pytest.raises(ArgumentError, match="n \\+ 1"):
            CardinalityFn(3, [0, 1, 2])


class TestBuilders:
    def test_builders_match_constructors(self):
        """Test each family builder returns the corresponding oracle."""
        X = SubsetMask.from_indices([0, 2], 3)
        assert build_modular([1.0, 2.0, 3.0])(X) == pytest.approx(4.0)
        assert build_cardinality(3, [0.0, 1.0, 1.5, 2.0])(X) == pytest.approx(1.5)
        assert build_concave_modular([1.0, 3.0, 9.0])(X) == pytest.approx(np.sqrt(10.0))
        assert isinstance(build_clustered_concave_modular([[0, 1], [2]], [1.0, 3.0, 9.0]), ClusteredConcaveModularFn)
        assert isinstance(build_bipartite_neighborhood([[True], [True]], [1.0]), BipartiteNeighborhoodFn)
        assert isinstance(build_best_set(SubsetMask.from_indices([1], 3), [1.0, 2.0, 3.0]), BestSetFn)
        assert isinstance(build_diversity_relevance(np.eye(3)), DiversityRelevanceFn)
        f = build_iwata(2)
        assert f(f.full()) == pytest.approx(-7.0)


class TestRandomInstance:
    @pytest.mark.parametrize("family", ALL_FAMILIES)
    def test_normalized_and_submodular(self, family):
        """Test every family is normalized and submodular."""
        f = random_instance(family, 8, seed=11)
        assert f(f.empty()) == pytest.approx(0.0)
        assert is_submodular(f)

    @pytest.mark.parametrize("family", ALL_FAMILIES)
    def test_seed_determinism(self, family):
        """Test the same seed gives the same function."""
        a = evaluate_table(random_instance(family, 6, seed=5))
        b = evaluate_table(random_instance(family, 6, seed=5))
        np.testing.assert_array_equal(a, b)

    def test_explicit_params_override(self):
        """Test explicit vectors and planted sets override random draws."""
        f = random_instance("BS", 4, seed=0, params={"R": [2, 3], "w": [1, 1, 1, 1], "mode": "monotone"})
        assert f.R.to_external() == [2, 3]
        g = random_instance("CARD", 3, params={"k": 2})
        np.testing.assert_allclose(g.values, [0, 1, 2, 2])

    def test_bad_size(self):
        """Test nonpositive ground set sizes."""
        with pytest.raises(ArgumentError, match="positive integer"):
            random_instance("CM", 0)


class TestBuildFromProblem:
    def test_infers_n_from_weights(self):
        """Test building the worked example without an explicit n."""
        f = build_from_problem({"family": "CM", "params": {"w1": W1, "w2": W2}})
        assert f.n == 10
        assert f(SubsetMask.from_external([1], 10)) == pytest.approx(np.sqrt(3) - 9)

    def test_requires_family(self):
        """Test a problem without a family."""
        with pytest.raises(ArgumentError, match="'family'"):
            build_from_problem({"n": 3})

    def test_requires_size(self):
        """Test a problem without n or weights."""
        with pytest.raises(ArgumentError, match="'n'"):
            build_from_problem({"family": "IWATA"})
