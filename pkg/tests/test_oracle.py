"""Tests for brute-force ground truth and the certificate checks."""

import numpy as np
import pytest

from submodmm.core import BudgetExceededError, InfeasibleError, ModularVector, SubsetMask
from submodmm.functions import FAMILY_ALIASES, ConcaveOverModularFn, IwataTestFn, ModularFn, random_instance
from submodmm.graphs import GraphSpec, bipartite_dense, grid
from submodmm.linopt import ConstraintFamily, random_feasible_set
from submodmm.oracle import (
    brute_maximize,
    brute_minimize,
    check_semigradient_membership,
    find_membership_witness,
    verify_constrained_bound,
    verify_lattice_claims,
)
from submodmm.semigradient import SupergradientVector, supergradient

W1 = [3, 9, 17, 14, 14, 10, 16, 4, 13, 2]
W2 = [-9, 4, 6, -1, 10, -4, -6, -1, 2, -8]


class TestBruteForce:
    def test_minimize_iwata(self):
        """Test the exact minimum of Iwata's function with n = 2."""
        result = brute_minimize(IwataTestFn(2))
        assert result.optimum_value == pytest.approx(-7.0)
        assert [X.to_external() for X in result.optimizers] == [[1, 2]]
        assert result.enumerated == 4
        assert result.to_dict()["sense"] == "min"

    def test_maximize_modular(self):
        """Test maximizers and local maxima of a modular function."""
        result = brute_maximize(ModularFn([1.0, -2.0, 3.0]))
        assert result.optimum_value == pytest.approx(4.0)
        assert [X.indices for X in result.optimizers] == [(0, 2)]
        assert [X.indices for X in result.local_optima] == [(0, 2)]

    def test_ties_and_local_minima(self):
        """Test all tied optimizers are listed."""
        f = ModularFn([0.0, -1.0])
        result = brute_minimize(f)
        assert sorted(X.indices for X in result.optimizers) == [(0, 1), (1,)]
        assert len(result.local_optima) == 2

    def test_constrained(self):
        """Test enumeration over a constraint family."""
        f = ModularFn([4.0, 1.0, 2.0, 3.0])
        result = brute_minimize(f, ConstraintFamily.spanning_tree(grid(2, 2)))
        assert result.enumerated == 4
        assert result.optimum_value == pytest.approx(6.0)
        assert result.local_optima == []
        top = brute_maximize(f, ConstraintFamily.cardinality_upper(4, 2))
        assert top.optimum_value == pytest.approx(7.0)

    def test_no_feasible_set(self):
        """Test a path constraint between disconnected terminals."""
        g = GraphSpec(vertices=4, edges=[(0, 1), (2, 3)], s=0, t=3)
        with pytest.raises(InfeasibleError, match="no feasible set"):
            brute_minimize(ModularFn([1.0, 1.0]), ConstraintFamily.shortest_path(g))

    def test_budget(self):
        """Test the enumeration budget and its override."""
        f = IwataTestFn(6)
        with pytest.raises(BudgetExceededError):
            brute_minimize(f, limit=4)
        assert brute_minimize(f, limit=4, allow_large=True).enumerated == 64


class TestMembership:
    def test_valid_supergradients(self):
        """Test the named supergradients pass and have no witness."""
        f = random_instance("BN", 7, seed=3)
        Y = SubsetMask.from_indices([1, 4], 7)
        for kind in ("grow", "shrink", "bar"):
            g = supergradient(f, Y, kind)
            assert check_semigradient_membership(f, g)
            assert find_membership_witness(f, g) is None

    def test_violation_witness(self):
        """Test a zero vector is not a supergradient of a positive modular function."""
        f = ModularFn([1.0, 2.0, 3.0])
        fake = SupergradientVector(ModularVector(np.zeros(3)), f.empty(), "grow", 0.0)
        assert not check_semigradient_membership(f, fake)
        assert find_membership_witness(f, fake) == f.full()

    def test_budget(self):
        """Test the membership budget."""
        f = IwataTestFn(5)
        with pytest.raises(BudgetExceededError):
            check_semigradient_membership(f, supergradient(f, f.empty(), "bar"), limit=3)


class TestLatticeCertificate:
    def test_worked_example(self):
        """Test every lattice claim on the concave-over-modular example."""
        cert = verify_lattice_claims(ConcaveOverModularFn(W1, W2))
        assert cert.passed
        assert all(cert.claims.values())
        assert cert.minimizers == [[1, 6, 7, 8, 10]]
        assert cert.lattice["A"] == [1, 6, 7, 10]
        assert cert.witnesses == {}
        assert cert.to_dict()["passed"] is True

    @pytest.mark.parametrize("family", sorted(FAMILY_ALIASES))
    def test_random_families(self, family):
        """Test the claims on 23 instances of every family."""
        params = {"lam": 2.0} if family in ("BN", "DR") else {}
        for seed in range(23):
            cert = verify_lattice_claims(random_instance(family, 9, seed=seed, params=params))
            assert cert.passed, (seed, cert.witnesses)
            assert cert.local_minima >= 1


class TestBoundCertificate:
    @pytest.mark.parametrize("family", ["CM", "CCM"])
    def test_tree(self, family):
        """Test constrained MMin against the exact spanning tree optimum."""
        C = ConstraintFamily.spanning_tree(grid(3, 3))
        for seed in range(3):
            cert = verify_constrained_bound(random_instance(family, C.n, seed=seed), C)
            assert cert.passed
            assert cert.value >= cert.optimum - 1e-9
            assert cert.factor >= 1.0 - 1e-9
            assert set(cert.to_dict()) == {
                "passed",
                "value",
                "optimum",
                "mu_value",
                "sharp_bound",
                "curvature",
                "factor",
            }

    @pytest.mark.parametrize("family", ["CM", "CCM", "WC", "BS"])
    @pytest.mark.parametrize(
        "constraint",
        [
            ConstraintFamily.spanning_tree(grid(3, 3)),
            ConstraintFamily.shortest_path(grid(3, 3)),
            ConstraintFamily.perfect_matching(bipartite_dense(3)),
            ConstraintFamily.cardinality_lower(10, 3),
        ],
        ids=["tree", "path", "matching", "cardinality"],
    )
    def test_constraint_families(self, constraint, family):
        """Test the curvature bound against the exact optimum across constraints and families."""
        for seed in range(7):
            params = {}
            if family in ("WC", "BS"):
                params["R"] = random_feasible_set(constraint, np.random.default_rng(seed)).to_external()
            if family == "BS":
                params["mode"] = "monotone"
            f = random_instance(family, constraint.n, seed=seed, params=params)
            cert = verify_constrained_bound(f, constraint)
            assert cert.passed, (family, seed, cert.to_dict())
            assert cert.sharp_bound is not None
            assert cert.value <= cert.sharp_bound * cert.optimum + 1e-6
            assert cert.factor >= 1.0 - 1e-9
