"""
Brute-force ground truth and certificate checks for small ground sets.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np

from . import config
from .core import (
    ArgumentError,
    InfeasibleError,
    SetFunctionOracle,
    SubsetMask,
    TABLE_CHUNK,
    evaluate_table,
    membership_matrix,
)
from .linopt import ConstraintFamily
from .mmin import MinimizeReport, constrained_mmin, lattice_summary
from .semigradient import SemigradientVector

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BruteForceResult:
    """
    Exact optimum of f over a family.

    Attributes:
        optimum_value: Minimum (or maximum) value
        optimizers: Every set attaining it within tolerance
        local_optima: Sets no single flip improves (unconstrained runs only)
        enumerated: Number of sets evaluated
        sense: "min" or "max"
    """

    optimum_value: float
    optimizers: List[SubsetMask]
    local_optima: List[SubsetMask]
    enumerated: int
    sense: str

    def to_dict(self) -> Dict[str, Any]:
        return {
            "sense": self.sense,
            "optimum_value": self.optimum_value,
            "optimizers": [X.to_external() for X in self.optimizers],
            "local_optima": [X.to_external() for X in self.local_optima],
            "enumerated": self.enumerated,
        }


def _effective_limit(f: SetFunctionOracle, limit: Optional[int], allow_large: bool) -> int:
    limit = config.BRUTE_FORCE_LIMIT if limit is None else limit
    return max(limit, f.n) if allow_large else limit


def _local_optima(table: np.ndarray, n: int, sense: str, tol: float) -> np.ndarray:
    masks = np.arange(table.size, dtype=np.int64)
    local = np.ones(table.size, dtype=bool)
    for j in range(n):
        neighbor = table[masks ^ (1 << j)]
        local &= table <= neighbor + tol if sense == "min" else table >= neighbor - tol
    return np.flatnonzero(local)


def _brute(
    f: SetFunctionOracle,
    C: Optional[ConstraintFamily],
    sense: str,
    limit: Optional[int],
    allow_large: bool,
    tol: Optional[float],
) -> BruteForceResult:
    tol = config.TOLERANCE if tol is None else tol
    limit = _effective_limit(f, limit, allow_large)
    if C is not None and C.n != f.n:
        raise ArgumentError(f"Constraint is over {C.n} elements, oracle over {f.n}")

    if C is None or C.kind == "unconstrained":
        table = evaluate_table(f, limit)
        best = float(table.min() if sense == "min" else table.max())
        optimizers = np.flatnonzero(np.abs(table - best) <= tol)
        local = _local_optima(table, f.n, sense, tol)
        return BruteForceResult(
            optimum_value=best,
            optimizers=[SubsetMask(int(b), f.n) for b in optimizers],
            local_optima=[SubsetMask(int(b), f.n) for b in local],
            enumerated=table.size,
            sense=sense,
        )

    sets, values = [], []
    for X in C.enumerate_feasible(limit):
        sets.append(X)
        values.append(f.evaluate(X))
    if not sets:
        raise InfeasibleError(f"The {C.kind} constraint has no feasible set")
    values = np.asarray(values)
    best = float(values.min() if sense == "min" else values.max())
    return BruteForceResult(
        optimum_value=best,
        optimizers=[sets[i] for i in np.flatnonzero(np.abs(values - best) <= tol)],
        local_optima=[],
        enumerated=len(sets),
        sense=sense,
    )


def brute_minimize(
    f: SetFunctionOracle,
    C: Optional[ConstraintFamily] = None,
    limit: Optional[int] = None,
    allow_large: bool = False,
    tol: Optional[float] = None,
) -> BruteForceResult:
    """
    Exact minimum of f over C (default: all subsets) by enumeration.

    Args:
        f: The oracle
        C: Constraint family; graph kinds are enumerated structurally
        limit: Enumeration budget as a power of two (defaults to config.BRUTE_FORCE_LIMIT)
        allow_large: Lift the budget to the ground set size
        tol: Tolerance for ties and local optimality

    Raises:
        BudgetExceededError: If the budget would be exceeded
        InfeasibleError: If C has no feasible set
    """
    return _brute(f, C, "min", limit, allow_large, tol)


def brute_maximize(
    f: SetFunctionOracle,
    C: Optional[ConstraintFamily] = None,
    limit: Optional[int] = None,
    allow_large: bool = False,
    tol: Optional[float] = None,
) -> BruteForceResult:
    """Exact maximum of f over C; see ``brute_minimize``."""
    return _brute(f, C, "max", limit, allow_large, tol)


def _modular_table(w: np.ndarray) -> np.ndarray:
    n = w.size
    size = 1 << n
    out = np.empty(size)
    for start in range(0, size, TABLE_CHUNK):
        stop = min(size, start + TABLE_CHUNK)
        out[start:stop] = membership_matrix(start, stop, n) @ w
    return out


def _membership_gaps(f: SetFunctionOracle, vec: SemigradientVector, limit: Optional[int]) -> np.ndarray:
    """(f - y)(X) - (f - y)(Y) for all X, signed so that violations are negative."""
    limit = config.MEMBERSHIP_LIMIT if limit is None else limit
    if vec.anchor.n != f.n:
        raise ArgumentError(f"Semigradient is over {vec.anchor.n} elements, oracle over {f.n}")
    table = evaluate_table(f, limit)
    diff = table - _modular_table(vec.vector.w)
    gaps = diff - diff[vec.anchor.bits]
    return gaps if vec.direction == "lower" else -gaps


def _scaled_tol(f_table_gaps: np.ndarray, tol: float) -> float:
    return tol * max(1.0, float(np.abs(f_table_gaps).max()))


def check_semigradient_membership(
    f: SetFunctionOracle, vec: SemigradientVector, limit: Optional[int] = None, tol: Optional[float] = None
) -> bool:
    """
    Exhaustively verify the defining inequality of the sub- or superdifferential at the anchor Y.

    subgradient h:   f(X) - h(X) >= f(Y) - h(Y) for all X
    supergradient g: f(X) - g(X) <= f(Y) - g(Y) for all X

    Raises:
        BudgetExceededError: If n exceeds the membership budget
    """
    return find_membership_witness(f, vec, limit, tol) is None


def find_membership_witness(
    f: SetFunctionOracle, vec: SemigradientVector, limit: Optional[int] = None, tol: Optional[float] = None
) -> Optional[SubsetMask]:
    """The most violating set for the membership inequality, or None if it holds."""
    tol = config.TOLERANCE if tol is None else tol
    gaps = _membership_gaps(f, vec, limit)
    worst = int(np.argmin(gaps))
    if gaps[worst] < -_scaled_tol(gaps, tol):
        return SubsetMask(worst, f.n)
    return None


@dataclass
class LatticeCertificate:
    """Pass/fail record of the lattice claims for one function, with witnesses on failure."""

    passed: bool
    claims: Dict[str, bool]
    lattice: Dict[str, List[int]]
    minimizers: List[List[int]]
    local_minima: int
    witnesses: Dict[str, List[int]] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "passed": self.passed,
            "claims": self.claims,
            "lattice": self.lattice,
            "minimizers": self.minimizers,
            "local_minima": self.local_minima,
            "witnesses": self.witnesses,
        }


def verify_lattice_claims(
    f: SetFunctionOracle, limit: Optional[int] = None, tol: Optional[float] = None
) -> LatticeCertificate:
    """
    Check against brute force that A <= A+ <= X* <= B+ <= B for every minimizer X*,
    that A+ and B+ are the smallest and largest local minima, and that every
    local minimum lies in [A+, B+].

    Raises:
        BudgetExceededError: If n exceeds the membership budget
    """
    limit = config.MEMBERSHIP_LIMIT if limit is None else limit
    summary = lattice_summary(f, tol)
    brute = brute_minimize(f, limit=limit, tol=tol)
    A, B, A_plus, B_plus = summary.A, summary.B, summary.A_plus, summary.B_plus
    local_bits = {X.bits for X in brute.local_optima}

    witnesses: Dict[str, List[int]] = {}

    def holds(name: str, sets: List[SubsetMask], predicate) -> bool:
        for X in sets:
            if not predicate(X):
                witnesses[name] = X.to_external()
                return False
        return True

    claims = {
        "A_subset_A_plus": A.issubset(A_plus),
        "B_plus_subset_B": B_plus.issubset(B),
        "A_plus_subset_B_plus": A_plus.issubset(B_plus),
        "minimizers_in_lattice": holds(
            "minimizers_in_lattice", brute.optimizers, lambda X: A_plus.issubset(X) and X.issubset(B_plus)
        ),
        "A_plus_is_local_min": A_plus.bits in local_bits,
        "B_plus_is_local_min": B_plus.bits in local_bits,
        "local_minima_in_lattice": holds(
            "local_minima_in_lattice", brute.local_optima, lambda X: A_plus.issubset(X) and X.issubset(B_plus)
        ),
    }
    for name, ok in claims.items():
        if not ok and name not in witnesses:
            witnesses[name] = (A_plus if "A_plus" in name else B_plus).to_external()
    passed = all(claims.values())
    if not passed:
        logger.warning("Lattice claims failed: %s", ", ".join(k for k, v in claims.items() if not v))
    return LatticeCertificate(
        passed=passed,
        claims=claims,
        lattice=summary.to_dict(),
        minimizers=[X.to_external() for X in brute.optimizers],
        local_minima=len(brute.local_optima),
        witnesses=witnesses,
    )


@dataclass
class BoundCertificate:
    """Outcome of checking constrained MMin against the exact constrained optimum."""

    passed: bool
    value: float
    optimum: float
    mu_value: float
    sharp_bound: Optional[float]
    curvature: Optional[float]
    factor: Optional[float]

    def to_dict(self) -> Dict[str, Any]:
        return dict(self.__dict__)


def verify_constrained_bound(
    f: SetFunctionOracle,
    C: ConstraintFamily,
    report: Optional[MinimizeReport] = None,
    limit: Optional[int] = None,
    slack: float = 1e-6,
) -> BoundCertificate:
    """
    Check f(X) <= bound * f(X*) + slack for constrained MMin, with the bound in
    its |X*| form, and that MMin never ends above its first iterate.
    """
    brute = brute_minimize(f, C, limit=limit)
    if report is None:
        report = constrained_mmin(f, C, reference=brute)
    ok = report.value <= report.mu_value + slack
    if report.sharp_bound is not None:
        ok = ok and report.value <= report.sharp_bound * brute.optimum_value + slack
    return BoundCertificate(
        passed=bool(ok),
        value=report.value,
        optimum=brute.optimum_value,
        mu_value=report.mu_value,
        sharp_bound=report.sharp_bound,
        curvature=report.curvature,
        factor=report.factor,
    )
