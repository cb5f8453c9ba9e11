"""
Majorize-minimize engines for submodular minimization.

Each step replaces f by the modular upper bound of a supergradient at the
current set and minimizes that bound. Unconstrained steps use the rule

    keep j in X   iff g(j) <= tol
    add  j not in X iff g(j) < -tol

so an element whose bound coefficient is zero stays where it is. Constrained
steps call ``linopt.minimize_modular``.
"""

import logging
import warnings
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np

from . import config
from .core import (
    ArgumentError,
    DomainError,
    InfeasibleError,
    SetFunctionOracle,
    SubsetMask,
    UnsupportedError,
    curvature,
    probe_monotone,
)
from .linopt import ConstraintFamily, minimize_modular
from .semigradient import SUPERGRADIENT_KINDS, supergradient

logger = logging.getLogger(__name__)

VARIANT_BY_KIND = {"grow": "I", "shrink": "II", "bar": "III"}
DEFAULT_CONSTRAINED_ETA = 1e-6


@dataclass(frozen=True)
class LatticeInterval:
    """The sets X with lower <= X <= upper."""

    lower: SubsetMask
    upper: SubsetMask

    def __post_init__(self):
        if not self.lower.issubset(self.upper):
            raise DomainError(f"Lattice lower bound {self.lower} is not contained in upper bound {self.upper}")

    @property
    def n(self) -> int:
        return self.lower.n

    @property
    def width(self) -> int:
        """Number of undecided elements |upper - lower|."""
        return (self.upper - self.lower).cardinality

    @property
    def reduction_pct(self) -> float:
        """Percentage of elements decided by the interval."""
        return 100.0 * (1.0 - self.width / self.n)

    def contains(self, X: SubsetMask) -> bool:
        return self.lower.issubset(X) and X.issubset(self.upper)

    def to_dict(self) -> Dict[str, Any]:
        return {"lower": self.lower.to_external(), "upper": self.upper.to_external()}


@dataclass(frozen=True)
class TrajectoryStep:
    iteration: int
    set: SubsetMask
    value: float

    def to_dict(self) -> Dict[str, Any]:
        return {"iteration": self.iteration, "set": self.set.to_external(), "value": self.value}


@dataclass(frozen=True)
class MinimizeReport:
    """
    Result of a minimization run.

    Attributes:
        solution: Final set, equal to the last trajectory set
        value: f(solution)
        trajectory: Accepted iterates with their values, non-increasing
        variant: "I", "II", "III", "alternating" or "constrained"
        oracle_calls: Evaluations spent by the run
        iterations: Number of accepted set changes
        lattice: Pruned interval, when the variant produces one
        curvature: kappa_f, when computed
        curvature_bound: n / (1 + (n - 1)(1 - kappa_f)), times beta for inexact steps
        sharp_bound: The same bound with |X*| in place of n, when a reference optimum is known
        factor: f(solution) / f(X*), when a reference optimum is known
        mu_set: First iterate of constrained MMin (the modular upper bound minimizer)
        mu_value: f(mu_set)
        exact: False when some inner step was solved approximately
        beta: Product of the inner approximation factors (None when unknown)
        nesting: Alternation sets R_1, R_2, R^2, R^1 (external ids)
    """

    solution: SubsetMask
    value: float
    trajectory: List[TrajectoryStep]
    variant: str
    oracle_calls: int
    iterations: int
    lattice: Optional[LatticeInterval] = None
    curvature: Optional[float] = None
    curvature_bound: Optional[float] = None
    sharp_bound: Optional[float] = None
    factor: Optional[float] = None
    mu_set: Optional[SubsetMask] = None
    mu_value: Optional[float] = None
    exact: bool = True
    beta: Optional[float] = 1.0
    nesting: Optional[Dict[str, List[int]]] = field(default=None)

    def to_dict(self) -> Dict[str, Any]:
        data = {
            "variant": self.variant,
            "solution": self.solution.to_external(),
            "value": self.value,
            "iterations": self.iterations,
            "oracle_calls": self.oracle_calls,
            "exact": self.exact,
            "trajectory": [step.to_dict() for step in self.trajectory],
        }
        optional = {
            "lattice": self.lattice.to_dict() if self.lattice is not None else None,
            "curvature": self.curvature,
            "curvature_bound": self.curvature_bound,
            "sharp_bound": self.sharp_bound,
            "factor": self.factor,
            "mu_set": self.mu_set.to_external() if self.mu_set is not None else None,
            "mu_value": self.mu_value,
            "nesting": self.nesting,
        }
        data.update({k: v for k, v in optional.items() if v is not None})
        return data


def _unconstrained_step(g: np.ndarray, X: SubsetMask, tol: float) -> SubsetMask:
    inside = X.to_bool_array()
    keep = inside & (g <= tol)
    add = ~inside & (g < -tol)
    return SubsetMask.from_bool_array(keep | add)


def _is_unconstrained(C: Optional[ConstraintFamily]) -> bool:
    return C is None or C.kind == "unconstrained"


def mmin_iterate(
    f: SetFunctionOracle,
    X0: SubsetMask,
    kind: str,
    C: Optional[ConstraintFamily] = None,
    eta: float = 0.0,
    tol: Optional[float] = None,
    max_iterations: Optional[int] = None,
) -> MinimizeReport:
    """
    Run majorize-minimize with one supergradient kind until the set stops changing.

    Unconstrained grow steps reduce to X + {j : f(j | X) < 0} and shrink steps
    from V to X - {j : f(j | X - j) > 0}. Under a constraint only the grow
    kind is offered; X0 may be the empty set even when it is infeasible, in
    which case the first iterate is the minimizer of sum_j f(j) over C and the
    trajectory starts there.

    Args:
        f: Submodular oracle
        X0: Starting set
        kind: "grow", "shrink" or "bar"
        C: Constraint family (None for unconstrained)
        eta: Stop once a step improves f by less than eta * |f(X)|
        tol: Sign tolerance (defaults to config.TOLERANCE)
        max_iterations: Safety cap on steps (default 10 n + 100)

    Raises:
        ArgumentError: If eta < 0 or kind is unknown
        InfeasibleError: If X0 is nonempty and infeasible for C
        UnsupportedError: If a constrained run asks for a kind other than grow
    """
    tol = config.TOLERANCE if tol is None else tol
    if eta < 0:
        raise ArgumentError(f"eta must be nonnegative, got {eta}")
    if kind not in SUPERGRADIENT_KINDS:
        raise ArgumentError(f"Unknown supergradient kind '{kind}', expected one of {SUPERGRADIENT_KINDS}")
    if X0.n != f.n:
        raise ArgumentError(f"Start set is over {X0.n} elements, oracle over {f.n}")
    constrained = not _is_unconstrained(C)
    if constrained and kind != "grow":
        raise UnsupportedError(f"constrained minimization supports only the grow supergradient, not '{kind}'")
    if constrained and C.n != f.n:
        raise ArgumentError(f"Constraint is over {C.n} elements, oracle over {f.n}")
    start_feasible = not constrained or C.is_feasible(X0)
    if not start_feasible and X0.cardinality:
        raise InfeasibleError(f"Start set {X0} is not feasible for the {C.kind} constraint")
    max_iterations = 10 * f.n + 100 if max_iterations is None else max_iterations

    calls_before = f.eval_count
    X = X0
    fX = f.evaluate(X)
    trajectory = [TrajectoryStep(0, X, fX)] if start_feasible else []
    exact = True
    beta = 1.0
    iterations = 0

    for t in range(1, max_iterations + 1):
        g = supergradient(f, X, kind).g.w
        if constrained:
            result = minimize_modular(g, C, tol)
            Y = result.set
            if not result.exact:
                exact = False
                beta = None if result.beta is None or beta is None else beta * result.beta
        else:
            Y = _unconstrained_step(g, X, tol)
        fY = f.evaluate(Y)
        logger.debug("MMin-%s iteration %d: |X|=%d, f=%.6g", VARIANT_BY_KIND[kind], t, Y.cardinality, fY)

        if not trajectory:
            X, fX = Y, fY
            trajectory.append(TrajectoryStep(t, X, fX))
            iterations += 1
            continue
        if Y == X:
            break
        improvement = fX - fY
        if improvement <= tol:
            break
        previous = fX
        X, fX = Y, fY
        trajectory.append(TrajectoryStep(t, X, fX))
        iterations += 1
        if improvement < eta * abs(previous):
            break
    else:
        logger.warning("MMin-%s stopped at the iteration cap of %d", VARIANT_BY_KIND[kind], max_iterations)

    return MinimizeReport(
        solution=X,
        value=fX,
        trajectory=trajectory,
        variant="constrained" if constrained else VARIANT_BY_KIND[kind],
        oracle_calls=f.eval_count - calls_before,
        iterations=iterations,
        exact=exact,
        beta=beta,
    )


def prune_lattice(f: SetFunctionOracle, tol: Optional[float] = None) -> LatticeInterval:
    """
    The interval [A+, B+] from MMin-I started at the empty set and MMin-II started at V.

    Every minimizer of a submodular f lies in the interval and both endpoints
    are local minima.
    """
    lower = mmin_iterate(f, f.empty(), "grow", tol=tol).solution
    upper = mmin_iterate(f, f.full(), "shrink", tol=tol).solution
    return LatticeInterval(lower, upper)


def mmin3_contract(f: SetFunctionOracle, X0: SubsetMask, tol: Optional[float] = None) -> SubsetMask:
    """
    MMin-III from X0, which converges to (X0 & B) | A after one step.

    A = {j : f(j) < 0} and B = {j : f(j | V - j) <= 0}.
    """
    return mmin_iterate(f, X0, "bar", tol=tol).solution


@dataclass(frozen=True)
class LatticeSummary:
    """Both lattices of the pruning step and their sizes."""

    A: SubsetMask
    B: SubsetMask
    A_plus: SubsetMask
    B_plus: SubsetMask
    oracle_calls: int

    @property
    def outer(self) -> LatticeInterval:
        return LatticeInterval(self.A, self.B)

    @property
    def inner(self) -> LatticeInterval:
        return LatticeInterval(self.A_plus, self.B_plus)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "A": self.A.to_external(),
            "B": self.B.to_external(),
            "A_plus": self.A_plus.to_external(),
            "B_plus": self.B_plus.to_external(),
            "reduction_pct": self.inner.reduction_pct,
            "reduction_pct_mmin3": self.outer.reduction_pct,
            "oracle_calls": self.oracle_calls,
        }


def lattice_summary(f: SetFunctionOracle, tol: Optional[float] = None) -> LatticeSummary:
    """A and B from MMin-III, A+ and B+ from MMin-I/II, with the oracle calls spent."""
    calls_before = f.eval_count
    A = mmin3_contract(f, f.empty(), tol)
    B = mmin3_contract(f, f.full(), tol)
    inner = prune_lattice(f, tol)
    return LatticeSummary(A, B, inner.lower, inner.upper, f.eval_count - calls_before)


def _alternate(
    f: SetFunctionOracle, X: SubsetMask, first: str, eta: float, tol: float, steps: List[TrajectoryStep]
) -> SubsetMask:
    kinds = (first, "shrink" if first == "grow" else "grow")
    changed = True
    while changed:
        changed = False
        round_start = steps[-1].value
        for kind in kinds:
            report = mmin_iterate(f, X, kind, eta=eta, tol=tol)
            if report.solution != X:
                changed = True
                offset = steps[-1].iteration if steps else 0
                steps.extend(
                    TrajectoryStep(offset + s.iteration, s.set, s.value) for s in report.trajectory[1:]
                )
                X = report.solution
        if changed and round_start - steps[-1].value < eta * abs(round_start):
            logger.debug("Alternation stopped early at f=%.6g", steps[-1].value)
            break
    return X


def mmin_alternate(
    f: SetFunctionOracle, X0: SubsetMask, eta: float = 0.0, tol: Optional[float] = None
) -> MinimizeReport:
    """
    Alternate MMin-I and MMin-II from an arbitrary start until neither changes the set.

    The result is a local minimum. The report also records the nesting sets
    R^1 = MMin-I(X0), R_1 = MMin-II(X0), R^2 = MMin-II(R^1) and
    R_2 = MMin-I(R_1); for X0 in [A+, B+] they satisfy R_1 <= R_2 <= R^2 <= R^1
    and [R_2, R^2] is returned as the pruned lattice when it is one.

    With eta > 0 every inner run stops once a step improves f by less than
    eta * |f(X)|, and the alternation stops after a round that does. The
    nesting runs always go to convergence.
    """
    tol = config.TOLERANCE if tol is None else tol
    if eta < 0:
        raise ArgumentError(f"eta must be nonnegative, got {eta}")
    calls_before = f.eval_count
    steps = [TrajectoryStep(0, X0, f.evaluate(X0))]
    X = _alternate(f, X0, "grow", eta, tol, steps)

    r_upper_1 = mmin_iterate(f, X0, "grow", tol=tol).solution
    r_lower_1 = mmin_iterate(f, X0, "shrink", tol=tol).solution
    r_upper_2 = mmin_iterate(f, r_upper_1, "shrink", tol=tol).solution
    r_lower_2 = mmin_iterate(f, r_lower_1, "grow", tol=tol).solution
    nesting = {
        "R_1": r_lower_1.to_external(),
        "R_2": r_lower_2.to_external(),
        "R^2": r_upper_2.to_external(),
        "R^1": r_upper_1.to_external(),
    }
    lattice = LatticeInterval(r_lower_2, r_upper_2) if r_lower_2.issubset(r_upper_2) else None

    return MinimizeReport(
        solution=X,
        value=steps[-1].value,
        trajectory=steps,
        variant="alternating",
        oracle_calls=f.eval_count - calls_before,
        iterations=len(steps) - 1,
        lattice=lattice,
        nesting=nesting,
    )


def curvature_bound(size: int, kappa: float) -> float:
    """size / (1 + (size - 1)(1 - kappa)), the approximation factor of constrained MMin."""
    size = max(1, size)
    return size / (1.0 + (size - 1) * (1.0 - kappa))


def constrained_mmin(
    f: SetFunctionOracle,
    C: ConstraintFamily,
    eta: float = DEFAULT_CONSTRAINED_ETA,
    reference: Any = None,
    tol: Optional[float] = None,
) -> MinimizeReport:
    """
    MMin-I under a constraint, started from the empty set, with curvature certificates.

    The first iterate minimizes sum_j f(j) over C (the modular upper bound
    baseline); later iterates improve on it until the relative progress drops
    below eta.

    Args:
        f: Monotone nondecreasing submodular oracle
        C: Constraint family
        eta: Relative progress threshold
        reference: Optional exact result with ``optimum_value`` and
            ``optimizers`` (e.g. oracle.BruteForceResult); enables the sharp
            bound and the a-posteriori factor
        tol: Sign tolerance

    Raises:
        ArgumentError: If eta <= 0
    """
    tol = config.TOLERANCE if tol is None else tol
    if eta <= 0:
        raise ArgumentError(f"eta must be positive for constrained minimization, got {eta}")
    calls_before = f.eval_count
    monotone = probe_monotone(f, tol)
    if not monotone:
        warnings.warn("f is not monotone at the singleton level; curvature bounds are omitted", stacklevel=2)

    run = mmin_iterate(f, f.empty(), "grow", C, eta=eta, tol=tol)
    # With a feasible empty start the trajectory begins at the empty set itself
    first = run.trajectory[1] if C.is_feasible(f.empty()) and len(run.trajectory) > 1 else run.trajectory[0]

    kappa = bound = sharp = factor = None
    if monotone:
        try:
            kappa = curvature(f, tol)
        except DomainError as e:
            warnings.warn(f"curvature bound omitted: {e}", stacklevel=2)
    if kappa is not None and run.beta is not None:
        bound = curvature_bound(f.n, kappa) * run.beta
        if reference is not None and reference.optimizers:
            size = min(X.cardinality for X in reference.optimizers)
            sharp = curvature_bound(size, kappa) * run.beta
    if reference is not None:
        opt = reference.optimum_value
        if abs(opt) > tol:
            factor = run.value / opt
        else:
            factor = 1.0 if abs(run.value) <= tol else float("inf")

    return MinimizeReport(
        solution=run.solution,
        value=run.value,
        trajectory=run.trajectory,
        variant="constrained",
        oracle_calls=f.eval_count - calls_before,
        iterations=run.iterations,
        curvature=kappa,
        curvature_bound=bound,
        sharp_bound=sharp,
        factor=factor,
        mu_set=first.set,
        mu_value=first.value,
        exact=run.exact,
        beta=run.beta,
    )
