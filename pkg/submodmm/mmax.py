"""
Minorize-maximize engines for submodular maximization.

Every step takes the subgradient of a permutation anchored at the current set
X, maximizes the resulting modular lower bound and accepts the maximizer Y
only if f(Y) >= (1 + eta) f(X). Schedules differ only in how the permutation
is chosen:

    RP   one random permutation from the empty set
    RA   random permutations until no step is accepted
    RLS  random permutation with the best insertion right after the anchor
         block and the worst element at the end of it
    DLS  deterministic greedy orderings, alternating between suffix and block
    BG   the chain induced by deterministic bi-directional greedy
    RG   the chain induced by randomized bi-directional greedy

Constrained maximization of monotone functions uses the greedy permutation.
"""

import itertools
import logging
import warnings
from dataclasses import dataclass, field
from math import ceil, log
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import config
from .core import (
    ArgumentError,
    DomainError,
    SetFunctionOracle,
    SubsetMask,
    curvature,
    insertion_gains,
    probe_monotone,
    removal_gains,
)
from .linopt import ConstraintFamily, maximize_modular
from .mmin import TrajectoryStep
from .semigradient import Permutation, subgradient_from_permutation

logger = logging.getLogger(__name__)

SCHEDULES = ("RP", "RA", "RLS", "DLS", "BG", "RG", "greedy", "knapsack_greedy", "external", "RS")


@dataclass(frozen=True)
class ScheduleConfig:
    """
    Attributes:
        eta: Relative progress required to accept a step
        seed: Seed for numpy.random.SeedSequence (None draws fresh entropy)
        repetitions: Best-of-r for randomized schedules
        max_iterations: Hard cap on accepted steps; defaults to log n / log(1 + eta)
    """

    eta: float = 0.01
    seed: Optional[int] = 0
    repetitions: int = 1
    max_iterations: Optional[int] = None

    def __post_init__(self):
        if self.eta < 0:
            raise ArgumentError(f"eta must be nonnegative, got {self.eta}")
        if self.repetitions < 1:
            raise ArgumentError(f"repetitions must be at least 1, got {self.repetitions}")

    def iteration_cap(self, n: int) -> int:
        if self.max_iterations is not None:
            return self.max_iterations
        if self.eta <= 0:
            return 10 * n + 100
        return max(1, ceil(log(max(n, 2)) / log(1.0 + self.eta)))

    def child_rngs(self) -> List[np.random.Generator]:
        """Independent generators for the repetitions."""
        return [np.random.default_rng(s) for s in np.random.SeedSequence(self.seed).spawn(self.repetitions)]


@dataclass(frozen=True)
class MaximizeReport:
    """
    Result of a maximization run.

    Attributes:
        solution: Returned set
        value: f(solution)
        trajectory: Accepted iterates of the best repetition, non-decreasing
        schedule: One of SCHEDULES
        oracle_calls: Evaluations over all repetitions
        iterations: Accepted steps of the best repetition
        seed: Configured seed
        factor_certificate: value / OPT when a reference optimum is supplied
        local_max: The local-search iterate passes the eta-slack 1-flip scan
        local_optimum: The local-search iterate (differs from solution when V - X is better)
        complement_value: f(V - local_optimum) for the local-search schedules
        baseline_value: f of the set the schedule wraps (greedy set, BG/RG set, external solution)
        bound: Guaranteed approximation factor for this run, when one applies
        curvature: kappa_f, when computed
    """

    solution: SubsetMask
    value: float
    trajectory: List[TrajectoryStep]
    schedule: str
    oracle_calls: int
    iterations: int
    seed: Optional[int] = None
    factor_certificate: Optional[float] = None
    local_max: bool = False
    local_optimum: Optional[SubsetMask] = None
    complement_value: Optional[float] = None
    baseline_value: Optional[float] = None
    bound: Optional[float] = None
    curvature: Optional[float] = None
    repetition_values: List[float] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        data = {
            "schedule": self.schedule,
            "solution": self.solution.to_external(),
            "value": self.value,
            "iterations": self.iterations,
            "oracle_calls": self.oracle_calls,
            "local_max": self.local_max,
            "trajectory": [step.to_dict() for step in self.trajectory],
        }
        optional = {
            "seed": self.seed,
            "factor_certificate": self.factor_certificate,
            "local_optimum": self.local_optimum.to_external() if self.local_optimum is not None else None,
            "complement_value": self.complement_value,
            "baseline_value": self.baseline_value,
            "bound": self.bound,
            "curvature": self.curvature,
        }
        data.update({k: v for k, v in optional.items() if v is not None})
        if len(self.repetition_values) > 1:
            data["repetition_values"] = self.repetition_values
        return data


@dataclass
class _Run:
    X: SubsetMask
    value: float
    trajectory: List[TrajectoryStep]
    iterations: int = 0
    baseline_value: Optional[float] = None


def _probe_nonnegative(f: SetFunctionOracle, tol: float):
    """Check f >= 0 on the empty set, V and all singletons."""
    singles = insertion_gains(f, f.empty())
    full = f.evaluate(f.full())
    if np.any(singles < -tol) or full < -tol:
        raise DomainError("f must be nonnegative (negative value found on a singleton or on V)")


def _check_iterate(value: float, tol: float):
    if value < -tol:
        raise DomainError(f"f must be nonnegative, but an iterate has value {value:.6g}")


def _bound_maximizer(h: np.ndarray, X: SubsetMask, C: Optional[ConstraintFamily], tol: float) -> SubsetMask:
    if C is None or C.kind == "unconstrained":
        inside = X.to_bool_array()
        return SubsetMask.from_bool_array((inside & (h >= -tol)) | (~inside & (h > tol)))
    return maximize_modular(h, C, tol).set


def _accepts(f_new: float, f_old: float, eta: float, tol: float) -> bool:
    return f_new > f_old + tol and f_new >= (1.0 + eta) * f_old - tol


def _mm_step(
    f: SetFunctionOracle, X: SubsetMask, sigma: Permutation, C: Optional[ConstraintFamily], tol: float
) -> Tuple[SubsetMask, float]:
    if not sigma.is_anchored_at(X):
        raise ArgumentError(f"Permutation is not anchored at the current set {X}")
    h = subgradient_from_permutation(f, sigma).h.w
    Y = _bound_maximizer(h, X, C, tol)
    return Y, f.evaluate(Y)


def _local_search(
    f: SetFunctionOracle,
    X0: SubsetMask,
    permutations: Callable[[SubsetMask, int], Permutation],
    cfg: ScheduleConfig,
    tol: float,
    patience: int = 1,
    C: Optional[ConstraintFamily] = None,
) -> _Run:
    """Accept steps until ``patience`` consecutive permutations fail or the cap is reached."""
    X, fX = X0, f.evaluate(X0)
    _check_iterate(fX, tol)
    run = _Run(X, fX, [TrajectoryStep(0, X, fX)])
    cap = cfg.iteration_cap(f.n)
    failures = 0
    t = 0
    while run.iterations < cap and failures < patience:
        t += 1
        Y, fY = _mm_step(f, X, permutations(X, t), C, tol)
        logger.debug("MMax iteration %d: |Y|=%d, f=%.6g (current %.6g)", t, Y.cardinality, fY, fX)
        if Y != X and _accepts(fY, fX, cfg.eta, tol):
            X, fX = Y, fY
            _check_iterate(fX, tol)
            run.iterations += 1
            run.trajectory.append(TrajectoryStep(t, X, fX))
            failures = 0
        else:
            failures += 1
    run.X, run.value = X, fX
    return run


def _best_singleton(f: SetFunctionOracle) -> SubsetMask:
    singles = insertion_gains(f, f.empty())
    return SubsetMask.from_indices([int(np.argmax(singles))], f.n)


def is_local_max(f: SetFunctionOracle, X: SubsetMask, eta: float = 0.0, tol: Optional[float] = None) -> bool:
    """No single insertion or deletion reaches (1 + eta) f(X) + tol."""
    tol = config.TOLERANCE if tol is None else tol
    fX = f.evaluate(X)
    threshold = fX + eta * abs(fX) + tol
    for j in range(f.n):
        neighbor = X.remove(j) if j in X else X.add(j)
        if f.evaluate(neighbor) > threshold:
            return False
    return True


def _factor(value: float, reference: Any, tol: float) -> Optional[float]:
    if reference is None:
        return None
    opt = reference.optimum_value
    if abs(opt) <= tol:
        return 1.0
    return value / opt


def _report(
    f: SetFunctionOracle,
    runs: Sequence[_Run],
    schedule: str,
    cfg: ScheduleConfig,
    calls_before: int,
    tol: float,
    reference: Any = None,
    compare_complement: bool = False,
    bound: Optional[float] = None,
    kappa: Optional[float] = None,
) -> MaximizeReport:
    best = max(runs, key=lambda r: r.value)
    solution, value = best.X, best.value
    local = complement_value = None
    local_max = False
    if compare_complement:
        local = best.X
        complement = best.X.complement()
        complement_value = f.evaluate(complement)
        if complement_value > value + tol:
            solution, value = complement, complement_value
    if _searches_lattice(schedule):
        local_max = is_local_max(f, best.X, cfg.eta, tol)
    return MaximizeReport(
        solution=solution,
        value=value,
        trajectory=best.trajectory,
        schedule=schedule,
        oracle_calls=f.eval_count - calls_before,
        iterations=best.iterations,
        seed=cfg.seed,
        factor_certificate=_factor(value, reference, tol),
        local_max=local_max,
        local_optimum=local,
        complement_value=complement_value,
        baseline_value=best.baseline_value,
        bound=bound,
        curvature=kappa,
        repetition_values=[r.value for r in runs],
    )


def _searches_lattice(schedule: str) -> bool:
    """Whether the schedule searches the unconstrained lattice (so the 1-flip scan applies)."""
    return schedule in ("RP", "RA", "RLS", "DLS", "BG", "RG", "RS")


def mmax_rp_ra(
    f: SetFunctionOracle,
    cfg: ScheduleConfig = ScheduleConfig(),
    adaptive: bool = False,
    reference: Any = None,
    tol: Optional[float] = None,
) -> MaximizeReport:
    """
    Random permutation (RP) and random adaptive (RA) schedules from the empty set.

    RP performs a single subgradient maximization, whose expected value is at
    least OPT / 4 (OPT / 2 for symmetric f). RA keeps drawing fresh random
    permutations anchored at the current set until one fails to improve.

    Raises:
        DomainError: If f is negative on a probed set
    """
    tol = config.TOLERANCE if tol is None else tol
    _probe_nonnegative(f, tol)
    calls_before = f.eval_count
    runs = []
    for rng in cfg.child_rngs():

        def random_permutation(X, t, rng=rng):
            return Permutation.random_anchored(X, rng)

        if adaptive:
            runs.append(_local_search(f, f.empty(), random_permutation, cfg, tol))
        else:
            X0 = f.empty()
            Y, fY = _mm_step(f, X0, random_permutation(X0, 1), None, tol)
            _check_iterate(fY, tol)
            trajectory = [TrajectoryStep(0, X0, 0.0)]
            if fY > tol:
                trajectory.append(TrajectoryStep(1, Y, fY))
            else:
                Y, fY = X0, 0.0
            runs.append(_Run(Y, fY, trajectory, len(trajectory) - 1))
    return _report(f, runs, "RA" if adaptive else "RP", cfg, calls_before, tol, reference)


def rls_permutation(f: SetFunctionOracle, X: SubsetMask, rng: np.random.Generator) -> Permutation:
    """
    Random anchored permutation with the best insertion first after the anchor
    block and the element of least removal gain last within it.
    """
    inside = list(X.indices)
    outside = list(X.complement().indices)
    head = rng.permutation(np.array(inside, dtype=np.int64)).tolist()
    tail = rng.permutation(np.array(outside, dtype=np.int64)).tolist()
    if inside:
        losses = removal_gains(f, X, inside)
        worst = min(inside, key=lambda j: (losses[j], j))
        head.remove(worst)
        head.append(worst)
    if outside:
        gains = insertion_gains(f, X, outside)
        best = max(outside, key=lambda j: (gains[j], -j))
        tail.remove(best)
        tail.insert(0, best)
    return Permutation(tuple(head + tail), len(head))


def mmax_rls(
    f: SetFunctionOracle, cfg: ScheduleConfig = ScheduleConfig(), reference: Any = None, tol: Optional[float] = None
) -> MaximizeReport:
    """
    Randomized local search from the best singleton.

    Stops at an eta-approximate local maximum X and returns the better of X
    and V - X, which is at least (1/3 - eta) OPT.

    Raises:
        ArgumentError: If eta is not positive
        DomainError: If f is negative on a probed set
    """
    tol = config.TOLERANCE if tol is None else tol
    if cfg.eta <= 0:
        raise ArgumentError("RLS requires a positive eta")
    _probe_nonnegative(f, tol)
    calls_before = f.eval_count
    X0 = _best_singleton(f)
    runs = []
    for rng in cfg.child_rngs():
        runs.append(_local_search(f, X0, lambda X, t, rng=rng: rls_permutation(f, X, rng), cfg, tol))
    return _report(f, runs, "RLS", cfg, calls_before, tol, reference, compare_complement=True)


def greedy_suffix_order(f: SetFunctionOracle, X: SubsetMask, allowed: Optional[ConstraintFamily] = None) -> List[int]:
    """
    Order the elements outside X by repeatedly appending the largest marginal gain.

    With a constraint, only extensions that stay feasible are considered; the
    returned order stops when no feasible extension is left.
    """
    S = X
    order = []
    while S.cardinality < f.n:
        candidates = [j for j in S.complement().indices if allowed is None or allowed.is_feasible(S.add(j))]
        if not candidates:
            break
        gains = insertion_gains(f, S, candidates)
        j = max(candidates, key=lambda k: (gains[k], -k))
        order.append(j)
        S = S.add(j)
    return order


def greedy_block_order(f: SetFunctionOracle, X: SubsetMask) -> List[int]:
    """
    Order the elements of X so that, filling positions from the end of the
    block, each position holds the element of least removal gain among those left.
    """
    S = X
    reversed_order = []
    while S.cardinality:
        losses = removal_gains(f, S)
        j = min(S.indices, key=lambda k: (losses[k], k))
        reversed_order.append(j)
        S = S.remove(j)
    return reversed_order[::-1]


def mmax_dls(
    f: SetFunctionOracle, cfg: ScheduleConfig = ScheduleConfig(), reference: Any = None, tol: Optional[float] = None
) -> MaximizeReport:
    """
    Deterministic local search from the empty set.

    Even iterations keep the anchor block and order the rest greedily by
    marginal gain (iteration 0 is the plain greedy ordering); odd iterations
    order the anchor block greedily by removal gain from its end. The search
    stops once both an even and an odd iteration fail in a row.

    Raises:
        ArgumentError: If eta is not positive
        DomainError: If f is negative on a probed set
    """
    tol = config.TOLERANCE if tol is None else tol
    if cfg.eta <= 0:
        raise ArgumentError("DLS requires a positive eta")
    _probe_nonnegative(f, tol)
    calls_before = f.eval_count

    def schedule(X: SubsetMask, t: int) -> Permutation:
        if (t - 1) % 2 == 0:
            head = list(X.indices)
            tail = greedy_suffix_order(f, X)
        else:
            head = greedy_block_order(f, X)
            tail = list(X.complement().indices)
        return Permutation(tuple(head + tail), len(head))

    run = _local_search(f, f.empty(), schedule, cfg, tol, patience=2)
    cfg_report = ScheduleConfig(cfg.eta, None, 1, cfg.max_iterations)
    return _report(f, [run], "DLS", cfg_report, calls_before, tol, reference, compare_complement=True)


def bidirectional_greedy(
    f: SetFunctionOracle,
    order: Optional[Sequence[int]] = None,
    rng: Optional[np.random.Generator] = None,
) -> Tuple[SubsetMask, Permutation]:
    """
    Bi-directional greedy scan over ``order`` (default 0..n-1).

    Keeps L <= U. For element i, a = f(i | L) and b = f(U - i) - f(U). The
    deterministic rule accepts i into L iff a >= b; with ``rng`` the clamped
    gains a' = max(a, 0), b' = max(b, 0) accept with probability a' / (a' + b')
    (always when both are zero).

    Returns:
        The final set L = U and the induced permutation: accepted elements in
        scan order followed by deleted elements in reverse deletion order
    """
    order = list(range(f.n)) if order is None else [int(j) for j in order]
    if sorted(order) != list(range(f.n)):
        raise ArgumentError("Scan order must be a permutation of the ground set")
    L, U = f.empty(), f.full()
    fL, fU = 0.0, f.evaluate(U)
    accepted, deleted = [], []
    for i in order:
        L_next, U_next = L.add(i), U.remove(i)
        fL_next, fU_next = f.evaluate(L_next), f.evaluate(U_next)
        a, b = fL_next - fL, fU_next - fU
        if rng is None:
            take = a >= b
        else:
            a, b = max(a, 0.0), max(b, 0.0)
            take = True if a + b <= 0 else rng.random() < a / (a + b)
        if take:
            L, fL = L_next, fL_next
            accepted.append(i)
        else:
            U, fU = U_next, fU_next
            deleted.append(i)
    return L, Permutation(tuple(accepted + deleted[::-1]), 0)


def _bg_run(f: SetFunctionOracle, order, rng, tol: float) -> _Run:
    S, sigma = bidirectional_greedy(f, order, rng)
    fS = f.evaluate(S)
    X0 = f.empty()
    Y, fY = _mm_step(f, X0, sigma, None, tol)
    _check_iterate(fY, tol)
    trajectory = [TrajectoryStep(0, X0, 0.0)]
    if fY > tol:
        trajectory.append(TrajectoryStep(1, Y, fY))
    else:
        Y, fY = X0, 0.0
    return _Run(Y, fY, trajectory, len(trajectory) - 1, baseline_value=fS)


def mmax_bg(
    f: SetFunctionOracle,
    cfg: ScheduleConfig = ScheduleConfig(),
    tau: Optional[Sequence[int]] = None,
    reference: Any = None,
    tol: Optional[float] = None,
) -> MaximizeReport:
    """
    One MMax step with the subgradient of the chain induced by deterministic
    bi-directional greedy in scan order tau.

    The result is at least f of the greedy set (``baseline_value``), hence at least OPT / 3.
    """
    tol = config.TOLERANCE if tol is None else tol
    _probe_nonnegative(f, tol)
    calls_before = f.eval_count
    run = _bg_run(f, tau, None, tol)
    return _report(f, [run], "BG", ScheduleConfig(cfg.eta, None, 1, cfg.max_iterations), calls_before, tol, reference)


def mmax_rg(
    f: SetFunctionOracle, cfg: ScheduleConfig = ScheduleConfig(), reference: Any = None, tol: Optional[float] = None
) -> MaximizeReport:
    """Randomized bi-directional greedy wrapped by one MMax step; at least OPT / 2 in expectation."""
    tol = config.TOLERANCE if tol is None else tol
    _probe_nonnegative(f, tol)
    calls_before = f.eval_count
    runs = [_bg_run(f, None, rng, tol) for rng in cfg.child_rngs()]
    return _report(f, runs, "RG", cfg, calls_before, tol, reference)


def greedy_bound(C: ConstraintFamily, kappa: float) -> Optional[float]:
    """
    Approximation factor of the greedy permutation step for monotone f.

    cardinality:      (1/kappa)(1 - e^-kappa)
    p matroids:       1 / (p + kappa)
    down-monotone C:  (1/kappa)(1 - ((K - kappa)/K)^k)

    kappa -> 0 limits are taken analytically.
    """
    if C.kind == "cardinality_upper":
        return 1.0 if kappa < 1e-12 else -np.expm1(-kappa) / kappa
    if C.kind in ("matroid", "matroid_intersection"):
        return 1.0 / (C.p + kappa)
    if not C.is_down_monotone:
        return None
    K, k = C.cardinality_range()
    if K == 0:
        return 1.0
    if kappa < 1e-12:
        return k / K
    return (1.0 - ((K - kappa) / K) ** k) / kappa


def _require_monotone(f: SetFunctionOracle, tol: float):
    if not probe_monotone(f, tol):
        raise DomainError("greedy maximization requires a monotone nondecreasing f")


def _curvature_or_none(f: SetFunctionOracle, tol: float) -> Optional[float]:
    try:
        return curvature(f, tol)
    except DomainError as e:
        warnings.warn(f"approximation bound omitted: {e}", stacklevel=3)
        return None


def _greedy_step(
    f: SetFunctionOracle, C: ConstraintFamily, order: List[int], tol: float
) -> _Run:
    greedy_set = SubsetMask.from_indices(order, f.n)
    f_greedy = f.evaluate(greedy_set)
    rest = [j for j in range(f.n) if j not in greedy_set]
    sigma = Permutation(tuple(order + rest), 0)
    Y, fY = _mm_step(f, f.empty(), sigma, C, tol)
    trajectory = [TrajectoryStep(0, f.empty(), 0.0)]
    if not C.is_feasible(Y) or fY < f_greedy:
        Y, fY = greedy_set, f_greedy
    if Y.cardinality:
        trajectory.append(TrajectoryStep(1, Y, fY))
    return _Run(Y, fY, trajectory, len(trajectory) - 1, baseline_value=f_greedy)


def mmax_greedy_constrained(
    f: SetFunctionOracle,
    C: ConstraintFamily,
    cfg: ScheduleConfig = ScheduleConfig(),
    reference: Any = None,
    tol: Optional[float] = None,
) -> MaximizeReport:
    """
    One MMax step with the greedy permutation over a down-monotone C.

    The greedy permutation appends, at each position, the feasible extension of
    largest marginal gain; the remaining elements follow in ascending order.
    The modular lower bound is maximized over C and the result dominates the
    plain greedy set.

    Raises:
        DomainError: If f is not monotone
        ArgumentError: If C is not down-monotone
    """
    tol = config.TOLERANCE if tol is None else tol
    if not C.is_down_monotone:
        raise ArgumentError(f"greedy maximization needs a down-monotone constraint, not {C.kind}")
    _require_monotone(f, tol)
    calls_before = f.eval_count
    kappa = _curvature_or_none(f, tol)
    run = _greedy_step(f, C, greedy_suffix_order(f, f.empty(), C), tol)
    bound = greedy_bound(C, kappa) if kappa is not None else None
    report_cfg = ScheduleConfig(cfg.eta, None, 1, cfg.max_iterations)
    return _report(f, [run], "greedy", report_cfg, calls_before, tol, reference, bound=bound, kappa=kappa)


def _ratio_order(f: SetFunctionOracle, C: ConstraintFamily, prefix: Sequence[int], tol: float) -> List[int]:
    S = SubsetMask.from_indices(prefix, f.n)
    order = list(prefix)
    spent = float(C.costs[list(prefix)].sum()) if prefix else 0.0
    while True:
        candidates = [j for j in S.complement().indices if spent + C.costs[j] <= C.budget + tol]
        if not candidates:
            return order
        gains = insertion_gains(f, S, candidates)

        def ratio(j):
            c = C.costs[j]
            return gains[j] / c if c > tol else (np.inf if gains[j] > tol else 0.0)

        j = max(candidates, key=lambda k: (ratio(k), -k))
        order.append(j)
        S = S.add(j)
        spent += C.costs[j]


def mmax_knapsack(
    f: SetFunctionOracle,
    costs: Sequence[float],
    budget: float,
    cfg: ScheduleConfig = ScheduleConfig(),
    enumerate_triples: bool = False,
    reference: Any = None,
    tol: Optional[float] = None,
) -> MaximizeReport:
    """
    Knapsack-constrained maximization of a monotone f.

    Builds the gain-to-cost greedy permutation among budget-feasible
    extensions, maximizes the modular lower bound over the knapsack and
    returns the better of that set and the best feasible singleton, which is
    at least (1 - 1/sqrt(e)) OPT. With ``enumerate_triples`` the greedy is
    restarted from every feasible prefix of up to three elements, which is
    at least (1 - 1/e) OPT.

    Raises:
        DomainError: If f is not monotone
    """
    tol = config.TOLERANCE if tol is None else tol
    C = ConstraintFamily.knapsack(costs, budget)
    if C.n != f.n:
        raise ArgumentError(f"knapsack has {C.n} costs, oracle has {f.n} elements")
    _require_monotone(f, tol)
    calls_before = f.eval_count

    singles = [j for j in range(f.n) if C.costs[j] <= C.budget + tol]
    if not singles:
        warnings.warn("no element fits the knapsack budget; returning the empty set", stacklevel=2)
        empty = _Run(f.empty(), 0.0, [TrajectoryStep(0, f.empty(), 0.0)])
        return _report(f, [empty], "knapsack_greedy", ScheduleConfig(cfg.eta, None), calls_before, tol, reference)

    values = insertion_gains(f, f.empty(), singles)
    best_single = max(singles, key=lambda j: (values[j], -j))
    single = SubsetMask.from_indices([best_single], f.n)
    f_single = float(values[best_single])
    runs = [_Run(single, f_single, [TrajectoryStep(0, f.empty(), 0.0), TrajectoryStep(1, single, f_single)], 1)]
    runs.append(_greedy_step(f, C, _ratio_order(f, C, [], tol), tol))

    if enumerate_triples:
        for size in (1, 2, 3):
            for prefix in itertools.combinations(range(f.n), size):
                if float(C.costs[list(prefix)].sum()) > C.budget + tol:
                    continue
                runs.append(_greedy_step(f, C, _ratio_order(f, C, list(prefix), tol), tol))
        bound = 1.0 - np.exp(-1.0)
    else:
        bound = 1.0 - np.exp(-0.5)

    return _report(
        f, runs, "knapsack_greedy", ScheduleConfig(cfg.eta, None), calls_before, tol, reference, bound=bound
    )


def mmax_from_solution(
    f: SetFunctionOracle,
    Y: SubsetMask,
    C: Optional[ConstraintFamily] = None,
    cfg: ScheduleConfig = ScheduleConfig(),
    tol: Optional[float] = None,
) -> MaximizeReport:
    """
    One MMax step from an external solution Y with a random permutation anchored at Y.

    The result is never worse than Y; no approximation bound is attached.
    """
    tol = config.TOLERANCE if tol is None else tol
    if Y.n != f.n:
        raise ArgumentError(f"Solution is over {Y.n} elements, oracle over {f.n}")
    calls_before = f.eval_count
    fY = f.evaluate(Y)
    rng = cfg.child_rngs()[0]
    Z, fZ = _mm_step(f, Y, Permutation.random_anchored(Y, rng), C, tol)
    trajectory = [TrajectoryStep(0, Y, fY)]
    if Z != Y and fZ > fY + tol and (C is None or C.is_feasible(Z)):
        trajectory.append(TrajectoryStep(1, Z, fZ))
    else:
        Z, fZ = Y, fY
    run = _Run(Z, fZ, trajectory, len(trajectory) - 1, baseline_value=fY)
    return _report(f, [run], "external", ScheduleConfig(cfg.eta, cfg.seed), calls_before, tol)


def random_set_baseline(
    f: SetFunctionOracle, cfg: ScheduleConfig = ScheduleConfig(), reference: Any = None, tol: Optional[float] = None
) -> MaximizeReport:
    """Best of ``repetitions`` uniformly random subsets (the RS baseline)."""
    tol = config.TOLERANCE if tol is None else tol
    calls_before = f.eval_count
    runs = []
    for rng in cfg.child_rngs():
        X = SubsetMask.from_bool_array(rng.random(f.n) < 0.5)
        fX = f.evaluate(X)
        runs.append(_Run(X, fX, [TrajectoryStep(0, X, fX)]))
    return _report(f, runs, "RS", cfg, calls_before, tol, reference)


def maximize(
    f: SetFunctionOracle,
    schedule: str,
    cfg: ScheduleConfig = ScheduleConfig(),
    C: Optional[ConstraintFamily] = None,
    reference: Any = None,
    enumerate_triples: bool = False,
) -> MaximizeReport:
    """Dispatch on a schedule name (case-insensitive)."""
    key = schedule.strip().lower()
    if key in ("greedy", "knapsack", "knapsack_greedy"):
        if C is None:
            raise ArgumentError(f"schedule '{schedule}' requires a constraint")
        if key == "greedy":
            return mmax_greedy_constrained(f, C, cfg, reference)
        if C.kind != "knapsack":
            raise ArgumentError(f"schedule '{schedule}' requires a knapsack constraint, not {C.kind}")
        return mmax_knapsack(f, C.costs, C.budget, cfg, enumerate_triples, reference)
    if C is not None and C.kind != "unconstrained":
        raise ArgumentError(f"schedule '{schedule}' is unconstrained; use 'greedy' or 'knapsack' with a constraint")
    dispatch = {
        "rp": lambda: mmax_rp_ra(f, cfg, adaptive=False, reference=reference),
        "ra": lambda: mmax_rp_ra(f, cfg, adaptive=True, reference=reference),
        "rls": lambda: mmax_rls(f, cfg, reference),
        "dls": lambda: mmax_dls(f, cfg, reference),
        "bg": lambda: mmax_bg(f, cfg, reference=reference),
        "rg": lambda: mmax_rg(f, cfg, reference),
        "rs": lambda: random_set_baseline(f, cfg, reference),
    }
    if key not in dispatch:
        raise ArgumentError(f"Unknown schedule '{schedule}'. Known schedules: {', '.join(SCHEDULE_NAMES)}")
    return dispatch[key]()


SCHEDULE_NAMES = ("rp", "ra", "rls", "dls", "bg", "rg", "rs", "greedy", "knapsack")
