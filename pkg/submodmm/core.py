"""
Ground-set arithmetic and the set-function oracle contract.

Subsets of the ground set V = {0, ..., n-1} are represented as bitmasks
(``SubsetMask``). Element ids are 0-based internally; ``to_external`` and
``from_external`` convert to and from the 1-based ids used in reports and
problem files.
"""

import logging
import threading
from dataclasses import dataclass, field
from typing import Iterable, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from . import config

logger = logging.getLogger(__name__)

# Rows of the membership matrix evaluated per vectorised table chunk
TABLE_CHUNK = 1 << 15


class ArgumentError(ValueError):
    """Malformed element ids, permutations, parameters or names."""


class DomainError(ValueError):
    """A mathematical precondition of an operation does not hold."""


class InfeasibleError(RuntimeError):
    """No feasible set exists for the requested constraint."""


class UnsupportedError(RuntimeError):
    """The operation is not offered for this constraint kind or variant."""


class BudgetExceededError(RuntimeError):
    """Exhaustive enumeration would exceed the configured budget."""


def _popcount(bits: int) -> int:
    return bin(bits).count("1")


def check_element(n: int, j: int) -> int:
    """Validate an element id against a ground set of size n and return it as int."""
    if isinstance(j, (bool, np.bool_)) or not isinstance(j, (int, np.integer)):
        raise ArgumentError(f"Element id must be an integer, got {j!r}")
    if j < 0 or j >= n:
        raise ArgumentError(f"Element id {j} out of range [0, {n})")
    return int(j)


@dataclass(frozen=True)
class GroundSet:
    """The ground set V = {0, ..., n-1}."""

    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ArgumentError(f"Ground set size must be positive, got {self.n}")

    def empty(self) -> "SubsetMask":
        return SubsetMask(0, self.n)

    def full(self) -> "SubsetMask":
        return SubsetMask((1 << self.n) - 1, self.n)

    def __len__(self):
        return self.n

    def __iter__(self) -> Iterator[int]:
        return iter(range(self.n))


@dataclass(frozen=True)
class SubsetMask:
    """
    A subset of the ground set stored as a fixed-width bit vector.

    Attributes:
        bits: Integer whose bit j is set iff element j is in the subset
        n: Ground set size; bits at positions >= n are always zero
        cardinality: Cached popcount of ``bits``
    """

    bits: int
    n: int
    cardinality: int = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        if self.n < 1:
            raise ArgumentError(f"Ground set size must be positive, got {self.n}")
        if self.bits < 0 or self.bits >> self.n:
            raise ArgumentError(f"Bits {self.bits:#x} do not fit a ground set of size {self.n}")
        object.__setattr__(self, "cardinality", _popcount(self.bits))

    @classmethod
    def empty(cls, n: int) -> "SubsetMask":
        return cls(0, n)

    @classmethod
    def full(cls, n: int) -> "SubsetMask":
        return cls((1 << n) - 1, n)

    @classmethod
    def from_indices(cls, indices: Iterable[int], n: int) -> "SubsetMask":
        bits = 0
        for j in indices:
            bits |= 1 << check_element(n, j)
        return cls(bits, n)

    @classmethod
    def from_external(cls, ids: Iterable[int], n: int) -> "SubsetMask":
        """Build a mask from 1-based element ids."""
        bits = 0
        for i in ids:
            if isinstance(i, bool) or not isinstance(i, (int, np.integer)) or i < 1 or i > n:
                raise ArgumentError(f"External element id {i!r} out of range [1, {n}]")
            bits |= 1 << (int(i) - 1)
        return cls(bits, n)

    @classmethod
    def from_bool_array(cls, flags: Sequence[bool]) -> "SubsetMask":
        flags = np.asarray(flags, dtype=bool)
        return cls.from_indices(np.flatnonzero(flags).tolist(), len(flags))

    @property
    def indices(self) -> Tuple[int, ...]:
        """Sorted element ids in the subset."""
        bits = self.bits
        out = []
        j = 0
        while bits:
            if bits & 1:
                out.append(j)
            bits >>= 1
            j += 1
        return tuple(out)

    def to_external(self) -> List[int]:
        """Sorted 1-based element ids."""
        return [j + 1 for j in self.indices]

    def to_bool_array(self) -> np.ndarray:
        flags = np.zeros(self.n, dtype=bool)
        flags[list(self.indices)] = True
        return flags

    def add(self, j: int) -> "SubsetMask":
        return SubsetMask(self.bits | (1 << check_element(self.n, j)), self.n)

    def remove(self, j: int) -> "SubsetMask":
        return SubsetMask(self.bits & ~(1 << check_element(self.n, j)), self.n)

    def complement(self) -> "SubsetMask":
        return SubsetMask(((1 << self.n) - 1) & ~self.bits, self.n)

    def _same_ground(self, other: "SubsetMask"):
        if not isinstance(other, SubsetMask):
            raise ArgumentError(f"Expected SubsetMask, got {type(other).__name__}")
        if other.n != self.n:
            raise ArgumentError(f"Ground set size mismatch: {self.n} vs {other.n}")

    def __or__(self, other: "SubsetMask") -> "SubsetMask":
        self._same_ground(other)
        return SubsetMask(self.bits | other.bits, self.n)

    def __and__(self, other: "SubsetMask") -> "SubsetMask":
        self._same_ground(other)
        return SubsetMask(self.bits & other.bits, self.n)

    def __sub__(self, other: "SubsetMask") -> "SubsetMask":
        self._same_ground(other)
        return SubsetMask(self.bits & ~other.bits, self.n)

    def __xor__(self, other: "SubsetMask") -> "SubsetMask":
        self._same_ground(other)
        return SubsetMask(self.bits ^ other.bits, self.n)

    def issubset(self, other: "SubsetMask") -> bool:
        self._same_ground(other)
        return self.bits & ~other.bits == 0

    def issuperset(self, other: "SubsetMask") -> bool:
        return other.issubset(self)

    def __le__(self, other: "SubsetMask") -> bool:
        return self.issubset(other)

    def __ge__(self, other: "SubsetMask") -> bool:
        return self.issuperset(other)

    def __contains__(self, j: int) -> bool:
        return 0 <= j < self.n and bool(self.bits >> j & 1)

    def __len__(self):
        return self.cardinality

    def __iter__(self) -> Iterator[int]:
        return iter(self.indices)

    def __str__(self):
        return "{" + ",".join(str(i) for i in self.to_external()) + "}"


@dataclass(frozen=True, eq=False)
class ModularVector:
    """
    A normalized modular function w(X) = sum of w(j) over j in X.

    The weight array is copied and made read-only on construction.
    """

    w: np.ndarray

    def __post_init__(self):
        w = np.array(self.w, dtype=float).reshape(-1)
        if w.size < 1:
            raise ArgumentError("Modular vector must have at least one entry")
        if not np.all(np.isfinite(w)):
            raise ArgumentError("Modular vector entries must be finite")
        w.setflags(write=False)
        object.__setattr__(self, "w", w)

    @property
    def n(self) -> int:
        return int(self.w.size)

    def __call__(self, X: SubsetMask) -> float:
        if X.n != self.n:
            raise ArgumentError(f"Ground set size mismatch: vector has {self.n}, set has {X.n}")
        if not X.bits:
            return 0.0
        return float(self.w[list(X.indices)].sum())

    def __getitem__(self, j: int) -> float:
        return float(self.w[j])

    def __len__(self):
        return self.n

    def table(self, bits: np.ndarray) -> np.ndarray:
        """Values of w on the rows of a boolean membership matrix."""
        return bits @ self.w


class SetFunctionOracle:
    """
    Evaluation interface for a normalized set function f: 2^V -> R.

    Subclasses implement ``_evaluate`` (and optionally ``_table_chunk`` for
    vectorised evaluation). ``eval_count`` counts every call to ``evaluate``
    and is safe under concurrent increments.
    """

    def __init__(self, n: int, memoize: bool = False):
        if n < 1:
            raise ArgumentError(f"Ground set size must be positive, got {n}")
        self.n = n
        self._eval_count = 0
        self._lock = threading.Lock()
        self._memo = {} if memoize else None

    @property
    def eval_count(self) -> int:
        return self._eval_count

    @property
    def ground_set(self) -> GroundSet:
        return GroundSet(self.n)

    def empty(self) -> SubsetMask:
        return SubsetMask(0, self.n)

    def full(self) -> SubsetMask:
        return SubsetMask((1 << self.n) - 1, self.n)

    def count_evaluations(self, k: int):
        with self._lock:
            self._eval_count += k

    def evaluate(self, X: SubsetMask) -> float:
        """
        Evaluate f at X.

        Raises:
            ArgumentError: If X is not a subset of this oracle's ground set
        """
        if not isinstance(X, SubsetMask) or X.n != self.n:
            raise ArgumentError(f"Expected a SubsetMask over {self.n} elements, got {X!r}")
        self.count_evaluations(1)
        if self._memo is not None:
            value = self._memo.get(X.bits)
            if value is None:
                value = float(self._evaluate(X))
                self._memo[X.bits] = value
            return value
        return float(self._evaluate(X))

    def __call__(self, X: SubsetMask) -> float:
        return self.evaluate(X)

    def _evaluate(self, X: SubsetMask) -> float:
        raise NotImplementedError

    def _table_chunk(self, bits: np.ndarray) -> Optional[np.ndarray]:
        """Vectorised values on the rows of an (m, n) boolean matrix, or None if unsupported."""
        return None

    def __getstate__(self):
        state = self.__dict__.copy()
        del state["_lock"]
        return state

    def __setstate__(self, state):
        self.__dict__.update(state)
        self._lock = threading.Lock()

    def __repr__(self):
        return f"{type(self).__name__}(n={self.n})"


class RemappedOracle(SetFunctionOracle):
    """
    f restricted to (or relabeled by) a list of base elements.

    Element i of the new ground set is ``elements[i]`` of the base oracle, so a
    proper subset gives a restriction and a permutation gives a relabeling.
    """

    def __init__(self, base: SetFunctionOracle, elements: Sequence[int]):
        elements = [check_element(base.n, j) for j in elements]
        if len(set(elements)) != len(elements):
            raise ArgumentError("Remapped elements must be distinct")
        super().__init__(len(elements))
        self.base = base
        self.elements = np.array(elements, dtype=np.int64)

    def lift(self, X: SubsetMask) -> SubsetMask:
        """Map a set over the new ground set to the base ground set."""
        bits = 0
        for i in X.indices:
            bits |= 1 << int(self.elements[i])
        return SubsetMask(bits, self.base.n)

    def _evaluate(self, X: SubsetMask) -> float:
        return self.base.evaluate(self.lift(X))

    def _table_chunk(self, bits: np.ndarray) -> Optional[np.ndarray]:
        lifted = np.zeros((bits.shape[0], self.base.n), dtype=bool)
        lifted[:, self.elements] = bits
        values = self.base._table_chunk(lifted)
        if values is not None:
            self.base.count_evaluations(bits.shape[0])
        return values


def membership_matrix(start: int, stop: int, n: int) -> np.ndarray:
    """Boolean matrix whose row r holds the members of the set with bitmask start + r."""
    masks = np.arange(start, stop, dtype=np.int64)
    return ((masks[:, None] >> np.arange(n, dtype=np.int64)) & 1).astype(bool)


def gray_code_masks(n: int) -> Iterator[int]:
    """All 2^n bitmasks, consecutive ones differing in a single element."""
    for i in range(1 << n):
        yield i ^ (i >> 1)


def evaluate_table(f: SetFunctionOracle, limit: Optional[int] = None) -> np.ndarray:
    """
    Evaluate f on every subset of V.

    Args:
        f: The oracle
        limit: Maximum ground set size (defaults to config.BRUTE_FORCE_LIMIT)

    Returns:
        Array of length 2^n indexed by bitmask

    Raises:
        BudgetExceededError: If n exceeds the limit
    """
    limit = config.BRUTE_FORCE_LIMIT if limit is None else limit
    if f.n > limit:
        raise BudgetExceededError(f"Exhaustive enumeration of 2^{f.n} sets exceeds the budget of 2^{limit}")

    size = 1 << f.n
    values = np.empty(size, dtype=float)
    first = f._table_chunk(membership_matrix(0, min(size, TABLE_CHUNK), f.n))
    if first is None:
        for bits in gray_code_masks(f.n):
            values[bits] = f.evaluate(SubsetMask(bits, f.n))
        return values

    values[: first.size] = first
    for start in range(TABLE_CHUNK, size, TABLE_CHUNK):
        stop = min(size, start + TABLE_CHUNK)
        values[start:stop] = f._table_chunk(membership_matrix(start, stop, f.n))
    f.count_evaluations(size)
    return values


def gain(f: SetFunctionOracle, j: int, S: SubsetMask) -> float:
    """
    Marginal gain f(j | S) = f(S + j) - f(S).

    Returns 0 without oracle calls when j is already in S.

    Raises:
        ArgumentError: If j is not a valid element id
    """
    check_element(f.n, j)
    if j in S:
        return 0.0
    return f.evaluate(S.add(j)) - f.evaluate(S)


def insertion_gains(f: SetFunctionOracle, S: SubsetMask, elements: Optional[Iterable[int]] = None) -> np.ndarray:
    """
    Gains f(j | S) for the given elements (default: all of V).

    Entries for elements already in S are 0. Costs one evaluation of f(S)
    plus one per element outside S.
    """
    elements = range(f.n) if elements is None else elements
    out = np.zeros(f.n, dtype=float)
    base = None
    for j in elements:
        if j in S:
            continue
        if base is None:
            base = f.evaluate(S)
        out[j] = f.evaluate(S.add(j)) - base
    return out


def removal_gains(f: SetFunctionOracle, S: SubsetMask, elements: Optional[Iterable[int]] = None) -> np.ndarray:
    """
    Gains f(j | S - j) for the given elements (default: all of V).

    Entries for elements outside S are 0.
    """
    elements = range(f.n) if elements is None else elements
    out = np.zeros(f.n, dtype=float)
    base = None
    for j in elements:
        if j not in S:
            continue
        if base is None:
            base = f.evaluate(S)
        out[j] = base - f.evaluate(S.remove(j))
    return out


def _pair_free_masks(size: int, j: int, k: int) -> np.ndarray:
    masks = np.arange(size, dtype=np.int64)
    return masks[((masks >> j) & 1 == 0) & ((masks >> k) & 1 == 0)]


def is_submodular(f: SetFunctionOracle, tol: Optional[float] = None, limit: Optional[int] = None) -> bool:
    """
    Exhaustively check diminishing returns f(j | S) >= f(j | T) for S subset of T.

    It suffices to check f(j | S) >= f(j | S + k) for all S and j, k outside S.

    Raises:
        BudgetExceededError: If n exceeds the enumeration budget
    """
    tol = config.TOLERANCE if tol is None else tol
    table = evaluate_table(f, limit)
    size = table.size
    if f.n == 1:
        return True
    for j in range(f.n):
        bj = 1 << j
        for k in range(j + 1, f.n):
            bk = 1 << k
            free = _pair_free_masks(size, j, k)
            before = table[free | bj] - table[free]
            after = table[free | bj | bk] - table[free | bk]
            if np.any(after > before + tol):
                logger.debug("Diminishing returns violated for elements %d, %d", j, k)
                return False
    return True


def is_monotone(f: SetFunctionOracle, tol: Optional[float] = None, limit: Optional[int] = None) -> bool:
    """Exhaustively check f(S) <= f(S + j) for all S and j."""
    tol = config.TOLERANCE if tol is None else tol
    table = evaluate_table(f, limit)
    masks = np.arange(table.size, dtype=np.int64)
    for j in range(f.n):
        free = masks[(masks >> j) & 1 == 0]
        if np.any(table[free | (1 << j)] < table[free] - tol):
            return False
    return True


def probe_monotone(f: SetFunctionOracle, tol: Optional[float] = None) -> bool:
    """
    Singleton-level monotonicity probe: f(j) >= 0 and f(j | V - j) >= 0 for all j.

    For a submodular f the second condition implies monotonicity everywhere.
    """
    tol = config.TOLERANCE if tol is None else tol
    singles = insertion_gains(f, f.empty())
    tails = removal_gains(f, f.full())
    return bool(np.all(singles >= -tol) and np.all(tails >= -tol))


def curvature(f: SetFunctionOracle, tol: Optional[float] = None) -> float:
    """
    Total curvature kappa_f = 1 - min_j f(j | V - j) / f(j) of a monotone f.

    Returns:
        kappa_f clipped to [0, 1]

    Raises:
        DomainError: If some f(j) <= 0 or f is not monotone at the singleton level
    """
    tol = config.TOLERANCE if tol is None else tol
    singles = insertion_gains(f, f.empty())
    bad = np.flatnonzero(singles <= tol)
    if bad.size:
        raise DomainError(f"curvature undefined: f(j) <= 0 for element {int(bad[0]) + 1}")
    tails = removal_gains(f, f.full())
    bad = np.flatnonzero(tails < -tol)
    if bad.size:
        raise DomainError(f"curvature undefined: f is not monotone (f(j | V - j) < 0 for element {int(bad[0]) + 1})")
    kappa = 1.0 - float(np.min(tails / singles))
    return float(min(1.0, max(0.0, kappa)))
