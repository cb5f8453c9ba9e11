"""
Subgradients from permutation chains, the grow/shrink/bar supergradients,
and the modular bounds they define.

Upper bound from a supergradient g at Y:  m(X) = f(Y) + g(X) - g(Y) >= f(X)
Lower bound from a subgradient h at Y:    m(X) = f(Y) + h(X) - h(Y) <= f(X)
"""

from dataclasses import dataclass
from typing import Iterator, Optional, Sequence, Tuple, Union

import numpy as np

from .core import ArgumentError, ModularVector, SetFunctionOracle, SubsetMask, insertion_gains, removal_gains

SUPERGRADIENT_KINDS = ("grow", "shrink", "bar")
UPPER = "upper"
LOWER = "lower"


@dataclass(frozen=True)
class Permutation:
    """
    An ordering of the ground set whose first ``anchor_prefix`` entries are the anchor set.

    Attributes:
        order: Element ids, a bijection on 0..n-1
        anchor_prefix: Length p of the prefix holding the anchor set Y
    """

    order: Tuple[int, ...]
    anchor_prefix: int = 0

    def __post_init__(self):
        order = tuple(int(j) for j in self.order)
        if not order:
            raise ArgumentError("Permutation must be nonempty")
        if sorted(order) != list(range(len(order))):
            raise ArgumentError(f"Permutation order is not a bijection on 0..{len(order) - 1}: {list(order)}")
        if not 0 <= self.anchor_prefix <= len(order):
            raise ArgumentError(f"Anchor prefix {self.anchor_prefix} out of range [0, {len(order)}]")
        object.__setattr__(self, "order", order)

    @property
    def n(self) -> int:
        return len(self.order)

    @property
    def anchor(self) -> SubsetMask:
        return SubsetMask.from_indices(self.order[: self.anchor_prefix], self.n)

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(n)), 0)

    @classmethod
    def anchored(
        cls, Y: SubsetMask, anchor_order: Optional[Sequence[int]] = None, tail_order: Optional[Sequence[int]] = None
    ) -> "Permutation":
        """
        Build a permutation whose prefix is exactly Y.

        Args:
            Y: Anchor set
            anchor_order: Order of the elements of Y (default ascending)
            tail_order: Order of the elements outside Y (default ascending)

        Raises:
            ArgumentError: If the given orders do not match Y and its complement
        """
        head = list(Y.indices) if anchor_order is None else [int(j) for j in anchor_order]
        tail = list(Y.complement().indices) if tail_order is None else [int(j) for j in tail_order]
        if sorted(head) != list(Y.indices):
            raise ArgumentError("Anchor order must list exactly the elements of the anchor set")
        if sorted(tail) != list(Y.complement().indices):
            raise ArgumentError("Tail order must list exactly the elements outside the anchor set")
        return cls(tuple(head + tail), len(head))

    @classmethod
    def random_anchored(cls, Y: SubsetMask, rng: np.random.Generator) -> "Permutation":
        """Uniformly random permutation among those anchored at Y."""
        head = rng.permutation(np.array(Y.indices, dtype=np.int64)).tolist()
        tail = rng.permutation(np.array(Y.complement().indices, dtype=np.int64)).tolist()
        return cls(tuple(head + tail), len(head))

    def is_anchored_at(self, Y: SubsetMask) -> bool:
        return self.anchor_prefix == Y.cardinality and self.anchor == Y

    def chain(self) -> Iterator[SubsetMask]:
        """The chain S_0 = empty, S_1, ..., S_n = V."""
        bits = 0
        yield SubsetMask(0, self.n)
        for j in self.order:
            bits |= 1 << j
            yield SubsetMask(bits, self.n)


@dataclass(frozen=True)
class ModularBound:
    """m(X) = base + vector(X) - vector(anchor)."""

    base: float
    vector: ModularVector
    anchor: SubsetMask
    direction: str

    def __post_init__(self):
        if self.direction not in (UPPER, LOWER):
            raise ArgumentError(f"Bound direction must be '{UPPER}' or '{LOWER}', got {self.direction!r}")

    @property
    def constant(self) -> float:
        """The offset base - vector(anchor), so m(X) = constant + vector(X)."""
        return self.base - self.vector(self.anchor)

    def __call__(self, X: SubsetMask) -> float:
        return bound_eval(self, X)


@dataclass(frozen=True)
class SubgradientVector:
    """Extreme point of the subdifferential at ``anchor`` induced by a permutation chain."""

    h: ModularVector
    anchor: SubsetMask
    source: Permutation
    anchor_value: float

    direction = LOWER

    @property
    def vector(self) -> ModularVector:
        return self.h

    def bound(self) -> ModularBound:
        return ModularBound(self.anchor_value, self.h, self.anchor, LOWER)


@dataclass(frozen=True)
class SupergradientVector:
    """
    One of the three named supergradients at ``anchor``.

    Entries outside ``support`` were not computed and are zero.
    """

    g: ModularVector
    anchor: SubsetMask
    kind: str
    anchor_value: float
    support: Optional[SubsetMask] = None

    direction = UPPER

    @property
    def vector(self) -> ModularVector:
        return self.g

    def bound(self) -> ModularBound:
        return ModularBound(self.anchor_value, self.g, self.anchor, UPPER)


SemigradientVector = Union[SubgradientVector, SupergradientVector]


def subgradient_from_permutation(f: SetFunctionOracle, sigma: Permutation) -> SubgradientVector:
    """
    h(sigma(i)) = f(S_i) - f(S_{i-1}) along the chain of sigma.

    Costs exactly n + 1 evaluations.

    Raises:
        ArgumentError: If sigma is over a different ground set
    """
    if not isinstance(sigma, Permutation):
        raise ArgumentError(f"Expected a Permutation, got {type(sigma).__name__}")
    if sigma.n != f.n:
        raise ArgumentError(f"Permutation is over {sigma.n} elements, oracle over {f.n}")
    h = np.zeros(f.n, dtype=float)
    values = [f.evaluate(S) for S in sigma.chain()]
    for i, j in enumerate(sigma.order):
        h[j] = values[i + 1] - values[i]
    return SubgradientVector(ModularVector(h), sigma.anchor, sigma, values[sigma.anchor_prefix])


def supergradient(
    f: SetFunctionOracle, Y: SubsetMask, kind: str, support: Optional[SubsetMask] = None
) -> SupergradientVector:
    """
    The grow, shrink or bar supergradient at Y.

    grow:   f(j | V - j) on Y,  f(j | Y) off Y
    shrink: f(j | Y - j) on Y,  f(j) off Y
    bar:    f(j | V - j) on Y,  f(j) off Y

    Args:
        f: The oracle
        Y: Anchor set
        kind: "grow", "shrink" or "bar"
        support: Only compute entries for these elements; the rest are zero

    Raises:
        ArgumentError: If kind is unknown or Y is over a different ground set
    """
    if kind not in SUPERGRADIENT_KINDS:
        raise ArgumentError(f"Unknown supergradient kind '{kind}', expected one of {SUPERGRADIENT_KINDS}")
    if Y.n != f.n:
        raise ArgumentError(f"Anchor is over {Y.n} elements, oracle over {f.n}")
    active = f.full() if support is None else support
    inside = (Y & active).indices
    outside = (active - Y).indices

    if kind == "shrink":
        g = removal_gains(f, Y, inside)
    else:
        g = removal_gains(f, f.full(), inside)
    if kind == "grow":
        g += insertion_gains(f, Y, outside)
    else:
        g += insertion_gains(f, f.empty(), outside)
    return SupergradientVector(ModularVector(g), Y, kind, f.evaluate(Y), support)


def bound_eval(b: ModularBound, X: SubsetMask) -> float:
    """Evaluate a modular bound at X without oracle calls."""
    return b.base + b.vector(X) - b.vector(b.anchor)


def upper_bound(f: SetFunctionOracle, Y: SubsetMask, kind: str) -> ModularBound:
    return supergradient(f, Y, kind).bound()


def lower_bound(f: SetFunctionOracle, sigma: Permutation) -> ModularBound:
    return subgradient_from_permutation(f, sigma).bound()
