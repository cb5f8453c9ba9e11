"""
Concrete set functions: the zoo used by the solvers, the tests and the experiment harness.

Every family evaluates on a boolean membership matrix in one vectorised pass
(``_raw``), so single evaluations and full value tables share a code path.
Normalization f(empty) = 0 is enforced by subtracting the raw value at the
empty set.
"""

import logging
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from .core import ArgumentError, ModularVector, SetFunctionOracle, SubsetMask

logger = logging.getLogger(__name__)

CONCAVE_KINDS = ("sqrt", "log1p", "power")
CONCAVE_MODES = ("plain", "complement")
BEST_SET_MODES = ("penalty", "monotone")

FAMILY_ALIASES = {
    "CM": "concave_modular",
    "CCM": "clustered_concave_modular",
    "BN": "bipartite_neighborhood",
    "WC": "worst_case",
    "BS": "best_set",
    "DR": "diversity_relevance",
    "IWATA": "iwata",
    "MODULAR": "modular",
    "CARD": "cardinality",
}


def family_names() -> List[str]:
    """Canonical family names followed by their short codes."""
    return sorted(FAMILY_ALIASES.values()) + sorted(FAMILY_ALIASES)


def canonical_family(name: str) -> str:
    """Resolve a family short code or long name."""
    if not isinstance(name, str):
        raise ArgumentError(f"Family name must be a string, got {name!r}")
    key = name.strip()
    if key.upper() in FAMILY_ALIASES:
        return FAMILY_ALIASES[key.upper()]
    if key.lower() in FAMILY_ALIASES.values():
        return key.lower()
    raise ArgumentError(f"Unknown function family '{name}'. Known families: {', '.join(family_names())}")


def _weights(name: str, w: Any, n: Optional[int] = None, nonnegative: bool = False) -> np.ndarray:
    arr = ModularVector(w).w
    if n is not None and arr.size != n:
        raise ArgumentError(f"{name} must have {n} entries, got {arr.size}")
    if nonnegative and np.any(arr < 0):
        raise ArgumentError(f"{name} must be nonnegative")
    return arr


def _concave(kind: str, x: np.ndarray, exponent: float) -> np.ndarray:
    x = np.maximum(x, 0.0)
    if kind == "sqrt":
        return np.sqrt(x)
    if kind == "log1p":
        return np.log1p(x)
    return np.power(x, exponent)


def _mask_array(R: Any, n: int, name: str = "R") -> np.ndarray:
    if isinstance(R, SubsetMask):
        if R.n != n:
            raise ArgumentError(f"{name} is over {R.n} elements, expected {n}")
        return R.to_bool_array()
    flags = np.asarray(R, dtype=bool).reshape(-1)
    if flags.size != n:
        raise ArgumentError(f"{name} must have {n} entries, got {flags.size}")
    return flags


class VectorizedSetFunction(SetFunctionOracle):
    """
    Base class for families with a vectorised raw formula.

    Subclasses set their parameters, then call ``_normalize()`` which records
    the raw value at the empty set.
    """

    _offset = 0.0

    def _raw(self, bits: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _normalize(self):
        self._offset = float(self._raw(np.zeros((1, self.n), dtype=bool))[0])

    def _evaluate(self, X: SubsetMask) -> float:
        return float(self._raw(X.to_bool_array()[None, :])[0] - self._offset)

    def _table_chunk(self, bits: np.ndarray) -> np.ndarray:
        return self._raw(bits) - self._offset


class ModularFn(VectorizedSetFunction):
    """f(X) = w(X)."""

    def __init__(self, w: Sequence[float], memoize: bool = False):
        self.w = _weights("w", w)
        super().__init__(self.w.size, memoize)
        self.vector = ModularVector(self.w)

    def _raw(self, bits):
        return bits @ self.w


class CardinalityFn(VectorizedSetFunction):
    """f(X) = g(|X|) for a table g(0), ..., g(n), shifted so f(empty) = 0."""

    def __init__(self, n: int, values: Sequence[float], memoize: bool = False):
        super().__init__(n, memoize)
        values = np.asarray(values, dtype=float).reshape(-1)
        if values.size != n + 1:
            raise ArgumentError(f"Cardinality table must have n + 1 = {n + 1} entries, got {values.size}")
        self.values = values
        self._normalize()

    def _raw(self, bits):
        return self.values[bits.sum(axis=1)]


class ConcaveOverModularFn(VectorizedSetFunction):
    """
    f(X) = g(w1(X)) + lam * w2(X)  (plain) or g(w1(X)) + lam * w2(V - X)  (complement).

    g is sqrt, log1p or x^exponent; w1 must be nonnegative.
    """

    def __init__(
        self,
        w1: Sequence[float],
        w2: Optional[Sequence[float]] = None,
        concave_kind: str = "sqrt",
        mode: str = "plain",
        lam: float = 1.0,
        exponent: float = 0.5,
        memoize: bool = False,
    ):
        self.w1 = _weights("w1", w1, nonnegative=True)
        super().__init__(self.w1.size, memoize)
        self.w2 = np.zeros(self.n) if w2 is None else _weights("w2", w2, self.n)
        if concave_kind not in CONCAVE_KINDS:
            raise ArgumentError(f"Unknown concave kind '{concave_kind}', expected one of {CONCAVE_KINDS}")
        if mode not in CONCAVE_MODES:
            raise ArgumentError(f"Unknown mode '{mode}', expected one of {CONCAVE_MODES}")
        if lam < 0:
            raise ArgumentError(f"lam must be nonnegative, got {lam}")
        if concave_kind == "power" and not 0 < exponent <= 1:
            raise ArgumentError(f"Exponent must lie in (0, 1], got {exponent}")
        self.concave_kind = concave_kind
        self.mode = mode
        self.lam = float(lam)
        self.exponent = float(exponent)
        self._normalize()

    def _raw(self, bits):
        modular_part = bits if self.mode == "plain" else ~bits
        return _concave(self.concave_kind, bits @ self.w1, self.exponent) + self.lam * (modular_part @ self.w2)


class ClusteredConcaveModularFn(VectorizedSetFunction):
    """f(X) = sum over clusters C_i of g(w(X & C_i))."""

    def __init__(
        self,
        clusters: Sequence[Sequence[int]],
        w: Sequence[float],
        concave_kind: str = "sqrt",
        memoize: bool = False,
    ):
        self.w = _weights("w", w, nonnegative=True)
        super().__init__(self.w.size, memoize)
        if not clusters:
            raise ArgumentError("At least one cluster is required")
        if concave_kind not in CONCAVE_KINDS:
            raise ArgumentError(f"Unknown concave kind '{concave_kind}', expected one of {CONCAVE_KINDS}")
        membership = np.zeros((len(clusters), self.n), dtype=bool)
        for i, cluster in enumerate(clusters):
            if len(cluster) == 0:
                raise ArgumentError(f"Cluster {i + 1} is empty")
            membership[i, list(SubsetMask.from_indices(cluster, self.n).indices)] = True
        self.clusters = [list(np.flatnonzero(row)) for row in membership]
        self.concave_kind = concave_kind
        self._cluster_weights = membership * self.w
        self._normalize()

    def _raw(self, bits):
        return _concave(self.concave_kind, bits @ self._cluster_weights.T, 0.5).sum(axis=1)


class BipartiteNeighborhoodFn(VectorizedSetFunction):
    """
    f(X) = sqrt(w1(Gamma(X))) + lam * w2(V - X).

    ``adjacency[j, u]`` is true when left vertex j (an element of V) is joined
    to right vertex u.
    """

    def __init__(
        self,
        adjacency: Any,
        w1: Sequence[float],
        w2: Optional[Sequence[float]] = None,
        lam: float = 1.0,
        memoize: bool = False,
    ):
        adjacency = np.asarray(adjacency, dtype=bool)
        if adjacency.ndim != 2 or adjacency.shape[0] < 1 or adjacency.shape[1] < 1:
            raise ArgumentError("Adjacency must be a nonempty 2-D boolean matrix")
        super().__init__(adjacency.shape[0], memoize)
        self.adjacency = adjacency
        self.w1 = _weights("w1", w1, adjacency.shape[1], nonnegative=True)
        self.w2 = np.zeros(self.n) if w2 is None else _weights("w2", w2, self.n)
        if lam < 0:
            raise ArgumentError(f"lam must be nonnegative, got {lam}")
        self.lam = float(lam)
        self._normalize()

    def neighborhood(self, X: SubsetMask) -> np.ndarray:
        """Boolean indicator of Gamma(X) over the right vertices."""
        return self.adjacency[list(X.indices)].any(axis=0)

    def _raw(self, bits):
        covered = (bits.astype(np.int64) @ self.adjacency.astype(np.int64)) > 0
        return np.sqrt(covered @ self.w1) + self.lam * ((~bits) @ self.w2)


class WorstCaseFn(VectorizedSetFunction):
    """f(X) = min(|X|, |X - R| + beta, alpha)."""

    def __init__(self, R: Any, alpha: float, beta: float, n: Optional[int] = None, memoize: bool = False):
        n = R.n if isinstance(R, SubsetMask) else (n if n is not None else len(R))
        super().__init__(n, memoize)
        if alpha <= 0 or beta <= 0:
            raise ArgumentError(f"alpha and beta must be positive, got {alpha}, {beta}")
        self.R = SubsetMask.from_bool_array(_mask_array(R, n))
        self.alpha = float(alpha)
        self.beta = float(beta)
        self._outside = ~self.R.to_bool_array()
        self._normalize()

    def _raw(self, bits):
        size = bits.sum(axis=1).astype(float)
        outside = (bits & self._outside).sum(axis=1) + self.beta
        return np.minimum(np.minimum(size, outside), self.alpha)


class BestSetFn(VectorizedSetFunction):
    """
    Best Set functions with a planted set R.

    penalty:  f(X) = 1[X meets R] + w(R - X) - w(R)
    monotone: f(X) = 1[X meets R] + w(X - R)
    """

    def __init__(self, R: Any, w: Sequence[float], mode: str = "penalty", memoize: bool = False):
        self.w = _weights("w", w, nonnegative=True)
        super().__init__(self.w.size, memoize)
        if mode not in BEST_SET_MODES:
            raise ArgumentError(f"Unknown Best Set mode '{mode}', expected one of {BEST_SET_MODES}")
        self.R = SubsetMask.from_bool_array(_mask_array(R, self.n))
        if self.R.cardinality == 0:
            raise ArgumentError("Best Set planted set R must be nonempty")
        self.mode = mode
        self._in_r = self.R.to_bool_array()
        self._normalize()

    def _raw(self, bits):
        hits = (bits & self._in_r).any(axis=1).astype(float)
        if self.mode == "penalty":
            return hits + (~bits & self._in_r) @ self.w
        return hits + (bits & ~self._in_r) @ self.w


class DiversityRelevanceFn(VectorizedSetFunction):
    """f(X) = sum_{i in V, j in X} s_ij - lam * sum_{i, j in X} s_ij."""

    def __init__(self, s: Any, lam: float = 0.5, memoize: bool = False):
        s = np.asarray(s, dtype=float)
        if s.ndim != 2 or s.shape[0] != s.shape[1] or s.shape[0] < 1:
            raise ArgumentError("Similarity matrix must be square and nonempty")
        if np.any(s < 0):
            raise ArgumentError("Similarity matrix must be nonnegative")
        if lam < 0:
            raise ArgumentError(f"lam must be nonnegative, got {lam}")
        super().__init__(s.shape[0], memoize)
        self.s = s
        self.lam = float(lam)
        self._relevance = s.sum(axis=0)
        self._normalize()

    def _raw(self, bits):
        x = bits.astype(float)
        return x @ self._relevance - self.lam * ((x @ self.s) * x).sum(axis=1)


class IwataTestFn(VectorizedSetFunction):
    """f(X) = |X| * |V - X| - sum_{j in X} (5j - 2n), j 1-based."""

    def __init__(self, n: int, memoize: bool = False):
        super().__init__(n, memoize)
        self._linear = 5.0 * np.arange(1, n + 1) - 2.0 * n
        self._normalize()

    def _raw(self, bits):
        size = bits.sum(axis=1).astype(float)
        return size * (self.n - size) - bits @ self._linear


def build_modular(w: Sequence[float]) -> ModularFn:
    return ModularFn(w)


def build_cardinality(n: int, values: Sequence[float]) -> CardinalityFn:
    return CardinalityFn(n, values)


def build_concave_modular(w1, w2=None, concave_kind="sqrt", mode="plain", lam=1.0, exponent=0.5):
    return ConcaveOverModularFn(w1, w2, concave_kind=concave_kind, mode=mode, lam=lam, exponent=exponent)


def build_clustered_concave_modular(clusters, w, concave_kind="sqrt"):
    return ClusteredConcaveModularFn(clusters, w, concave_kind=concave_kind)


def build_bipartite_neighborhood(adjacency, w1, w2=None, lam=1.0):
    return BipartiteNeighborhoodFn(adjacency, w1, w2, lam=lam)


def build_worst_case(n: int, R: Any = None, epsilon: float = 0.1, rng: Optional[np.random.Generator] = None):
    """
    Canonical worst-case instance with alpha = n^(1/2 + eps) and beta = n^(2 eps).

    When R is omitted a random set of size round(alpha) (capped at n) is drawn from rng.
    """
    alpha = n ** (0.5 + epsilon)
    beta = n ** (2 * epsilon)
    if R is None:
        rng = np.random.default_rng() if rng is None else rng
        size = min(n, int(round(alpha)))
        R = SubsetMask.from_indices(rng.choice(n, size=size, replace=False).tolist(), n)
    return WorstCaseFn(R, alpha, beta, n=n)


def build_best_set(R: Any, w: Sequence[float], mode: str = "penalty") -> BestSetFn:
    return BestSetFn(R, w, mode=mode)


def build_diversity_relevance(s: Any, lam: float = 0.5) -> DiversityRelevanceFn:
    return DiversityRelevanceFn(s, lam=lam)


def build_iwata(n: int) -> IwataTestFn:
    return IwataTestFn(n)


def random_similarity(n: int, rng: np.random.Generator) -> np.ndarray:
    """Symmetrized uniform [0, 1] similarity matrix with unit diagonal."""
    u = rng.random((n, n))
    s = (u + u.T) / 2.0
    np.fill_diagonal(s, 1.0)
    return s


def random_bipartite_adjacency(n: int, m: int, degree: float, rng: np.random.Generator) -> np.ndarray:
    """Random left-to-right adjacency with expected left degree ``degree`` and at least one neighbor each."""
    prob = min(1.0, degree / m)
    adjacency = rng.random((n, m)) < prob
    for j in np.flatnonzero(~adjacency.any(axis=1)):
        adjacency[j, rng.integers(m)] = True
    return adjacency


def _external_set(ids: Sequence[int], n: int) -> SubsetMask:
    return SubsetMask.from_external(ids, n)


def _random_subset(rng: np.random.Generator, n: int, size: int) -> SubsetMask:
    size = max(1, min(n, size))
    return SubsetMask.from_indices(rng.choice(n, size=size, replace=False).tolist(), n)


def random_instance(
    family: str, n: int, seed: Optional[int] = 0, params: Optional[Dict[str, Any]] = None
) -> SetFunctionOracle:
    """
    Build a reproducible instance of a function family.

    Random weights are uniform on [0, 1]. Explicit values in ``params``
    (weight vectors, 1-based sets such as ``R`` or ``clusters``) override the
    random draws.

    Args:
        family: Family name or short code (CM, CCM, BN, WC, BS, DR, IWATA, MODULAR, CARD)
        n: Ground set size
        seed: Seed for numpy.random.default_rng
        params: Family-specific parameters

    Returns:
        A normalized oracle

    Raises:
        ArgumentError: If the family is unknown or a parameter is invalid
    """
    name = canonical_family(family)
    if not isinstance(n, (int, np.integer)) or isinstance(n, bool) or n < 1:
        raise ArgumentError(f"Ground set size must be a positive integer, got {n!r}")
    n = int(n)
    params = dict(params or {})
    rng = np.random.default_rng(seed)
    logger.debug("Building %s instance with n=%d, seed=%s", name, n, seed)

    if name == "modular":
        low = float(params.get("low", -1.0))
        high = float(params.get("high", 1.0))
        return ModularFn(params["w"] if "w" in params else rng.uniform(low, high, n))

    if name == "cardinality":
        sizes = np.arange(n + 1, dtype=float)
        if "values" in params:
            return CardinalityFn(n, params["values"])
        if "k" in params:
            return CardinalityFn(n, np.minimum(sizes, float(params["k"])))
        return CardinalityFn(n, sizes ** float(params.get("exponent", 0.5)))

    if name == "concave_modular":
        w1 = params["w1"] if "w1" in params else rng.random(n)
        w2 = params["w2"] if "w2" in params else rng.random(n)
        return ConcaveOverModularFn(
            w1,
            w2,
            concave_kind=params.get("concave_kind", "sqrt"),
            mode=params.get("mode", "plain"),
            lam=float(params.get("lam", 1.0)),
            exponent=float(params.get("exponent", 0.5)),
        )

    if name == "clustered_concave_modular":
        if "clusters" in params:
            clusters = [[i - 1 for i in cluster] for cluster in params["clusters"]]
        else:
            k = max(1, min(n, int(params.get("num_clusters", 3))))
            clusters = [part.tolist() for part in np.array_split(rng.permutation(n), k)]
        w = params["w"] if "w" in params else rng.random(n)
        return ClusteredConcaveModularFn(clusters, w, concave_kind=params.get("concave_kind", "sqrt"))

    if name == "bipartite_neighborhood":
        m = int(params.get("right_size", n))
        if m < 1:
            raise ArgumentError(f"right_size must be positive, got {m}")
        if "neighbors" in params:
            adjacency = np.zeros((n, m), dtype=bool)
            for j, row in enumerate(params["neighbors"]):
                for u in row:
                    adjacency[j, int(u) - 1] = True
        else:
            adjacency = random_bipartite_adjacency(n, m, float(params.get("degree", 3.0)), rng)
        w1 = params["w1"] if "w1" in params else rng.random(m)
        w2 = params["w2"] if "w2" in params else rng.random(n)
        return BipartiteNeighborhoodFn(adjacency, w1, w2, lam=float(params.get("lam", 1.0)))

    if name == "worst_case":
        epsilon = float(params.get("epsilon", 0.1))
        R = _external_set(params["R"], n) if "R" in params else None
        return build_worst_case(n, R=R, epsilon=epsilon, rng=rng)

    if name == "best_set":
        if "R" in params:
            R = _external_set(params["R"], n)
        else:
            R = _random_subset(rng, n, int(params.get("size", max(1, n // 4))))
        w = params["w"] if "w" in params else rng.random(n)
        return BestSetFn(R, w, mode=params.get("mode", "penalty"))

    if name == "diversity_relevance":
        s = params["similarity"] if "similarity" in params else random_similarity(n, rng)
        return DiversityRelevanceFn(s, lam=float(params.get("lam", 0.5)))

    return IwataTestFn(n)


def build_from_problem(problem: Dict[str, Any]) -> SetFunctionOracle:
    """
    Build an oracle from a problem description ``{"family", "n", "seed", "params"}``.

    ``n`` may be omitted when params carry an explicit weight vector.
    """
    if not isinstance(problem, dict) or "family" not in problem:
        raise ArgumentError("Problem must be an object with a 'family' field")
    params = problem.get("params") or {}
    n = problem.get("n")
    if n is None:
        for key in ("w1", "w", "similarity", "neighbors"):
            if key in params:
                n = len(params[key])
                break
        else:
            raise ArgumentError("Problem must give 'n' or an explicit weight vector")
    return random_instance(problem["family"], n, problem.get("seed", 0), params)
