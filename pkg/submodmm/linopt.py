"""
Linear (modular) optimization over constraint families.

This is the inner solver of every majorize-minimize / minorize-maximize step:
given a modular vector w and a feasible family C, return the feasible set of
minimum (or maximum) weight. Ties are broken toward smaller sets: elements of
zero weight are never taken unless the constraint forces them.
"""

import itertools
import logging
from dataclasses import dataclass, field
from math import comb
from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple, Union

import networkx as nx
import numpy as np
from scipy.optimize import linear_sum_assignment

from . import config
from .core import (
    ArgumentError,
    BudgetExceededError,
    DomainError,
    InfeasibleError,
    ModularVector,
    SubsetMask,
    UnsupportedError,
    gray_code_masks,
)
from .graphs import GraphSpec

logger = logging.getLogger(__name__)

CONSTRAINT_KINDS = (
    "unconstrained",
    "cardinality_lower",
    "cardinality_upper",
    "spanning_tree",
    "shortest_path",
    "perfect_bipartite_matching",
    "matroid",
    "matroid_intersection",
    "knapsack",
)
GRAPH_KINDS = ("spanning_tree", "shortest_path", "perfect_bipartite_matching")
DOWN_MONOTONE_KINDS = ("unconstrained", "cardinality_upper", "matroid", "matroid_intersection", "knapsack")


class UnionFind:
    """Disjoint sets over 0..size-1 with path halving."""

    def __init__(self, size: int):
        self.parent = list(range(size))

    def root(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def join(self, a: int, b: int) -> bool:
        """Merge the sets of a and b; False if they were already joined."""
        ra, rb = self.root(a), self.root(b)
        if ra == rb:
            return False
        self.parent[rb] = ra
        return True


def _is_forest(graph: GraphSpec, X: SubsetMask) -> bool:
    uf = UnionFind(graph.vertices)
    return all(uf.join(*graph.edges[i]) for i in X.indices)


class Matroid:
    """Independence oracle over a ground set of n elements."""

    kind = "matroid"

    def __init__(self, n: int):
        if n < 1:
            raise ArgumentError(f"Ground set size must be positive, got {n}")
        self.n = n

    def is_independent(self, X: SubsetMask) -> bool:
        raise NotImplementedError

    def rank(self, X: Optional[SubsetMask] = None) -> int:
        """Size of a maximal independent subset of X (default V), found greedily."""
        X = SubsetMask.full(self.n) if X is None else X
        current = SubsetMask.empty(self.n)
        for j in X.indices:
            candidate = current.add(j)
            if self.is_independent(candidate):
                current = candidate
        return current.cardinality

    def to_dict(self) -> Dict[str, Any]:
        raise NotImplementedError


class UniformMatroid(Matroid):
    kind = "uniform"

    def __init__(self, n: int, k: int):
        super().__init__(n)
        if k < 0:
            raise ArgumentError(f"Uniform matroid rank must be nonnegative, got {k}")
        self.k = int(k)

    def is_independent(self, X: SubsetMask) -> bool:
        return X.cardinality <= self.k

    def to_dict(self):
        return {"type": "uniform", "k": self.k}


class PartitionMatroid(Matroid):
    """At most capacities[i] elements from block i; elements in no block are free."""

    kind = "partition"

    def __init__(self, n: int, blocks: Sequence[Sequence[int]], capacities: Sequence[int]):
        super().__init__(n)
        if len(blocks) != len(capacities):
            raise ArgumentError("Partition matroid needs one capacity per block")
        masks = [SubsetMask.from_indices(block, n) for block in blocks]
        seen = SubsetMask.empty(n)
        for mask in masks:
            if (mask & seen).cardinality:
                raise ArgumentError("Partition matroid blocks must be disjoint")
            seen = seen | mask
        if any(c < 0 for c in capacities):
            raise ArgumentError("Partition matroid capacities must be nonnegative")
        self.blocks = masks
        self.capacities = [int(c) for c in capacities]

    def is_independent(self, X: SubsetMask) -> bool:
        return all((X & block).cardinality <= cap for block, cap in zip(self.blocks, self.capacities))

    def to_dict(self):
        return {"type": "partition", "blocks": [b.to_external() for b in self.blocks], "capacities": self.capacities}


class GraphicMatroid(Matroid):
    """Forests of a graph, over its edges."""

    kind = "graphic"

    def __init__(self, graph: GraphSpec):
        super().__init__(graph.n)
        self.graph = graph

    def is_independent(self, X: SubsetMask) -> bool:
        return _is_forest(self.graph, X)

    def to_dict(self):
        return {"type": "graphic", "graph": self.graph.to_dict()}


def uniform_matroid(n: int, k: int) -> UniformMatroid:
    return UniformMatroid(n, k)


def partition_matroid(n: int, blocks: Sequence[Sequence[int]], capacities: Sequence[int]) -> PartitionMatroid:
    return PartitionMatroid(n, blocks, capacities)


def graphic_matroid(graph: GraphSpec) -> GraphicMatroid:
    return GraphicMatroid(graph)


def matroid_from_dict(data: Dict[str, Any], n: Optional[int] = None) -> Matroid:
    """Build a matroid from ``{"type": "uniform" | "partition" | "graphic", ...}`` with 1-based ids."""
    kind = data.get("type")
    if kind == "graphic":
        return GraphicMatroid(GraphSpec.from_dict(data["graph"]))
    if n is None:
        raise ArgumentError(f"Ground set size is required for a {kind} matroid")
    if kind == "uniform":
        return UniformMatroid(n, int(data["k"]))
    if kind == "partition":
        blocks = [[i - 1 for i in block] for block in data["blocks"]]
        return PartitionMatroid(n, blocks, data["capacities"])
    raise ArgumentError(f"Unknown matroid type '{kind}'")


@dataclass
class ConstraintFamily:
    """
    A feasible family C over a ground set of n elements.

    Attributes:
        kind: One of CONSTRAINT_KINDS
        n: Ground set size
        k: Cardinality bound for the cardinality kinds
        graph: Edge-indexed graph for the graph kinds
        matroids: Independence oracles for the matroid kinds
        costs: Element costs for knapsack
        budget: Knapsack budget
    """

    kind: str
    n: int
    k: Optional[int] = None
    graph: Optional[GraphSpec] = None
    matroids: List[Matroid] = field(default_factory=list)
    costs: Optional[np.ndarray] = None
    budget: Optional[float] = None

    def __post_init__(self):
        if self.kind not in CONSTRAINT_KINDS:
            raise ArgumentError(f"Unknown constraint kind '{self.kind}'. Known kinds: {', '.join(CONSTRAINT_KINDS)}")
        if self.n < 1:
            raise ArgumentError(f"Ground set size must be positive, got {self.n}")
        if self.kind.startswith("cardinality"):
            if self.k is None or self.k < 0:
                raise ArgumentError(f"{self.kind} requires a nonnegative k")
            self.k = int(self.k)
        if self.kind in GRAPH_KINDS:
            if self.graph is None:
                raise ArgumentError(f"{self.kind} requires a graph")
            if self.graph.n != self.n:
                raise ArgumentError(f"Graph has {self.graph.n} edges but the ground set has {self.n} elements")
        if self.kind == "shortest_path" and (self.graph.s is None or self.graph.t is None):
            raise ArgumentError("shortest_path requires source s and target t on the graph")
        if self.kind == "perfect_bipartite_matching" and self.graph.bipartition is None:
            raise ArgumentError("perfect_bipartite_matching requires a bipartite graph")
        if self.kind in ("matroid", "matroid_intersection"):
            if not self.matroids:
                raise ArgumentError(f"{self.kind} requires at least one matroid")
            if self.kind == "matroid" and len(self.matroids) != 1:
                raise ArgumentError("matroid kind takes exactly one matroid; use matroid_intersection")
            for m in self.matroids:
                if m.n != self.n:
                    raise ArgumentError(f"Matroid is over {m.n} elements, expected {self.n}")
        if self.kind == "knapsack":
            costs = np.asarray(self.costs, dtype=float).reshape(-1) if self.costs is not None else None
            if costs is None or costs.size != self.n:
                raise ArgumentError(f"knapsack requires {self.n} costs")
            if np.any(costs < 0):
                raise ArgumentError("knapsack costs must be nonnegative")
            if self.budget is None or self.budget <= 0:
                raise ArgumentError("knapsack budget must be positive")
            self.costs = costs
            self.budget = float(self.budget)

    @classmethod
    def unconstrained(cls, n: int) -> "ConstraintFamily":
        return cls("unconstrained", n)

    @classmethod
    def cardinality_lower(cls, n: int, k: int) -> "ConstraintFamily":
        return cls("cardinality_lower", n, k=k)

    @classmethod
    def cardinality_upper(cls, n: int, k: int) -> "ConstraintFamily":
        return cls("cardinality_upper", n, k=k)

    @classmethod
    def spanning_tree(cls, graph: GraphSpec) -> "ConstraintFamily":
        return cls("spanning_tree", graph.n, graph=graph)

    @classmethod
    def shortest_path(cls, graph: GraphSpec) -> "ConstraintFamily":
        return cls("shortest_path", graph.n, graph=graph)

    @classmethod
    def perfect_matching(cls, graph: GraphSpec) -> "ConstraintFamily":
        return cls("perfect_bipartite_matching", graph.n, graph=graph)

    @classmethod
    def matroid(cls, m: Matroid) -> "ConstraintFamily":
        return cls("matroid", m.n, matroids=[m])

    @classmethod
    def matroid_intersection(cls, matroids: Sequence[Matroid]) -> "ConstraintFamily":
        if not matroids:
            raise ArgumentError("matroid_intersection requires at least one matroid")
        return cls("matroid_intersection", matroids[0].n, matroids=list(matroids))

    @classmethod
    def knapsack(cls, costs: Sequence[float], budget: float) -> "ConstraintFamily":
        costs = np.asarray(costs, dtype=float).reshape(-1)
        return cls("knapsack", costs.size, costs=costs, budget=budget)

    @property
    def p(self) -> Optional[int]:
        """Number of matroids whose intersection is C, where C is one."""
        if self.kind in ("cardinality_upper", "unconstrained"):
            return 1
        if self.kind in ("matroid", "matroid_intersection"):
            return len(self.matroids)
        return None

    @property
    def is_down_monotone(self) -> bool:
        return self.kind in DOWN_MONOTONE_KINDS

    def is_feasible(self, X: SubsetMask, tol: Optional[float] = None) -> bool:
        """Membership of X in C."""
        tol = config.TOLERANCE if tol is None else tol
        if X.n != self.n:
            raise ArgumentError(f"Set is over {X.n} elements, constraint over {self.n}")
        if self.kind == "unconstrained":
            return True
        if self.kind == "cardinality_lower":
            return X.cardinality >= self.k
        if self.kind == "cardinality_upper":
            return X.cardinality <= self.k
        if self.kind == "spanning_tree":
            return X.cardinality == self.graph.vertices - 1 and _is_forest(self.graph, X)
        if self.kind == "shortest_path":
            return _is_simple_path(self.graph, X)
        if self.kind == "perfect_bipartite_matching":
            return _is_perfect_matching(self.graph, X)
        if self.kind in ("matroid", "matroid_intersection"):
            return all(m.is_independent(X) for m in self.matroids)
        return float(self.costs[list(X.indices)].sum()) <= self.budget + tol

    def enumerate_feasible(self, limit: Optional[int] = None) -> Iterator[SubsetMask]:
        """
        Every feasible set, enumerated structurally where the kind allows.

        Raises:
            BudgetExceededError: If more than 2^limit sets would be examined
        """
        limit = config.BRUTE_FORCE_LIMIT if limit is None else limit
        cap = 1 << limit
        n = self.n

        if self.kind in ("cardinality_lower", "cardinality_upper"):
            sizes = range(self.k, n + 1) if self.kind == "cardinality_lower" else range(0, min(self.k, n) + 1)
            _check_count(sum(comb(n, s) for s in sizes), cap)
            for s in sizes:
                for combo in itertools.combinations(range(n), s):
                    yield SubsetMask.from_indices(combo, n)
            return

        if self.kind == "spanning_tree":
            size = self.graph.vertices - 1
            _check_count(comb(n, size), cap)
            for combo in itertools.combinations(range(n), size):
                X = SubsetMask.from_indices(combo, n)
                if _is_forest(self.graph, X):
                    yield X
            return

        if self.kind == "shortest_path":
            yield from _enumerate_paths(self.graph, cap)
            return

        if self.kind == "perfect_bipartite_matching":
            yield from _enumerate_matchings(self.graph, cap)
            return

        if n > limit:
            raise BudgetExceededError(f"Enumerating 2^{n} candidate sets exceeds the budget of 2^{limit}")
        for bits in gray_code_masks(n):
            X = SubsetMask(bits, n)
            if self.is_feasible(X):
                yield X

    def cardinality_range(self, limit: Optional[int] = None) -> Tuple[int, int]:
        """
        (K, k): the maximum and minimum cardinality of the maximal feasible sets.

        Raises:
            UnsupportedError: If C is not down-monotone
        """
        if self.kind == "unconstrained":
            return self.n, self.n
        if self.kind == "cardinality_upper":
            size = min(self.k, self.n)
            return size, size
        if self.kind == "matroid":
            r = self.matroids[0].rank()
            return r, r
        if not self.is_down_monotone:
            raise UnsupportedError(f"Cardinality range is only defined for down-monotone families, not {self.kind}")
        sizes = []
        for X in self.enumerate_feasible(limit):
            if all(not self.is_feasible(X.add(j)) for j in X.complement().indices):
                sizes.append(X.cardinality)
        return max(sizes), min(sizes)

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {"kind": self.kind, "n": self.n}
        if self.k is not None:
            data["k"] = self.k
        if self.graph is not None:
            data["graph"] = self.graph.to_dict()
        if self.kind == "matroid":
            data["matroid"] = self.matroids[0].to_dict()
        if self.kind == "matroid_intersection":
            data["matroids"] = [m.to_dict() for m in self.matroids]
        if self.kind == "knapsack":
            data["costs"] = self.costs.tolist()
            data["budget"] = self.budget
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any], n: Optional[int] = None) -> "ConstraintFamily":
        """
        Build a constraint from JSON.

        ``n`` may be omitted when the constraint carries a graph or costs.
        """
        if not isinstance(data, dict) or "kind" not in data:
            raise ArgumentError("Constraint must be an object with a 'kind' field")
        kind = data["kind"]
        n = data.get("n", n)
        if kind in GRAPH_KINDS:
            graph = GraphSpec.from_dict(data["graph"])
            if "s" in data or "t" in data:
                graph.s, graph.t = data.get("s", graph.s), data.get("t", graph.t)
            return cls(kind, graph.n, graph=graph)
        if kind == "knapsack":
            return cls.knapsack(data["costs"], data["budget"])
        if kind == "matroid":
            m = matroid_from_dict(data["matroid"], n)
            return cls("matroid", m.n, matroids=[m])
        if kind == "matroid_intersection":
            return cls.matroid_intersection([matroid_from_dict(d, n) for d in data["matroids"]])
        if n is None:
            raise ArgumentError(f"Ground set size is required for a {kind} constraint")
        return cls(kind, int(n), k=data.get("k"))


@dataclass(frozen=True)
class LinOptResult:
    """
    Output of the modular optimizer.

    ``beta`` is the guaranteed approximation factor when ``exact`` is false
    (None when no guarantee is known).
    """

    set: SubsetMask
    value: float
    exact: bool = True
    beta: Optional[float] = 1.0


def _check_count(count: int, cap: int):
    if count > cap:
        raise BudgetExceededError(f"Enumerating {count} candidate sets exceeds the budget of {cap}")


def _degrees(graph: GraphSpec, X: SubsetMask) -> np.ndarray:
    deg = np.zeros(graph.vertices, dtype=np.int64)
    for i in X.indices:
        u, v = graph.edges[i]
        deg[u] += 1
        deg[v] += 1
    return deg


def _is_simple_path(graph: GraphSpec, X: SubsetMask) -> bool:
    s, t = graph.s, graph.t
    if s == t:
        return X.cardinality == 0
    deg = _degrees(graph, X)
    if deg[s] != 1 or deg[t] != 1:
        return False
    inner = np.delete(deg, [s, t])
    if np.any((inner != 0) & (inner != 2)):
        return False
    # Degree pattern plus acyclicity leaves exactly one s-t path
    return _is_forest(graph, X)


def _is_perfect_matching(graph: GraphSpec, X: SubsetMask) -> bool:
    return bool(np.all(_degrees(graph, X) == 1))


def _enumerate_paths(graph: GraphSpec, cap: int) -> Iterator[SubsetMask]:
    if graph.s == graph.t:
        yield SubsetMask.empty(graph.n)
        return
    count = 0
    for path in nx.all_simple_edge_paths(graph.to_networkx(), graph.s, graph.t):
        count += 1
        _check_count(count, cap)
        yield SubsetMask.from_indices([key for _, _, key in path], graph.n)


def _enumerate_matchings(graph: GraphSpec, cap: int) -> Iterator[SubsetMask]:
    left, right = graph.bipartition
    if len(left) != len(right):
        return
    incident: Dict[int, List[Tuple[int, int]]] = {u: [] for u in left}
    left_set = set(left)
    for i, (u, v) in enumerate(graph.edges):
        a, b = (u, v) if u in left_set else (v, u)
        incident[a].append((i, b))
    count = 0

    def extend(pos: int, bits: int, used: frozenset):
        nonlocal count
        if pos == len(left):
            count += 1
            _check_count(count, cap)
            yield SubsetMask(bits, graph.n)
            return
        for i, b in incident[left[pos]]:
            if b not in used:
                yield from extend(pos + 1, bits | (1 << i), used | {b})

    yield from extend(0, 0, frozenset())


def _as_vector(w: Union[ModularVector, Sequence[float]], C: ConstraintFamily) -> np.ndarray:
    vec = w if isinstance(w, ModularVector) else ModularVector(w)
    if vec.n != C.n:
        raise ArgumentError(f"Weight vector has {vec.n} entries, constraint is over {C.n} elements")
    return vec.w


def _result(w: np.ndarray, indices: Sequence[int], n: int, exact: bool = True, beta: Optional[float] = 1.0):
    X = SubsetMask.from_indices(indices, n)
    return LinOptResult(X, float(w[list(X.indices)].sum()) if X.cardinality else 0.0, exact, beta)


def _greedy_independent(order: Sequence[int], C: ConstraintFamily) -> List[int]:
    chosen = SubsetMask.empty(C.n)
    for j in order:
        candidate = chosen.add(int(j))
        if C.is_feasible(candidate):
            chosen = candidate
    return list(chosen.indices)


def _spanning_tree(w: np.ndarray, graph: GraphSpec, maximum: bool) -> List[int]:
    g = graph.to_networkx()
    if not nx.is_connected(g):
        raise InfeasibleError("Graph is disconnected: no spanning tree exists")
    for u, v, key in g.edges(keys=True):
        g.edges[u, v, key]["weight"] = float(w[key])
    edges = nx.maximum_spanning_edges if maximum else nx.minimum_spanning_edges
    return sorted(key for _, _, key in edges(g, algorithm="kruskal", weight="weight", keys=True, data=False))


def _shortest_path(w: np.ndarray, graph: GraphSpec, tol: float) -> List[int]:
    negative = np.flatnonzero(w < -tol)
    if negative.size:
        raise DomainError(
            f"nonnegative weights required for path kind (element {int(negative[0]) + 1} has weight "
            f"{w[negative[0]]:.6g})"
        )
    if graph.s == graph.t:
        return []
    g = nx.Graph()
    g.add_nodes_from(range(graph.vertices))
    # Cheapest of any parallel edges; ties keep the smaller edge id
    for i, (u, v) in enumerate(graph.edges):
        weight = max(float(w[i]), 0.0)
        if not g.has_edge(u, v) or weight < g.edges[u, v]["weight"]:
            g.add_edge(u, v, weight=weight, element=i)
    try:
        nodes = nx.dijkstra_path(g, graph.s, graph.t, weight="weight")
    except nx.NetworkXNoPath as e:
        raise InfeasibleError(f"No path from {graph.s} to {graph.t}") from e
    return sorted(g.edges[u, v]["element"] for u, v in zip(nodes, nodes[1:]))


def _matching(w: np.ndarray, graph: GraphSpec, maximum: bool) -> List[int]:
    left, right = graph.bipartition
    if len(left) != len(right):
        raise InfeasibleError("Bipartition sides differ in size: no perfect matching exists")
    row = {u: r for r, u in enumerate(left)}
    col = {v: c for c, v in enumerate(right)}
    cost = np.full((len(left), len(right)), np.inf)
    element = np.full((len(left), len(right)), -1, dtype=np.int64)
    for i, (u, v) in enumerate(graph.edges):
        r, c = (row[u], col[v]) if u in row else (row[v], col[u])
        value = -float(w[i]) if maximum else float(w[i])
        if value < cost[r, c]:
            cost[r, c] = value
            element[r, c] = i
    try:
        rows, cols = linear_sum_assignment(cost)
    except ValueError as e:
        raise InfeasibleError("Graph has no perfect matching") from e
    return sorted(int(element[r, c]) for r, c in zip(rows, cols))


def _knapsack_dp(w: np.ndarray, costs: np.ndarray, budget: int, items: Sequence[int], tol: float) -> List[int]:
    value = np.zeros(budget + 1)
    take = np.zeros((len(items), budget + 1), dtype=bool)
    for r, j in enumerate(items):
        c = int(costs[j])
        if c > budget:
            continue
        candidate = value[: budget + 1 - c] + w[j]
        better = candidate > value[c:] + tol
        take[r, c:] = better
        value[c:] = np.where(better, candidate, value[c:])
    chosen = []
    b = budget
    for r in range(len(items) - 1, -1, -1):
        if take[r, b]:
            chosen.append(items[r])
            b -= int(costs[items[r]])
    return chosen


def _knapsack(w: np.ndarray, C: ConstraintFamily, tol: float) -> LinOptResult:
    costs = C.costs
    positive = [j for j in np.flatnonzero(w > tol).tolist()]
    free = [j for j in positive if costs[j] <= tol]
    paid = [j for j in positive if costs[j] > tol]
    budget = int(np.floor(C.budget + tol))
    integral = np.allclose(costs[paid], np.round(costs[paid])) if paid else True
    if integral and len(paid) * (budget + 1) <= config.KNAPSACK_DP_LIMIT:
        return _result(w, free + _knapsack_dp(w, np.round(costs), budget, paid, tol), C.n)

    logger.debug("Knapsack DP not applicable; using ratio greedy with best singleton")
    order = sorted(paid, key=lambda j: (-w[j] / costs[j], j))
    chosen, spent = [], 0.0
    for j in order:
        if spent + costs[j] <= C.budget + tol:
            chosen.append(j)
            spent += costs[j]
    greedy = _result(w, free + chosen, C.n, exact=False, beta=0.5)
    singles = [j for j in paid if costs[j] <= C.budget + tol]
    if singles:
        best = max(singles, key=lambda j: (w[j], -j))
        single = _result(w, free + [best], C.n, exact=False, beta=0.5)
        if single.value > greedy.value + tol:
            return single
    return greedy


def minimize_modular(
    w: Union[ModularVector, Sequence[float]], C: ConstraintFamily, tol: Optional[float] = None
) -> LinOptResult:
    """
    A minimum-weight feasible set, preferring fewer elements on ties.

    Args:
        w: Modular weights
        C: Constraint family
        tol: Sign tolerance (defaults to config.TOLERANCE)

    Returns:
        LinOptResult; exact except for matroid intersections

    Raises:
        DomainError: If a shortest-path weight is negative
        InfeasibleError: If the graph admits no tree, path or perfect matching
        UnsupportedError: For knapsack minimization
    """
    tol = config.TOLERANCE if tol is None else tol
    w = _as_vector(w, C)
    n = C.n
    ascending = np.argsort(w, kind="stable")
    negative = [int(j) for j in ascending if w[j] < -tol]

    if C.kind == "unconstrained":
        return _result(w, negative, n)
    if C.kind == "cardinality_lower":
        forced = [int(j) for j in ascending[: C.k]]
        return _result(w, sorted(set(forced) | set(negative)), n)
    if C.kind == "cardinality_upper":
        return _result(w, negative[: C.k], n)
    if C.kind == "spanning_tree":
        return _result(w, _spanning_tree(w, C.graph, maximum=False), n)
    if C.kind == "shortest_path":
        return _result(w, _shortest_path(w, C.graph, tol), n)
    if C.kind == "perfect_bipartite_matching":
        return _result(w, _matching(w, C.graph, maximum=False), n)
    if C.kind == "matroid":
        return _result(w, _greedy_independent(negative, C), n)
    if C.kind == "matroid_intersection":
        return _result(w, _greedy_independent(negative, C), n, exact=False, beta=None)
    raise UnsupportedError("knapsack minimization is not supported")


def maximize_modular(
    w: Union[ModularVector, Sequence[float]], C: ConstraintFamily, tol: Optional[float] = None
) -> LinOptResult:
    """
    A maximum-weight feasible set, preferring fewer elements on ties.

    Knapsack is solved exactly by dynamic programming when the costs of the
    positive elements are integers and the table fits
    config.KNAPSACK_DP_LIMIT; otherwise the better of the ratio greedy set and
    the best singleton is returned with beta = 1/2. Matroid intersections use
    the greedy rule with beta = 1/p.

    Raises:
        InfeasibleError: If the graph admits no tree or perfect matching
        UnsupportedError: For the path kind (longest path)
    """
    tol = config.TOLERANCE if tol is None else tol
    w = _as_vector(w, C)
    n = C.n
    descending = np.argsort(-w, kind="stable")
    positive = [int(j) for j in descending if w[j] > tol]

    if C.kind == "unconstrained":
        return _result(w, positive, n)
    if C.kind == "cardinality_upper":
        return _result(w, positive[: C.k], n)
    if C.kind == "cardinality_lower":
        forced = [int(j) for j in descending[: C.k]]
        return _result(w, sorted(set(forced) | set(positive)), n)
    if C.kind == "spanning_tree":
        return _result(w, _spanning_tree(w, C.graph, maximum=True), n)
    if C.kind == "shortest_path":
        raise UnsupportedError("maximization over paths (longest path) is not supported")
    if C.kind == "perfect_bipartite_matching":
        return _result(w, _matching(w, C.graph, maximum=True), n)
    if C.kind == "matroid":
        return _result(w, _greedy_independent(positive, C), n)
    if C.kind == "matroid_intersection":
        return _result(w, _greedy_independent(positive, C), n, exact=False, beta=1.0 / len(C.matroids))
    return _knapsack(w, C, tol)


def is_feasible(X: SubsetMask, C: ConstraintFamily) -> bool:
    return C.is_feasible(X)


def random_feasible_set(C: ConstraintFamily, rng: np.random.Generator) -> SubsetMask:
    """
    A random feasible set: a maximal one for down-monotone families, a
    minimum-weight one under random weights otherwise. Unconstrained draws a
    nonempty uniform subset.
    """
    if C.kind == "unconstrained":
        while True:
            X = SubsetMask.from_bool_array(rng.random(C.n) < 0.5)
            if X.cardinality:
                return X
    weights = rng.random(C.n) + 0.5
    if C.is_down_monotone:
        return maximize_modular(weights, C).set
    return minimize_modular(weights, C).set
