"""
Edge-indexed graphs for the graph constraint families.

Element i of the ground set is edge i of the graph. Vertices are numbered
0..vertices-1.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import networkx as nx
import numpy as np

from .core import ArgumentError


@dataclass
class GraphSpec:
    """
    A multigraph whose edges are the ground set elements.

    Attributes:
        vertices: Number of vertices
        edges: (u, v) pairs; edge i is element i
        bipartition: Optional (left, right) vertex lists for matching constraints
        s: Source vertex for path constraints
        t: Target vertex for path constraints
    """

    vertices: int
    edges: List[Tuple[int, int]]
    bipartition: Optional[Tuple[List[int], List[int]]] = None
    s: Optional[int] = None
    t: Optional[int] = None
    name: str = field(default="graph", compare=False)

    def __post_init__(self):
        if self.vertices < 1:
            raise ArgumentError(f"Graph must have at least one vertex, got {self.vertices}")
        if not self.edges:
            raise ArgumentError("Graph must have at least one edge")
        edges = []
        for i, edge in enumerate(self.edges):
            if len(edge) != 2:
                raise ArgumentError(f"Edge {i + 1} must be a vertex pair, got {edge!r}")
            u, v = int(edge[0]), int(edge[1])
            for x in (u, v):
                if x < 0 or x >= self.vertices:
                    raise ArgumentError(f"Edge {i + 1} endpoint {x} out of range [0, {self.vertices})")
            if u == v:
                raise ArgumentError(f"Edge {i + 1} is a self-loop at vertex {u}")
            edges.append((u, v))
        self.edges = edges
        for name in ("s", "t"):
            x = getattr(self, name)
            if x is not None and not 0 <= x < self.vertices:
                raise ArgumentError(f"Vertex {name}={x} out of range [0, {self.vertices})")
        if self.bipartition is not None:
            left, right = (sorted(int(x) for x in part) for part in self.bipartition)
            if set(left) & set(right):
                raise ArgumentError("Bipartition sides must be disjoint")
            side = {x: 0 for x in left}
            side.update({x: 1 for x in right})
            for i, (u, v) in enumerate(self.edges):
                if u not in side or v not in side or side[u] == side[v]:
                    raise ArgumentError(f"Edge {i + 1} does not cross the bipartition")
            self.bipartition = (left, right)

    @property
    def n(self) -> int:
        """Number of edges, the ground set size."""
        return len(self.edges)

    def to_networkx(self) -> nx.MultiGraph:
        """MultiGraph keyed by edge index, with the index also stored as the ``element`` attribute."""
        g = nx.MultiGraph()
        g.add_nodes_from(range(self.vertices))
        for i, (u, v) in enumerate(self.edges):
            g.add_edge(u, v, key=i, element=i)
        return g

    def is_connected(self) -> bool:
        return nx.is_connected(self.to_networkx())

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "GraphSpec":
        if "vertices" not in data or "edges" not in data:
            raise ArgumentError("Graph must have 'vertices' and 'edges' fields")
        bipartition = data.get("bipartition")
        return cls(
            vertices=int(data["vertices"]),
            edges=[tuple(e) for e in data["edges"]],
            bipartition=tuple(bipartition) if bipartition is not None else None,
            s=data.get("s"),
            t=data.get("t"),
            name=data.get("name", "graph"),
        )

    def to_dict(self) -> Dict[str, Any]:
        data = {"vertices": self.vertices, "edges": [list(e) for e in self.edges], "name": self.name}
        if self.bipartition is not None:
            data["bipartition"] = [list(self.bipartition[0]), list(self.bipartition[1])]
        if self.s is not None:
            data["s"] = self.s
        if self.t is not None:
            data["t"] = self.t
        return data


def _from_networkx(g: nx.Graph, name: str, **kwargs) -> GraphSpec:
    g = nx.convert_node_labels_to_integers(g, ordering="sorted")
    edges = sorted((min(u, v), max(u, v)) for u, v in g.edges())
    return GraphSpec(vertices=g.number_of_nodes(), edges=edges, name=name, **kwargs)


def grid(rows: int, cols: int) -> GraphSpec:
    """Square grid with s and t at opposite corners."""
    g = nx.grid_2d_graph(rows, cols)
    return _from_networkx(g, f"grid_{rows}x{cols}", s=0, t=rows * cols - 1)


def grid_with_diagonals(rows: int, cols: int) -> GraphSpec:
    g = nx.grid_2d_graph(rows, cols)
    g.add_edges_from(((r, c), (r + 1, c + 1)) for r in range(rows - 1) for c in range(cols - 1))
    return _from_networkx(g, f"diagonal_grid_{rows}x{cols}", s=0, t=rows * cols - 1)


def cubic_grid(a: int, b: int, c: int) -> GraphSpec:
    g = nx.grid_graph(dim=[a, b, c])
    return _from_networkx(g, f"cubic_grid_{a}x{b}x{c}", s=0, t=a * b * c - 1)


def clustered_dense(num_clusters: int, cluster_size: int) -> GraphSpec:
    """Complete clusters joined in a chain by single edges."""
    if num_clusters < 1 or cluster_size < 2:
        raise ArgumentError("Need at least one cluster of size two")
    g = nx.Graph()
    for k in range(num_clusters):
        members = range(k * cluster_size, (k + 1) * cluster_size)
        g.add_edges_from(nx.complete_graph(members).edges())
        if k:
            g.add_edge(k * cluster_size - 1, k * cluster_size)
    last = num_clusters * cluster_size - 1
    return _from_networkx(g, f"clustered_{num_clusters}x{cluster_size}", s=0, t=last)


def _bipartite(m: int, edges: List[Tuple[int, int]], name: str) -> GraphSpec:
    return GraphSpec(
        vertices=2 * m,
        edges=sorted(set(edges)),
        bipartition=(list(range(m)), list(range(m, 2 * m))),
        name=name,
    )


def bipartite_sparse(m: int, extra_degree: float = 1.0, rng: Optional[np.random.Generator] = None) -> GraphSpec:
    """Bipartite graph on m + m vertices: a planted perfect matching plus random extra edges."""
    rng = np.random.default_rng(0) if rng is None else rng
    planted = rng.permutation(m)
    edges = [(i, m + int(planted[i])) for i in range(m)]
    extra = rng.random((m, m)) < extra_degree / m
    edges += [(int(i), m + int(j)) for i, j in zip(*np.nonzero(extra))]
    return _bipartite(m, edges, f"bipartite_sparse_{m}")


def bipartite_dense(m: int) -> GraphSpec:
    """Complete bipartite graph K_{m,m}."""
    return _bipartite(m, [(i, m + j) for i in range(m) for j in range(m)], f"bipartite_dense_{m}")


GENERATORS = {
    "grid": grid,
    "grid_with_diagonals": grid_with_diagonals,
    "cubic_grid": cubic_grid,
    "clustered_dense": clustered_dense,
    "bipartite_sparse": bipartite_sparse,
    "bipartite_dense": bipartite_dense,
}


def generate(kind: str, *args, **kwargs) -> GraphSpec:
    """Dispatch to a named graph generator."""
    if kind not in GENERATORS:
        raise ArgumentError(f"Unknown graph kind '{kind}'. Known kinds: {', '.join(sorted(GENERATORS))}")
    return GENERATORS[kind](*args, **kwargs)
