"""Tests for edge-indexed graphs and the experiment graph generators."""

import networkx as nx
import numpy as np
import pytest

from submodmm.core import ArgumentError
from submodmm.graphs import (
    GraphSpec,
    bipartite_dense,
    bipartite_sparse,
    clustered_dense,
    cubic_grid,
    generate,
    grid,
    grid_with_diagonals,
)


class TestGraphSpec:
    def test_edges_are_elements(self):
        """Test that the ground set size is the edge count."""
        g = GraphSpec(vertices=3, edges=[(0, 1), (1, 2), (0, 1)])
        assert g.n == 3
        nxg = g.to_networkx()
        assert nxg.number_of_edges() == 3
        assert sorted(k for _, _, k in nxg.edges(keys=True)) == [0, 1, 2]

    def test_round_trip(self):
        """Test JSON dictionaries reproduce the graph."""
        g = GraphSpec(vertices=4, edges=[(0, 2), (1, 3)], bipartition=([0, 1], [2, 3]), s=0, t=3, name="toy")
        h = GraphSpec.from_dict(g.to_dict())
        assert h == g
        assert h.name == "toy"

    def test_validation(self):
        """Test malformed graphs."""
        with pytest.raises(ArgumentError, match="self-loop"):
            GraphSpec(vertices=2, edges=[(1, 1)])
        with pytest.raises(ArgumentError, match="out of range"):
            GraphSpec(vertices=2, edges=[(0, 2)])
        with pytest.raises(ArgumentError, match="at least one edge"):
            GraphSpec(vertices=2, edges=[])
        with pytest.raises(ArgumentError, match="cross the bipartition"):
            GraphSpec(vertices=4, edges=[(0, 1)], bipartition=([0, 1], [2, 3]))
        with pytest.raises(ArgumentError, match="'vertices' and 'edges'"):
            GraphSpec.from_dict({"edges": [[0, 1]]})

    def test_connectivity(self):
        """Test the connectivity helper."""
        assert grid(2, 2).is_connected()
        assert not GraphSpec(vertices=4, edges=[(0, 1), (2, 3)]).is_connected()


class TestGenerators:
    def test_grid(self):
        """Test square grids with corner terminals."""
        g = grid(3, 3)
        assert (g.vertices, g.n, g.s, g.t) == (9, 12, 0, 8)
        assert nx.shortest_path_length(g.to_networkx(), g.s, g.t) == 4

    def test_grid_with_diagonals(self):
        """Test diagonals shorten the corner-to-corner distance."""
        g = grid_with_diagonals(3, 3)
        assert g.n == 16
        assert nx.shortest_path_length(g.to_networkx(), g.s, g.t) == 2

    def test_cubic_grid(self):
        """Test the 2x2x2 cube."""
        g = cubic_grid(2, 2, 2)
        assert (g.vertices, g.n) == (8, 12)

    def test_clustered_dense(self):
        """Test complete clusters chained by single edges."""
        g = clustered_dense(2, 3)
        assert (g.vertices, g.n) == (6, 7)
        assert g.is_connected()
        with pytest.raises(ArgumentError):
            clustered_dense(1, 1)

    def test_bipartite_dense(self):
        """Test K_{3,3}."""
        g = bipartite_dense(3)
        assert (g.vertices, g.n) == (6, 9)
        assert g.bipartition == ([0, 1, 2], [3, 4, 5])

    def test_bipartite_sparse_has_perfect_matching(self):
        """Test the planted perfect matching."""
        g = bipartite_sparse(5, extra_degree=1.0, rng=np.random.default_rng(2))
        matching = nx.bipartite.maximum_matching(nx.Graph(g.to_networkx()), top_nodes=g.bipartition[0])
        assert len(matching) == 2 * 5

    def test_generate_dispatch(self):
        """Test generation by name."""
        assert generate("grid", 2, 3).n == grid(2, 3).n
        with pytest.raises(ArgumentError, match="Unknown graph kind"):
            generate("torus", 3)
