from fractions import Fraction

import numpy as np
import pytest

from rigsim.graphs import (
    BipartiteMultigraph,
    Graph,
    RootedGraph,
    ball,
    degree_sequence,
    intersection_graph,
    loc_distance,
    read_bipartite,
    read_graph,
    write_bipartite,
    write_graph,
)

K3 = Graph.from_edges(3, [(0, 1), (1, 2), (0, 2)])
P3 = Graph.from_edges(3, [(0, 1), (1, 2)])


def path_graph(n):
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


class TestGraph:
    def test_from_edges_dedupes_and_symmetrizes(self):
        g = Graph.from_edges(3, [(0, 1), (1, 0), (0, 1), (1, 2)])
        assert g.edge_count == 2
        g.validate()
        assert list(g.neighbors(1)) == [0, 2]

    def test_rejects_self_loops_and_out_of_range(self):
        with pytest.raises(ValueError):
            Graph.from_edges(3, [(1, 1)])
        with pytest.raises(ValueError):
            Graph.from_edges(3, [(0, 3)])

    def test_degree_sequence_examples(self):
        assert degree_sequence(K3) == [2, 2, 2]
        star = Graph.from_edges(4, [(0, 1), (0, 2), (0, 3)])
        assert degree_sequence(star) == [3, 1, 1, 1]
        assert degree_sequence(Graph.empty(4)) == [0, 0, 0, 0]

    def test_has_edge(self):
        assert K3.has_edge(0, 2) and not P3.has_edge(0, 2)


class TestIntersectionGraph:
    def test_star_attribute_gives_triangle(self):
        H = BipartiteMultigraph.from_pairs(3, 1, [(0, 0), (1, 0), (2, 0)])
        assert list(intersection_graph(H).edges()) == [(0, 1), (0, 2), (1, 2)]

    def test_empty_gives_isolated_vertices(self):
        H = BipartiteMultigraph.from_pairs(5, 3, [])
        G = intersection_graph(H)
        assert G.vertex_count == 5 and G.edge_count == 0

    def test_alternating_path_projects_to_path(self):
        H = BipartiteMultigraph.from_pairs(3, 2, [(0, 0), (1, 0), (1, 1), (2, 1)])
        assert list(intersection_graph(H).edges()) == [(0, 1), (1, 2)]

    def test_multiplicities_collapse(self):
        H = BipartiteMultigraph.from_pairs(2, 1, [(0, 0), (0, 0), (1, 0)])
        assert H.mult.max() == 2
        G = intersection_graph(H)
        assert G.edge_count == 1

    def test_repeated_witnesses_collapse(self):
        # two attributes both containing {0, 1}
        H = BipartiteMultigraph.from_pairs(2, 2, [(0, 0), (1, 0), (0, 1), (1, 1)])
        assert intersection_graph(H).edge_count == 1

    def test_simple_and_symmetric_on_random_inputs(self, rng):
        for _ in range(30):
            n1, n2 = int(rng.integers(1, 15)), int(rng.integers(1, 15))
            m = int(rng.integers(0, 40))
            pairs = [(int(rng.integers(n1)), int(rng.integers(n2))) for _ in range(m)]
            G = intersection_graph(BipartiteMultigraph.from_pairs(n1, n2, pairs))
            assert G.vertex_count == n1
            G.validate()

    def test_part_degrees(self):
        H = BipartiteMultigraph.from_pairs(3, 2, [(0, 0), (0, 1), (2, 1), (2, 1)])
        assert H.part_degrees(1).tolist() == [3, 0, 1] or H.part_degrees(1).tolist() == [2, 0, 2]


class TestBall:
    def test_radius_zero_single_vertex(self):
        b = ball(K3, 1, 0)
        assert b.graph.vertex_count == 1 and b.root == 0

    def test_p3_endpoint_radius_one(self):
        b = ball(P3, 0, 1)
        assert b.graph.vertex_count == 2 and b.graph.edge_count == 1

    def test_k4_radius_one_is_k4(self):
        K4 = Graph.from_edges(4, [(i, j) for i in range(4) for j in range(i + 1, 4)])
        b = ball(K4, 2, 1)
        assert b.graph.vertex_count == 4 and b.graph.edge_count == 6

    def test_truncation_idempotent(self, rng):
        from tests.conftest import random_connected_graph

        for _ in range(20):
            g = random_connected_graph(rng)
            v = int(rng.integers(g.vertex_count))
            r = int(rng.integers(0, 4))
            s = int(rng.integers(0, r + 1))
            outer = ball(g, v, r)
            assert ball(outer.graph, 0, s).code == ball(g, v, s).code

    def test_radius_at_most_r(self, rng):
        from tests.conftest import random_connected_graph

        for _ in range(20):
            g = random_connected_graph(rng)
            v = int(rng.integers(g.vertex_count))
            r = int(rng.integers(0, 4))
            b = ball(g, v, r)
            # BFS depth from the root never exceeds r
            dist = {0: 0}
            frontier = [0]
            while frontier:
                nxt = []
                for u in frontier:
                    for w in b.graph.neighbors(u):
                        if int(w) not in dist:
                            dist[int(w)] = dist[u] + 1
                            nxt.append(int(w))
                frontier = nxt
            assert len(dist) == b.graph.vertex_count
            assert max(dist.values()) <= r


class TestLocDistance:
    def test_identical_graphs_capped(self):
        rg = RootedGraph(path_graph(6), 0)
        d = loc_distance(rg, rg, 10)
        assert d.value == Fraction(1, 1024) and d.capped

    def test_k2_vs_k3(self):
        d = loc_distance(RootedGraph(Graph.from_edges(2, [(0, 1)]), 0), RootedGraph(K3, 0), 5)
        assert d.value == 1 and d.agreement_radius == 0

    def test_paths_of_length_5_and_6(self):
        # length in edges: balls agree up to radius 5
        d = loc_distance(RootedGraph(path_graph(6), 0), RootedGraph(path_graph(7), 0), 10)
        assert d.value == Fraction(1, 32) and not d.capped

    def test_symmetry_and_ultrametric(self, rng):
        from tests.conftest import random_connected_graph

        graphs = [RootedGraph(random_connected_graph(rng, n_max=8), 0) for _ in range(12)]
        for i in range(len(graphs)):
            for j in range(i, len(graphs)):
                dij = loc_distance(graphs[i], graphs[j], 6).value
                assert dij == loc_distance(graphs[j], graphs[i], 6).value
                for k in range(len(graphs)):
                    dik = loc_distance(graphs[i], graphs[k], 6).value
                    dkj = loc_distance(graphs[k], graphs[j], 6).value
                    assert dij <= max(dik, dkj)


class TestSerialization:
    def test_graph_roundtrip(self, tmp_path, rng):
        from tests.conftest import random_graph

        for _ in range(5):
            g = random_graph(rng)
            p = tmp_path / "g.txt"
            write_graph(g, str(p))
            g2 = read_graph(str(p))
            assert g == g2

    def test_bipartite_roundtrip(self, tmp_path):
        H = BipartiteMultigraph.from_pairs(3, 2, [(0, 0), (0, 0), (1, 1), (2, 0)])
        p = tmp_path / "h.txt"
        write_bipartite(H, str(p))
        H2 = read_bipartite(str(p))
        assert H2.n1 == 3 and H2.n2 == 2
        assert np.array_equal(H2.mult, H.mult)
        assert np.array_equal(H2.edge_u, H.edge_u)
