import random

import pytest

from commbench.graph import (
    Graph,
    Partition,
    connected_components,
    degree,
    edge_triangle_count,
    quotient_graph,
    read_edge_list,
    read_membership,
    write_edge_list,
    write_membership,
)

from conftest import clique_edges, make_clique_pair


def random_graph(n, p, rng):
    edges = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p]
    return Graph(n, edges)


class TestGraphConstruction:
    def test_rejects_self_loop(self):
        with pytest.raises(ValueError, match="self-loop"):
            Graph(3, [(0, 0)])

    def test_rejects_duplicate_edge(self):
        with pytest.raises(ValueError, match="duplicate"):
            Graph(3, [(0, 1), (1, 0)])

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError, match="out of range"):
            Graph(3, [(0, 3)])

    def test_rejects_empty_node_set(self):
        with pytest.raises(ValueError):
            Graph(0, [])

    def test_degree_sum_equals_twice_edge_count(self):
        rng = random.Random(7)
        for _ in range(20):
            g = random_graph(rng.randrange(1, 30), rng.random(), rng)
            assert sum(g.degrees()) == 2 * g.edge_count


class TestDegree:
    def test_triangle_every_node(self, triangle):
        for v in range(3):
            assert degree(triangle, v) == 2

    def test_single_edge(self):
        g = Graph(2, [(0, 1)])
        assert degree(g, 0) == 1

    def test_isolated_node(self):
        g = Graph(2, [])
        assert degree(g, 0) == 0

    def test_out_of_range_errors(self, triangle):
        with pytest.raises(ValueError):
            degree(triangle, 3)


class TestEdgeTriangleCount:
    def test_triangle_edge(self, triangle):
        assert edge_triangle_count(triangle, 0, 1) == 1

    def test_path_edge_has_no_closure(self):
        g = Graph(3, [(0, 1), (1, 2)])
        assert edge_triangle_count(g, 0, 1) == 0

    def test_complete_four(self):
        g = Graph(4, clique_edges(range(4)))
        for u, v in g.edges:
            assert edge_triangle_count(g, u, v) == 2

    def test_non_edge_errors(self):
        g = Graph(3, [(0, 1), (1, 2)])
        with pytest.raises(ValueError, match="not an edge"):
            edge_triangle_count(g, 0, 2)

    def test_bounded_by_min_degree(self):
        rng = random.Random(11)
        for _ in range(10):
            g = random_graph(rng.randrange(2, 25), rng.random(), rng)
            for u, v in g.edges:
                assert edge_triangle_count(g, u, v) <= min(g.degree(u), g.degree(v)) - 1


class TestConnectedComponents:
    def test_two_cliques(self, two_triangles):
        part = connected_components(two_triangles)
        assert part.num_communities == 2
        assert sorted(part.community_sizes) == [3, 3]

    def test_path_is_one_component(self):
        g = Graph(5, [(i, i + 1) for i in range(4)])
        assert connected_components(g).num_communities == 1

    def test_edgeless_graph_is_all_singletons(self):
        g = Graph(4, [])
        part = connected_components(g)
        assert part.num_communities == 4

    def test_idempotent_on_each_component(self, two_triangles):
        part = connected_components(two_triangles)
        # Re-running on the subgraph induced by each component yields one
        # community per component.
        for nodes in part.communities():
            idx = {v: i for i, v in enumerate(nodes)}
            sub_edges = [
                (idx[u], idx[v])
                for u, v in two_triangles.edges
                if u in idx and v in idx
            ]
            sub = Graph(len(nodes), sub_edges)
            assert connected_components(sub).num_communities == 1


class TestQuotientGraph:
    def test_bridged_cliques(self, bridged_triangles):
        part = Partition([0, 0, 0, 1, 1, 1])
        q = quotient_graph(bridged_triangles, part)
        assert q.node_count == 2
        assert q.self_loops == [6.0, 6.0]
        assert q.neighbors(0) == [(1, 1.0)]

    def test_singleton_partition_copies_graph(self, triangle):
        part = Partition([0, 1, 2])
        q = quotient_graph(triangle, part)
        assert q.self_loops == [0.0, 0.0, 0.0]
        assert sorted(q.neighbors(0)) == [(1, 1.0), (2, 1.0)]

    def test_all_in_one(self, bridged_triangles):
        part = Partition([0] * 6)
        q = quotient_graph(bridged_triangles, part)
        assert q.self_loops == [2.0 * bridged_triangles.edge_count]

    def test_total_strength_conserved(self):
        rng = random.Random(3)
        for _ in range(10):
            g = random_graph(rng.randrange(2, 20), 0.4, rng)
            member = [rng.randrange(3) for _ in range(g.node_count)]
            part = Partition.from_labels(member)
            q = quotient_graph(g, part)
            assert q.total_strength == pytest.approx(2 * g.edge_count)

    def test_weighted_quotient_of_quotient(self, bridged_triangles):
        # Collapsing twice conserves strength as well.
        part = Partition([0, 0, 0, 1, 1, 1])
        q = quotient_graph(bridged_triangles, part)
        q2 = quotient_graph(q, Partition([0, 0]))
        assert q2.self_loops == [2.0 * bridged_triangles.edge_count]


class TestPartition:
    def test_rejects_gap_in_ids(self):
        with pytest.raises(ValueError):
            Partition([0, 2])

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            Partition([])

    def test_from_labels_compacts(self):
        part = Partition.from_labels(["b", "a", "b", "c"])
        assert part.membership == (0, 1, 0, 2)
        assert part.community_sizes == (2, 1, 1)

    def test_sizes_sum_to_node_count(self):
        part = Partition([0, 1, 1, 2, 0])
        assert sum(part.community_sizes) == part.node_count

    def test_communities_listing(self):
        part = Partition([0, 1, 0])
        assert part.communities() == [[0, 2], [1]]


class TestIO:
    def test_edge_list_round_trip(self, tmp_path, bridged_triangles):
        path = tmp_path / "g.edges"
        write_edge_list(bridged_triangles, path)
        back = read_edge_list(path)
        assert back.node_count == bridged_triangles.node_count
        assert back.edges == bridged_triangles.edges

    def test_edge_list_ignores_comments(self, tmp_path):
        path = tmp_path / "g.edges"
        path.write_text("# header\n0 1\n\n1 2\n")
        g = read_edge_list(path)
        assert g.node_count == 3
        assert g.edges == [(0, 1), (1, 2)]

    def test_edge_list_explicit_node_count(self, tmp_path):
        path = tmp_path / "g.edges"
        path.write_text("0 1\n")
        assert read_edge_list(path, node_count=4).node_count == 4

    def test_membership_round_trip(self, tmp_path):
        part = Partition([0, 1, 1, 0, 2])
        path = tmp_path / "p.membership"
        write_membership(part, path)
        assert read_membership(path) == part

    def test_membership_rejects_double_assignment(self, tmp_path):
        path = tmp_path / "p.membership"
        path.write_text("0 0\n0 1\n1 0\n")
        with pytest.raises(ValueError, match="twice"):
            read_membership(path)
