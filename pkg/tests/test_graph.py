import numpy as np
import pytest

from graphgen import (
    FIXTURE_EDGES,
    FIXTURE_PRIVATE,
    path_edges,
    random_connected_edges,
    star_edges,
)
from oracles import flood_fill_public_clusters

from privwalk import (
    GraphError,
    assign_labels_bernoulli,
    build_graph,
    largest_public_cluster,
)


def test_path_graph_basics():
    g = build_graph(path_edges(3), [False] * 3)
    assert g.node_count == 3
    assert list(g.degrees) == [1, 2, 1]
    assert g.degree_sum == 4
    assert list(g.neighbors(1)) == [0, 2]
    assert g.label_origin.kind == "all_public"


def test_adjacency_is_symmetric_and_sorted():
    g = build_graph(random_connected_edges(50, 80, seed=3), [False] * 50)
    assert g.degree_sum % 2 == 0
    for v in range(50):
        nbrs = g.neighbors(v)
        assert list(nbrs) == sorted(nbrs)
        for w in nbrs:
            assert v in g.neighbors(int(w))


def test_build_graph_rejects_disconnected():
    with pytest.raises(GraphError, match="not connected"):
        build_graph([(0, 1), (2, 3)], [False] * 4)


def test_build_graph_rejects_out_of_range():
    with pytest.raises(GraphError, match="outside"):
        build_graph([(0, 5)], [False] * 3)


def test_build_graph_duplicate_and_self_loop_policy():
    with pytest.raises(GraphError, match="duplicate"):
        build_graph([(0, 1), (1, 0)], [False] * 2)
    with pytest.raises(GraphError, match="self-loop"):
        build_graph([(0, 0), (0, 1)], [False] * 2)
    g = build_graph([(0, 1), (1, 0), (1, 1), (1, 2)], [False] * 3, drop_duplicates=True)
    assert g.edge_count == 2


def test_labels_from_strings():
    g = build_graph([(0, 1), (1, 2)], ["public", "private", "public"])
    assert list(g.is_private) == [False, True, False]


def test_bernoulli_extremes_are_exact():
    g = build_graph(path_edges(40), [False] * 40)
    assert assign_labels_bernoulli(g, 0.0, 1).private_count == 0
    assert assign_labels_bernoulli(g, 1.0, 1).private_count == 40
    with pytest.raises(GraphError):
        assign_labels_bernoulli(g, 1.5, 1)


def test_bernoulli_is_deterministic_and_shares_adjacency():
    g = build_graph(path_edges(30), [False] * 30)
    g1 = assign_labels_bernoulli(g, 0.4, 123)
    g2 = assign_labels_bernoulli(g, 0.4, 123)
    assert np.array_equal(g1.is_private, g2.is_private)
    assert g1.indices is g.indices
    assert g1.label_origin.kind == "bernoulli" and g1.label_origin.p == 0.4


def test_bernoulli_private_fraction_concentrates():
    g = build_graph(random_connected_edges(10000, 5000, seed=9), [False] * 10000)
    fractions = [
        assign_labels_bernoulli(g, 0.3, seed).private_fraction for seed in range(1000)
    ]
    sigma = np.sqrt(0.3 * 0.7 / 10000)
    assert abs(np.mean(fractions) - 0.3) < 3 * sigma


def test_fixture_cluster_decomposition(fixture_graph):
    view = largest_public_cluster(fixture_graph)
    assert view.member_count == 5
    assert list(view.members) == [3, 4, 5, 6, 8]
    assert [int(view.public_degree[v]) for v in (3, 4, 5, 6, 8)] == [1, 4, 1, 1, 1]
    assert view.public_degree_sum == 8
    assert view.cluster_census == ((5, 1), (2, 1), (1, 1))
    # fixture degrees: node 3 keeps its private neighbor in the full degree
    assert fixture_graph.degree(3) == 2
    assert fixture_graph.degree(4) == 4


def test_all_public_cluster_is_whole_graph():
    g = build_graph(random_connected_edges(60, 90, seed=4), [False] * 60)
    view = largest_public_cluster(g)
    assert view.member_count == 60
    assert np.array_equal(view.public_degree, g.degrees)
    assert view.public_degree_sum == g.degree_sum


def test_cluster_matches_flood_fill_oracle():
    edges = random_connected_edges(100, 150, seed=21)
    g = build_graph(edges, [False] * 100)
    for seed in range(6):
        gl = assign_labels_bernoulli(g, 0.5, seed)
        clusters = flood_fill_public_clusters(edges, list(gl.is_private))
        if not clusters:
            continue
        best = max(clusters, key=lambda c: (len(c), -min(c)))
        view = largest_public_cluster(gl)
        assert set(view.members.tolist()) == best
        # census covers every public node exactly once
        assert sum(s * c for s, c in view.cluster_census) == 100 - gl.private_count
        sizes = sorted((len(c) for c in clusters), reverse=True)
        expanded = [s for s, c in view.cluster_census for _ in range(c)]
        assert expanded == sizes
        # membership public degrees count in-cluster neighbors only
        for v in view.members:
            expect = sum(1 for w in gl.neighbors(v) if w in best)
            assert view.public_degree[v] == expect
            assert 0 <= view.public_degree[v] <= gl.degree(int(v))


def test_cluster_tie_breaks_toward_smallest_node_id():
    # two public pairs {1,2} and {4,5} bridged by private nodes 0 and 3
    edges = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0)]
    labels = [True, False, False, True, False, False]
    view = largest_public_cluster(build_graph(edges, labels))
    assert view.member_count == 2
    assert list(view.members) == [1, 2]


def test_no_public_nodes_is_an_error():
    g = build_graph(path_edges(4), [True] * 4)
    with pytest.raises(GraphError, match="no public node"):
        largest_public_cluster(g)


def test_star_cluster_degrees():
    g = build_graph(star_edges(8), [False] * 8)
    gl = g.with_labels([False] + [False] * 4 + [True] * 3, g.label_origin)
    view = largest_public_cluster(gl)
    assert view.member_count == 5
    assert view.public_degree[0] == 4
