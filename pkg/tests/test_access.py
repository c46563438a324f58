import numpy as np
import pytest

from graphgen import regular_edges

from privwalk import (
    AccessModel,
    PrivateNodeError,
    PubdegMode,
    QueryLedger,
    build_graph,
    is_public_via_model,
    largest_public_cluster,
    probe_all_neighbors,
    query_node,
    run_walk,
)


def test_ideal_report_carries_labels(fixture_graph):
    ledger = QueryLedger()
    ledger.begin_sample()
    rep = query_node(fixture_graph, 4, AccessModel.IDEAL, ledger)
    assert rep.model is AccessModel.IDEAL
    assert rep.degree == 4
    assert dict(rep.entries) == {3: "public", 5: "public", 6: "public", 8: "public"}
    assert ledger.raw_queries == 1

    rep3 = query_node(fixture_graph, 3, AccessModel.IDEAL, ledger)
    assert dict(rep3.entries) == {1: "private", 4: "public"}


def test_hidden_report_hides_labels(fixture_graph):
    rep = query_node(fixture_graph, 3, AccessModel.HIDDEN)
    assert rep.neighbor_private is None
    assert [u for u, flag in rep.entries] == [1, 4]
    assert all(flag is None for _, flag in rep.entries)


def test_private_node_rejects_query_but_charges(fixture_graph):
    ledger = QueryLedger()
    ledger.begin_sample()
    with pytest.raises(PrivateNodeError) as exc:
        query_node(fixture_graph, 1, AccessModel.HIDDEN, ledger)
    assert exc.value.node == 1
    # the refused request still consumed a query
    assert ledger.raw_queries == 1


def test_label_check_costs_vary_by_model(fixture_graph):
    ledger = QueryLedger()
    ledger.begin_sample()
    assert is_public_via_model(fixture_graph, 5, AccessModel.IDEAL, ledger)
    assert ledger.raw_queries == 0
    assert is_public_via_model(fixture_graph, 5, AccessModel.HIDDEN, ledger)
    assert not is_public_via_model(fixture_graph, 1, AccessModel.HIDDEN, ledger)
    assert ledger.raw_queries == 2


def test_probe_all_neighbors_charges_degree(fixture_graph):
    ledger = QueryLedger()
    ledger.begin_sample()
    flags = probe_all_neighbors(fixture_graph, 3, ledger)
    assert list(flags) == [False, True]
    assert ledger.raw_queries == fixture_graph.degree(3) == 2


def test_ledger_per_sample_partition():
    ledger = QueryLedger()
    for k in range(5):
        ledger.begin_sample()
        for v in range(k + 1):
            ledger.charge(v)
    assert ledger.per_sample_queries == [1, 2, 3, 4, 5]
    assert ledger.raw_queries == 15
    assert sum(ledger.per_sample_queries) == ledger.raw_queries


def test_ledger_memoization_dedupes_repeats():
    plain = QueryLedger()
    memo = QueryLedger(memoize=True)
    for ledger in (plain, memo):
        ledger.begin_sample()
        ledger.charge(7)
        ledger.charge(7)
        ledger.charge_many(np.array([7, 8, 8]))
    assert plain.raw_queries == 5
    assert memo.raw_queries == 2
    assert memo.unique_queried == {7, 8}


def test_ideal_walk_charges_one_query_per_sample(fixture_graph):
    r = 500
    rec = run_walk(
        fixture_graph, AccessModel.IDEAL, 4, r, PubdegMode.EXACT_IDEAL, rng_seed=7
    )
    assert rec.ledger.raw_queries == r
    assert rec.ledger.per_sample_queries == [1] * r


def test_hidden_exact_walk_on_regular_graph_charges_r_times_d():
    d = 6
    g = build_graph(regular_edges(60, d, seed=2), [False] * 60)
    r = 400
    rec = run_walk(g, AccessModel.HIDDEN, 0, r, PubdegMode.EXACT_HIDDEN, rng_seed=5)
    # every sample probes all d neighbors; reselection never happens with all
    # nodes public, and probe reports double as the next sample's data
    assert rec.ledger.raw_queries == r * d
    assert rec.ledger.per_sample_queries == [d] * r


def test_visit_counting_flag_adds_one_per_sample():
    d = 4
    g = build_graph(regular_edges(40, d, seed=3), [False] * 40)
    r = 200
    base = run_walk(g, AccessModel.HIDDEN, 0, r, PubdegMode.EXACT_HIDDEN, rng_seed=11)
    counted = run_walk(
        g,
        AccessModel.HIDDEN,
        0,
        r,
        PubdegMode.EXACT_HIDDEN,
        rng_seed=11,
        count_visit_queries=True,
    )
    assert np.array_equal(base.nodes, counted.nodes)
    assert counted.ledger.raw_queries == base.ledger.raw_queries + r


def test_walk_per_sample_queries_sum_to_raw(fixture_graph):
    view = largest_public_cluster(fixture_graph)
    for mode in PubdegMode:
        rec = run_walk(
            fixture_graph, mode.access_model, 4, 300, mode, rng_seed=13, view=view
        )
        assert len(rec.ledger.per_sample_queries) == 300
        assert sum(rec.ledger.per_sample_queries) == rec.ledger.raw_queries
