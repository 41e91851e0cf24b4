import numpy as np

from bisq import (BisOracle, VertexSet, estimate_degrees,
                  estimate_degrees_with_neighbors, gen_family, gen_gnp,
                  predict_sketch_queries)
from bisq.graph import Graph
from bisq.params import Constants, deg_parts, deg_reps

FAST_C = Constants(c_T=8.0)


def test_isolated_vertex_estimate_zero():
    g = Graph.from_edges(8, [(1, 2), (2, 3)])
    o = BisOracle(g)
    table = estimate_degrees(o, VertexSet.from_indices(8, [0]), 0.25, seed=1,
                             constants=FAST_C)
    assert table.lookup(0) == 0.0


def test_star_center_estimate():
    n = 128
    g = gen_family("star", n=n)
    o = BisOracle(g)
    table = estimate_degrees(o, VertexSet.from_indices(n, [0]), 0.25, seed=2,
                             constants=FAST_C)
    est = table.lookup(0)
    assert 0.75 * (n - 1) <= est <= n - 1


def test_sandwich_small_statistical():
    g = gen_gnp(256, 0.05, seed=7)
    o = BisOracle(g)
    S = VertexSet.from_indices(256, list(range(0, 48)))
    eps = 0.25
    table = estimate_degrees(o, S, eps, seed=3, constants=FAST_C)
    d_s = sum(g.degree(v) for v in range(48))
    slack = eps ** 3 / np.log2(256) ** 2 * d_s
    ok = 0
    for i, v in enumerate(table.vertices):
        d = g.degree(int(v))
        if (1 - eps) * d <= table.d_hat[i] <= d + slack:
            ok += 1
    assert ok >= 0.85 * table.vertices.size


def test_minimum_is_monotone_in_reps():
    # estimates can only shrink as more repetitions contribute; check
    # t_min records the first repetition reaching the minimum
    g = gen_gnp(128, 0.08, seed=4)
    o = BisOracle(g)
    S = VertexSet.from_indices(128, list(range(16)))
    table = estimate_degrees(o, S, 0.3, seed=5, constants=FAST_C)
    assert (table.t_min >= 0).all()
    assert (table.t_min < deg_reps(128)).all()
    assert (table.d_hat <= 128).all()


def test_query_count_matches_dry_run_exactly():
    n = 128
    g = gen_gnp(n, 0.08, seed=9)
    for extended in (False, True):
        o = BisOracle(g)
        S = VertexSet.from_indices(n, list(range(24)))
        seed = ("dry", extended)
        if extended:
            estimate_degrees_with_neighbors(o, S, 0.3, seed=seed,
                                            constants=FAST_C)
        else:
            estimate_degrees(o, S, 0.3, seed=seed, constants=FAST_C)
        predicted = predict_sketch_queries(n, 24, 0.3, seed=seed,
                                           constants=FAST_C,
                                           extended=extended)
        assert o.ledger.bis_count == predicted


def test_single_round():
    g = gen_gnp(64, 0.1, seed=2)
    o = BisOracle(g)
    estimate_degrees(o, VertexSet.from_indices(64, list(range(10))), 0.3,
                     seed=1, constants=FAST_C)
    assert o.ledger.round_count == 1


def test_empty_subset():
    g = gen_gnp(32, 0.1, seed=2)
    o = BisOracle(g)
    table = estimate_degrees(o, VertexSet.empty(32), 0.3, seed=1,
                             constants=FAST_C)
    assert table.vertices.size == 0
    assert o.ledger.bis_count == 0


def test_partition_cell_count():
    assert deg_parts(1024, 0.25, False, Constants()) == int(
        np.ceil(0.25 ** -3 * 100))
    assert deg_parts(1024, 0.25, True, Constants()) == int(
        np.ceil(0.25 ** -4 * 100))


def test_neighbor_table_uniformity_star_like():
    # one heavy vertex: its candidate neighbor is near-uniform over leaves
    from scipy.stats import chisquare
    n = 64
    deg = 6
    g = Graph.from_edges(n, [(0, i) for i in range(1, deg + 1)])
    counts = {i: 0 for i in range(1, deg + 1)}
    missing = 0
    for seed in range(120):
        o = BisOracle(g)
        _, ntable = estimate_degrees_with_neighbors(
            o, VertexSet.from_indices(n, [0]), 0.25, seed=("nt", seed),
            constants=FAST_C)
        u = int(ntable.neighbor[0])
        if u < 0:
            missing += 1
        else:
            assert g.has_edge(0, u)
            counts[u] += 1
    assert missing <= 10
    stat, p = chisquare(list(counts.values()))
    assert p > 0.005, counts


def test_neighbor_absent_for_isolated_vertex():
    g = Graph.from_edges(8, [(1, 2)])
    o = BisOracle(g)
    _, ntable = estimate_degrees_with_neighbors(
        o, VertexSet.from_indices(8, [0]), 0.25, seed=4, constants=FAST_C)
    assert ntable.neighbor[0] == -1


def test_heavy_vertex_neighbor_mostly_adjacent():
    # vertex with degree dominating its cell: candidate adjacent to it
    # in all but a small fraction of runs
    n = 96
    edges = [(0, i) for i in range(1, 25)] + [(40, 41), (42, 43)]
    g = Graph.from_edges(n, edges)
    bad = 0
    runs = 60
    for seed in range(runs):
        o = BisOracle(g)
        S = VertexSet.from_indices(n, [0, 40, 42])
        _, ntable = estimate_degrees_with_neighbors(
            o, S, 0.25, seed=("heavy", seed), constants=FAST_C)
        u = int(ntable.neighbor[0])
        if u < 0 or not g.has_edge(0, u):
            bad += 1
    assert bad <= 0.25 * runs
