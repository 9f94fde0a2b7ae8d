import itertools
import math

import pytest
from hypothesis import given, settings, strategies as st

from hopsets.exploration import (ClusterPartition, cluster_bfs, detect_popular, limited_bfs,
                                 record_origin, record_path, sort_dedup)
from hopsets.graph import Graph, MergedGraph, bounded_bellman_ford
from hopsets.ruling import virtual_bfs

from conftest import random_graph


def path_graph(n, w=1.0):
    return Graph(n, [(i, i + 1, w) for i in range(n - 1)])


def star_graph(leaves):
    return Graph(leaves + 1, [(0, i, 1.0) for i in range(1, leaves + 1)])


def brute_cluster_distances(g, p, hopbound):
    """Hop-bounded distance between every pair of clusters, by per-vertex Bellman-Ford."""
    rows = {v: bounded_bellman_ford(g, [v], hopbound).dist for v in range(g.n)}
    out = {}
    for a, b in itertools.product(p.ids, repeat=2):
        out[(a, b)] = min(rows[u][v] for u in p.clusters[a] for v in p.clusters[b])
    return out


# -- sort_dedup

def test_sort_dedup_keeps_smallest():
    assert sort_dedup([(5, 3.0), (5, 1.0), (2, 4.0)]) == [(5, 1.0), (2, 4.0)]


def test_sort_dedup_empty():
    assert sort_dedup([]) == []


def test_sort_dedup_duplicates():
    assert sort_dedup([(1, 2.0), (1, 2.0)]) == [(1, 2.0)]


@given(st.lists(st.tuples(st.integers(0, 6), st.floats(0, 100)) | st.none(), max_size=30))
def test_sort_dedup_properties(recs):
    out = sort_dedup(recs)
    ids = [r[0] for r in out]
    assert len(ids) == len(set(ids))
    assert out == sorted(out, key=lambda r: (r[1], r[0]))
    for s, d in out:
        assert d == min(r[1] for r in recs if r is not None and r[0] == s)


# -- limited BFS

def test_limited_bfs_path_trace():
    g = path_graph(3)
    res = limited_bfs(MergedGraph(g), ClusterPartition.singletons(3), [0], 10.0, 3, 1)
    assert (0, 1.0) in res.table(1)
    assert (0, 2.0) in res.table(2)


def test_limited_bfs_threshold_excludes_neighbours():
    g = path_graph(4)
    p = ClusterPartition.singletons(4)
    res = limited_bfs(MergedGraph(g), p, p.ids, 0.5, 3, 1)
    for c in p.ids:
        assert res.table(c) == [(c, 0.0)]


def test_limited_bfs_star_lists_everything():
    g = star_graph(4)
    p = ClusterPartition.singletons(5)
    res = limited_bfs(MergedGraph(g), p, p.ids, 2.0, 2, 5)
    want = brute_cluster_distances(g, p, 2)
    for c in p.ids:
        assert sorted(res.table(c)) == sorted((s, want[(s, c)]) for s in p.ids)


def test_limited_bfs_rejects_bad_arguments():
    g = path_graph(3)
    with pytest.raises(ValueError):
        limited_bfs(MergedGraph(g), ClusterPartition.singletons(3), [0], 0.0, 3, 1)


@settings(max_examples=30, deadline=None)
@given(st.integers(3, 14), st.integers(0, 20), st.integers(0, 9999), st.integers(1, 4),
       st.floats(1.0, 300.0))
def test_limited_bfs_matches_brute_force(n, extra, seed, x, thr):
    """Each cluster receives the x closest sources within the threshold."""
    g = random_graph(n, extra, seed, max_weight=100.0)
    # clusters: consecutive pairs
    clusters = {v: tuple(range(v, min(v + 2, n))) for v in range(0, n, 2)}
    p = ClusterPartition(n, clusters)
    hop = 3
    res = limited_bfs(MergedGraph(g), p, p.ids, thr, hop, x)
    want = brute_cluster_distances(g, p, hop)
    for c in p.ids:
        close = sorted((want[(s, c)], s) for s in p.ids if want[(s, c)] <= thr)
        got = [(d, s) for s, d in res.table(c)]
        assert [s for _, s in got] == [s for _, s in close[:x]]
        for d, s in got:
            assert math.isclose(d, want[(s, c)], rel_tol=1e-12)


def test_record_path_realises_distance():
    g = random_graph(12, 10, seed=3, max_weight=50.0)
    p = ClusterPartition.singletons(12)
    res = limited_bfs(MergedGraph(g), p, [0], 1e9, 11, 1)
    for c in p.ids:
        for rec in res.m.get(c, []):
            verts, refs = record_path(rec)
            assert record_origin(rec) == verts[0] == 0 and verts[-1] in p.clusters[c]
            total = sum(g.edges[r[1]][2] for r in refs)
            assert math.isclose(total, rec[1], rel_tol=1e-12)


# -- popularity

def test_star_all_popular():
    g = star_graph(5)
    p = ClusterPartition.singletons(6)
    pop = detect_popular(MergedGraph(g), p, 3, 2.0, 2)
    # brute force: every pair of star vertices is within distance 2
    want = brute_cluster_distances(g, p, 2)
    assert all(sum(want[(c, d)] <= 2.0 for d in p.ids if d != c) >= 3 for c in p.ids)
    assert pop.popular == set(p.ids)


def test_path_none_popular():
    g = path_graph(3)
    p = ClusterPartition.singletons(3)
    pop = detect_popular(MergedGraph(g), p, 3, 1.0, 3)
    assert pop.popular == set()
    assert len(pop.neighbors[0]) == 1 and len(pop.neighbors[2]) == 1
    assert len(pop.neighbors[1]) == 2


def test_single_cluster_not_popular():
    g = Graph(1, [])
    pop = detect_popular(MergedGraph(g), ClusterPartition.singletons(1), 1, 1.0, 1)
    assert pop.popular == set() and pop.neighbors == {0: []}


# -- cluster BFS

def test_cluster_bfs_path_depth_two():
    g = path_graph(5)
    p = ClusterPartition.singletons(5)
    res = cluster_bfs(MergedGraph(g), p, [0], 2, 1.0, 3)
    adj = {i: [j for j in (i - 1, i + 1) if 0 <= j < 5] for i in range(5)}
    assert res.detected == set(virtual_bfs(adj, [0], 2)) == {0, 1, 2}


def test_cluster_bfs_no_sources():
    g = path_graph(5)
    assert cluster_bfs(MergedGraph(g), ClusterPartition.singletons(5), [], 3, 1.0, 3).detected == set()


def test_cluster_bfs_depth_zero():
    g = path_graph(5)
    p = ClusterPartition.singletons(5)
    res = cluster_bfs(MergedGraph(g), p, p.ids, 0, 1.0, 3)
    assert res.source == {c: c for c in p.ids}


@settings(max_examples=30, deadline=None)
@given(st.integers(3, 16), st.integers(0, 25), st.integers(0, 9999), st.integers(0, 4),
       st.floats(1.0, 200.0))
def test_cluster_bfs_matches_virtual_graph(n, extra, seed, depth, thr):
    g = random_graph(n, extra, seed, max_weight=100.0)
    p = ClusterPartition.singletons(n)
    hop = 3
    want = brute_cluster_distances(g, p, hop)
    adj = {a: [b for b in p.ids if b != a and want[(a, b)] <= thr] for a in p.ids}
    sources = [c for c in p.ids if c % 5 == 0]
    res = cluster_bfs(MergedGraph(g), p, sources, depth, thr, hop)
    levels = virtual_bfs(adj, sources, depth)
    assert res.detected == set(levels)
    for c, lvl in res.level.items():
        assert lvl == levels[c]
