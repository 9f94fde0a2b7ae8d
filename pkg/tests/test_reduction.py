import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hopsets.audit import no_shortening, size_bounds
from hopsets.builder import build_hopset
from hopsets.graph import Graph, MergedGraph, all_pairs, bellman_ford_rows
from hopsets.reduction import (UnionFind, build_reduced_hopset, build_scale_graph,
                               contraction_threshold, relevant_scales, select_centers)

from conftest import KAPPA, PRACTICAL, RHO, random_graph


def brute_relevant(g, eps):
    return sorted(k for k in range(-60, 80)
                  if any(contraction_threshold(eps, g.n, k) < w <= 2.0 ** (k + 1)
                         for _, _, w in g.edges))


def test_union_find():
    uf = UnionFind(5)
    assert uf.union(0, 1) and uf.union(3, 4) and not uf.union(1, 0)
    assert uf.find(0) == uf.find(1) != uf.find(3)


def test_relevant_scales_single_edge():
    g = Graph(4, [(0, 1, 10.0)])
    # windows ((1/8) 2^k, 2^(k+1)] contain 10 for k = 3..6
    assert relevant_scales(g, 0.5) == brute_relevant(g, 0.5) == [3, 4, 5, 6]


def test_relevant_scales_empty():
    assert relevant_scales(Graph(3, []), 0.5) == []


def test_relevant_scales_unit_weights():
    g = Graph(8, [(i, i + 1, 1.0) for i in range(7)])
    ks = relevant_scales(g, 0.5)
    assert ks == brute_relevant(g, 0.5)
    # t_k < 1 <= 2^(k+1): k from -1 up to log2(n/eps) - 1
    assert ks == list(range(-1, 4))


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 12), st.integers(0, 20), st.integers(0, 9999),
       st.sampled_from([0.05, 0.1, 0.5, 1.0]))
def test_relevant_scales_match_enumeration(n, extra, seed, eps):
    g = random_graph(n, extra, seed, max_weight=1e5)
    assert relevant_scales(g, eps) == brute_relevant(g, eps)


def test_scale_graph_worked_example():
    # a-b-c-d with weights 1, 10, 100; n = 4, eps = 1/2, k = 5: threshold 4, cap 64
    g = Graph(4, [(0, 1, 1.0), (1, 2, 10.0), (2, 3, 100.0)])
    sg = build_scale_graph(g, 0.5, 5)
    assert sg.threshold == 4.0 and sg.cap == 64.0
    assert sg.nodes == [(0, 1), (2,), (3,)]
    assert len(sg.superedges) == 1
    se = sg.superedges[0]
    assert (sg.nodes[se.x], sg.nodes[se.y]) == ((0, 1), (2,))
    assert se.w == 10 + 3 * 4 and (se.a, se.b, se.edge) == (1, 2, 1)


def test_scale_graph_all_heavy():
    g = Graph(3, [(0, 1, 1000.0), (1, 2, 2000.0)])
    sg = build_scale_graph(g, 0.5, 1)
    assert sg.nodes == [(0,), (1,), (2,)] and sg.superedges == []


def test_scale_graph_all_light():
    g = Graph(3, [(0, 1, 0.1), (1, 2, 0.2)])
    sg = build_scale_graph(g, 0.5, 10)
    assert sg.nodes == [(0, 1, 2)] and sg.superedges == []


@settings(max_examples=30, deadline=None)
@given(st.integers(3, 16), st.integers(0, 30), st.integers(0, 9999))
def test_superedges_never_undercut(n, extra, seed):
    """A padded superedge is at least the distance between any two of its members."""
    g = random_graph(n, extra, seed, max_weight=1e4)
    exact = all_pairs(g)
    eps = 0.5
    for k in relevant_scales(g, eps):
        sg = build_scale_graph(g, eps, k)
        for se in sg.superedges:
            worst = max(exact[a, b] for a in sg.nodes[se.x] for b in sg.nodes[se.y])
            assert se.w >= worst * (1 - 1e-12)


def test_center_of_base_node_is_smallest_id():
    g = Graph(10, [(3, 7, 0.01), (7, 9, 0.02), (0, 3, 50.0), (1, 2, 60.0)])
    eps = 0.5
    sgs = [build_scale_graph(g, eps, k) for k in relevant_scales(g, eps)]
    stars = select_centers(g, sgs)
    first = next(sg for sg in sgs if (3, 7, 9) in sg.nodes)
    assert first.centers[first.nodes.index((3, 7, 9))] == 3
    assert stars.lookup(3, 7).w == 0.01
    assert math.isclose(stars.lookup(3, 9).w, 0.03)
    assert stars.lookup(3, 9).tree_parent == 7


def test_larger_child_keeps_its_center():
    # X1 = {0,1,2} and X2 = {3,4} form at a low scale and merge later through (2,3)
    # the heavy edge to vertex 5 keeps scales relevant until (2,3) is contracted
    g = Graph(6, [(0, 1, 0.01), (1, 2, 0.01), (3, 4, 0.01), (2, 3, 5.0), (4, 5, 1e4)])
    eps = 0.5
    sgs = [build_scale_graph(g, eps, k) for k in relevant_scales(g, eps)]
    stars = select_centers(g, sgs)
    before = next(sg for sg in sgs if (0, 1, 2) in sg.nodes and (3, 4) in sg.nodes)
    assert before.centers[before.nodes.index((3, 4))] == 3
    merged = next(sg for sg in sgs if (0, 1, 2, 3, 4) in sg.nodes)
    assert merged.centers[merged.nodes.index((0, 1, 2, 3, 4))] == 0
    assert math.isclose(stars.lookup(0, 3).w, 5.02)
    assert math.isclose(stars.lookup(0, 4).w, 5.03)
    assert stars.lookup(3, 4) is not None


@pytest.mark.parametrize("seed", range(4))
def test_star_count_bound(seed):
    g = random_graph(96, 150, seed, max_weight=1e9)
    eps = 0.5 / 6
    sgs = [build_scale_graph(g, eps, k) for k in relevant_scales(g, eps)]
    stars = select_centers(g, sgs)
    assert len(stars.stars) <= g.n * math.log2(g.n)
    # every star weight is the tree distance, never below the graph distance
    exact = all_pairs(g, sorted({s.center for s in stars.stars}))
    rows = {c: i for i, c in enumerate(sorted({s.center for s in stars.stars}))}
    for s in stars.stars:
        assert s.w >= exact[rows[s.center], s.member] * (1 - 1e-12)


@pytest.fixture(scope="module")
def reduced_build():
    rng = np.random.default_rng(7)
    n = 128
    edges = [(i, i + 1, float(10 ** rng.uniform(0, 10))) for i in range(n - 1)]
    edges += [(int(a), int(b), float(10 ** rng.uniform(0, 10)))
              for a, b in rng.integers(0, n, (150, 2))]
    g = Graph(n, edges)
    return g, build_reduced_hopset(g, 0.5, KAPPA, RHO, **PRACTICAL)


def test_reduced_hopbound_and_sizes(reduced_build):
    g, h = reduced_build
    assert h.mode == "reduced" and h.hopbound == 6 * h.schedule.beta + 5
    sb = size_bounds(h)
    assert sb["stars_ok"] and sb["per_scale_ok"]
    assert h.size <= 2 * g.n ** (1 + 1 / KAPPA) * math.log2(g.n)


def test_reduced_no_shortening(reduced_build):
    g, h = reduced_build
    assert no_shortening(g, h) >= 1 - 1e-9


def test_reduced_stretch_wide_weights(reduced_build):
    g, h = reduced_build
    exact = all_pairs(g)
    d = np.array([r.dist for r in bellman_ford_rows(MergedGraph(g, h.extra_edges()),
                                                      range(g.n), h.hopbound)])
    ok = np.isfinite(exact) & (exact > 0)
    assert np.all(d[ok] <= 1.5 * exact[ok] * (1 + 1e-9))


def test_reduced_default_schedule_matches_direct():
    g = random_graph(48, 80, seed=3, max_weight=50.0)     # Lambda well below n / eps
    exact = all_pairs(g)
    ok = np.isfinite(exact) & (exact > 0)
    out = []
    for h in (build_hopset(g, 0.5, KAPPA, RHO), build_reduced_hopset(g, 0.5, KAPPA, RHO)):
        d = np.array([r.dist for r in bellman_ford_rows(MergedGraph(g, h.extra_edges()),
                                                          range(g.n), h.hopbound)])
        out.append(d[ok] / exact[ok])
    assert np.all(out[0] <= 1.5) and np.all(out[1] <= 1.5)
    assert np.allclose(out[0], out[1], rtol=1e-12)


def test_reduced_deterministic():
    g = random_graph(40, 60, seed=9, max_weight=1e8)
    a = build_reduced_hopset(g, 0.5, KAPPA, RHO, **PRACTICAL)
    b = build_reduced_hopset(g, 0.5, KAPPA, RHO, **PRACTICAL)
    assert a.extra_edges() == b.extra_edges()
