import numpy as np
import pytest

from conftest import KAPPA, PRACTICAL, RHO, random_graph
from hopsets.builder import build_hopset
from hopsets.graph import Graph, all_pairs, dijkstra_oracle
from hopsets.query import HopsetIndex, mssd, sssd


def _index(g, **kw):
    return HopsetIndex.from_hopset(g, build_hopset(g, 0.5, KAPPA, RHO, **kw))


def test_isolated_source_reaches_nothing():
    g = Graph(4, [(1, 2, 1.0), (2, 3, 2.0)])
    d = sssd(_index(g), 0).dist
    assert d[0] == 0.0 and np.all(np.isinf(d[1:]))


def test_unit_path_is_exact():
    g = Graph(6, [(i, i + 1, 1.0) for i in range(5)])
    assert sssd(_index(g), 0).dist.tolist() == [0.0, 1.0, 2.0, 3.0, 4.0, 5.0]


def test_default_schedule_matches_dijkstra():
    g = random_graph(128, 200, seed=3, max_weight=1e9)
    idx = _index(g)
    for s in (0, 17, 100):
        np.testing.assert_allclose(sssd(idx, s).dist, dijkstra_oracle(g, s).dist, rtol=1e-12)


def test_practical_profile_bound_and_hops():
    g = random_graph(128, 200, seed=4, max_weight=1e9)
    idx = _index(g, **PRACTICAL)
    exact = all_pairs(g, range(0, 128, 8))
    for s, ex in zip(range(0, 128, 8), exact):
        dv = sssd(idx, s)
        assert np.all(dv.dist >= ex * (1 - 1e-12))
        assert np.all(dv.dist <= ex * 1.5 * (1 + 1e-9))
        assert dv.hops.max() <= idx.hopbound


def test_single_source_mssd_equals_sssd():
    g = random_graph(48, 60, seed=5)
    idx = _index(g, **PRACTICAL)
    a, b = mssd(idx, [7])[0], sssd(idx, 7)
    assert a.dist.tobytes() == b.dist.tobytes()


@pytest.mark.parametrize("threads", [1, 3])
def test_mssd_bitwise_equal_to_looping(threads):
    g = random_graph(64, 90, seed=6, max_weight=1e9)
    idx = _index(g, **PRACTICAL)
    sources = list(range(0, 64, 3))
    rows = mssd(idx, sources, threads=threads, chunk=4)
    for s, row in zip(sources, rows):
        one = sssd(idx, s)
        assert row.dist.tobytes() == one.dist.tobytes()
        assert row.hops.tobytes() == one.hops.tobytes()


def test_all_sources_small_graph():
    g = random_graph(32, 40, seed=7)
    idx = _index(g, **PRACTICAL)
    rows = mssd(idx, range(32))
    exact = all_pairs(g)
    got = np.vstack([r.dist for r in rows])
    assert np.all(got >= exact * (1 - 1e-12)) and np.all(got <= exact * 1.5 * (1 + 1e-9))
    assert np.all(np.diag(got) == 0.0)


def test_disjoint_components_stay_infinite():
    edges = [(i, i + 1, 1.0 + i) for i in range(9)] + [(i, i + 1, 2.0) for i in range(10, 19)]
    g = Graph(20, edges)
    rows = mssd(_index(g, **PRACTICAL), [0, 15])
    assert np.all(np.isinf(rows[0].dist[10:])) and np.all(np.isfinite(rows[0].dist[:10]))
    assert np.all(np.isinf(rows[1].dist[:10])) and np.all(np.isfinite(rows[1].dist[10:]))


def test_index_rejects_other_graph():
    g = random_graph(16, 10, seed=8)
    h = build_hopset(g, 0.5, KAPPA, RHO)
    other = random_graph(16, 10, seed=9)
    with pytest.raises(ValueError):
        HopsetIndex.from_hopset(other, h)


def test_empty_source_list_rejected():
    g = random_graph(8, 4, seed=1)
    with pytest.raises(ValueError):
        mssd(_index(g), [])
