"""Hop- and distance-limited explorations over a cluster partition.

A pulse has three parts: every vertex of a cluster copies the cluster's source
records with distance reset to zero, then ``hopbound`` synchronous steps
merge each vertex's records with its neighbours' (distance plus edge weight),
and finally each cluster collects the best records of its members.  Each vertex
keeps at most ``x`` records, one per source, the closest first.

Records are tuples ``(source, dist, hops, vertex, prev, ref)``.  ``prev`` is
the record at the previous vertex, so every record carries the exact path
that realises its distance.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .graph import MergedGraph
from .accounting import Counters

SRC, DIST, HOPS, VERT, PREV, REF = range(6)


@dataclass
class ClusterPartition:
    """Vertex-disjoint clusters keyed by their center's vertex id."""

    n: int
    clusters: dict[int, tuple[int, ...]]
    phase: int = 0
    vertex_to_cluster: list[int] = field(default_factory=list)

    def __post_init__(self):
        if not self.vertex_to_cluster:
            owner = [-1] * self.n
            for c, members in self.clusters.items():
                for v in members:
                    if owner[v] != -1:
                        raise ValueError(f"vertex {v} lies in two clusters")
                    owner[v] = c
            self.vertex_to_cluster = owner
        for c in self.clusters:
            if self.vertex_to_cluster[c] != c:
                raise ValueError(f"center {c} is not a member of its own cluster")

    @classmethod
    def singletons(cls, n: int, vertices: Iterable[int] | None = None) -> "ClusterPartition":
        vs = range(n) if vertices is None else vertices
        return cls(n, {v: (v,) for v in vs})

    @property
    def ids(self) -> list[int]:
        return sorted(self.clusters)

    def __len__(self) -> int:
        return len(self.clusters)

    def vertices(self) -> set[int]:
        return {v for ms in self.clusters.values() for v in ms}


def sort_dedup(records) -> list:
    """Keep the smallest distance per source id, order by (distance, id).

    Accepts ``(source, dist)`` pairs or full records; ``None`` entries (empty
    cells) are dropped.
    """
    best: dict = {}
    for rec in records:
        if rec is None:
            continue
        s, d = rec[0], rec[1]
        cur = best.get(s)
        if cur is None or d < cur[1]:
            best[s] = rec
    return sorted(best.values(), key=lambda r: (r[1], r[0]))


def record_path(rec) -> tuple[list[int], list]:
    """(vertices, refs) of the walk that produced ``rec``, from its origin."""
    verts, refs = [], []
    while rec is not None:
        verts.append(rec[VERT])
        if rec[PREV] is not None:
            refs.append(rec[REF])
        rec = rec[PREV]
    return verts[::-1], refs[::-1]


def record_origin(rec) -> int:
    while rec[PREV] is not None:
        rec = rec[PREV]
    return rec[VERT]


@dataclass
class ExplorationResult:
    m: dict[int, list]
    threshold: float
    hopbound: int
    x: int
    depth: int
    pulses: int = 0
    steps: int = 0
    executed_steps: int = 0

    def table(self, c: int) -> list[tuple[int, float]]:
        return [(r[SRC], r[DIST]) for r in self.m.get(c, [])]


def _propagate(mg: MergedGraph, lists: dict[int, tuple], x: int, thr: float,
               hopbound: int, counters: Counters | None) -> tuple[dict[int, tuple], int]:
    nbrs = mg.nbrs
    changed = set(lists)
    executed = 0
    for _ in range(hopbound):
        touched = set(changed)
        for u in changed:
            for v, _, _ in nbrs[u]:
                touched.add(v)
        updates = {}
        work = 0
        for v in sorted(touched):
            own = lists.get(v, ())
            best = {r[SRC]: ((r[DIST], 0, -1), r) for r in own}
            for u, w, ref in nbrs[v]:
                lu = lists.get(u)
                if not lu:
                    continue
                for r in lu:
                    work += 1
                    d = r[DIST] + w
                    if d > thr:
                        continue
                    key = (d, 1, u)
                    cur = best.get(r[SRC])
                    if cur is None or key < cur[0]:
                        best[r[SRC]] = (key, (r[SRC], d, r[HOPS] + 1, v, r, ref))
            if len(best) > x:
                ranked = sorted(best.values(), key=lambda kr: (kr[0][0], kr[1][SRC]))[:x]
            else:
                ranked = sorted(best.values(), key=lambda kr: (kr[0][0], kr[1][SRC]))
            new = tuple(kr[1] for kr in ranked)
            if len(new) != len(own) or any(a is not b for a, b in zip(new, own)):
                updates[v] = new
        if counters is not None:
            counters.work += work
        if not updates:
            break
        executed += 1
        for v, lst in updates.items():
            if lst:
                lists[v] = lst
            else:
                lists.pop(v, None)
        changed = set(updates)
    return lists, executed


def _aggregate(p: ClusterPartition, lists: dict[int, tuple], x: int) -> dict[int, list]:
    m = {}
    for c, members in p.clusters.items():
        best = {}
        for v in members:
            for r in lists.get(v, ()):
                key = (r[DIST], v)
                cur = best.get(r[SRC])
                if cur is None or key < cur[0]:
                    best[r[SRC]] = (key, r)
        if best:
            ranked = sorted(best.values(), key=lambda kr: (kr[0][0], kr[1][SRC]))[:x]
            m[c] = [kr[1] for kr in ranked]
    return m


def _distribute(p: ClusterPartition, m: dict[int, list], sources: Iterable[int]) -> dict[int, tuple]:
    lists = {}
    for c in sources:
        recs = m.get(c)
        if not recs:
            continue
        for v in p.clusters[c]:
            lists[v] = tuple((r[SRC], 0.0, 0, v, None, None) for r in recs)
    return lists


def limited_bfs(mg: MergedGraph, p: ClusterPartition, sources: Iterable[int], threshold: float,
                hopbound: int, x: int, depth: int = 1,
                counters: Counters | None = None) -> ExplorationResult:
    """Run ``depth`` pulses from the source clusters; see the module docstring."""
    if x < 1 or depth < 1 or not threshold > 0:
        raise ValueError("need x >= 1, depth >= 1 and a positive threshold")
    sources = sorted(set(sources))
    m: dict[int, list] = {c: [(c, 0.0, 0, c, None, None)] for c in sources}
    res = ExplorationResult(m, threshold, hopbound, x, depth)
    for _ in range(depth):
        lists = _distribute(p, m, [c for c in p.ids if c in m])
        lists, executed = _propagate(mg, lists, x, threshold, hopbound, counters)
        m = _aggregate(p, lists, x)
        res.pulses += 1
        res.steps += hopbound
        res.executed_steps += executed
        if counters is not None:
            counters.add_pulse(hopbound, executed)
    res.m = m
    return res


@dataclass
class PopularResult:
    popular: set[int]
    neighbors: dict[int, list[tuple[int, float]]]
    exploration: ExplorationResult


def detect_popular(mg: MergedGraph, p: ClusterPartition, deg: int, threshold: float,
                   hopbound: int, counters: Counters | None = None) -> PopularResult:
    """Clusters with at least ``deg`` other clusters within ``threshold``.

    For every other cluster the returned table lists all of its neighbours
    with their hop-bounded distances.
    """
    res = limited_bfs(mg, p, p.ids, threshold, hopbound, deg + 1, 1, counters)
    popular, table = set(), {}
    for c in p.ids:
        recs = res.m.get(c, [])
        if len(recs) >= deg + 1:
            popular.add(c)
        else:
            table[c] = [(r[SRC], r[DIST]) for r in recs if r[SRC] != c]
    return PopularResult(popular, table, res)


@dataclass
class BfsResult:
    """Detection outcome of a cluster-level BFS.

    ``source[c]`` is the BFS source that claimed cluster ``c``, ``level[c]``
    the pulse it was claimed in, ``via[c]`` the cluster it was reached from
    and ``record[c]`` the record whose path realises that step.
    """

    source: dict[int, int]
    level: dict[int, int]
    via: dict[int, int]
    record: dict[int, tuple]
    pulses: int = 0
    steps: int = 0
    executed_steps: int = 0

    @property
    def detected(self) -> set[int]:
        return set(self.source)


def cluster_bfs(mg: MergedGraph, p: ClusterPartition, sources: Iterable[int], depth: int,
                threshold: float, hopbound: int,
                counters: Counters | None = None) -> BfsResult:
    """BFS to ``depth`` in the virtual graph whose edges join clusters within ``threshold``.

    Single-record pulses: a cluster is claimed the first pulse a record
    reaches it and keeps that claim.  Only clusters claimed in the previous
    pulse broadcast, which gives the same claims as rebroadcasting from every
    claimed cluster: an older cluster's record can only reach clusters that
    are already claimed.
    """
    sources = sorted(set(sources))
    out = BfsResult({c: c for c in sources}, {c: 0 for c in sources}, {}, {})
    frontier = sources
    for pulse in range(1, depth + 1):
        out.pulses += 1
        out.steps += hopbound
        if not frontier:
            if counters is not None:
                counters.add_pulse(hopbound, 0)
            continue
        m = {c: [(out.source[c], 0.0, 0, c, None, None)] for c in frontier}
        lists = _distribute(p, m, frontier)
        lists, executed = _propagate(mg, lists, 1, threshold, hopbound, counters)
        out.executed_steps += executed
        if counters is not None:
            counters.add_pulse(hopbound, executed)
        agg = _aggregate(p, lists, 1)
        fresh = []
        for c in sorted(agg):
            if c in out.source:
                continue
            rec = agg[c][0]
            out.source[c] = rec[SRC]
            out.level[c] = pulse
            out.via[c] = p.vertex_to_cluster[record_origin(rec)]
            out.record[c] = rec
            fresh.append(c)
        frontier = fresh
    return out
