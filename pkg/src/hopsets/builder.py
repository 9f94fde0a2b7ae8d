"""Single-scale hopsets by superclustering and interconnection, and their union.

One scale runs ``ell + 1`` phases over the graph E + H_{k-1}.  In phase i the
popular clusters (many close neighbours) are found, a ruling set of them
grows superclusters by a cluster-level BFS, every absorbed cluster center is
joined to its new center by a superclustering edge, and the clusters left
over are joined pairwise to their close neighbours by interconnection edges.
The last phase only interconnects.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .accounting import Counters
from .exploration import (SRC, ClusterPartition, cluster_bfs, detect_popular, limited_bfs,
                          record_path)
from .graph import Graph, MergedGraph, aspect_ratio
from .memory import MemoryCapExceeded, Walk
from .ruling import RulingTrace, ruling_set
from .schedule import ParameterSchedule, compute_schedule

REL_TOL = 1e-9


@dataclass
class HopEdge:
    u: int
    v: int
    w: float
    kind: str
    phase: int
    path: Walk | None = None


@dataclass
class PhaseStats:
    phase: int
    clusters: int
    degree: int
    threshold: float
    radius: float
    popular: int = 0
    ruling: int = 0
    superclusters: int = 0
    min_supercluster: int | None = None
    unclustered: int = 0
    supercluster_edges: int = 0
    interconnect_edges: int = 0
    popular_all_superclustered: bool = True
    partition_ok: bool = True
    ruling_levels: int = 0
    ruling_explorations: int = 0

    @property
    def edges(self) -> int:
        return self.supercluster_edges + self.interconnect_edges


@dataclass
class HopsetLayer:
    """Edges of H_k for one scale.  ``group`` is set for weight-reduced builds."""

    scale: int
    edges: list[HopEdge] = field(default_factory=list)
    group: int | None = None
    phases: list[PhaseStats] = field(default_factory=list)
    counters: Counters = field(default_factory=Counters)
    partitions: list[dict] = field(default_factory=list)
    leftovers: list[list[int]] = field(default_factory=list)

    def ref(self, idx: int) -> tuple:
        if self.group is None:
            return ("H", self.scale, idx)
        return ("R", self.group, self.scale, idx)

    def as_extra(self):
        return [(e.u, e.v, e.w, self.ref(i)) for i, e in enumerate(self.edges)]


def _resolver(g: Graph, prev: HopsetLayer | None):
    def weight(ref) -> float:
        if ref[0] == "E":
            return g.edges[ref[1]][2]
        return prev.edges[ref[-1]].w
    return weight


def _record_walk(rec, weight) -> Walk:
    verts, refs = record_path(rec)
    return Walk.from_parts(verts, refs, [weight(r) for r in refs])


def _check_walk(walk: Walk, edge_w: float, cap: int | None) -> None:
    if walk.weight > edge_w * (1 + REL_TOL):
        raise AssertionError(f"memory walk weight {walk.weight} exceeds edge weight {edge_w}")
    if cap is not None and walk.hops > cap:
        raise MemoryCapExceeded(f"memory walk with {walk.hops} hops exceeds cap {cap}")


def build_single_scale(g: Graph, prev: HopsetLayer | None, k: int, sched: ParameterSchedule, *,
                       memory: bool = True, counters: Counters | None = None,
                       max_memory_hops: int | None = None) -> HopsetLayer:
    """H_k from E and H_{k-1} (``prev``, None at the first built scale)."""
    layer = HopsetLayer(scale=k)
    own = Counters()
    n = g.n
    if n <= 1:
        return layer
    mg = MergedGraph(g, prev.as_extra() if prev is not None else ())
    weight = _resolver(g, prev)
    hop = sched.explore_hops
    log_n = sched.log_n
    radii = sched.radii(k)
    part = ClusterPartition.singletons(n)
    cp = {v: Walk.at(v) for v in range(n)} if memory else None
    left_vertices: set[int] = set()

    for i in range(sched.ell + 1):
        thr = sched.delta_hat(k, i)
        deg = sched.degrees[i]
        stats = PhaseStats(i, len(part), deg, thr, radii[i])
        layer.partitions.append(dict(part.clusters))
        covered = part.vertices()
        stats.partition_ok = covered.isdisjoint(left_vertices) and len(covered) + len(left_vertices) == n
        new_edges: list[HopEdge] = []

        if i < sched.ell:
            pop = detect_popular(mg, part, deg, thr, hop, own)
            neighbor_records = pop.exploration.m
            stats.popular = len(pop.popular)
            trace = RulingTrace()

            def knock(sources, _part=part, _thr=thr):
                return cluster_bfs(mg, _part, sources, 2, _thr, hop, own).detected

            rulers = ruling_set(pop.popular, log_n, knock, trace)
            own.add_rounds(trace.levels)
            stats.ruling = len(rulers)
            stats.ruling_levels = trace.levels
            stats.ruling_explorations = trace.explorations
            bfs = cluster_bfs(mg, part, rulers, 2 * log_n, thr, hop, own)
            absorbed = bfs.detected
            stats.popular_all_superclustered = pop.popular <= absorbed
            sc_weight = sched.supercluster_weight(k, i)
            members: dict[int, list[int]] = {q: [] for q in rulers}
            chains: dict[int, Walk] = {}
            for c in sorted(absorbed):
                members[bfs.source[c]].append(c)
                if c in rulers:
                    continue
                path = None
                if memory:
                    path = _supercluster_walk(c, bfs, rulers, cp, weight)
                    _check_walk(path, sc_weight, max_memory_hops)
                    chains[c] = path
                new_edges.append(HopEdge(bfs.source[c], c, sc_weight, "supercluster", i, path))
            stats.supercluster_edges = len(new_edges)
            stats.superclusters = len(rulers)
            stats.min_supercluster = min((len(v) for v in members.values()), default=None)
            leftovers = [c for c in part.ids if c not in absorbed]
            if memory:
                for c, path in chains.items():
                    back = path.reversed()
                    for v in part.clusters[c]:
                        cp[v] = (cp[v] + back).loop_erased()
            next_clusters = {q: tuple(sorted(v for c in cs for v in part.clusters[c]))
                             for q, cs in members.items()}
            own.add_rounds(1)
        else:
            x = max(math.ceil(n ** sched.rho - 1e-9), len(part))
            res = limited_bfs(mg, part, part.ids, thr, hop, x, 1, own)
            neighbor_records = res.m
            leftovers = part.ids
            next_clusters = {}

        stats.unclustered = len(leftovers)
        layer.leftovers.append(list(leftovers))
        keep = set(leftovers)
        ic = 0
        for c in leftovers:
            for rec in neighbor_records.get(c, []):
                c2 = rec[SRC]
                if c2 == c or c2 not in keep or c2 < c:
                    continue
                w = rec[1] + 2 * radii[i]
                path = None
                if memory:
                    ex = _record_walk(rec, weight)      # from a vertex of c2 into c
                    path = (cp[ex.end].reversed() + ex.reversed() + cp[ex.start]).loop_erased()
                    _check_walk(path, w, max_memory_hops)
                new_edges.append(HopEdge(c, c2, w, "interconnect", i, path))
                ic += 1
        stats.interconnect_edges = ic
        own.add_rounds(1)
        for c in leftovers:
            left_vertices.update(part.clusters[c])
        layer.edges.extend(new_edges)
        layer.phases.append(stats)
        if i < sched.ell:
            part = ClusterPartition(n, next_clusters, phase=i + 1)

    layer.counters = own
    if counters is not None:
        counters.absorb(own)
    return layer


def _supercluster_walk(c: int, bfs, rulers: set[int], cp: dict, weight) -> Walk:
    """Walk from the claiming ruler's center to ``c``'s center through the BFS chain."""
    chain = [c]
    while chain[-1] not in rulers:
        chain.append(bfs.via[chain[-1]])
    chain.reverse()
    walk = Walk.at(chain[0])
    for nxt in chain[1:]:
        ex = _record_walk(bfs.record[nxt], weight)
        walk = walk + cp[ex.start].reversed() + ex + cp[ex.end]
    return walk.loop_erased()


# ---------------------------------------------------------------- full hopset

@dataclass
class Hopset:
    """A built hopset: layers, schedule and bookkeeping for queries and paths."""

    mode: str
    n: int
    schedule: ParameterSchedule
    layers: list[HopsetLayer]
    graph_checksum: str
    hopbound: int
    counters: Counters = field(default_factory=Counters)
    reduced: object | None = None

    def extra_edges(self):
        out = []
        for layer in self.layers:
            out.extend(layer.as_extra())
        if self.reduced is not None:
            out.extend(self.reduced.star_extra())
        return out

    @property
    def size(self) -> int:
        total = sum(len(layer.edges) for layer in self.layers)
        if self.reduced is not None:
            total += len(self.reduced.stars)
        return total

    def layer_map(self) -> dict:
        return {(layer.group, layer.scale): layer for layer in self.layers}


def build_layers(g: Graph, sched: ParameterSchedule, *, memory: bool = True,
                 counters: Counters | None = None,
                 max_memory_hops: int | None = None) -> list[HopsetLayer]:
    layers = []
    prev = None
    for k in sched.scales:
        layer = build_single_scale(g, prev, k, sched, memory=memory, counters=counters,
                                   max_memory_hops=max_memory_hops)
        layers.append(layer)
        prev = layer
    return layers


def build_hopset(g: Graph, epsilon: float, kappa: int, rho: float, *, aspect: float | None = None,
                 memory: bool = True, max_memory_hops: int | None = None,
                 internal_epsilon: float | None = None, stretch_epsilon: float | None = None,
                 hopbound: int | None = None) -> Hopset:
    """Union of the single-scale hopsets for scales k0..lambda."""
    if aspect is None:
        aspect = aspect_ratio(g) if g.m else 1.0
    unit = g.min_weight() if g.m else 1.0
    sched = compute_schedule(g.n, epsilon, kappa, rho, aspect, unit,
                             internal_epsilon=internal_epsilon,
                             stretch_epsilon=stretch_epsilon, hopbound=hopbound)
    counters = Counters()
    layers = build_layers(g, sched, memory=memory, counters=counters,
                          max_memory_hops=max_memory_hops)
    mode = "path-reporting" if memory else "direct"
    return Hopset(mode, g.n, sched, layers, g.checksum(), sched.beta, counters)
