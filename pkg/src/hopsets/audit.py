"""Independent checks of built hopsets, query results and extracted trees.

Everything here recomputes from the graph with exact Dijkstra or plain
Bellman-Ford and compares, so it can be used both by ``hopsets validate`` and
by the test suite.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .builder import Hopset
from .graph import Graph, MergedGraph, all_pairs, bellman_ford_rows

REL_TOL = 1e-9


@dataclass
class StretchReport:
    pairs: int
    max_stretch: float
    min_ratio: float            # below 1 would mean a shortcut undercuts G
    max_hops: int
    hopbound: int
    unreachable_mismatch: int
    ratios: np.ndarray = field(repr=False, default_factory=lambda: np.zeros(0))

    def within(self, epsilon: float) -> bool:
        return (self.max_stretch <= (1 + epsilon) * (1 + REL_TOL)
                and self.min_ratio >= 1 - REL_TOL
                and self.max_hops <= self.hopbound and self.unreachable_mismatch == 0)


def stretch_report(g: Graph, rows, exact: np.ndarray, hopbound: int) -> StretchReport:
    """Compare query rows against exact distance rows (same source order)."""
    ratios = []
    lo, hi, hops, bad = math.inf, 1.0, 0, 0
    for row, ex in zip(rows, exact):
        d = np.asarray(row.dist)
        fin = np.isfinite(ex)
        bad += int(np.count_nonzero(np.isfinite(d) != fin))
        pos = fin & (ex > 0)
        if np.any(pos):
            r = d[pos] / ex[pos]
            ratios.append(r)
            hi = max(hi, float(r.max()))
            lo = min(lo, float(r.min()))
        if np.any(fin):
            hops = max(hops, int(np.asarray(row.hops)[fin].max()))
    allr = np.concatenate(ratios) if ratios else np.zeros(0)
    return StretchReport(int(allr.size), hi, 1.0 if math.isinf(lo) else lo, hops, hopbound,
                         bad, allr)


def no_shortening(g: Graph, hopset: Hopset) -> float:
    """Smallest d_{G+H} / d_G over all pairs (unbounded hops); must be >= 1."""
    exact = all_pairs(g)
    merged = all_pairs(MergedGraph(g, hopset.extra_edges()))
    pos = np.isfinite(exact) & (exact > 0)
    if not np.any(pos):
        return 1.0
    return float((merged[pos] / exact[pos]).min())


@dataclass
class MemoryAudit:
    walks: int
    max_rel_error: float        # replayed sum against the stored walk weight
    max_excess: float           # replayed sum above the hopset edge weight, relative
    max_hops: int
    cap: int
    only_lower_refs: bool

    def ok(self) -> bool:
        return (self.only_lower_refs and self.max_rel_error <= REL_TOL
                and self.max_excess <= REL_TOL and self.max_hops <= self.cap)


def audit_memory(g: Graph, hopset: Hopset) -> MemoryAudit:
    """Replay every stored walk: its edges must exist and its weight must match."""
    by_key = hopset.layer_map()
    walks, err, excess, hops, ok = 0, 0.0, 0.0, 0, True
    for layer in hopset.layers:
        for e in layer.edges:
            p = e.path
            if p is None:
                continue
            walks += 1
            total = 0.0
            for a, b, ref in zip(p.vertices, p.vertices[1:], p.refs):
                w = _ref_weight(g, hopset, by_key, ref, layer, a, b)
                if w is None:
                    ok = False
                    continue
                total += w
            if {p.start, p.end} != {e.u, e.v}:
                ok = False
            err = max(err, abs(total - p.weight) / max(p.weight, 1e-300))
            excess = max(excess, (total - e.w) / e.w)
            hops = max(hops, p.hops)
    return MemoryAudit(walks, err, excess, hops, hopset.schedule.memory_hop_cap, ok)


def _ref_weight(g, hopset, by_key, ref, layer, a, b):
    tag = ref[0]
    if tag == "E":
        u, v, w = g.edges[ref[1]]
        return w if {u, v} == {a, b} else None
    if tag == "H":
        if ref[1] != layer.scale - 1:
            return None
        e = by_key[(None, ref[1])].edges[ref[2]]
    elif tag == "R":
        if ref[1] != layer.group or ref[2] != layer.scale - 1:
            return None
        e = by_key[(ref[1], ref[2])].edges[ref[3]]
    elif tag == "N":
        if ref[1] != layer.group:
            return None
        se = hopset.reduced.superedge(ref[1], ref[2])
        sg = hopset.reduced.scale_graphs[ref[1]]
        if {sg.centers[se.x], sg.centers[se.y]} != {a, b}:
            return None
        return se.w
    else:
        return None
    return e.w if {e.u, e.v} == {a, b} else None


@dataclass
class TreeAudit:
    edges: int
    reachable: int
    all_in_graph: bool
    acyclic: bool
    parent_consistent: bool
    max_stretch: float

    def ok(self, epsilon: float) -> bool:
        return (self.edges == self.reachable - 1 and self.all_in_graph and self.acyclic
                and self.parent_consistent and self.max_stretch <= (1 + epsilon) * (1 + REL_TOL))


def audit_tree(g: Graph, root: int, parent, edge_ids, dist) -> TreeAudit:
    """Structural check of a (parent, edge, distance) table against G."""
    n = g.n
    exact = all_pairs(g, [root])[0]
    in_graph, consistent, count = True, True, 0
    for v in range(n):
        p = parent[v]
        if v == root or p is None or p < 0:
            continue
        count += 1
        e = edge_ids[v]
        if e is None or not 0 <= e < g.m or {g.edges[e][0], g.edges[e][1]} != {p, v}:
            in_graph = False
            continue
        want = dist[p] + g.edges[e][2]
        if not math.isclose(dist[v], want, rel_tol=REL_TOL, abs_tol=0.0):
            consistent = False
    # acyclic: every chain reaches the root within n steps
    acyclic = True
    for v in range(n):
        x, steps = v, 0
        while x != root and parent[x] is not None and parent[x] >= 0:
            x = parent[x]
            steps += 1
            if steps > n:
                acyclic = False
                break
        if not acyclic:
            break
    fin = np.isfinite(exact) & (exact > 0)
    d = np.asarray(dist, dtype=float)
    stretch = float((d[fin] / exact[fin]).max()) if np.any(fin) else 1.0
    return TreeAudit(count, int(np.isfinite(exact).sum()), in_graph, acyclic, consistent, stretch)


def size_bounds(hopset: Hopset, aspect: float | None = None) -> dict:
    """Observed sizes next to the n^(1+1/kappa) per-scale and total bounds."""
    sched = hopset.schedule
    n = hopset.n
    per_scale_bound = n ** (1 + 1 / sched.kappa)
    out = {"per_scale_bound": per_scale_bound, "size": hopset.size}
    if hopset.reduced is None:
        sizes = {layer.scale: len(layer.edges) for layer in hopset.layers}
        lam_total = math.ceil(math.log2(aspect if aspect is not None else sched.aspect_ratio))
        out.update(per_scale=sizes, total_bound=max(lam_total, 1) * per_scale_bound,
                   per_scale_ok=all(s <= per_scale_bound for s in sizes.values()))
        out["total_ok"] = hopset.size <= out["total_bound"]
    else:
        log_n = math.log2(max(n, 2))
        stars = len(hopset.reduced.stars)
        sizes = {f"{layer.group}:{layer.scale}": len(layer.edges) for layer in hopset.layers}
        out.update(per_scale=sizes, stars=stars, star_bound=n * log_n,
                   stars_ok=stars <= n * log_n,
                   per_scale_ok=all(s <= per_scale_bound for s in sizes.values()),
                   constant=hopset.size / (per_scale_bound * log_n))
    return out


@dataclass
class PhaseAudit:
    popular_all_superclustered: bool
    min_supercluster_ok: bool
    last_phase_ok: bool
    radius_ok: bool
    worst_radius_ratio: float


def audit_phases(g: Graph, hopset: Hopset) -> PhaseAudit:
    """Per-phase invariants of every direct layer, radii re-measured by Bellman-Ford.

    The radius of P_i is measured in E + H_{k-1} with at most sigma_i hops
    from each cluster center.
    """
    sched = hopset.schedule
    n = hopset.n
    pop_ok = size_ok = last_ok = rad_ok = True
    worst = 0.0
    prev = None
    for layer in hopset.layers:
        if layer.group is not None:
            continue
        mg = MergedGraph(g, prev.as_extra() if prev is not None else ())
        radii = sched.radii(layer.scale)
        for i, st in enumerate(layer.phases):
            pop_ok &= st.popular_all_superclustered
            if i < sched.ell and st.min_supercluster is not None:
                size_ok &= st.min_supercluster >= st.degree + 1
            if i == sched.ell:
                last_ok &= st.clusters <= max(1, math.ceil(n ** sched.rho - 1e-9))
            clusters = layer.partitions[i] if i < len(layer.partitions) else {}
            big = {c: vs for c, vs in clusters.items() if len(vs) > 1}
            if not big:
                continue
            centers = sorted(big)
            rows = bellman_ford_rows(mg, centers, max(sched.sigma[i], 1))
            for c, row in zip(centers, rows):
                far = max(float(row.dist[v]) for v in big[c])
                if radii[i] > 0:
                    worst = max(worst, far / radii[i])
                if far > radii[i] * (1 + REL_TOL):
                    rad_ok = False
        prev = layer
    return PhaseAudit(pop_ok, size_ok, last_ok, rad_ok, worst)
