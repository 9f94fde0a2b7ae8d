"""Turning a shortest-path tree over E + H into one that uses only graph edges.

A Bellman-Ford tree over E + H may use hopset edges.  Each hopset edge of the
highest scale is replaced by its stored walk: the child re-hangs on the walk's
last inner vertex and every inner vertex is offered the estimate the walk
gives it, taking it only if strictly better.  Walks of scale k use E and
scale k-1 edges, so after the lowest scale only graph edges remain.
Estimates never grow and a parent's estimate always stays strictly below its
child's, which keeps the structure a tree.  Pointer jumping then recomputes
exact tree distances.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .builder import Hopset, build_hopset
from .graph import INF, Graph, MergedGraph, bounded_bellman_ford


class TreeCycleError(RuntimeError):
    """A parent's estimate is not below its child's: the structure may contain a cycle."""


def pointer_jump(parent: Sequence[int], weight: Sequence[float], root: int,
                 max_iterations: int | None = None) -> tuple[np.ndarray, int]:
    """Distances to ``root`` in the tree given by parent pointers.

    ``parent[root] == root``; vertices with ``parent == -1`` are outside the
    tree and get infinity.  Each synchronous iteration does
    ``d(v) += d(q(v)); q(v) = q(q(v))``.
    """
    n = len(parent)
    q = np.asarray(parent, dtype=np.int64).copy()
    d = np.asarray(weight, dtype=np.float64).copy()
    outside = q < 0
    q[outside] = np.flatnonzero(outside)
    d[outside] = INF
    if not 0 <= root < n or q[root] != root:
        raise ValueError("the root must be its own parent")
    d[root] = 0.0
    if max_iterations is None:
        max_iterations = max(1, math.ceil(math.log2(max(n, 2)))) + 1
    it = 0
    while np.any(q[q] != q):
        if it >= max_iterations:
            raise TreeCycleError("pointer jumping did not converge; parent pointers contain a cycle")
        d = d + d[q]
        q = q[q]
        it += 1
    if np.any(q[~outside] != root):
        raise TreeCycleError("parent pointers contain a cycle that avoids the root")
    d[outside] = INF
    return d, it


@dataclass
class PathTree:
    root: int
    parent: list[int]
    ref: list
    dist: list[float]
    history: list[tuple[str, list[float], list[int]]] = field(default_factory=list)

    def snapshot(self, label: str) -> None:
        """Record estimates and parents after a step, for audits."""
        self.history.append((label, list(self.dist), list(self.parent)))

    def check_order(self, where: str) -> None:
        for v, p in enumerate(self.parent):
            if p >= 0 and not self.dist[p] < self.dist[v]:
                raise TreeCycleError(f"{where}: vertex {v} has parent {p} with estimate "
                                     f"{self.dist[p]} not below its own {self.dist[v]}")

    def adopt(self, records: list[tuple]) -> int:
        """Take the first record per target (by estimate, parent, ref) if strictly better."""
        records.sort(key=lambda r: (r[0], r[1], r[2], r[3]))
        taken = 0
        last = None
        for tgt, est, par, ref in records:
            if tgt == last:
                continue
            last = tgt
            if est < self.dist[tgt]:
                self.dist[tgt], self.parent[tgt], self.ref[tgt] = est, par, ref
                taken += 1
        return taken


def tree_from_search(dv, root: int) -> PathTree:
    parent = [int(p) for p in dv.parent]
    return PathTree(root, parent, list(dv.parent_ref), [float(x) for x in dv.dist])


def _oriented(walk, start: int, end: int):
    if walk.start == start and walk.end == end:
        return walk
    if walk.end == start and walk.start == end:
        return walk.reversed()
    raise RuntimeError(f"memory walk {walk.start}->{walk.end} does not match edge {start}->{end}")


def _expand(tree: PathTree, edge_of, match) -> None:
    """One replacement round for every tree edge whose ref satisfies ``match``."""
    base = list(tree.dist)
    records, rewires = [], []
    for v, r in enumerate(tree.ref):
        if r is None or not match(r):
            continue
        p = tree.parent[v]
        walk = _oriented(edge_of(r).path, p, v)
        cum = walk.cumulative()
        verts = walk.vertices
        for i in range(1, len(verts) - 1):
            records.append((verts[i], base[p] + cum[i], verts[i - 1], walk.refs[i - 1]))
        rewires.append((v, verts[-2], walk.refs[-1]))
    for v, p, r in rewires:
        tree.parent[v], tree.ref[v] = p, r
    tree.adopt(records)


def peel(tree: PathTree, hopset: Hopset) -> PathTree:
    """Replace hopset edges level by level, highest scale first."""
    layers = {layer.scale: layer for layer in hopset.layers}
    for k in sorted(layers, reverse=True):
        layer = layers[k]
        _expand(tree, lambda r: layer.edges[r[2]], lambda r, k=k: r[0] == "H" and r[1] == k)
        if any(r is not None and r[0] == "H" and r[1] == k for r in tree.ref):
            raise RuntimeError(f"scale {k} edges left after peeling")
        tree.check_order(f"peel scale {k}")
        tree.snapshot(f"peel {k}")
    return tree


# ---------------------------------------------------------------- weight-reduced trees

def _replace_neighbor_edges(tree: PathTree, hopset: Hopset, g: Graph) -> None:
    """Each edge between neighbouring node centers becomes center-x-y-center."""
    meta = hopset.reduced
    base = list(tree.dist)
    records = []
    for v, r in enumerate(tree.ref):
        if r is None or r[0] != "N":
            continue
        k, sidx = r[1], r[2]
        sg = meta.scale_graphs[k]
        se = meta.superedge(k, sidx)
        p = tree.parent[v]
        cx, cy = sg.centers[se.x], sg.centers[se.y]
        if (p, v) == (cx, cy):
            first, second = se.a, se.b
        elif (p, v) == (cy, cx):
            first, second = se.b, se.a
        else:
            raise RuntimeError(f"edge {p}->{v} does not join the centers of superedge {r}")
        d1 = base[p]
        if first != p:
            star = meta.star_set.index[(p, first)]
            d1 += meta.stars[star].w
            records.append((first, d1, p, ("S", star)))
        d2 = d1 + g.edges[se.edge][2]
        if second == v:
            tree.parent[v], tree.ref[v] = first, ("E", se.edge)
        else:
            records.append((second, d2, first, ("E", se.edge)))
            tree.parent[v], tree.ref[v] = second, ("S", meta.star_set.index[(v, second)])
    tree.adopt(records)


def _replace_stars(tree: PathTree, hopset: Hopset, g: Graph) -> None:
    meta = hopset.reduced
    stars = meta.stars
    # type A: the parent is the center; hang the child on its tree neighbour
    for v, r in enumerate(tree.ref):
        if r is not None and r[0] == "S":
            s = stars[r[1]]
            if tree.parent[v] == s.center and v == s.member:
                tree.parent[v], tree.ref[v] = s.tree_parent, ("E", s.tree_edge)
    base = list(tree.dist)
    records = [(s.member, base[s.center] + s.w, s.tree_parent, ("E", s.tree_edge))
               for s in stars if base[s.center] < INF]
    tree.adopt(records)
    tree.snapshot("stars A")
    # type B: the child is the center; flip the tree path from the member to it
    base = list(tree.dist)
    records = []
    for v, r in enumerate(tree.ref):
        if r is None or r[0] != "S":
            continue
        s = stars[r[1]]
        u, center = tree.parent[v], v
        if not (s.center == center and s.member == u):
            raise RuntimeError(f"star edge {r} on {u}->{v} is of neither type")
        path = [u]
        edges = []
        while path[-1] != center:
            hop = stars[meta.star_set.index[(center, path[-1])]]
            path.append(hop.tree_parent)
            edges.append(hop.tree_edge)
        tree.parent[center], tree.ref[center] = path[-2], ("E", edges[-1])
        d = base[u]
        for j in range(1, len(path)):
            d += g.edges[edges[j - 1]][2]
            records.append((path[j], d, path[j - 1], ("E", edges[j - 1])))
    tree.adopt(records)


# ---------------------------------------------------------------- extraction

@dataclass
class SptResult:
    root: int
    parent: list[int]
    ref: list
    dist: np.ndarray
    estimates: list[float]
    history: list[tuple[str, list[float], list[int]]]
    jump_iterations: int
    hopset: Hopset

    def tree_edges(self) -> list[tuple[int, int, int]]:
        """(parent, child, input edge index) for every non-root reached vertex."""
        return [(p, v, r[1]) for v, (p, r) in enumerate(zip(self.parent, self.ref)) if p >= 0]


def extract_spt(g: Graph, s: int, epsilon: float, kappa: int, rho: float, mode: str = "direct",
                hopset: Hopset | None = None, **build_kw) -> SptResult:
    """(1+eps)-approximate shortest-path tree rooted at ``s`` using only graph edges."""
    if not 0 <= s < g.n:
        raise ValueError(f"source {s} out of range")
    if hopset is None:
        if mode == "direct":
            hopset = build_hopset(g, epsilon, kappa, rho, memory=True, **build_kw)
        elif mode == "reduced":
            from .reduction import build_reduced_hopset
            hopset = build_reduced_hopset(g, epsilon, kappa, rho, memory=True, **build_kw)
        else:
            raise ValueError(f"unknown mode {mode!r}")
    mg = MergedGraph(g, hopset.extra_edges())
    dv = bounded_bellman_ford(mg, [s], hopset.hopbound)
    tree = tree_from_search(dv, s)
    tree.snapshot("bellman-ford")
    tree.check_order("bellman-ford")
    if hopset.reduced is None:
        peel(tree, hopset)
    else:
        layers = hopset.layer_map()
        for j in sorted({layer.scale for layer in hopset.layers}, reverse=True):
            _expand(tree, lambda r: layers[(r[1], r[2])].edges[r[3]],
                    lambda r, j=j: r[0] == "R" and r[2] == j)
            tree.check_order(f"hop-edges level {j}")
        if any(r is not None and r[0] == "R" for r in tree.ref):
            raise RuntimeError("hop-edges left after the first step")
        tree.snapshot("hop-edges")
        _replace_neighbor_edges(tree, hopset, g)
        tree.check_order("neighbour edges")
        tree.snapshot("neighbour edges")
        _replace_stars(tree, hopset, g)
        tree.check_order("stars")
        tree.snapshot("stars B")
    for v, r in enumerate(tree.ref):
        if tree.parent[v] >= 0 and (r is None or r[0] != "E"):
            raise RuntimeError(f"vertex {v} still hangs on non-graph edge {r}")
    parent = list(tree.parent)
    parent[s] = s
    weight = [0.0 if (p < 0 or v == s) else g.edges[tree.ref[v][1]][2]
              for v, p in enumerate(tree.parent)]
    dist, iterations = pointer_jump(parent, weight, s)
    return SptResult(s, tree.parent, tree.ref, dist, list(tree.dist), tree.history, iterations,
                     hopset)
