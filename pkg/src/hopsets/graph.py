"""Weighted undirected graphs, exact and hop-bounded shortest distances.

Edge references ("refs") are small tuples naming where an edge came from:
``("E", i)`` is edge ``i`` of the input graph, and hopset modules add their own
tags (``"H"``, ``"R"``, ``"S"``, ``"N"``).  Tags sort so that graph edges win
weight ties when several sources offer the same vertex pair.
"""
from __future__ import annotations

import hashlib
import heapq
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

INF = math.inf

Ref = tuple


class GraphError(ValueError):
    """Malformed or invalid graph input."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class Graph:
    """Undirected graph on vertices 0..n-1 with positive float weights.

    Edges are stored once as ``(u, v, w)`` with ``u < v``, sorted by ``(u, v)``.
    Parallel edges collapse to the lightest one and self-loops are dropped.
    """

    def __init__(self, n: int, edges: Iterable[Sequence]):
        if n < 1:
            raise GraphError("graph needs at least one vertex")
        best: dict[tuple[int, int], float] = {}
        for e in edges:
            u, v, w = int(e[0]), int(e[1]), float(e[2])
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"vertex id out of range in edge ({u}, {v})")
            if not w > 0 or math.isinf(w) or math.isnan(w):
                raise GraphError(f"non-positive or non-finite weight {w!r} on edge ({u}, {v})")
            if u == v:
                continue
            key = (u, v) if u < v else (v, u)
            if key not in best or w < best[key]:
                best[key] = w
        self.n = n
        self.edges: list[tuple[int, int, float]] = [(u, v, w) for (u, v), w in sorted(best.items())]
        self.adjacency: list[list[int]] = [[] for _ in range(n)]
        for i, (u, v, _) in enumerate(self.edges):
            self.adjacency[u].append(i)
            self.adjacency[v].append(i)

    @property
    def m(self) -> int:
        return len(self.edges)

    def weight(self, i: int) -> float:
        return self.edges[i][2]

    def edge_index(self, u: int, v: int) -> int | None:
        a, b = (u, v) if u < v else (v, u)
        for i in self.adjacency[a]:
            x, y, _ = self.edges[i]
            if x == a and y == b:
                return i
        return None

    def min_weight(self) -> float:
        return min((w for _, _, w in self.edges), default=INF)

    def checksum(self) -> str:
        h = hashlib.sha256(f"n {self.n}\n".encode())
        for u, v, w in self.edges:
            h.update(f"{u} {v} {w.hex()}\n".encode())
        return h.hexdigest()

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"


# ---------------------------------------------------------------- parsing

def load_graph(text: str, fmt: str = "csv") -> Graph:
    """Parse a DIMACS ``.gr`` or ``u,v,w`` CSV payload.

    CSV: one edge per line; blank lines and ``#`` comments are skipped, and an
    optional header line ``u,v,w`` is ignored.  The vertex count is
    ``max id + 1`` unless a ``# n=<count>`` comment gives it.
    DIMACS: ``c`` comments, one ``p sp n m`` line, ``a u v w`` arcs with 1-based ids.
    """
    if fmt == "csv":
        return _load_csv(text)
    if fmt == "dimacs":
        return _load_dimacs(text)
    raise GraphError(f"unknown graph format {fmt!r}")


def _load_csv(text: str) -> Graph:
    edges = []
    n_hint = None
    top = -1
    seen_data = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if body.startswith("n="):
                try:
                    n_hint = int(body[2:])
                except ValueError:
                    raise GraphError(f"bad vertex count comment {line!r}", lineno) from None
            continue
        parts = [p.strip() for p in line.split(",")]
        if len(parts) != 3:
            raise GraphError(f"expected 'u,v,w', got {line!r}", lineno)
        if not seen_data and parts == ["u", "v", "w"]:
            seen_data = True
            continue
        seen_data = True
        try:
            u, v, w = int(parts[0]), int(parts[1]), float(parts[2])
        except ValueError:
            raise GraphError(f"cannot parse {line!r}", lineno) from None
        if u < 0 or v < 0:
            raise GraphError("negative vertex id", lineno)
        if not w > 0:
            raise GraphError(f"non-positive weight {w!r}", lineno)
        edges.append((u, v, w))
        top = max(top, u, v)
    n = n_hint if n_hint is not None else top + 1
    if n < 1:
        raise GraphError("empty graph")
    return Graph(n, edges)


def _load_dimacs(text: str) -> Graph:
    n = None
    edges = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        parts = raw.split()
        if not parts or parts[0] == "c":
            continue
        if parts[0] == "p":
            if len(parts) != 4 or parts[1] != "sp":
                raise GraphError(f"bad problem line {raw.strip()!r}", lineno)
            try:
                n = int(parts[2])
                int(parts[3])
            except ValueError:
                raise GraphError(f"bad problem line {raw.strip()!r}", lineno) from None
        elif parts[0] == "a":
            if n is None:
                raise GraphError("arc before problem line", lineno)
            if len(parts) != 4:
                raise GraphError(f"bad arc line {raw.strip()!r}", lineno)
            try:
                u, v, w = int(parts[1]) - 1, int(parts[2]) - 1, float(parts[3])
            except ValueError:
                raise GraphError(f"bad arc line {raw.strip()!r}", lineno) from None
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError("vertex id out of range", lineno)
            if not w > 0:
                raise GraphError(f"non-positive weight {w!r}", lineno)
            edges.append((u, v, w))
        else:
            raise GraphError(f"unknown line type {parts[0]!r}", lineno)
    if n is None:
        raise GraphError("missing 'p sp n m' line")
    return Graph(n, edges)


def read_graph(path: str, fmt: str | None = None) -> Graph:
    if fmt is None:
        fmt = "dimacs" if str(path).endswith(".gr") else "csv"
    with open(path) as fh:
        return load_graph(fh.read(), fmt)


def dump_graph(g: Graph, fmt: str = "csv") -> str:
    if fmt == "csv":
        lines = [f"# n={g.n}", "u,v,w"] + [f"{u},{v},{w!r}" for u, v, w in g.edges]
    elif fmt == "dimacs":
        lines = [f"p sp {g.n} {g.m}"] + [f"a {u + 1} {v + 1} {w!r}" for u, v, w in g.edges]
    else:
        raise GraphError(f"unknown graph format {fmt!r}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- merged edge sets

class MergedGraph:
    """E together with extra edge sets, one arc per vertex pair and direction.

    When a pair appears several times the lightest weight wins, ties going to
    the smaller ref (graph edges first).  ``nbrs[v]`` lists ``(u, w, ref)``
    sorted by ``u``; the flat arc arrays are sorted by ``(dst, src)`` for the
    vectorised relaxation kernel.
    """

    def __init__(self, g: Graph, extra: Iterable[tuple[int, int, float, Ref]] = ()):
        self.graph = g
        self.n = g.n
        best: dict[tuple[int, int], tuple[float, Ref]] = {}
        for i, (u, v, w) in enumerate(g.edges):
            best[(u, v)] = (w, ("E", i))
        for u, v, w, ref in extra:
            key = (u, v) if u < v else (v, u)
            cur = best.get(key)
            if cur is None or (w, ref) < cur:
                best[key] = (w, ref)
        self.pairs = best
        nbrs: list[list[tuple[int, float, Ref]]] = [[] for _ in range(self.n)]
        for (u, v), (w, ref) in best.items():
            nbrs[u].append((v, w, ref))
            nbrs[v].append((u, w, ref))
        for lst in nbrs:
            lst.sort(key=lambda t: t[0])
        self.nbrs = nbrs
        src, dst, wts, refs = [], [], [], []
        for v in range(self.n):
            for u, w, ref in nbrs[v]:
                src.append(u)
                dst.append(v)
                wts.append(w)
                refs.append(ref)
        self.src = np.asarray(src, dtype=np.int64)
        self.dst = np.asarray(dst, dtype=np.int64)
        self.w = np.asarray(wts, dtype=np.float64)
        self.refs = refs
        if len(dst):
            change = np.flatnonzero(np.diff(self.dst)) + 1
            self.seg_starts = np.concatenate(([0], change)).astype(np.int64)
            self.seg_dst = self.dst[self.seg_starts]
            self.seg_counts = np.diff(np.concatenate((self.seg_starts, [len(dst)])))
        else:
            self.seg_starts = np.zeros(0, dtype=np.int64)
            self.seg_dst = np.zeros(0, dtype=np.int64)
            self.seg_counts = np.zeros(0, dtype=np.int64)

    @property
    def arc_count(self) -> int:
        return len(self.src)

    def weight(self, u: int, v: int) -> float:
        key = (u, v) if u < v else (v, u)
        return self.pairs[key][0]


def as_merged(g) -> MergedGraph:
    return g if isinstance(g, MergedGraph) else MergedGraph(g)


# ---------------------------------------------------------------- distance vectors

@dataclass
class DistanceVector:
    sources: list[int]
    dist: np.ndarray
    hops: np.ndarray
    parent: np.ndarray  # -1 where there is no parent
    parent_ref: list = field(default_factory=list)
    rounds: int = 0
    relaxations: int = 0

    def path_to(self, v: int) -> list[int]:
        """Vertices of the recorded parent chain from a source to ``v``."""
        if math.isinf(self.dist[v]):
            return []
        out = [v]
        while self.parent[out[-1]] >= 0:
            out.append(int(self.parent[out[-1]]))
            if len(out) > len(self.dist):
                raise RuntimeError("parent chain does not terminate")
        return out[::-1]


def _relax_rows(mg: MergedGraph, source_sets: Sequence[Sequence[int]], hopbound: int,
                cap: float | None):
    """Synchronous hop-bounded Bellman-Ford, one row per source set.

    Round r improves a vertex only if the best candidate through an
    ``r``-hop path is strictly smaller; among equal candidates the smallest
    predecessor id wins, so the result does not depend on arc order.
    """
    rows, n = len(source_sets), mg.n
    dist = np.full((rows, n), INF)
    hops = np.zeros((rows, n), dtype=np.int64)
    parent = np.full((rows, n), -1, dtype=np.int64)
    arc = np.full((rows, n), -1, dtype=np.int64)
    for r, srcs in enumerate(source_sets):
        dist[r, list(srcs)] = 0.0
    active = np.isfinite(dist)
    rounds = np.zeros(rows, dtype=np.int64)
    relax = np.zeros(rows, dtype=np.int64)
    A = mg.arc_count
    if A == 0 or hopbound <= 0:
        return dist, hops, parent, arc, rounds, relax
    arange = np.arange(A)
    src, w = mg.src, mg.w
    step = 0
    while step < hopbound:
        step += 1
        act = active[:, src]
        per_row = act.sum(axis=1)
        if not per_row.any():
            break
        relax += per_row
        cand = np.where(act, dist[:, src] + w, INF)
        if cap is not None:
            cand[cand > cap] = INF
        segmin = np.minimum.reduceat(cand, mg.seg_starts, axis=1)
        better = segmin < dist[:, mg.seg_dst]
        improved = better.any(axis=1)
        if not improved.any():
            break
        rep = np.repeat(segmin, mg.seg_counts, axis=1)
        idx = np.where(cand == rep, arange, A)
        first = np.minimum.reduceat(idx, mg.seg_starts, axis=1)
        rr, cc = np.nonzero(better)
        tgt = mg.seg_dst[cc]
        a = first[rr, cc]
        new_hops = hops[rr, src[a]] + 1
        dist[rr, tgt] = segmin[rr, cc]
        parent[rr, tgt] = src[a]
        arc[rr, tgt] = a
        hops[rr, tgt] = new_hops
        active[:] = False
        active[rr, tgt] = True
        rounds += improved
    return dist, hops, parent, arc, rounds, relax


def _vector(mg, sources, dist, hops, parent, arc, rounds, relax) -> DistanceVector:
    refs = [mg.refs[a] if a >= 0 else None for a in arc.tolist()]
    return DistanceVector(list(sources), dist, hops, parent, refs, rounds, relax)


def bounded_bellman_ford(g, sources: Sequence[int], hopbound: int,
                         cap: float | None = None) -> DistanceVector:
    """``d^(h)(S, v)`` for every v: the lightest path from any source with at most h edges.

    ``g`` is a Graph or a MergedGraph (E plus hopset edges).  Entries above
    ``cap`` are reported as infinity.
    """
    if hopbound < 0:
        raise ValueError("hopbound must be non-negative")
    mg = as_merged(g)
    for s in sources:
        if not 0 <= s < mg.n:
            raise ValueError(f"source {s} out of range")
    d, h, p, a, rounds, relax = _relax_rows(mg, [list(sources)], hopbound, cap)
    return _vector(mg, sources, d[0], h[0], p[0], a[0], int(rounds[0]), int(relax[0]))


def bellman_ford_rows(g, sources: Sequence[int], hopbound: int,
                      cap: float | None = None) -> list[DistanceVector]:
    """One independent single-source run per entry of ``sources``, batched."""
    mg = as_merged(g)
    if not len(sources):
        return []
    d, h, p, a, rounds, relax = _relax_rows(mg, [[s] for s in sources], hopbound, cap)
    out = []
    for r, s in enumerate(sources):
        out.append(_vector(mg, [s], d[r], h[r], p[r], a[r], int(rounds[r]), int(relax[r])))
    return out


def dijkstra_oracle(g, source: int) -> DistanceVector:
    """Binary-heap Dijkstra; the exact baseline every approximation is checked against."""
    mg = as_merged(g)
    n = mg.n
    dist = [INF] * n
    parent = [-1] * n
    hops = [0] * n
    refs: list = [None] * n
    dist[source] = 0.0
    heap = [(0.0, source)]
    done = [False] * n
    relax = 0
    while heap:
        d, u = heapq.heappop(heap)
        if done[u]:
            continue
        done[u] = True
        for v, w, ref in mg.nbrs[u]:
            relax += 1
            nd = d + w
            if nd < dist[v] or (nd == dist[v] and not done[v] and u < parent[v]):
                dist[v] = nd
                parent[v] = u
                hops[v] = hops[u] + 1
                refs[v] = ref
                heapq.heappush(heap, (nd, v))
    return DistanceVector([source], np.asarray(dist), np.asarray(hops, dtype=np.int64),
                          np.asarray(parent, dtype=np.int64), refs, 0, relax)


def all_pairs(g, sources: Sequence[int] | None = None) -> np.ndarray:
    """Exact distance rows (scipy's Dijkstra); unreachable entries are inf."""
    from scipy.sparse import csr_matrix
    from scipy.sparse.csgraph import dijkstra

    mg = as_merged(g)
    n = mg.n
    if sources is None:
        sources = range(n)
    sources = list(sources)
    if mg.arc_count == 0:
        out = np.full((len(sources), n), INF)
        out[np.arange(len(sources)), sources] = 0.0
        return out
    mat = csr_matrix((mg.w, (mg.src, mg.dst)), shape=(n, n))
    return dijkstra(mat, directed=True, indices=sources)


def aspect_ratio(g: Graph, exact_limit: int = 1024) -> float:
    """Largest finite pairwise distance over the smallest positive one.

    Exact for ``n <= exact_limit``.  Beyond that, twice the largest
    eccentricity seen from one vertex per component bounds the diameter, which
    can only overestimate the ratio (an extra empty scale at worst).
    """
    if g.m == 0:
        raise GraphError("degenerate graph: no pair of mutually reachable vertices")
    lo = g.min_weight()
    if g.n <= exact_limit:
        hi = 0.0
        for start in range(0, g.n, 256):
            block = all_pairs(g, range(start, min(g.n, start + 256)))
            finite = block[np.isfinite(block)]
            hi = max(hi, float(finite.max()))
        return hi / lo
    from scipy.sparse.csgraph import connected_components
    from scipy.sparse import csr_matrix

    mg = as_merged(g)
    mat = csr_matrix((mg.w, (mg.src, mg.dst)), shape=(g.n, g.n))
    _, labels = connected_components(mat, directed=False)
    reps = sorted({int(labels[v]): v for v in range(g.n - 1, -1, -1)}.values())
    rows = all_pairs(g, reps)
    ecc = max(float(r[np.isfinite(r)].max()) for r in rows)
    return max(1.0, 2.0 * ecc / lo)
