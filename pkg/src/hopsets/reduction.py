"""Aspect-ratio-free hopsets by per-scale contraction.

For scale k every edge lighter than ``t_k = (eps/n) * 2**k`` is contracted.
The resulting components ("nodes") are joined by superedges built from the
lightest crossing edge of weight at most ``2**(k+1)``, padded by the nodes'
sizes times ``t_k`` so they never undercut real distances.  Each contracted
graph has aspect ratio O(n/eps), so its hopset needs a number of scales that
does not depend on the input's aspect ratio.  Node centers are tied together
across scales by star edges from each center to the members it gained.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

from .accounting import Counters
from .builder import Hopset, HopsetLayer, build_layers
from .graph import Graph
from .memory import Walk
from .paths import pointer_jump
from .schedule import check_params, compute_schedule


class UnionFind:
    """Disjoint sets with path halving and union by size."""

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.size = [1] * n

    def find(self, x: int) -> int:
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        return True


def contraction_threshold(eps: float, n: int, k: int) -> float:
    return eps / n * 2.0 ** k


def relevant_scales(g: Graph, eps: float) -> list[int]:
    """Scales k with some edge weight in ``((eps/n) 2^k, 2^(k+1)]``."""
    ks = set()
    for w in sorted({w for _, _, w in g.edges}):
        k = math.floor(math.log2(w)) - 2
        while 2.0 ** (k + 1) < w:
            k += 1
        while contraction_threshold(eps, g.n, k) < w:
            ks.add(k)
            k += 1
    return sorted(ks)


@dataclass
class Superedge:
    x: int          # node indices, x < y
    y: int
    w: float        # padded weight
    a: int          # witness edge endpoints: a in node x, b in node y
    b: int
    edge: int       # index of the witness edge in the input graph


@dataclass
class ReducedScaleGraph:
    k: int
    threshold: float
    cap: float
    nodes: list[tuple[int, ...]]
    node_of: list[int]
    tree_edges: list[int]
    superedges: list[Superedge]
    centers: list[int] = field(default_factory=list)

    def active_nodes(self) -> list[int]:
        """Nodes touched by a superedge, ordered by center id."""
        used = {s.x for s in self.superedges} | {s.y for s in self.superedges}
        return sorted(used, key=lambda i: self.centers[i])

    def compact(self) -> tuple[Graph, list[int], list[int]]:
        """The contracted graph on active nodes, its node list and superedge order."""
        active = self.active_nodes()
        index = {node: i for i, node in enumerate(active)}
        keyed = sorted(range(len(self.superedges)),
                       key=lambda s: tuple(sorted((index[self.superedges[s].x],
                                                   index[self.superedges[s].y]))))
        edges = [(index[self.superedges[s].x], index[self.superedges[s].y], self.superedges[s].w)
                 for s in keyed]
        return Graph(max(1, len(active)), edges), active, keyed


def build_scale_graph(g: Graph, eps: float, k: int) -> ReducedScaleGraph:
    """Contract edges lighter than (eps/n) 2^k; keep crossing edges up to 2^(k+1).

    Components come from Kruskal order (weight, then edge index), so the
    spanning trees of one scale are contained in those of every higher scale.
    """
    t = contraction_threshold(eps, g.n, k)
    cap = 2.0 ** (k + 1)
    uf = UnionFind(g.n)
    tree = []
    for i in sorted(range(g.m), key=lambda i: (g.edges[i][2], i)):
        u, v, w = g.edges[i]
        if w >= t:
            break
        if uf.union(u, v):
            tree.append(i)
    groups: dict[int, list[int]] = {}
    for v in range(g.n):
        groups.setdefault(uf.find(v), []).append(v)
    nodes = sorted((tuple(ms) for ms in groups.values()), key=lambda ms: ms[0])
    node_of = [0] * g.n
    for idx, ms in enumerate(nodes):
        for v in ms:
            node_of[v] = idx
    best: dict[tuple[int, int], tuple] = {}
    for i, (u, v, w) in enumerate(g.edges):
        if w < t or w > cap:
            continue
        x, y = node_of[u], node_of[v]
        if x == y:
            continue
        if x > y:
            x, y, u, v = y, x, v, u
        key = (w, min(u, v), max(u, v), i)
        cur = best.get((x, y))
        if cur is None or key < cur[0]:
            best[(x, y)] = (key, u, v, i)
    supers = []
    for (x, y), (key, a, b, i) in sorted(best.items()):
        w = key[0]
        padded = w + (len(nodes[x]) + len(nodes[y])) * t
        supers.append(Superedge(x, y, padded, a, b, i))
    return ReducedScaleGraph(k, t, cap, nodes, node_of, tree, supers)


@dataclass
class StarEdge:
    center: int
    member: int
    w: float
    tree_parent: int   # member's neighbour on the tree path towards the center
    tree_edge: int     # input-graph index of that tree edge


@dataclass
class StarEdgeSet:
    stars: list[StarEdge]
    index: dict[tuple[int, int], int]
    forest_iterations: int = 0
    distinct_nodes: int = 0

    def lookup(self, center: int, member: int) -> StarEdge | None:
        i = self.index.get((center, member))
        return None if i is None else self.stars[i]

    @property
    def membership(self) -> list[tuple[int, int]]:
        """The (vertex, center) array used to scan a vertex's nodes."""
        return sorted((s.member, s.center) for s in self.stars)


def select_centers(g: Graph, scale_graphs: list[ReducedScaleGraph]) -> StarEdgeSet:
    """Centers for every node of every scale, and the star edges they need.

    Below the first scale every vertex is its own node.  A node's center is
    the center of its largest child node one scale down (ties to the smaller
    center id); the center gets a star edge to every member outside that child,
    weighted by their distance in the node's spanning tree.
    """
    tree_adj: list[list[tuple[int, int]]] = [[] for _ in range(g.n)]
    added_tree: set[int] = set()
    stars: list[StarEdge] = []
    index: dict[tuple[int, int], int] = {}
    prev_nodes: list[tuple[int, ...]] = [(v,) for v in range(g.n)]
    prev_of = list(range(g.n))
    prev_centers = list(range(g.n))
    # copy links between consecutive scales, resolved by pointer jumping
    link: list[int] = []
    copy_center: list[int | None] = []
    offset_prev = None
    for sg in scale_graphs:
        for i in sg.tree_edges:
            if i not in added_tree:
                added_tree.add(i)
                u, v, _ = g.edges[i]
                tree_adj[u].append((v, i))
                tree_adj[v].append((u, i))
        centers = []
        offset = len(link)
        for idx, ms in enumerate(sg.nodes):
            children = sorted({prev_of[v] for v in ms})
            if sum(len(prev_nodes[c]) for c in children) != len(ms) or any(
                    sg.node_of[v] != idx for c in children for v in prev_nodes[c]):
                raise RuntimeError(f"nodes of scale {sg.k} are not unions of lower nodes")
            if len(children) == 1 and offset_prev is not None:
                link.append(offset_prev + children[0])
                copy_center.append(None)
                centers.append(prev_centers[children[0]])
                continue
            big = min(children, key=lambda c: (-len(prev_nodes[c]), prev_centers[c]))
            center = prev_centers[big]
            link.append(offset + idx)
            copy_center.append(center)
            centers.append(center)
            fresh = set(ms) - set(prev_nodes[big])
            if fresh:
                _add_stars(g, tree_adj, center, set(ms), fresh, stars, index)
        sg.centers = centers
        prev_nodes, prev_of, prev_centers = sg.nodes, sg.node_of, centers
        offset_prev = offset
    iterations = 0
    if link:
        roots, iterations = _jump_roots(link)
        for j, r in enumerate(roots):
            if copy_center[r] is None:
                raise RuntimeError("node forest root without a center")
    distinct = sum(1 for c in copy_center if c is not None)
    return StarEdgeSet(stars, index, iterations, distinct)


def _jump_roots(link: list[int]) -> tuple[list[int], int]:
    q = list(link)
    it = 0
    while any(q[q[j]] != q[j] for j in range(len(q))):
        q = [q[q[j]] for j in range(len(q))]
        it += 1
    return q, it


def _add_stars(g, tree_adj, center, members, fresh, stars, index):
    """Orient the node's spanning tree towards ``center`` and add its new stars."""
    parent = {center: center}
    weight_to_parent = {center: 0.0}
    via = {}
    order = [center]
    queue = deque([center])
    while queue:
        u = queue.popleft()
        for v, i in sorted(tree_adj[u]):
            if v in members and v not in parent:
                parent[v] = u
                weight_to_parent[v] = g.edges[i][2]
                via[v] = i
                order.append(v)
                queue.append(v)
    if len(order) != len(members):
        raise RuntimeError(f"spanning tree of the node around {center} is disconnected")
    local = {v: j for j, v in enumerate(order)}
    dist, _ = pointer_jump([local[parent[v]] for v in order],
                           [weight_to_parent[v] for v in order], root=0)
    for z in sorted(fresh):
        index[(center, z)] = len(stars)
        stars.append(StarEdge(center, z, float(dist[local[z]]), parent[z], via[z]))


# ---------------------------------------------------------------- reduced hopset

@dataclass
class ReducedMeta:
    epsilon: float
    scales: list[int]
    scale_graphs: dict[int, ReducedScaleGraph]
    star_set: StarEdgeSet
    # superedge index of the compact graph -> index into scale_graph.superedges
    superedge_order: dict[int, list[int]] = field(default_factory=dict)

    @property
    def stars(self) -> list[StarEdge]:
        return self.star_set.stars

    def star_extra(self):
        return [(s.center, s.member, s.w, ("S", i)) for i, s in enumerate(self.stars)]

    def superedge(self, k: int, compact_idx: int) -> Superedge:
        return self.scale_graphs[k].superedges[self.superedge_order[k][compact_idx]]


def _remap_layer(layer: HopsetLayer, k: int, active: list[int], centers: list[int],
                 gk: Graph) -> HopsetLayer:
    def vmap(x):
        return centers[active[x]]

    def rmap(ref):
        if ref[0] == "E":
            return ("N", k, ref[1])
        return ("R", k, ref[1], ref[2])

    layer.group = k
    for e in layer.edges:
        e.u, e.v = vmap(e.u), vmap(e.v)
        if e.path is not None:
            p = e.path
            e.path = Walk(tuple(vmap(x) for x in p.vertices), tuple(rmap(r) for r in p.refs),
                          p.weights)
    return layer


def build_reduced_hopset(g: Graph, epsilon: float, kappa: int, rho: float, *,
                         memory: bool = True, max_memory_hops: int | None = None,
                         internal_epsilon: float | None = None,
                         stretch_epsilon: float | None = None,
                         hopbound: int | None = None) -> Hopset:
    """Hopset whose hopbound does not depend on the aspect ratio.

    Works with ``epsilon / 6`` internally so the combined guarantee is
    ``(1 + epsilon, 6 beta + 5)``.  Every layer of every contracted graph is
    kept, mapped to center-to-center edges, so that paths can be reported.
    """
    check_params(epsilon, kappa, rho)
    eps = epsilon / 6
    n = g.n
    ks = relevant_scales(g, eps)
    sgs = [build_scale_graph(g, eps, k) for k in ks]
    star_set = select_centers(g, sgs)
    aspect = (1 + eps) * n / eps
    sched = compute_schedule(n, eps, kappa, rho, aspect, 1.0, internal_epsilon=internal_epsilon,
                             stretch_epsilon=stretch_epsilon, hopbound=hopbound)
    meta = ReducedMeta(eps, ks, {sg.k: sg for sg in sgs}, star_set)
    counters = Counters()
    layers: list[HopsetLayer] = []
    for sg in sgs:
        gk, active, order = sg.compact()
        meta.superedge_order[sg.k] = order
        if gk.m == 0:
            continue
        unit = 2 * contraction_threshold(eps, n, sg.k)
        for layer in build_layers(gk, sched.with_unit(unit), memory=memory, counters=counters,
                                  max_memory_hops=max_memory_hops):
            layers.append(_remap_layer(layer, sg.k, active, sg.centers, gk))
    return Hopset("reduced", n, sched, layers, g.checksum(), 6 * sched.beta + 5, counters, meta)
