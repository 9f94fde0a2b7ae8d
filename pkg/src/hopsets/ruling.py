"""Deterministic (3, 2 log n)-ruling sets by splitting on id bits.

The recursion splits candidates on one bit of their id per level.  It is run
bottom-up: at level ``h`` the groups share every bit above ``h``; inside a
group the survivors with bit ``h`` clear (B0) knock out every survivor with the
bit set (B1) that a depth-2 exploration from B0 reaches.  All groups of a
level share one batched exploration, so knock-outs may cross groups.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping


@dataclass
class RulingTrace:
    levels: int = 0
    explorations: int = 0
    per_level: list[set[int]] = field(default_factory=list)
    knocked: list[set[int]] = field(default_factory=list)


def ruling_set(candidates: Iterable[int], id_bits: int,
               explore: Callable[[set[int]], set[int]],
               trace: RulingTrace | None = None) -> set[int]:
    """Ruling set of ``candidates``.

    ``explore(S)`` must return every cluster within virtual-graph distance 2
    of ``S`` (sources included).  Ids must fit in ``id_bits`` bits.
    """
    current = set(candidates)
    for c in current:
        if c < 0 or c >= 1 << id_bits:
            raise ValueError(f"id {c} does not fit in {id_bits} bits")
    if trace is None:
        trace = RulingTrace()
    for h in range(id_bits):
        trace.levels += 1
        b0 = {c for c in current if not (c >> h) & 1}
        b1 = current - b0
        knocked: set[int] = set()
        if b0 and b1:
            trace.explorations += 1
            knocked = b1 & explore(b0)
        current -= knocked
        trace.knocked.append(knocked)
        trace.per_level.append(set(current))
    return current


def virtual_bfs(adj: Mapping[int, Iterable[int]], sources: Iterable[int],
                depth: int | None = None) -> dict[int, int]:
    """Plain BFS levels on an explicit unweighted graph."""
    dist = {s: 0 for s in sources}
    queue = deque(sorted(dist))
    while queue:
        u = queue.popleft()
        if depth is not None and dist[u] >= depth:
            continue
        for v in sorted(adj.get(u, ())):
            if v not in dist:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist


@dataclass
class RulingReport:
    ok: bool
    min_separation: float
    max_cover: float
    reason: str = ""
    pair: tuple | None = None


def verify_ruling(q: Iterable[int], w: Iterable[int], adj: Mapping[int, Iterable[int]],
                  log_n: int) -> RulingReport:
    """Check 3-separation of ``q`` and 2 log n covering of ``w`` on an explicit graph."""
    q, w = sorted(set(q)), sorted(set(w))
    sep = float("inf")
    bad = None
    for a in q:
        d = virtual_bfs(adj, [a])
        for b in q:
            if b != a and b in d and d[b] < sep:
                sep, bad = d[b], (a, b)
    if sep < 3:
        return RulingReport(False, sep, float("nan"), "separation", bad)
    cover = 0.0
    dist = virtual_bfs(adj, q) if q else {}
    for c in w:
        d = dist.get(c, float("inf"))
        if d > cover:
            cover, bad = d, (c,)
    if cover > 2 * log_n:
        return RulingReport(False, sep, cover, "covering", bad)
    return RulingReport(True, sep, cover)
