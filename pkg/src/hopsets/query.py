"""Distance queries through a built hopset: beta-hop Bellman-Ford over E + H."""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

from .builder import Hopset
from .graph import DistanceVector, Graph, MergedGraph, bellman_ford_rows, bounded_bellman_ford


@dataclass
class HopsetIndex:
    graph: Graph
    merged: MergedGraph
    hopbound: int
    epsilon: float

    @classmethod
    def from_hopset(cls, g: Graph, hopset: Hopset) -> "HopsetIndex":
        if hopset.graph_checksum != g.checksum():
            raise ValueError("hopset was built for a different graph")
        return cls(g, MergedGraph(g, hopset.extra_edges()), hopset.hopbound,
                   hopset.schedule.epsilon)


def sssd(index: HopsetIndex, s: int) -> DistanceVector:
    """(1+eps)-approximate distances from ``s``, realised with at most beta hops."""
    return bounded_bellman_ford(index.merged, [s], index.hopbound)


def mssd(index: HopsetIndex, sources: Sequence[int], threads: int = 1,
         chunk: int = 64) -> list[DistanceVector]:
    """One row per source; rows are independent, so chunks may run on threads."""
    sources = list(sources)
    if not sources:
        raise ValueError("need at least one source")
    chunks = [sources[i:i + chunk] for i in range(0, len(sources), chunk)]

    def run(part):
        return bellman_ford_rows(index.merged, part, index.hopbound)

    if threads > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(run, chunks))
    else:
        parts = [run(c) for c in chunks]
    return [row for part in parts for row in part]
