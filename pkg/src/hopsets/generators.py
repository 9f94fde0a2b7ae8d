"""Seeded synthetic graphs with wide weight ranges.

All randomness in the package lives here, drawn from ``numpy.random.default_rng``
with an explicit seed.  Weights are log-uniform on ``[1, max_weight]`` so that
small graphs still span many scales.
"""
from __future__ import annotations

import numpy as np

from .graph import Graph

FAMILIES = ("er", "geometric", "path", "cycle")


def log_uniform(rng: np.random.Generator, size: int, max_weight: float) -> np.ndarray:
    return np.exp(rng.uniform(0.0, np.log(max_weight), size))


def erdos_renyi(n: int, avg_degree: float = 4.0, seed: int = 0, max_weight: float = 1e9,
                backbone: bool = True) -> Graph:
    """G(n, p) with p = avg_degree / (n - 1); ``backbone`` adds a random
    Hamiltonian path so the graph is connected."""
    rng = np.random.default_rng(seed)
    edges = []
    if n > 1:
        p = min(1.0, avg_degree / (n - 1))
        iu, ju = np.triu_indices(n, 1)
        keep = rng.random(iu.size) < p
        edges = list(zip(iu[keep].tolist(), ju[keep].tolist()))
        if backbone:
            order = rng.permutation(n).tolist()
            edges += list(zip(order[:-1], order[1:]))
    w = log_uniform(rng, len(edges), max_weight)
    return Graph(n, [(u, v, float(x)) for (u, v), x in zip(edges, w)])


def random_geometric(n: int, radius: float | None = None, seed: int = 0,
                     max_weight: float = 1e9) -> Graph:
    """Points in the unit square joined when closer than ``radius``.

    Weights are Euclidean lengths rescaled so the shortest is 1 and the longest
    ``max_weight``, keeping the geometry while spreading the range.
    """
    rng = np.random.default_rng(seed)
    pts = rng.random((n, 2))
    if radius is None:
        radius = min(1.5, 1.5 * np.sqrt(np.log(max(n, 2)) / (np.pi * max(n, 2))))
    diff = pts[:, None, :] - pts[None, :, :]
    dist = np.sqrt((diff ** 2).sum(-1))
    iu, ju = np.triu_indices(n, 1)
    d = dist[iu, ju]
    keep = d <= radius
    iu, ju, d = iu[keep], ju[keep], d[keep]
    if d.size:
        lo, hi = np.log(d.min()), np.log(d.max())
        span = hi - lo if hi > lo else 1.0
        w = np.exp((np.log(d) - lo) / span * np.log(max_weight))
    else:
        w = d
    return Graph(n, [(int(u), int(v), float(x)) for u, v, x in zip(iu, ju, w)])


def power_law_path(n: int, seed: int = 0, max_weight: float = 1e9, cycle: bool = False,
                   exponent: float = 0.3) -> Graph:
    """A path (or cycle) whose weights follow a Pareto tail clipped to ``max_weight``."""
    rng = np.random.default_rng(seed)
    m = n if cycle and n > 2 else n - 1
    w = np.minimum((1.0 - rng.random(max(m, 0))) ** (-1.0 / exponent), max_weight)
    edges = [(i, (i + 1) % n, float(w[i])) for i in range(max(m, 0))]
    return Graph(n, edges)


def generate(family: str, n: int, seed: int = 0, max_weight: float = 1e9, **kw) -> Graph:
    if family == "er":
        return erdos_renyi(n, seed=seed, max_weight=max_weight, **kw)
    if family == "geometric":
        return random_geometric(n, seed=seed, max_weight=max_weight, **kw)
    if family in ("path", "cycle"):
        return power_law_path(n, seed=seed, max_weight=max_weight, cycle=family == "cycle", **kw)
    raise ValueError(f"unknown graph family {family!r}; choose from {', '.join(FAMILIES)}")
