"""Versioned JSON for hopsets and shortest-path trees.

Output is byte-stable: keys are sorted, floats are written with ``repr`` (which
round-trips exactly) and infinities become ``null``.  Per-phase partitions and
leftover lists are build diagnostics and are not stored.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict
from fractions import Fraction

from .accounting import Counters
from .builder import Hopset, HopEdge, HopsetLayer, PhaseStats
from .memory import Walk
from .schedule import ParameterSchedule

FORMAT = "hopsets/1"


class FormatError(ValueError):
    """A file that is not a hopset of a supported version."""


def _finite(x):
    if isinstance(x, float) and not math.isfinite(x):
        return None
    return x


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False) + "\n"


# ---------------------------------------------------------------- schedule

def schedule_from_dict(d: dict) -> ParameterSchedule:
    return ParameterSchedule(
        n=d["n"], epsilon=d["epsilon"], kappa=d["kappa"], rho=d["rho"],
        aspect_ratio=d["aspect_ratio"], unit=d["unit"], log_n=d["log_n"], ell=d["ell"],
        i0=d["i0"], lam=d["lambda"], internal_epsilon=d["internal_epsilon"],
        eps_prime=d["eps_prime"], eps_double_prime=d["eps_double_prime"],
        h=tuple(Fraction(x) for x in d["h"]), beta=d["beta"], k0=d["k0"],
        degrees=tuple(d["degrees"]), sigma=tuple(d["sigma"]), overrides=dict(d["overrides"]))


# ---------------------------------------------------------------- layers

def _layer_to_dict(layer: HopsetLayer) -> dict:
    return {
        "scale": layer.scale,
        "group": layer.group,
        "edges": [[e.u, e.v, e.w, e.kind, e.phase, None if e.path is None else e.path.to_json()]
                  for e in layer.edges],
        "phases": [asdict(p) for p in layer.phases],
        "counters": layer.counters.to_dict(),
    }


def _layer_from_dict(d: dict) -> HopsetLayer:
    edges = [HopEdge(u, v, float(w), kind, phase, None if p is None else Walk.from_json(p))
             for u, v, w, kind, phase, p in d["edges"]]
    return HopsetLayer(scale=d["scale"], edges=edges, group=d["group"],
                       phases=[PhaseStats(**p) for p in d["phases"]],
                       counters=Counters(**d["counters"]))


# ---------------------------------------------------------------- reduced metadata

def _reduced_to_dict(meta) -> dict:
    sgs = []
    for k in meta.scales:
        sg = meta.scale_graphs[k]
        sgs.append({
            "k": sg.k, "threshold": sg.threshold, "cap": sg.cap,
            "nodes": [list(ms) for ms in sg.nodes], "tree_edges": list(sg.tree_edges),
            "superedges": [[s.x, s.y, s.w, s.a, s.b, s.edge] for s in sg.superedges],
            "centers": list(sg.centers),
            "superedge_order": list(meta.superedge_order.get(k, [])),
        })
    ss = meta.star_set
    return {
        "epsilon": meta.epsilon,
        "scale_graphs": sgs,
        "stars": [[s.center, s.member, s.w, s.tree_parent, s.tree_edge] for s in ss.stars],
        "forest_iterations": ss.forest_iterations,
        "distinct_nodes": ss.distinct_nodes,
    }


def _reduced_from_dict(d: dict, n: int):
    from .reduction import (ReducedMeta, ReducedScaleGraph, StarEdge, StarEdgeSet,
                            Superedge)
    sgs = {}
    order = {}
    for s in d["scale_graphs"]:
        nodes = [tuple(ms) for ms in s["nodes"]]
        node_of = [0] * n
        for idx, ms in enumerate(nodes):
            for v in ms:
                node_of[v] = idx
        supers = [Superedge(x, y, float(w), a, b, e) for x, y, w, a, b, e in s["superedges"]]
        sgs[s["k"]] = ReducedScaleGraph(s["k"], s["threshold"], s["cap"], nodes, node_of,
                                        list(s["tree_edges"]), supers, list(s["centers"]))
        order[s["k"]] = list(s["superedge_order"])
    stars = [StarEdge(c, m, float(w), tp, te) for c, m, w, tp, te in d["stars"]]
    index = {(s.center, s.member): i for i, s in enumerate(stars)}
    star_set = StarEdgeSet(stars, index, d["forest_iterations"], d["distinct_nodes"])
    return ReducedMeta(d["epsilon"], sorted(sgs), sgs, star_set, order)


# ---------------------------------------------------------------- hopsets

def hopset_to_dict(h: Hopset) -> dict:
    return {
        "format": FORMAT,
        "mode": h.mode,
        "n": h.n,
        "graph_checksum": h.graph_checksum,
        "hopbound": h.hopbound,
        "size": h.size,
        "schedule": h.schedule.to_dict(),
        "counters": h.counters.to_dict(),
        "layers": [_layer_to_dict(layer) for layer in h.layers],
        "reduced": None if h.reduced is None else _reduced_to_dict(h.reduced),
    }


def hopset_from_dict(d: dict) -> Hopset:
    if d.get("format") != FORMAT:
        raise FormatError(f"unsupported hopset format {d.get('format')!r}, expected {FORMAT}")
    reduced = None if d["reduced"] is None else _reduced_from_dict(d["reduced"], d["n"])
    return Hopset(d["mode"], d["n"], schedule_from_dict(d["schedule"]),
                  [_layer_from_dict(x) for x in d["layers"]], d["graph_checksum"],
                  d["hopbound"], Counters(**d["counters"]), reduced)


def dump_hopset(h: Hopset) -> str:
    return dumps(hopset_to_dict(h))


def load_hopset(text: str) -> Hopset:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"not a hopset file: {exc}") from exc
    return hopset_from_dict(data)


# ---------------------------------------------------------------- distances and trees

def distances_to_dict(sources, rows, hopbound: int, checksum: str) -> dict:
    return {
        "graph_checksum": checksum,
        "hopbound": hopbound,
        "sources": list(sources),
        "dist": [[_finite(float(x)) for x in row.dist] for row in rows],
    }


def spt_to_dict(res, checksum: str) -> dict:
    return {
        "graph_checksum": checksum,
        "root": res.root,
        "parent": list(res.parent),
        "edge": [None if p < 0 else r[1] for p, r in zip(res.parent, res.ref)],
        "dist": [_finite(float(x)) for x in res.dist],
        "pointer_jump_iterations": res.jump_iterations,
        "mode": res.hopset.mode,
    }


def spt_to_tsv(res) -> str:
    lines = ["vertex\tparent\tedge\tdistance"]
    for v, (p, r) in enumerate(zip(res.parent, res.ref)):
        d = float(res.dist[v])
        if v == res.root:
            lines.append(f"{v}\t-\t-\t0.0")
        elif p < 0:
            lines.append(f"{v}\t-\t-\tinf")
        else:
            lines.append(f"{v}\t{p}\t{r[1]}\t{d!r}")
    return "\n".join(lines) + "\n"
