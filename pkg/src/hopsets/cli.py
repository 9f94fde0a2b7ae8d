"""``hopsets`` command line: build, query, spt, validate, bench, generate.

Every command writes into the ``--out`` directory.  Exit codes: 0 success,
1 internal failure (including a failed validation), 2 bad configuration or
input, 3 a hopset or tree that does not belong to the given graph.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import audit, report, serialize
from .builder import build_hopset
from .generators import FAMILIES, generate
from .graph import (Graph, GraphError, all_pairs, bounded_bellman_ford, dijkstra_oracle,
                    dump_graph, read_graph)
from .memory import MemoryCapExceeded
from .paths import extract_spt
from .query import HopsetIndex, mssd
from .schedule import ConfigError

log = logging.getLogger("hopsets")

EXIT_OK, EXIT_INTERNAL, EXIT_CONFIG, EXIT_MISMATCH = 0, 1, 2, 3
MODES = ("direct", "path-reporting", "reduced")


class Mismatch(Exception):
    """An artifact built for a different graph."""


class ValidationFailed(Exception):
    """A validated bound did not hold."""


# ---------------------------------------------------------------- configuration

def read_config(path: str) -> dict:
    """``key = value`` lines; ``#`` starts a comment; keys use flag names."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.lstrip("-").replace("-", "_")] = value
    return out


def resolve_threads(value) -> int:
    if value is None:
        value = os.environ.get("HOPSET_THREADS", "1")
    try:
        threads = int(value)
    except ValueError as exc:
        raise ConfigError(f"threads must be an integer, got {value!r}") from exc
    if threads < 1:
        raise ConfigError("threads must be >= 1")
    return threads


def _parse_sources(text: str | None, n: int) -> list[int]:
    if text is None:
        return [0]
    if text == "all":
        return list(range(n))
    try:
        out = [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad source list {text!r}") from exc
    for s in out:
        if not 0 <= s < n:
            raise ConfigError(f"source {s} out of range for n={n}")
    if not out:
        raise ConfigError("empty source list")
    return out


def _overrides(args) -> dict:
    return {"internal_epsilon": args.internal_epsilon, "stretch_epsilon": args.stretch_epsilon,
            "hopbound": args.hopbound}


def _load_graph(args) -> Graph:
    if not args.input:
        raise ConfigError("--input is required")
    try:
        return read_graph(args.input, args.format)
    except OSError as exc:
        raise ConfigError(f"cannot read {args.input}: {exc}") from exc


def _load_hopset(path: str, g: Graph):
    try:
        h = serialize.load_hopset(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    except serialize.FormatError as exc:
        raise Mismatch(str(exc)) from exc
    if h.graph_checksum != g.checksum():
        raise Mismatch(f"{path} was built for a different graph (checksum mismatch)")
    return h


def _build(g: Graph, args, mode: str):
    kw = dict(max_memory_hops=args.max_memory_hops, **_overrides(args))
    if mode == "reduced":
        from .reduction import build_reduced_hopset
        return build_reduced_hopset(g, args.epsilon, args.kappa, args.rho, memory=True, **kw)
    return build_hopset(g, args.epsilon, args.kappa, args.rho, memory=mode == "path-reporting",
                        **kw)


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_json(path: Path, obj) -> None:
    path.write_text(serialize.dumps(obj))


# ---------------------------------------------------------------- commands

def cmd_generate(args) -> int:
    if args.n is None or args.n < 1:
        raise ConfigError("--n must be a positive integer")
    g = generate(args.family, args.n, seed=args.seed, max_weight=args.max_weight)
    out = _out_dir(args)
    ext = "gr" if args.format == "dimacs" else "csv"
    path = out / f"{args.family}_{args.n}_{args.seed}.{ext}"
    path.write_text(dump_graph(g, args.format or "csv"))
    print(path)
    return EXIT_OK


def cmd_build(args) -> int:
    g = _load_graph(args)
    t0 = time.perf_counter()
    h = _build(g, args, args.mode)
    wall = time.perf_counter() - t0
    out = _out_dir(args)
    (out / "hopset.json").write_text(serialize.dump_hopset(h))
    sizes = audit.size_bounds(h)
    rep = {
        "mode": h.mode, "n": g.n, "m": g.m, "size": h.size, "hopbound": h.hopbound,
        "beta": h.schedule.beta, "ell": h.schedule.ell, "vacuous": h.schedule.vacuous,
        "schedule": h.schedule.to_dict(), "counters": h.counters.to_dict(),
        "per_scale": {str(k): v for k, v in sizes["per_scale"].items()},
        "bounds": {k: v for k, v in sizes.items() if k != "per_scale"},
        "wall_time": wall,
    }
    _write_json(out / "build_report.json", rep)
    report.write_csv(out / "build_scales.csv", ["scale", "edges"],
                     sorted((str(k), v) for k, v in sizes["per_scale"].items()))
    print(f"built {h.mode} hopset: {h.size} edges, hopbound {h.hopbound}, "
          f"{h.counters.rounds} rounds, {wall:.2f}s")
    return EXIT_OK


def _hopset_for(args, g: Graph):
    if args.hopset:
        return _load_hopset(args.hopset, g)
    return _build(g, args, args.mode)


def cmd_query(args) -> int:
    g = _load_graph(args)
    h = _hopset_for(args, g)
    sources = _parse_sources(args.sources or args.source, g.n)
    idx = HopsetIndex.from_hopset(g, h)
    rows = mssd(idx, sources, threads=resolve_threads(args.threads))
    out = _out_dir(args)
    _write_json(out / "distances.json",
                serialize.distances_to_dict(sources, rows, h.hopbound, g.checksum()))
    lines = ["vertex\t" + "\t".join(str(s) for s in sources)]
    for v in range(g.n):
        lines.append(f"{v}\t" + "\t".join(repr(float(r.dist[v])) for r in rows))
    (out / "distances.tsv").write_text("\n".join(lines) + "\n")
    print(f"{len(sources)} source(s), hopbound {h.hopbound}")
    return EXIT_OK


def cmd_spt(args) -> int:
    g = _load_graph(args)
    h = _hopset_for(args, g)
    if h.mode == "direct":
        raise ConfigError("a direct hopset stores no paths; build with --mode path-reporting "
                          "or reduced")
    sources = _parse_sources(args.sources or args.source, g.n)
    out = _out_dir(args)
    for s in sources:
        res = extract_spt(g, s, h.schedule.epsilon, h.schedule.kappa, h.schedule.rho, hopset=h)
        _write_json(out / f"spt_{s}.json", serialize.spt_to_dict(res, g.checksum()))
        (out / f"spt_{s}.tsv").write_text(serialize.spt_to_tsv(res))
    print(f"{len(sources)} tree(s) written to {out}")
    return EXIT_OK


def _validate_trees(g: Graph, args, out: Path, eps: float) -> list[dict]:
    rows = []
    for path in args.tree:
        data = json.loads(Path(path).read_text())
        if data.get("graph_checksum") != g.checksum():
            raise Mismatch(f"{path} was extracted from a different graph")
        dist = [np.inf if d is None else d for d in data["dist"]]
        ta = audit.audit_tree(g, data["root"], data["parent"], data["edge"], dist)
        rows.append({"tree": Path(path).name, "ok": ta.ok(eps), **ta.__dict__})
    _write_json(out / "tree_audit.json", rows)
    return rows


def cmd_validate(args) -> int:
    g = _load_graph(args)
    out = _out_dir(args)
    eps = args.epsilon
    summary: dict = {"n": g.n, "level": args.validate}
    failed = []
    if args.tree:
        trees = _validate_trees(g, args, out, eps)
        summary["trees"] = trees
        failed += [t["tree"] for t in trees if not t["ok"]]
    if args.validate != "none":
        if args.validate == "all" and g.n > args.all_pairs_limit:
            raise ConfigError(f"all-pairs validation refused for n={g.n} > "
                              f"{args.all_pairs_limit}; use --validate sampled")
        h = _hopset_for(args, g)
        eps = h.schedule.epsilon
        if args.validate == "all":
            sources = list(range(g.n))
        else:
            rng = np.random.default_rng(args.seed)
            k = min(g.n, args.samples)
            sources = sorted(rng.choice(g.n, size=k, replace=False).tolist())
        idx = HopsetIndex.from_hopset(g, h)
        rows = mssd(idx, sources, threads=resolve_threads(args.threads))
        sr = audit.stretch_report(g, rows, all_pairs(g, sources), h.hopbound)
        hist = report.stretch_histogram(sr.ratios)
        report.write_csv(out / "stretch.csv", ["lo", "hi", "pairs"], hist)
        if args.figures:
            report.plot_stretch(hist, out / "stretch.png", eps)
        guaranteed = not h.schedule.overrides
        summary.update(pairs=sr.pairs, max_stretch=sr.max_stretch, min_ratio=sr.min_ratio,
                       max_hops=sr.max_hops, hopbound=sr.hopbound, epsilon=eps,
                       guaranteed=guaranteed, within=sr.within(eps))
        if guaranteed and not sr.within(eps):
            failed.append("stretch")
        elif not guaranteed and not sr.within(eps):
            log.warning("stretch %.6g exceeds 1+eps, expected with schedule overrides",
                        sr.max_stretch)
    _write_json(out / "validate.json", summary)
    if failed:
        raise ValidationFailed(f"validation failed: {', '.join(failed)}")
    print(f"validation passed ({args.validate})")
    return EXIT_OK


def cmd_bench(args) -> int:
    if args.input:
        g = _load_graph(args)
    else:
        g = generate(args.family, args.n or 256, seed=args.seed, max_weight=args.max_weight)
    h = _hopset_for(args, g)
    idx = HopsetIndex.from_hopset(g, h)
    rng = np.random.default_rng(args.seed)
    sources = sorted(rng.choice(g.n, size=min(g.n, args.samples), replace=False).tolist())
    methods = (("dijkstra", lambda s: dijkstra_oracle(g, s)),
               ("bellman-ford", lambda s: bounded_bellman_ford(g, [s], h.hopbound)),
               ("bellman-ford-full", lambda s: bounded_bellman_ford(g, [s], g.n - 1)),
               ("hopset", lambda s: bounded_bellman_ford(idx.merged, [s], h.hopbound)))
    rows, rounds = [], {}
    for s in sources:
        for method, fn in methods:
            t0 = time.perf_counter()
            dv = fn(s)
            elapsed = time.perf_counter() - t0
            # Dijkstra is sequential: one settled vertex per step
            steps = int(np.isfinite(dv.dist).sum()) if method == "dijkstra" else dv.rounds
            rounds.setdefault(method, []).append(steps)
            rows.append((method, s, elapsed, dv.relaxations))
    out = _out_dir(args)
    report.write_csv(out / "bench.csv", ["method", "source", "time", "relaxations"], rows)
    summary = []
    for method, _ in methods:
        mine = [r for r in rows if r[0] == method]
        summary.append((method, float(np.mean([r[2] for r in mine])),
                        float(np.mean(rounds[method])), float(np.mean([r[3] for r in mine]))))
    report.write_csv(out / "bench_summary.csv",
                     ["method", "mean_time", "mean_rounds", "mean_relaxations"], summary)
    if args.figures:
        report.plot_bench(summary, out / "bench.png")
    for method, t, rd, rl in summary:
        print(f"{method:17s} {t * 1e3:9.3f} ms {rd:9.1f} rounds {rl:12.1f} relaxations")
    return EXIT_OK


# ---------------------------------------------------------------- parser

def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="key=value file; flags given on the command line win")
    p.add_argument("--input", help="graph file (csv or DIMACS .gr)")
    p.add_argument("--format", choices=("csv", "dimacs"), help="graph format (default by extension)")
    p.add_argument("--out", default="out", help="output directory")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", default=None, help="worker threads (default $HOPSET_THREADS or 1)")
    p.add_argument("--verbose", action="store_true")


def _add_params(p: argparse.ArgumentParser) -> None:
    p.add_argument("--epsilon", type=float, default=0.5)
    p.add_argument("--kappa", type=int, default=2)
    p.add_argument("--rho", type=float, default=0.45)
    p.add_argument("--mode", choices=MODES, default="path-reporting")
    p.add_argument("--hopset", help="previously built hopset.json (built on the fly otherwise)")
    p.add_argument("--internal-epsilon", type=float, default=None,
                   help="practical override of the internal epsilon (voids the stretch bound)")
    p.add_argument("--stretch-epsilon", type=float, default=None,
                   help="practical override of the per-scale stretch growth")
    p.add_argument("--hopbound", type=int, default=None, help="practical override of beta")
    p.add_argument("--max-memory-hops", type=int, default=None,
                   help="fail if a stored path exceeds this many hops")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hopsets", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a seeded synthetic graph")
    _add_common(p)
    p.add_argument("--family", choices=FAMILIES, default="er")
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--max-weight", type=float, default=1e9)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("build", help="build a hopset and its report")
    _add_common(p)
    _add_params(p)
    p.set_defaults(func=cmd_build)

    for name, func, text in (("query", cmd_query, "approximate distances from sources"),
                             ("spt", cmd_spt, "approximate shortest-path trees over E")):
        p = sub.add_parser(name, help=text)
        _add_common(p)
        _add_params(p)
        p.add_argument("--source", default=None, help="one source vertex")
        p.add_argument("--sources", default=None, help="comma separated list or 'all'")
        p.set_defaults(func=func)

    p = sub.add_parser("validate", help="check distances and trees against Dijkstra")
    _add_common(p)
    _add_params(p)
    p.add_argument("--validate", choices=("none", "sampled", "all"), default="sampled")
    p.add_argument("--samples", type=int, default=32, help="sources for sampled validation")
    p.add_argument("--all-pairs-limit", type=int, default=1024)
    p.add_argument("--tree", action="append", default=[], help="spt_*.json to audit")
    p.add_argument("--figures", action="store_true", help="also render stretch.png")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("bench", help="hopset queries against Dijkstra and plain Bellman-Ford")
    _add_common(p)
    _add_params(p)
    p.add_argument("--family", choices=FAMILIES, default="er")
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--max-weight", type=float, default=1e9)
    p.add_argument("--samples", type=int, default=16)
    p.add_argument("--figures", action="store_true", help="also render bench.png")
    p.set_defaults(func=cmd_bench)
    return parser


def parse_args(argv=None) -> argparse.Namespace:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        try:
            conf = read_config(args.config)
        except OSError as exc:
            raise ConfigError(f"cannot read {args.config}: {exc}") from exc
        sub = parser._subparsers._group_actions[0].choices[args.command]
        actions = {a.dest: a for a in sub._actions}
        unknown = sorted(set(conf) - set(actions))
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        for key, value in conf.items():
            if isinstance(actions[key], argparse._StoreTrueAction):
                conf[key] = value.lower() in ("1", "true", "yes", "on")
            elif isinstance(actions[key], argparse._AppendAction):
                conf[key] = [x.strip() for x in value.split(",") if x.strip()]
        sub.set_defaults(**conf)
        args = parser.parse_args(argv)
    return args


def main(argv=None) -> int:
    try:
        args = parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        return args.func(args)
    except (ConfigError, GraphError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Mismatch as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MISMATCH
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ValidationFailed, MemoryCapExceeded, AssertionError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
