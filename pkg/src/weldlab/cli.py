"""Command line entry point.

Exit codes: 0 on success, 1 when a tester rejects or a suite criterion
fails, 2 on configuration errors (bad flags, missing files, malformed input).
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import adversary as adv
from .advice import TableAdvice, parity_advice
from .analysis import DomainError, bipartite_distance, structural_census
from .experiments import SUITES, run_suite
from .generators import CONVENTIONS, InstanceSpec, Variant, build_instance
from .graph import GraphError, OracleHandle
from .graphio import load_advice, load_graph, save_advice, save_graph
from .marker import AdviceMap
from .qwalk import sweep
from .rng import child_seed, default_seed
from .tester import TestContext, TesterConfig, final_test

log = logging.getLogger("weldlab")

PRECISION = 12


class ConfigError(Exception):
    pass


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.{PRECISION}f}"
    return "" if x is None else str(x)


def write_csv(path, header: list[str], rows) -> None:
    """Fixed-precision CSV so equal configs give byte-identical files."""
    out = sys.stdout if path in (None, "-") else open(path, "w", newline="")
    try:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(row[h]) for h in header])
    finally:
        if out is not sys.stdout:
            out.close()


def sidecar(path) -> Path:
    return Path(str(path) + ".advice")


def _graph(path):
    if not Path(path).exists():
        raise ConfigError(f"graph-core: no such file {path}")
    return load_graph(path)


def _k(args, g) -> int:
    k = args.k if args.k is not None else g.k
    if not k:
        raise ConfigError("cli: --k is required when the graph header has k=0")
    return k


# ------------------------------------------------------------------ commands

def cmd_gen(args) -> int:
    spec = InstanceSpec(args.k, Variant(args.variant), j=args.j, seed=args.seed,
                        advice_convention=args.advice_convention)
    inst = build_instance(spec)
    save_graph(inst.graph, args.output)
    save_advice(inst.is_weld, sidecar(args.output))
    if args.parity_advice:
        o = inst.oracle
        save_advice(parity_advice(inst).bits[o.label_of], args.parity_advice)
    log.info("wrote %s (n=%d)", args.output, inst.graph.vertex_count)
    return 0


def _advice_factory(args, g, k):
    if args.advice == "quantum":
        return lambda o, seed: AdviceMap(o, k, seed, args.advice_convention)
    if not Path(args.advice).exists():
        raise ConfigError(f"classical-tester: no such advice file {args.advice}")
    bits = load_advice(args.advice, g.vertex_count)
    # sidecars are keyed by file id; the tester sees labels
    return lambda o, seed: TableAdvice(bits[o.vertex_of])


def cmd_test(args) -> int:
    g = _graph(args.graph)
    k = _k(args, g)
    make_advice = _advice_factory(args, g, k)
    cfg = TesterConfig(k, eps=args.eps, c1=args.c1, c2=args.c2, convention=args.advice_convention)
    rows, rejected = [], 0
    for trial in range(args.trials):
        seed = args.seed if args.trials == 1 else child_seed(args.seed, "test", trial)
        o = OracleHandle(g, seed=seed)
        v = final_test(TestContext(o, make_advice(o, seed), cfg, seed=seed))
        if not v.accept:
            rejected += 1
            log.warning("seed %d rejected: %s", seed, v.reason.value)
        rows.append({"seed": seed, "verdict": "accept" if v.accept else "reject",
                     "reason": v.reason.value if v.reason else "", "oracle_queries": v.queries_used,
                     "advice_queries": v.advice_queries})
    write_csv(args.csv, ["seed", "verdict", "reason", "oracle_queries", "advice_queries"], rows)
    return 1 if rejected else 0


def cmd_mark(args) -> int:
    g = _graph(args.graph)
    k = _k(args, g)
    o = OracleHandle(g, seed=args.seed)
    amap = AdviceMap(o, k, args.seed, args.advice_convention)
    bits = np.array([amap.mark(int(o.label_of[v])) for v in range(g.vertex_count)], np.int8)
    save_advice(bits, args.output)
    log.info("marked %d weld vertices; modeled quantum queries %d, classical %d",
             int(bits.sum()), amap.modeled_quantum_queries, amap.classical_queries)
    if args.audit:
        truth_path = sidecar(args.graph)
        if not truth_path.exists():
            log.warning("no sidecar %s; audit skipped", truth_path)
            return 0
        truth = load_advice(truth_path, g.vertex_count)
        bad = int((truth != bits).sum())
        print(json.dumps({"vertices": g.vertex_count, "mismatches": bad, "malformed": amap.malformed}))
        return 1 if bad else 0
    return 0


def cmd_walk(args) -> int:
    s = sweep(args.k, args.t_max, args.dt)
    rows = ({"t": t, "p_entrance": a, "p_exit": b} for t, a, b in zip(s.t, s.p_entrance, s.p_exit))
    write_csv(args.csv, ["t", "p_entrance", "p_exit"], rows)
    log.info("p*=%.6f at t=%.2f", s.p_star, s.t_argmax)
    return 0


GAME_COLUMNS = ["k", "t", "trials", "wins", "win_prob", "stderr"]


def cmd_games(args) -> int:
    r = adv.run_game(adv.GameSpec(args.game, args.k, args.t, args.trials), args.strategy, args.seed)
    write_csv(args.csv, ["game", "strategy"] + GAME_COLUMNS + ["bound"],
              [{"game": args.game, "strategy": r.strategy, "k": args.k, "t": args.t, "trials": args.trials,
                "wins": r.wins, "win_prob": r.win_prob, "stderr": r.stderr,
                "bound": adv.game_bound(args.k, args.t)}])
    return 0


def cmd_distinguish(args) -> int:
    if not 0 <= args.t <= 2 ** (args.k - 1):
        raise ConfigError(f"adversary-lab: budget t={args.t} outside [0, 2^(k-1)]")
    r = adv.distinguishing_experiment(args.k, args.t, args.strategy, args.trials, args.seed,
                                      diagnostics=False)
    rows = []
    # one row per world; wins count correct guesses
    for world, said_g1 in (("g1", r.g1_says_g1), ("g2", r.g2_says_g1)):
        wins = said_g1 if world == "g1" else args.trials - said_g1
        p = wins / args.trials
        rows.append({"world": world, "strategy": r.strategy, "k": args.k, "t": args.t, "trials": args.trials,
                     "wins": wins, "win_prob": p, "stderr": math.sqrt(p * (1 - p) / args.trials),
                     "advantage": r.advantage})
    write_csv(args.csv, ["world", "strategy"] + GAME_COLUMNS + ["advantage"], rows)
    return 0


def cmd_census(args) -> int:
    g = _graph(args.graph)
    rep = structural_census(g, k=args.k, convention=args.advice_convention)
    rows = [{"field": name, "observed": obs, "expected": exp}
            for name, obs, exp in rep.rows()]
    write_csv(args.csv, ["field", "observed", "expected"], rows)
    for f in rep.failures:
        log.warning("census mismatch: %s", f)
    return 0 if rep.passed else 1


def cmd_distance(args) -> int:
    g = _graph(args.graph)
    rep = bipartite_distance(g, args.mode, args.seed)
    write_csv(args.csv, ["mode", "is_bipartite", "witness_length", "lower_bound", "upper_bound", "exact"],
              [{"mode": args.mode, "is_bipartite": rep.is_bipartite,
                "witness_length": len(rep.odd_cycle_witness) if rep.odd_cycle_witness else 0,
                "lower_bound": rep.lower_bound, "upper_bound": rep.upper_bound, "exact": rep.exact}])
    return 0


def cmd_suite(args) -> int:
    summary = run_suite(args.name, args.seed)
    text = json.dumps(summary, indent=2, default=str)
    if args.json:
        Path(args.json).write_text(text + "\n")
    else:
        print(text)
    for c in summary["criteria"]:
        log.info("%s criterion %s: %s", "PASS" if c["passed"] else "FAIL", c["id"], c["name"])
    failed = [c["id"] for c in summary["criteria"] if not c["passed"]]
    if failed:
        log.error("suite %s failed criteria %s", args.name, failed)
        return 1
    return 0


# -------------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="root seed (default: $WELDLAB_SEED)")
    common.add_argument("--config", help="JSON object whose keys override flags")
    common.add_argument("--advice-convention", choices=CONVENTIONS, default="odd-weld")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="weldlab", description="Welded-tree property testing lab")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("gen", parents=[common], help="generate an instance")
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--variant", choices=[v.value for v in Variant], default="g1")
    s.add_argument("--j", type=int, default=1)
    s.add_argument("-o", "--output", required=True)
    s.add_argument("--parity-advice", help="also write loop-parity advice to this file")
    s.set_defaults(func=cmd_gen)

    s = sub.add_parser("test", parents=[common], help="run the classical tester")
    s.add_argument("--graph", required=True)
    s.add_argument("--advice", required=True, help="advice file or 'quantum'")
    s.add_argument("--k", type=int)
    s.add_argument("--eps", type=float, default=0.1)
    s.add_argument("--c1", type=float, default=10.0)
    s.add_argument("--c2", type=float, default=10.0)
    s.add_argument("--trials", type=int, default=1)
    s.add_argument("--csv")
    s.set_defaults(func=cmd_test)

    s = sub.add_parser("mark", parents=[common], help="mark weld vertices with the walk-based marker")
    s.add_argument("--graph", required=True)
    s.add_argument("--k", type=int)
    s.add_argument("-o", "--output", required=True)
    s.add_argument("--audit", action="store_true")
    s.set_defaults(func=cmd_mark)

    s = sub.add_parser("walk", parents=[common], help="exit-probability sweep")
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--t-max", type=float)
    s.add_argument("--dt", type=float, default=0.05)
    s.add_argument("--csv")
    s.set_defaults(func=cmd_walk)

    for name, func in (("games", cmd_games), ("distinguish", cmd_distinguish)):
        s = sub.add_parser(name, parents=[common])
        if name == "games":
            s.add_argument("--game", choices=sorted(adv.GAMES), required=True)
        s.add_argument("--k", type=int, required=True)
        s.add_argument("--t", type=int, required=True)
        s.add_argument("--trials", type=int, default=1000)
        s.add_argument("--strategy", choices=sorted(adv.STRATEGIES), default="bfs")
        s.add_argument("--csv")
        s.set_defaults(func=func)

    s = sub.add_parser("census", parents=[common], help="structural census of a graph file")
    s.add_argument("--graph", required=True)
    s.add_argument("--k", type=int)
    s.add_argument("--csv")
    s.set_defaults(func=cmd_census)

    s = sub.add_parser("distance", parents=[common], help="distance to bipartiteness")
    s.add_argument("--graph", required=True)
    s.add_argument("--mode", choices=["lb", "ub", "exact"], default="lb")
    s.add_argument("--csv")
    s.set_defaults(func=cmd_distance)

    s = sub.add_parser("suite", parents=[common], help="run an acceptance bundle")
    s.add_argument("name")
    s.add_argument("--json", help="write the summary here instead of stdout")
    s.set_defaults(func=cmd_suite)
    return p


def apply_config(parser: argparse.ArgumentParser, args: argparse.Namespace) -> argparse.Namespace:
    if args.config:
        try:
            cfg = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as err:
            raise ConfigError(f"cli: cannot read config {args.config}: {err}") from None
        if not isinstance(cfg, dict):
            raise ConfigError("cli: config must be a JSON object")
        for key, value in cfg.items():
            dest = key.replace("-", "_")
            if dest in ("command", "func", "config") or not hasattr(args, dest):
                raise ConfigError(f"cli: unknown config key {key!r} for {args.command}")
            setattr(args, dest, value)
    if args.seed is None:
        args.seed = default_seed()
    if args.command == "suite" and args.name not in SUITES:
        raise ConfigError(f"cli: unknown suite {args.name!r}; choose from {', '.join(SUITES)}")
    return args


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args = apply_config(parser, args)
        return args.func(args)
    except (ConfigError, GraphError, DomainError, ValueError, KeyError) as err:
        log.error("%s", err)
        return 2


if __name__ == "__main__":
    sys.exit(main())
