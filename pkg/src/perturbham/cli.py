"""Command-line interface.

Subcommands: ``run`` (Monte Carlo trials to JSONL), ``summarize`` (JSONL to a
CSV of per-config success rates), ``pseudo-check`` (discrepancy report for a
serialized graph as one JSON object), and ``oracle`` (exact searches on a
serialized graph). Exit codes: 0 ok, 2 bad configuration, 3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .errors import ConfigError, PerturbError
from .experiment import run_experiment, summarize
from .generators import SEED_FAMILIES, PerturbationConfig
from .graph_core import load_graph
from .oracle import (
    HAMILTON_MAX_N,
    PATH_MAX_N,
    OracleBudget,
    brute_longest_rainbow_path,
    brute_rainbow_hamilton,
)
from .pseudo_check import jumbledness_exact, jumbledness_sampled

EXIT_OK = 0
EXIT_BAD_CONFIG = 2
EXIT_IO = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="perturb", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run Monte Carlo trials of the full pipeline")
    run_p.add_argument("--n", type=int, required=True)
    run_p.add_argument("--d", type=float, required=True)
    run_p.add_argument("--family", choices=SEED_FAMILIES, required=True)
    run_p.add_argument("--C", type=float, required=True)
    run_p.add_argument("--K", type=float, required=True)
    run_p.add_argument("--alpha", type=float, required=True)
    eps = run_p.add_mutually_exclusive_group()
    eps.add_argument("--epsilon", type=float, default=None, help="fraction of vertices the first-round path may miss")
    eps.add_argument("--faithful-epsilon", action="store_true", help="pin epsilon to the analysis default d^3/220")
    run_p.add_argument("--trials", type=int, required=True)
    run_p.add_argument("--seed", type=int, required=True, help="master seed; trial i uses stream (seed, i)")
    run_p.add_argument("--out", required=True, help="JSONL output path (timings go to <out>.timings)")
    run_p.add_argument("--dump", default=None, metavar="DIR", help="dump per-trial graphs and success cycles")
    run_p.add_argument("--trace", action="store_true", help="dump per-round search logs")
    run_p.add_argument("--workers", type=int, default=1)

    sum_p = sub.add_parser("summarize", help="aggregate a JSONL record file into CSV")
    sum_p.add_argument("--in", dest="in_path", required=True)
    sum_p.add_argument("--out", dest="out_path", required=True)

    pc_p = sub.add_parser("pseudo-check", help="discrepancy report for a serialized graph")
    pc_p.add_argument("--in", dest="in_path", required=True)
    pc_p.add_argument("--p", type=float, required=True, help="density parameter of the discrepancy condition")
    pc_p.add_argument("--mode", choices=("exact", "sampled"), default="exact")
    pc_p.add_argument("--k", type=int, default=None, help="subset size for sampled mode")
    pc_p.add_argument("--samples", type=int, default=1000)
    pc_p.add_argument("--seed", type=int, default=0)

    or_p = sub.add_parser("oracle", help="exact rainbow path and Hamilton cycle search")
    or_p.add_argument("--in", dest="in_path", required=True)
    or_p.add_argument("--node-limit", type=int, default=5_000_000)

    return parser


def _cmd_run(args) -> int:
    cfg = PerturbationConfig(
        n=args.n,
        d=args.d,
        family=args.family,
        C=args.C,
        K=args.K,
        alpha=args.alpha,
        epsilon=None if args.faithful_epsilon else args.epsilon,
        master_seed=args.seed,
    )
    records = run_experiment(
        cfg,
        trials=args.trials,
        out_path=args.out,
        workers=args.workers,
        dump_dir=args.dump,
        trace=args.trace,
    )
    successes = sum(1 for r in records if r.success)
    print(f"wrote {len(records)} record(s) to {args.out}; {successes} success(es)", file=sys.stderr)
    return EXIT_OK


def _cmd_summarize(args) -> int:
    rows = summarize(args.in_path, args.out_path)
    print(f"wrote {len(rows)} group row(s) to {args.out_path}", file=sys.stderr)
    return EXIT_OK


def _cmd_pseudo_check(args) -> int:
    g = load_graph(args.in_path)
    if args.mode == "exact":
        report = jumbledness_exact(g, args.p)
    else:
        if args.k is None:
            raise ConfigError("sampled mode requires --k")
        rng = np.random.default_rng(args.seed)
        report = jumbledness_sampled(g, args.p, [args.k], args.samples, rng)
    payload = report.to_json_dict()
    payload["n"] = g.n
    payload["p"] = args.p
    print(json.dumps(payload))
    return EXIT_OK


def _cmd_oracle(args) -> int:
    g = load_graph(args.in_path)
    if g.n > PATH_MAX_N:
        raise ConfigError(f"oracle handles n <= {PATH_MAX_N}, got n={g.n}")
    path_res = brute_longest_rainbow_path(g, OracleBudget(max_n=PATH_MAX_N, node_limit=args.node_limit))
    payload: dict = {
        "longest_path": list(path_res.path.seq),
        "longest_path_edges": path_res.path.edge_length,
        "path_search_exhausted": path_res.exhausted,
    }
    if g.n <= HAMILTON_MAX_N:
        ham = brute_rainbow_hamilton(g, OracleBudget(max_n=HAMILTON_MAX_N, node_limit=args.node_limit))
        payload["hamilton_cycle"] = None if ham.cycle is None else list(ham.cycle.seq)
        payload["hamilton_search_exhausted"] = ham.exhausted
    else:
        payload["hamilton_cycle"] = None
        payload["hamilton_skipped"] = f"n exceeds hamilton cap {HAMILTON_MAX_N}"
    print(json.dumps(payload))
    return EXIT_OK


COMMANDS = {
    "run": _cmd_run,
    "summarize": _cmd_summarize,
    "pseudo-check": _cmd_pseudo_check,
    "oracle": _cmd_oracle,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_CONFIG
    except PerturbError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_CONFIG
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
