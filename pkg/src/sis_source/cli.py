"""Command-line interface: ``sis-source {simulate,estimate,verify,experiment}``.

Exit status is 0 on success, 1 on a domain error (bad input file, empty
observation, failed verification), 2 on a usage error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from . import estimators, experiments, verify
from .graph import GraphError, read_edge_list, read_infected, regular_tree
from .sis import SisParams, simulate

EXIT_OK, EXIT_DOMAIN, EXIT_USAGE = 0, 1, 2


class DomainError(Exception):
    pass


def _probability(text: str) -> float:
    try:
        q = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0.0 < q < 1.0:
        raise argparse.ArgumentTypeError(f"q must lie in the open interval (0, 1), got {text}")
    return q


def _nonneg(text: str) -> int:
    try:
        x = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if x < 0:
        raise argparse.ArgumentTypeError(f"must be non-negative, got {x}")
    return x


def _positive(text: str) -> int:
    x = _nonneg(text)
    if x == 0:
        raise argparse.ArgumentTypeError("must be positive, got 0")
    return x


def _degrees(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _read(reader, path: str):
    try:
        return reader(path)
    except OSError as exc:
        raise DomainError(f"cannot read {path}: {exc.strerror}") from None
    except GraphError as exc:
        raise DomainError(f"{path}: {exc}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sis-source", description="Infection source estimation under SIS spreading.")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run the SIS process and print the final infected set")
    where = sim.add_mutually_exclusive_group(required=True)
    where.add_argument("--degree", type=int, help="use a regular tree of this degree, deep enough for --t")
    where.add_argument("--graph", help="edge-list file")
    sim.add_argument("--source", type=_nonneg, default=0, help="source node (default 0, the root of --degree trees)")
    sim.add_argument("--q", type=_probability, required=True)
    sim.add_argument("--t", type=_nonneg, required=True)
    sim.add_argument("--seed", type=_nonneg, default=0)
    sim.add_argument("--dump-path", action="store_true", help="print every slot as 't: ids' instead of only the last")

    est = sub.add_parser("estimate", help="estimate the source of an observed infected set")
    est.add_argument("--graph", required=True, help="edge-list file")
    est.add_argument("--infected", required=True, help="file of whitespace-separated infected node ids")
    est.add_argument("--method", choices=("oip", "dc", "oracle"), default="oip")
    est.add_argument("--q", type=_probability, help="infection probability (oracle only)")
    est.add_argument("--t-extra", type=_nonneg, default=3, help="oracle sweeps t over [ecc, ecc + K] (default 3)")

    ver = sub.add_parser("verify", help="check the optimality results on random small trees")
    ver.add_argument("--suite", choices=verify.SUITES + ("all",), default="all")
    ver.add_argument("--seed", type=_nonneg, default=0)
    ver.add_argument("--cases", type=_positive, default=200, help="random trees per suite")
    ver.add_argument("--max-nodes", type=int, choices=range(5, 13), default=10, metavar="{5..12}")

    exp = sub.add_parser("experiment", help="Monte-Carlo comparison of OIP and DC on regular trees")
    exp.add_argument("--config", help="key=value file (degrees, trials, seed, t_min, t_max)")
    exp.add_argument("--degrees", type=_degrees)
    exp.add_argument("--trials", type=_positive)
    exp.add_argument("--seed", type=_nonneg)
    exp.add_argument("--t-min", type=_nonneg)
    exp.add_argument("--t-max", type=_nonneg)
    exp.add_argument("--workers", type=_positive, default=1)
    exp.add_argument("--out-dir", default=".", help="directory for trials.csv and summary.csv")
    return parser


def cmd_simulate(args) -> int:
    if args.degree is not None:
        if args.degree < 2:
            raise DomainError(f"degree must be at least 2, got {args.degree}")
        g, _ = regular_tree(args.degree, args.t + 1)
    else:
        g = _read(read_edge_list, args.graph)
    path = simulate(g, args.source, SisParams(args.q), args.t, np.random.default_rng(args.seed))
    if args.dump_path:
        sys.stdout.write(path.dump())
    else:
        print(" ".join(map(str, path.final)))
    return EXIT_OK


def cmd_estimate(args) -> int:
    g = _read(read_edge_list, args.graph)
    vi = _read(read_infected, args.infected)
    if args.method == "oip":
        if not g.is_tree:
            print("warning: graph is not a tree; scoring every node by eccentricity", file=sys.stderr)
        est = estimators.jordan_centers(g, vi)
    elif args.method == "dc":
        est = estimators.distance_centrality(g, vi)
    else:
        if args.q is None:
            raise DomainError("--method oracle needs --q")
        est = estimators.exhaustive_oracle_estimate(g, vi, SisParams(args.q), args.t_extra)
    print(est.line())
    return EXIT_OK


def cmd_verify(args) -> int:
    names = verify.SUITES if args.suite == "all" else (args.suite,)
    ok = True
    for name in names:
        report = verify.run_suite(name, args.seed, args.cases, args.max_nodes)
        print(report.summary())
        for failure in report.failures:
            ok = False
            print(f"  counterexample: {failure}")
            print(f"  reproduce: sis-source verify --suite {name} --seed {args.seed} --cases {args.cases} --max-nodes {args.max_nodes}")
    return EXIT_OK if ok else EXIT_DOMAIN


def cmd_experiment(args) -> int:
    settings = experiments.read_config(args.config) if args.config else {}
    for key in ("degrees", "trials", "seed", "t_min", "t_max"):
        value = getattr(args, key)
        if value is not None:
            settings[key] = value
    cfg = experiments.ExperimentConfig(**settings)
    records, stats = experiments.run_experiment(cfg, workers=args.workers)
    trials_path, summary_path = experiments.write_outputs(records, stats, args.out_dir)
    print(experiments.format_table(stats))
    print(f"wrote {trials_path} and {summary_path}", file=sys.stderr)
    return EXIT_OK


COMMANDS = {
    "simulate": cmd_simulate,
    "estimate": cmd_estimate,
    "verify": cmd_verify,
    "experiment": cmd_experiment,
}


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)  # exits 2 on usage errors
    try:
        return COMMANDS[args.command](args)
    except (DomainError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
