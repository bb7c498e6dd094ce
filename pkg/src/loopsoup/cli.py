"""Command line entry point.

Usage:
    soup <kind> --config <file> --seed <u64> --out <dir> [--workers N]

where <kind> is one of charfn, clt, winding-cov, holonomy, spitzer,
oracle.  The config file is JSON; --seed overrides any seed stored in
the config, so runs are reproducible from the command line alone.  One
line is printed per gate, then a summary.  Exit status is 0 only if
every gate passes, 2 on config errors.
"""

from __future__ import annotations

import argparse
import json
import sys

from .harness import KINDS, ConfigError, ExperimentConfig, emit_report, run_experiment


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="soup",
        description="Loop soup experiments: exact formulas vs enumeration "
                    "and Monte Carlo, with pass/fail gates.",
    )
    sub = parser.add_subparsers(dest="kind", required=True)
    for kind in KINDS:
        p = sub.add_parser(kind, help=f"run a {kind} experiment")
        p.add_argument("--config", required=True, help="JSON config file")
        p.add_argument("--seed", type=int, default=None,
                       help="64-bit seed; overrides the config seed")
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--workers", type=int, default=1,
                       help="process count for Monte Carlo chunks")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with open(args.config) as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    if not isinstance(raw, dict):
        print("config error: top level must be a JSON object", file=sys.stderr)
        return 2
    raw = dict(raw)
    raw["kind"] = args.kind
    try:
        cfg = ExperimentConfig.from_dict(raw, seed=args.seed,
                                         workers=args.workers)
        report = run_experiment(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    paths = emit_report(report, args.out)
    for gate in report.gates:
        verdict = "SKIP" if gate["skipped"] else (
            "PASS" if gate["passed"] else "FAIL")
        print(f"[{verdict}] {gate['name']}: observed={gate['observed']:.6g} "
              f"target={gate['target']:.6g} tol={gate['tolerance']:.6g} "
              f"source={gate['source']}")
    n_pass = sum(1 for g in report.gates if g["passed"] and not g["skipped"])
    n_skip = sum(1 for g in report.gates if g["skipped"])
    n_fail = sum(1 for g in report.gates if not g["passed"] and not g["skipped"])
    print(f"gates: {n_pass} passed, {n_fail} failed, {n_skip} skipped")
    for p in paths:
        print(f"wrote {p}")
    return 0 if report.all_pass else 1


if __name__ == "__main__":
    sys.exit(main())
