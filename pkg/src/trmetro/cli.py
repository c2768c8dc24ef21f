"""Command-line entry point: ``trmetro <protocol|verify|schema> [flags]``."""
from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from .harness import config as cfg
from .harness.runner import atomic_write, run, table
from .harness.verify import verify_numbers


def _shots(text: str):
    if text == "exact":
        return None
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError("--shots takes a positive integer or 'exact'") from None
    if n < 1:
        raise argparse.ArgumentTypeError("--shots must be positive")
    return n


def _seed(text: str) -> int:
    n = int(text)
    if not 0 <= n < 2 ** 64:
        raise argparse.ArgumentTypeError("--seed must fit in an unsigned 64-bit integer")
    return n


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="trmetro", description="Time-reversed metrology sweeps.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in cfg.PROTOCOLS:
        p = sub.add_parser(name, help=f"run the {name} protocol over a grid")
        p.add_argument("--config", help="JSON scenario file (defaults to a built-in grid)")
        p.add_argument("--out", help=f"output directory (overrides ${cfg.OUT_ENV} and the config)")
        p.add_argument("--seed", type=_seed, help="seed for random presets and shot sampling")
        p.add_argument("--shots", type=_shots, default=argparse.SUPPRESS,
                       help="multinomial shots per point, or 'exact' (default)")
        p.add_argument("--jobs", type=int, default=1, help="worker processes")
    v = sub.add_parser("verify", help="recompute every checked number and print a pass/fail table")
    v.add_argument("--seed", type=_seed, default=0)
    v.add_argument("--out", help="also write the report to <dir>/verify.txt")
    v.add_argument("--config", help=argparse.SUPPRESS)
    v.add_argument("--shots", type=_shots, default=argparse.SUPPRESS, help=argparse.SUPPRESS)
    sub.add_parser("schema", help="print the scenario JSON schema")
    return parser


def _scenario(args) -> cfg.ScenarioConfig:
    conf = cfg.load(args.config) if args.config else cfg.default_config(args.command)
    if conf.protocol != args.command:
        raise cfg.ConfigError(f"config is for {conf.protocol!r}, not {args.command!r}", "protocol")
    changes = {}
    if args.seed is not None:
        changes["seed"] = args.seed
    if hasattr(args, "shots"):
        changes["shots"] = args.shots
    return dataclasses.replace(conf, **changes)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "schema":
        sys.stdout.write(json.dumps(cfg.SCHEMA, indent=2) + "\n")
        return 0
    if args.command == "verify":
        report = verify_numbers(args.seed)
        text = report.text()
        sys.stdout.write(text)
        if args.out:
            atomic_write(Path(args.out) / "verify.txt", text)
        return 0 if report.ok else 1
    try:
        conf = _scenario(args)
    except cfg.ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    result = run(conf, out=args.out, jobs=args.jobs)
    sys.stdout.write(table(result))
    print(f"wrote {result.csv_path} and {result.provenance_path}", file=sys.stderr)
    return 0 if result.ok else 1
