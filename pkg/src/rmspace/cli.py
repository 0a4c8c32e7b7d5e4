"""Command-line entry point: ``rmspace run|verify|hull <scenario.yaml>``."""
from __future__ import annotations

import argparse
import json
import sys

import yaml

from .scenario import Report, ScenarioError, emit_report, hull_members, parse_scenario, run

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE = 0, 1, 2


def _load(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return parse_scenario(fh.read())
    except OSError as exc:
        raise ScenarioError([f"{path}: {exc.strerror}"]) from None


def _emit(report: Report, fmt: str, probs) -> int:
    sys.stdout.write(emit_report(report, fmt, probs))
    if fmt == "json":
        sys.stdout.write("\n")
    if report.status != "ok":
        print(f"rmspace: {report.task} finished with status {report.status}", file=sys.stderr)
    return report.exit_code


def _cmd_run(args) -> int:
    scen = _load(args.file)
    report = run(scen, seed=args.seed, tol=args.tol, max_iter=args.max_iter, timing=args.timing)
    return _emit(report, args.format, scen.space["probs"])


def _cmd_verify(args) -> int:
    scen = _load(args.file)
    doc = scen.document()
    doc["task"] = {"kind": "verify", **({"samples": scen.task["samples"]} if "samples" in scen.task else {})}
    scen = parse_scenario(yaml.safe_dump(doc))
    report = run(scen, seed=args.seed, timing=args.timing)
    return _emit(report, args.format, scen.space["probs"])


def _cmd_hull(args) -> int:
    scen = _load(args.file)
    members = hull_members(scen, args.set)
    if args.format == "json":
        print(json.dumps({"set": args.set, "size": len(members), "members": members}, sort_keys=True, indent=2))
    else:
        print(f"{args.set}: {len(members)} members")
        for i, m in enumerate(members):
            print(f"{i:>6}  {m}")
    return EXIT_OK


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rmspace", description="Fixed-point and variational solvers on random metric spaces.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run the scenario's task")
    p.add_argument("file")
    p.add_argument("--format", choices=("json", "text"), default="json")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--max-iter", type=int, default=None)
    p.add_argument("--timing", action="store_true", help="include wall-clock time (makes output non-deterministic)")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("verify", help="run the axiom and stability checks on the scenario's objects")
    p.add_argument("file")
    p.add_argument("--format", choices=("json", "text"), default="json")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--timing", action="store_true")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("hull", help="list the members of a named set's sigma-stable hull")
    p.add_argument("file")
    p.add_argument("--set", required=True)
    p.add_argument("--format", choices=("json", "text"), default="text")
    p.set_defaults(func=_cmd_hull)
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_USAGE
    try:
        return args.func(args)
    except ScenarioError as exc:
        for err in exc.errors:
            print(f"rmspace: {err}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
