"""Command-line entry point: ``fermisep run | reproduce | list-examples``."""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor

from . import __version__
from .examples import example_ids, list_examples, reproduce
from .scenario import (
    EXIT_INPUT,
    exit_code_for,
    run_scenario,
)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _positive_float(text: str) -> float:
    try:
        x = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not a number") from None
    if not x > 0 or x == float("inf"):
        raise argparse.ArgumentTypeError("tolerance must be positive and finite")
    return x


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="fermisep", description="Fermionic separability toolkit")
    p.add_argument("--version", action="version", version=f"fermisep {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", help="run scenario files and print their reports")
    run.add_argument("files", nargs="+", metavar="FILE")
    run.add_argument("--out", help="report file (one input) or directory (several inputs)")
    run.add_argument("--tol", type=_positive_float, help="verdict tolerance")
    run.add_argument("--jobs", type=int, default=1, help="run files in parallel processes")

    rep = sub.add_parser("reproduce", help="run a built-in worked example")
    rep.add_argument("example_id", metavar="ID", help=", ".join(example_ids()))
    rep.add_argument("--json", action="store_true", help="print the full JSON report")
    rep.add_argument("--tol", type=_positive_float, help="verdict tolerance")

    lst = sub.add_parser("list-examples", help="list the built-in worked examples")
    lst.add_argument("--json", action="store_true")
    return p


def _run_one(path: str, tol):
    """Returns (exit code, report text or error message)."""
    try:
        report = run_scenario(path, tol)
    except Exception as exc:  # noqa: BLE001 - mapped to exit codes
        return exit_code_for(exc), f"{path}: {type(exc).__name__}: {exc}"
    return report.exit_code, report.dumps()


def _cmd_run(args) -> int:
    if args.jobs < 1:
        print("fermisep: --jobs must be at least 1", file=sys.stderr)
        return EXIT_INPUT
    tol = args.tol
    if args.jobs > 1 and len(args.files) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_run_one, args.files, [tol] * len(args.files)))
    else:
        results = [_run_one(f, tol) for f in args.files]

    many = len(args.files) > 1
    if args.out and many:
        os.makedirs(args.out, exist_ok=True)
    code = 0
    for path, (rc, text) in zip(args.files, results):
        code = max(code, rc)
        if rc >= EXIT_INPUT:
            print(text, file=sys.stderr)
            continue
        if args.out:
            target = args.out
            if many:
                stem = os.path.splitext(os.path.basename(path))[0]
                target = os.path.join(args.out, f"{stem}.report.json")
            with open(target, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
        if rc:
            print(f"{path}: assertion failures", file=sys.stderr)
    return code


def _cmd_reproduce(args) -> int:
    if args.example_id not in example_ids():
        print(
            f"fermisep: unknown example {args.example_id!r}; known: {', '.join(example_ids())}",
            file=sys.stderr,
        )
        return EXIT_INPUT
    try:
        result = reproduce(args.example_id, args.tol)
    except Exception as exc:  # noqa: BLE001
        print(f"fermisep: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exit_code_for(exc)
    if args.json:
        sys.stdout.write(result.dumps())
    else:
        print("\n".join(result.summary_lines()))
    return 0 if result.passed else 1


def _cmd_list(args) -> int:
    items = list_examples()
    if args.json:
        print(json.dumps(items, indent=2))
    else:
        width = max(len(e["id"]) for e in items)
        for e in items:
            print(f"{e['id']:<{width}}  [{e['section']}] {e['description']}")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handler = {"run": _cmd_run, "reproduce": _cmd_reproduce, "list-examples": _cmd_list}
    return handler[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
