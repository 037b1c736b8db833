"""Command line entry point: ``deducto check|corpus|type|diff``."""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

from .check import check_file, run_corpus
from .dsl import parse
from .errors import CompilerUnavailable, DeductoError
from .gen import GenConfig, generate_programs
from .oracle import SKIP_EXIT, DiffReport, compiler_argv, diff_oracle

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2


def _dump(obj: object) -> str:
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"


def cmd_check(args: argparse.Namespace) -> int:
    path = Path(args.file)
    if not path.is_file():
        print(f"deducto: no such file: {path}", file=sys.stderr)
        return EXIT_USAGE
    report = check_file(path)
    sys.stdout.write(_dump(report.to_json()) if args.json else report.render_text())
    return EXIT_OK if report.ok else EXIT_FAIL


def cmd_corpus(args: argparse.Namespace) -> int:
    try:
        summary = run_corpus(args.dir)
    except FileNotFoundError as err:
        print(f"deducto: {err}", file=sys.stderr)
        return EXIT_USAGE
    sys.stdout.write(_dump(summary.to_json()) if args.json else summary.render_text())
    return EXIT_OK if summary.ok else EXIT_FAIL


def cmd_type(args: argparse.Namespace) -> int:
    path = Path(args.file)
    if not path.is_file():
        print(f"deducto: no such file: {path}", file=sys.stderr)
        return EXIT_USAGE
    report = check_file(path)
    try:
        entry = report.entry(args.name)
    except KeyError:
        print(f"deducto: no declaration named '{args.name}' in {path}", file=sys.stderr)
        return EXIT_FAIL
    errors = [d for d in entry.diagnostics if d.severity == "error"]
    if errors or entry.type is None:
        for d in errors:
            print(f"{path}:{d.line}:{d.col}: error: {d.message}", file=sys.stderr)
        return EXIT_FAIL
    print(entry.type)
    return EXIT_OK


def _diff_inputs(target: Optional[str]) -> list[Path]:
    if target is None:
        return []
    p = Path(target)
    if p.is_dir():
        return sorted(p.glob("*.tdl"))
    if p.is_file():
        return [p]
    raise FileNotFoundError(f"no such file or directory: {p}")


def cmd_diff(args: argparse.Namespace) -> int:
    try:
        compiler_argv(args.cc)
    except CompilerUnavailable as err:
        print(f"deducto: skipped: {err}", file=sys.stderr)
        return SKIP_EXIT
    try:
        paths = _diff_inputs(args.path)
    except FileNotFoundError as err:
        print(f"deducto: {err}", file=sys.stderr)
        return EXIT_USAGE
    reports: list[DiffReport] = []
    for path in paths:
        sf = parse(path.read_text(), str(path))
        if sf.expect != "pass":
            continue  # files expected to fail have nothing to confirm
        reports.append(diff_oracle(sf, args.cc))
    if args.generate:
        cfg = GenConfig(seed=args.seed, count=args.generate, batch=args.batch)
        for sf in generate_programs(cfg):
            reports.append(diff_oracle(sf, args.cc))
    divergences = sum(len(r.divergences) for r in reports)
    if args.json:
        sys.stdout.write(
            _dump({"compiler": args.cc, "divergences": divergences, "reports": [r.to_json() for r in reports]})
        )
    else:
        for r in reports:
            sys.stdout.write(r.render_text())
        checks = sum(r.checks for r in reports)
        print(f"{len(reports)} unit(s), {checks} check(s), {divergences} divergence(s)")
    return EXIT_OK if divergences == 0 else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="deducto", description="C++11 type deduction simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="check one declaration file")
    p.add_argument("file")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("corpus", help="check every .tdl file in a directory")
    p.add_argument("dir")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_corpus)

    p = sub.add_parser("type", help="print the deduced type of one declaration")
    p.add_argument("file")
    p.add_argument("name")
    p.set_defaults(func=cmd_type)

    p = sub.add_parser("diff", help="compare engine answers with a C++11 compiler")
    p.add_argument("path", nargs="?", help="a .tdl file or a directory of them")
    p.add_argument("--cc", default=os.environ.get("CXX", "c++"), help="compiler command (default: $CXX or c++)")
    p.add_argument("--generate", type=int, default=0, metavar="N", help="also check N generated probes")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--batch", type=int, default=50, help="probes per generated translation unit")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_diff)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except DeductoError as err:
        print(f"deducto: {err}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
