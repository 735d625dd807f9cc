"""Command-line entry point: ``copri run|check|test|repl``."""

from __future__ import annotations

import argparse
import os
import sys
from typing import Optional

from copri.golden import run_corpus, summary
from copri.host import EXIT_DIAGNOSTIC, check_source, execute


def _read(path: str) -> Optional[str]:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as e:
        sys.stderr.write(f"{path}: cannot read file: {e.strerror}\n")
        return None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="copri", description="Concept-oriented language interpreter")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a program")
    run.add_argument("file")
    run.add_argument("--trace", action="store_true", help="write access events to standard error")

    check = sub.add_parser("check", help="parse and check a program without running it")
    check.add_argument("file")

    test = sub.add_parser("test", help="run a golden corpus directory")
    test.add_argument("dir")
    test.add_argument("--jobs", type=int, default=1, metavar="N")

    sub.add_parser("repl", help="interactive session")
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "run":
        source = _read(args.file)
        if source is None:
            return EXIT_DIAGNOSTIC
        trace = args.trace or os.environ.get("COPRI_TRACE") == "1"
        return execute(source, args.file, sys.stdout, sys.stderr, trace=trace)
    if args.command == "check":
        source = _read(args.file)
        if source is None:
            return EXIT_DIAGNOSTIC
        return check_source(source, args.file, sys.stderr)
    if args.command == "test":
        if not os.path.isdir(args.dir):
            sys.stderr.write(f"{args.dir}: not a directory\n")
            return EXIT_DIAGNOSTIC
        results = run_corpus(args.dir, max(1, args.jobs))
        for r in results:
            print(r.line())
        print(summary(results))
        return 0 if all(r.passed for r in results) else 1
    from copri.repl import repl
    return repl(prompt=sys.stdin.isatty())


if __name__ == "__main__":
    sys.exit(main())
