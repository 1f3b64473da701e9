"""Command-line entry point: ``captionkit run`` and ``captionkit check``."""

from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence

from .diagnostics import ScenarioSyntaxError
from .scenario import run_scenario


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="captionkit", description="Lay out captions from a scenario file.")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="render captions and lists")
    run.add_argument("file")
    run.add_argument("--width", type=int, default=72, help="container width in cells")
    run.add_argument("--format", choices=("text", "annotated"), default="text")
    run.add_argument("--strict", action="store_true", help="treat warnings as failures")

    check = sub.add_parser("check", help="report diagnostics without rendering")
    check.add_argument("file")
    check.add_argument("--strict", action="store_true")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _parser().parse_args(argv)
    width = getattr(args, "width", 72)
    if width < 1:
        print(f"captionkit: error: width must be positive, got {width}", file=sys.stderr)
        return 2
    try:
        with open(args.file, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        print(f"captionkit: error: {exc.strerror}: {args.file}", file=sys.stderr)
        return 2
    try:
        result = run_scenario(text, width, getattr(args, "format", "text") == "annotated")
    except ScenarioSyntaxError as exc:
        print(exc.diagnostic.format(args.file), file=sys.stderr)
        return 2
    for stream in (sys.stdout, sys.stderr):
        if hasattr(stream, "reconfigure"):
            stream.reconfigure(encoding="utf-8")
    if args.command == "run":
        sys.stdout.write(result.output)
    for d in result.diagnostics:
        print(d.format(args.file), file=sys.stderr)
    return result.exit_status(args.strict)


if __name__ == "__main__":
    sys.exit(main())
