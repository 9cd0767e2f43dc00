"""CLI: `mlceq-plots render --in <csv> --kind <ratio|rate-sweep> --out <path>`.

Exit codes: 0 success, 1 usage error, 2 runtime failure (missing file,
schema mismatch, unwritable output).
"""

from __future__ import annotations

import argparse
import sys

from .render import REQUIRED_COLUMNS, PlotSpec, render


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on bad flags; keep 2 reserved for runtime failures
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mlceq-plots",
                     description="Render mlceq experiment CSVs to figures.")
    sub = parser.add_subparsers(dest="command")
    rend = sub.add_parser("render", help="render one CSV to an image")
    rend.add_argument("--in", dest="input_csv", required=True,
                      help="input CSV produced by the mlceq experiment runner")
    rend.add_argument("--kind", required=True, choices=sorted(REQUIRED_COLUMNS),
                      help="figure kind")
    rend.add_argument("--out", dest="output_path", required=True,
                      help="output image path (extension picks the format)")
    rend.add_argument("--xlabel", help="override the x axis label")
    rend.add_argument("--ylabel", help="override the y axis label")
    return parser


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    parser = build_parser()
    try:
        if not argv:
            raise UsageError(parser.format_usage().strip())
        args = parser.parse_args(argv)
        if args.command != "render":
            raise UsageError("the only supported command is 'render'")
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    spec = PlotSpec(input_csv=args.input_csv, kind=args.kind,
                    output_path=args.output_path, xlabel=args.xlabel,
                    ylabel=args.ylabel)
    try:
        print(render(spec))
    except Exception as exc:  # noqa: BLE001 - runtime exit code
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
