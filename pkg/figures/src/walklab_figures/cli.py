"""Command-line entry: walklab-figs {loglog, histogram, report}.

Each subcommand prints one JSON metadata line per image written.
Exit codes: 0 success, 1 on bad inputs or I/O problems.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .io import FigureDataError
from .plots import plot_histogram, plot_loglog


def _window_arg(text: str) -> tuple[float, float]:
    lo, _, hi = text.partition(":")
    try:
        return (float(lo), float(hi))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected LO:HI, got {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="walklab-figs",
        description="Render figures from walklab artifact files.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("loglog", help="log-log growth plot with fitted slope")
    p.add_argument("--in", dest="infile", required=True, help="trajectory CSV")
    p.add_argument("--summary", help="summary.json for window and config footer")
    p.add_argument("--fit-window", type=_window_arg, default=None, metavar="LO:HI")
    p.add_argument("--out", required=True, help="output image path")

    p = sub.add_parser("histogram", help="slope histogram with mean marker")
    p.add_argument("--in", dest="infile", required=True, help="hist.csv")
    p.add_argument("--summary", help="summary.json for marker and config footer")
    p.add_argument("--out", required=True, help="output image path")

    p = sub.add_parser("report", help="render every figure an artifact directory supports")
    p.add_argument("--in-dir", required=True, help="walklab ensemble output directory")
    p.add_argument("--out-dir", help="image destination (default: the artifact directory)")

    return parser


def _cmd_report(args) -> int:
    in_dir = Path(args.in_dir)
    out_dir = Path(args.out_dir) if args.out_dir else in_dir
    summary = in_dir / "summary.json"
    hist = in_dir / "hist.csv"
    if not hist.is_file() or not summary.is_file():
        print(f"error: {in_dir} lacks hist.csv/summary.json", file=sys.stderr)
        return 1
    meta = plot_histogram(hist, summary, out_dir / "hist.png")
    print(json.dumps(meta))
    for traj in sorted(in_dir.glob("traj_*.csv")):
        out = out_dir / (traj.stem + "_loglog.png")
        print(json.dumps(plot_loglog(traj, summary, out)))
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    try:
        if args.command == "loglog":
            meta = plot_loglog(args.infile, args.summary, args.out, fit_window=args.fit_window)
            print(json.dumps(meta))
            return 0
        if args.command == "histogram":
            meta = plot_histogram(args.infile, args.summary, args.out)
            print(json.dumps(meta))
            return 0
        if args.command == "report":
            return _cmd_report(args)
    except (FigureDataError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 1


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
