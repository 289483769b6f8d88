"""Command-line front end.

Subcommands: simulate (one path to CSV), ensemble (many paths to artifact
directory), analyze (re-fit slopes on an existing trajectory CSV),
exponents (closed-form predictions), verify-law (enumerate one transition
law and its moment checks).

Exit codes: 0 success, 1 usage error, 2 runtime invariant violation.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import barycentric, drift
from .exponents import (
    ModelParams,
    ThetaDivergenceError,
    chi,
    confinement_constant,
    is_superdiffusive,
    theta_iterate,
)
from .harness import MODELS, RunConfig, run_ensemble
from .rng import DEFAULT_MASTER_SEED, new_stream
from .stats import InsufficientDataError, loglog_slope, running_max

USAGE_ERROR = 1
INVARIANT_ERROR = 2


def _window_arg(text: str) -> tuple[float, float]:
    lo, _, hi = text.partition(":")
    try:
        return (float(lo), float(hi))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected LO:HI, got {text!r}") from exc


def _seed_arg(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError(f"seed must fit in 64 unsigned bits, got {text}")
    return value


def _add_model_args(p: argparse.ArgumentParser, models=MODELS, with_defaults=True) -> None:
    p.add_argument("--model", choices=models, default="lattice" if with_defaults else None)
    p.add_argument("--alpha", type=float, default=1.0 if with_defaults else None)
    p.add_argument("--beta", type=float, default=0.0 if with_defaults else None)
    p.add_argument("--gamma", type=float, default=1.0 if with_defaults else None)
    p.add_argument("--rho", type=float, default=1.0 if with_defaults else None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="walklab",
        description="Monte Carlo laboratory for planar walks with polynomial self-interaction drift.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run one path and write its trajectory CSV")
    _add_model_args(p)
    p.add_argument("--steps", type=int, default=100_000)
    p.add_argument("--master-seed", type=_seed_arg, default=DEFAULT_MASTER_SEED)
    p.add_argument("--path-index", type=int, default=0)
    p.add_argument("--x0", type=float, default=0.0)
    p.add_argument("--y0", type=float, default=0.0)
    p.add_argument("--checkpoints", type=int, default=512)
    p.add_argument("--fit-window", type=_window_arg, default=None, metavar="LO:HI")
    p.add_argument("--out", required=True, help="trajectory CSV destination")

    p = sub.add_parser("ensemble", help="run many paths and write summary artifacts")
    p.add_argument("--config", help="RunConfig JSON file; flags override its fields")
    _add_model_args(p, with_defaults=False)
    p.add_argument("--steps", type=int)
    p.add_argument("--paths", type=int)
    p.add_argument("--master-seed", type=_seed_arg, default=None)
    p.add_argument("--x0", type=float)
    p.add_argument("--y0", type=float)
    p.add_argument("--checkpoints", type=int)
    p.add_argument("--fit-window", type=_window_arg, default=None, metavar="LO:HI")
    p.add_argument("--threads", type=int)
    p.add_argument("--out-dir", help="artifact directory (summary.json, paths.jsonl, hist.csv)")
    p.add_argument("--save-trajectories", action="store_true")

    p = sub.add_parser("analyze", help="re-fit slopes on an existing trajectory CSV")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--fit-window", type=_window_arg, required=True, metavar="LO:HI")

    p = sub.add_parser("exponents", help="closed-form predictions for given drift exponents")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--beta", type=float, default=0.0)
    p.add_argument("--gamma", type=float, default=0.0)
    p.add_argument("--rho", type=float, default=1.0)
    p.add_argument("--big-b", type=float, default=1.0)
    p.add_argument("--nu", type=float, default=None)
    p.add_argument("--theta0", type=float, default=None)

    p = sub.add_parser("verify-law", help="enumerate a transition law and its moment checks")
    _add_model_args(p, models=("lattice", "lattice-verbatim"))
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--y", type=float, required=True)
    p.add_argument("--n", type=int, default=0)

    return parser


def _cmd_simulate(args) -> int:
    window = args.fit_window
    if args.model in ("lattice", "lattice-verbatim"):
        params = drift.params_for_variant(
            {"lattice": "lattice", "lattice-verbatim": "verbatim"}[args.model],
            args.alpha, args.beta, args.gamma, args.rho,
        )
        variant = {"lattice": "lattice", "lattice-verbatim": "verbatim"}[args.model]
        stream = new_stream(args.master_seed, args.path_index)
        traj, summary = drift.simulate_drift_path(
            params, variant, args.steps, stream,
            x0=args.x0, y0=args.y0, checkpoints=args.checkpoints, fit_window=window,
        )
        drift.write_trajectory_csv(args.out, traj)
    else:
        variant = {"barycentric": "original", "barycentric-sym": "symmetrized"}[args.model]
        stream = new_stream(args.master_seed, args.path_index)
        traj, summary, _ = barycentric.simulate_barycentric_path(
            variant, args.steps, stream, checkpoints=args.checkpoints, fit_window=window,
        )
        barycentric.write_trajectory_csv(args.out, traj)
    record = summary.jsonl_record()
    record = {k: (None if isinstance(v, float) and not math.isfinite(v) else v) for k, v in record.items()}
    print(json.dumps(record))
    return 0


def _cmd_ensemble(args) -> int:
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            config = RunConfig.parse(fh.read())
    else:
        config = RunConfig()
    merged = config.to_json_dict()
    for field in ("model", "alpha", "beta", "gamma", "rho", "steps", "paths",
                  "master_seed", "x0", "y0", "checkpoints", "fit_window",
                  "threads", "out_dir"):
        value = getattr(args, field)
        if value is not None:
            merged[field] = value
    config = RunConfig.from_json_dict(merged)
    if config.out_dir is None:
        print("error: --out-dir (or out_dir in the config file) is required", file=sys.stderr)
        return USAGE_ERROR
    result = run_ensemble(config, save_trajectories=args.save_trajectories)
    s = result.summary
    print(f"wrote {config.out_dir}/summary.json")
    print(f"paths={s.n_paths} steps={s.steps} slope_mean={s.slope_mean} "
          f"slope_stddev={s.slope_stddev} chi_predicted={s.chi_predicted}")
    return 0


def _read_trajectory(path: str) -> dict[str, np.ndarray]:
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    if data.size == 0 or data.shape[1] != len(header):
        raise ValueError(f"malformed trajectory CSV {path}")
    return {name: data[:, i] for i, name in enumerate(header)}


def _cmd_analyze(args) -> int:
    cols = _read_trajectory(args.infile)
    if "n" not in cols:
        print("error: trajectory CSV must have an 'n' column", file=sys.stderr)
        return USAGE_ERROR
    ns = cols["n"]
    out: dict[str, object] = {"fit_window": list(args.fit_window), "n_checkpoints": int(ns.size)}
    xcol = cols.get("x", cols.get("X"))
    if xcol is None:
        print("error: trajectory CSV must have an 'x' or 'X' column", file=sys.stderr)
        return USAGE_ERROR
    try:
        fit = loglog_slope(ns, xcol, args.fit_window)
        out["slope_x"] = fit.slope
        out["n_points"] = fit.n_points
        out["skipped"] = fit.skipped
    except InsufficientDataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    ycol = cols.get("y")
    if ycol is None and "absY" in cols:
        flags = cols.get("absY_flag")
        ycol = np.where(flags > 0, np.nan, cols["absY"]) if flags is not None else cols["absY"]
    if ycol is not None:
        clean = np.where(np.isfinite(ycol), np.abs(ycol), 0.0)
        try:
            fit_y = loglog_slope(ns, running_max(clean), args.fit_window)
            out["slope_maxy"] = fit_y.slope
        except InsufficientDataError:
            out["slope_maxy"] = None
    print(json.dumps(out))
    return 0


def _cmd_exponents(args) -> int:
    params = ModelParams(alpha=args.alpha, beta=args.beta, gamma=args.gamma,
                         rho=args.rho, big_b=args.big_b)
    out = {
        "alpha": args.alpha, "beta": args.beta, "gamma": args.gamma, "rho": args.rho,
        "chi": chi(params),
        "superdiffusive": is_superdiffusive(params),
        "confinement_constant": confinement_constant(params),
    }
    nu = args.nu if args.nu is not None else max(2.0, 1.0 + args.alpha) + 1.0
    try:
        theta0 = args.theta0 if args.theta0 is not None else nu * chi(params) + 5.0
        trace = theta_iterate(params, nu, theta0)
        out["nu"] = nu
        out["theta_sequence"] = list(trace.sequence[:8]) + (["..."] if len(trace.sequence) > 8 else [])
        out["theta_limit"] = trace.limit
        out["theta_iterations"] = len(trace.sequence) - 1
    except (ValueError, ThetaDivergenceError) as exc:
        out["theta_note"] = str(exc)
    print(json.dumps(out))
    return 0


def _cmd_verify_law(args) -> int:
    variant = {"lattice": "lattice", "lattice-verbatim": "verbatim"}[args.model]
    params = drift.params_for_variant(variant, args.alpha, args.beta, args.gamma, args.rho)
    law = drift.law_for(variant, params, args.n, args.x, args.y)
    print(f"model={args.model} state=({args.x}, {args.y}) n={args.n} kappa={law.kappa!r}")
    print("dx,dy,probability")
    for o in law.outcomes:
        print(f"{o.dx!r},{o.dy!r},{o.probability!r}")
    checks = {
        "total_probability": law.total_probability(),
        "mean_dx": law.mean_dx(),
        "mean_dx_minus_kappa": law.mean_dx() - law.kappa,
        "mean_dy": law.mean_dy(),
        "prob_abs_dy_ge_delta": law.prob_abs_dy_at_least(drift.ELLIPTICITY_DELTA),
        "delta": drift.ELLIPTICITY_DELTA,
        "max_innovation_norm": law.max_innovation_norm(),
        "innovation_bound": law.big_b,
    }
    print(json.dumps(checks))
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 0 for --help, 2 for usage problems; map the latter to 1
        return 0 if exc.code in (0, None) else USAGE_ERROR
    try:
        if args.command == "simulate":
            return _cmd_simulate(args)
        if args.command == "ensemble":
            return _cmd_ensemble(args)
        if args.command == "analyze":
            return _cmd_analyze(args)
        if args.command == "exponents":
            return _cmd_exponents(args)
        if args.command == "verify-law":
            return _cmd_verify_law(args)
        parser.error(f"unknown command {args.command!r}")
    except (drift.InvariantViolationError, drift.OverflowAbortError) as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return INVARIANT_ERROR
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    return USAGE_ERROR


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
