"""Command-line interface.

Exit codes: 0 success, 2 domain error, 3 numerical failure, 4 I/O error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

from petdensity import io
from petdensity.errors import DomainError, NumericalError
from petdensity.estimator import DEFAULT_CHI, FRACTIONAL, THEORY, SelectionConfig, estimate_point, grid_default, select_m
from petdensity.experiments import (
    ExperimentConfig,
    cut_points,
    generate_fixtures,
    run_cuts,
    run_lowerbound,
    run_rate,
    write_lowerbound,
)
from petdensity.models import DensityModel, sample_pet

EXIT_OK, EXIT_DOMAIN, EXIT_NUMERICAL, EXIT_IO = 0, 2, 3, 4


def _floats(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def _ints(text: str) -> list[int]:
    return [int(v) for v in text.split(",") if v.strip()]


def _model_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--model", choices=["gaussian", "disk"], default=None)
    p.add_argument("--dim", type=int, default=None, help="dimension (gaussian only, default 2)")
    p.add_argument("--mu", type=_floats, default=None, help="comma-separated mean (gaussian)")
    p.add_argument("--sigma", type=float, default=None)
    p.add_argument("--radius", type=float, default=None, help="disk radius (default 1)")


def _grid_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--chi", type=float, default=None, help=f"penalty constant (default {DEFAULT_CHI})")
    p.add_argument("--grid", choices=[THEORY, FRACTIONAL], default=None)
    p.add_argument("--step", type=float, default=None, help="fractional grid step (default 0.1)")
    p.add_argument("--cap", type=float, default=None, help="largest cut-off (default n^(1/(2d-1)))")


def _build_model(args, base: DensityModel | None = None) -> DensityModel:
    kind = args.model or (base.kind if base else "gaussian")
    if kind == "disk":
        radius = args.radius if args.radius is not None else (base.radius if base and base.kind == "disk" else 1.0)
        return DensityModel.disk(radius)
    prior = base if base is not None and base.kind == "gaussian" else None
    dim = args.dim or (len(args.mu) if args.mu else (prior.dim if prior else 2))
    mean = args.mu if args.mu is not None else (prior.mean if prior and prior.dim == dim else None)
    sigma = args.sigma if args.sigma is not None else (prior.sigma if prior else 1.0)
    return DensityModel.gaussian(dim=dim, mean=mean, sigma=sigma)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="petdensity", description="Spectral cut-off density estimation from PET observations.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="draw a PET sample and write CSV + JSON metadata")
    _model_args(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True, help="output CSV path")

    p = sub.add_parser("estimate", help="evaluate f_hat_m(x) on a sample file")
    p.add_argument("sample_file")
    p.add_argument("--x", type=_floats, required=True)
    p.add_argument("--m", type=float, required=True)
    p.add_argument("--out", default=None, help="optional JSON output path")

    p = sub.add_parser("select", help="data-driven cut-off selection at x")
    p.add_argument("sample_file")
    p.add_argument("--x", type=_floats, required=True)
    _grid_args(p)
    p.add_argument("--out", required=True, help="trace CSV path (JSON summary written alongside)")

    for name, helptext in (("cuts", "Monte Carlo quantile bands along horizontal and vertical cuts"),
                           ("rate", "Monte Carlo risk at x versus sample size")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--config", default=None, help="JSON experiment config; flags override it")
        _model_args(p)
        _grid_args(p)
        p.add_argument("--reps", type=int, default=None)
        p.add_argument("--seed", type=int, default=None, help="master seed")
        p.add_argument("--workers", type=int, default=None)
        p.add_argument("--out", default=None, help="output directory")
        if name == "cuts":
            p.add_argument("--n", type=int, default=None, help="sample size (default 2000)")
            p.add_argument("--width", type=float, default=2.0)
            p.add_argument("--points", type=int, default=41)
        else:
            p.add_argument("--n", type=_ints, default=None, help="comma-separated sample sizes")
            p.add_argument("--x", type=_floats, default=None)

    p = sub.add_parser("lowerbound", help="numerical checks of the two-point lower-bound construction")
    p.add_argument("--delta", type=_floats, default=[1 / (2 * math.pi * math.e)])
    p.add_argument("--h", type=_floats, default=[0.3, 0.5, 0.7])
    p.add_argument("--beta", type=_floats, default=[2.0])
    p.add_argument("--out", required=True, help="report CSV path")

    p = sub.add_parser("fixtures", help="regenerate golden fixtures")
    p.add_argument("--out", required=True, help="output directory")
    return parser


def _experiment_config(args, command: str) -> ExperimentConfig:
    base = ExperimentConfig.from_dict(io.read_json(args.config)) if args.config else None
    if base is None:
        defaults = {"cuts": dict(n_list=(2000,), output_dir="results/cuts"),
                    "rate": dict(output_dir="results/rate")}[command]
        base = ExperimentConfig(**defaults)
    model = _build_model(args, base.model) if (args.model or args.mu or args.sigma or args.radius
                                                or args.dim) else base.model
    changes = dict(replications=args.reps, chi=args.chi, grid_rule=args.grid, step=args.step,
                   cap=args.cap, master_seed=args.seed, output_dir=args.out, workers=args.workers)
    if command == "cuts" and args.n is not None:
        changes["n_list"] = (args.n,)
    if command == "rate" and args.n is not None:
        changes["n_list"] = tuple(args.n)
    if command == "rate" and args.x is not None:
        changes["x_list"] = (tuple(args.x),)
    if model != base.model:
        changes["model"] = model
        if "x_list" not in changes and any(len(x) != model.dim for x in base.x_list):
            changes["x_list"] = ((0.0,) * model.dim,)
    return base.updated(**changes)


def _run(args) -> int:
    if args.command == "sample":
        sample = sample_pet(_build_model(args), args.n, args.seed)
        meta = io.write_sample(sample, args.out)
        print(f"wrote {len(sample)} observations to {args.out} (metadata {meta})")
    elif args.command == "estimate":
        sample = io.read_sample(args.sample_file)
        value = estimate_point(sample, args.x, args.m)
        record = {"x": args.x, "m": args.m, "f_hat": value, "n": len(sample), "seed": sample.seed}
        print(io.fmt(value))
        print(json.dumps(record))
        if args.out:
            io.write_json(args.out, record)
    elif args.command == "select":
        sample = io.read_sample(args.sample_file)
        grid = grid_default(len(sample), sample.model.dim, args.grid or FRACTIONAL,
                            args.step if args.step is not None else 0.1, args.cap)
        trace = select_m(sample, args.x, SelectionConfig(args.chi if args.chi is not None else DEFAULT_CHI, grid))
        io.write_trace(trace, args.out)
        print(json.dumps(trace.summary()))
    elif args.command == "cuts":
        cfg = _experiment_config(args, "cuts")
        points = run_cuts(cfg, cut_points(args.width, args.points))
        print(f"wrote {len(points)} cut points to {cfg.output_dir}")
    elif args.command == "rate":
        cfg = _experiment_config(args, "rate")
        results, slope = run_rate(cfg)
        for r in results:
            print(f"n={r.n} mse={r.mse:.6g} se={r.se:.3g}")
        print(f"log-log slope: {slope}")
    elif args.command == "lowerbound":
        rows = run_lowerbound(args.delta, args.h, args.beta)
        write_lowerbound(rows, args.out)
        failed = [r for r in rows if not r.passed]
        print(f"{len(rows) - len(failed)}/{len(rows)} checks passed; report in {args.out}")
    elif args.command == "fixtures":
        path = generate_fixtures(args.out)
        print(f"wrote {path}")
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _run(args)
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (OSError, KeyError, json.JSONDecodeError) as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
