"""Command-line interface: detect, simulate, benchmark, plot."""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import io as nio
from .benchmark import run_benchmark
from .core import Hyperparameters, McmcSettings, Slab
from .detect import detect
from .diagnostics import split_rhat
from .errors import ChainDivergedError, NoseError
from .plotting import render_svg
from .sampler import run_chains
from .scenarios import ScenarioSpec
from .simulate import generate

_SCENARIOS = ["gauss-mean", "poisson", "gauss-scale", "ar1", "linreg"]


def _add_hyper_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--L", type=int, default=None, help="atom truncation count")
    p.add_argument("--D", type=int, default=None, help="minimum change-point distance")
    p.add_argument("--slab", choices=["cauchy", "laplace"], default=None)
    p.add_argument("--lambda", dest="lam", type=float, default=None,
                   help="laplace slab precision")
    p.add_argument("--chains", type=int, default=None)
    p.add_argument("--iters", type=int, default=None)
    p.add_argument("--burnin", type=int, default=None)
    p.add_argument("--thin", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)


def _hyper_from_args(args) -> Hyperparameters:
    base = Hyperparameters()
    slab = base.slab
    if args.slab is not None or args.lam is not None:
        kind = args.slab or ("laplace" if args.lam is not None else "cauchy")
        slab = Slab(kind, args.lam if args.lam is not None else 1.0)
    mc = McmcSettings(
        chains=args.chains if args.chains is not None else base.mcmc.chains,
        iterations=args.iters if args.iters is not None else base.mcmc.iterations,
        burn_in=args.burnin if args.burnin is not None else base.mcmc.burn_in,
        thinning=args.thin if args.thin is not None else base.mcmc.thinning,
        seed=args.seed,
    )
    return Hyperparameters(
        L=args.L if args.L is not None else base.L,
        D=args.D if args.D is not None else base.D,
        slab=slab, mcmc=mc,
    )


def _workers() -> int:
    return int(os.environ.get("NOSE_THREADS", "1") or 1)


def cmd_detect(args) -> int:
    spec = ScenarioSpec.from_name(args.scenario)
    try:
        data = nio.read_series(args.input, spec)
    except FileNotFoundError:
        print(f"error: no such file: {args.input}", file=sys.stderr)
        return 2
    except nio.DataShapeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    hyper = _hyper_from_args(args)
    try:
        draws = run_chains(data, spec, hyper, workers=_workers())
    except ChainDivergedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    result = detect(draws, data, spec, hyper)
    theta_by_chain = draws.theta_by_chain()
    rhats = [split_rhat(np.stack([c[:, i] for c in theta_by_chain]))
             for i in range(draws.n_states)]
    rhats = [r for r in rhats if np.isfinite(r)]
    result.diagnostics = {
        "acceptance": {k: float(v) for k, v in draws.meta["acceptance"].items()
                       if v == v},
        "split_rhat_theta_max": float(np.max(rhats)) if rhats else None,
        "split_rhat_theta_median": float(np.median(rhats)) if rhats else None,
    }
    nio.write_result(args.output, result)
    return 0


def cmd_simulate(args) -> int:
    try:
        data, truth = generate(args.setting, args.seed)
    except NoseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    out = Path(args.output)
    nio.write_series(out, data)
    sidecar = out.with_suffix(".truth.json")
    nio.write_truth(sidecar, truth)
    print(f"wrote {out} and {sidecar}")
    return 0


def cmd_benchmark(args) -> int:
    hyper = _hyper_from_args(args)
    try:
        report = run_benchmark(args.setting, args.replicates, hyper,
                               window=args.window, workers=_workers())
    except NoseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    Path(args.output).write_text(json.dumps(report, indent=2) + "\n")
    print(f"wrote {args.output}")
    return 0


def cmd_plot(args) -> int:
    try:
        doc = nio.read_result(args.input)
        map_curve = doc["map_curve"]
        changepoints = doc["changepoints"]
    except FileNotFoundError:
        print(f"error: no such file: {args.input}", file=sys.stderr)
        return 2
    except (json.JSONDecodeError, KeyError) as exc:
        print(f"error: malformed result file: {exc}", file=sys.stderr)
        return 2
    data_values = None
    states = None
    if args.data is not None:
        try:
            series = nio.read_series(args.data)
        except (FileNotFoundError, nio.DataShapeError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
        data_values = series.values if series.covariates is None else None
        states = series.states
    svg = render_svg(map_curve, changepoints, states=states, data_values=data_values)
    Path(args.output).write_text(svg)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nose",
        description="Non-segmental Bayesian multiple change-point detection.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("detect", help="detect change-points in a data CSV")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--scenario", choices=_SCENARIOS, default="gauss-mean")
    _add_hyper_flags(p)
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("simulate", help="generate a benchmark dataset")
    p.add_argument("--setting", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("benchmark", help="replicate a setting and score it")
    p.add_argument("--setting", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--replicates", type=int, default=30)
    p.add_argument("--window", type=int, default=10)
    _add_hyper_flags(p)
    p.set_defaults(func=cmd_benchmark)

    p = sub.add_parser("plot", help="render a detection result as SVG")
    p.add_argument("--input", required=True, help="detect output JSON")
    p.add_argument("--output", required=True, help="SVG path")
    p.add_argument("--data", default=None, help="optional data CSV to overlay")
    p.set_defaults(func=cmd_plot)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
