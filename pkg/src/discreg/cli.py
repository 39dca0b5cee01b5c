"""Command-line entry point: ``discreg {gen,sweep,figure,verify,plot}``."""

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from .envs import GridSpec, gridworld
from .harness.io import emit_csv, emit_svg, read_csv
from .harness.runner import SweepTaskError, run_sweep, stable_seed
from .harness.spec import FIGURES, SECONDARY_AXIS, SweepSpec, figure_preset


def _grid(text):
    try:
        w, h = (int(v) for v in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError("grid must look like WxH, e.g. 4x4")
    return w, h


def cmd_gen(args):
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    spec = GridSpec(*args.grid)
    for i in range(args.count):
        mdp = gridworld(spec, np.random.default_rng(stable_seed(args.seed, "gen", i)))
        mdp.save(out / f"mdp_{i:04d}.json")
    print(f"wrote {args.count} MDP instance(s) to {out}")
    return 0


def _labels(spec):
    x = "L2 factor" if spec.regularizer == "l2" and spec.experiment != "grid_2d" else "guidance discount"
    y = "optimality loss" if spec.experiment in ("policy_opt", "grid_2d") else f"{spec.loss} loss"
    return x, y


def _run_and_write(spec, csv_path, svg_path, workers):
    try:
        result = run_sweep(spec, workers)
    except SweepTaskError as exc:
        print(f"error: {exc}", file=sys.stderr)
        print(f"replay: secondary={exc.secondary} instance={exc.instance} seed={exc.seed}", file=sys.stderr)
        return 2
    emit_csv(result, csv_path)
    if svg_path:
        xlabel, ylabel = _labels(spec)
        emit_svg(result, svg_path, xlabel=xlabel, ylabel=ylabel)
    for sec, best in result.argmin().items():
        print(f"{SECONDARY_AXIS[spec.experiment]}={sec:g}: minimum at {best:g}")
    if result.rejections:
        print(f"mixing augmentation rejected {result.rejections}/{result.attempts} chains")
    print(f"wrote {csv_path}")
    return 0


def cmd_sweep(args):
    spec = SweepSpec.from_file(args.config)
    return _run_and_write(spec, args.out, args.svg, args.workers)


def cmd_figure(args):
    spec = figure_preset(args.name, n_instances=args.instances, master_seed=args.seed)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return _run_and_write(spec, out / f"{args.name}.csv", out / f"{args.name}.svg", args.workers)


def cmd_verify(args):
    from .verification import run_all

    results = run_all(trials=args.trials, seed=args.seed)
    for r in results:
        print(r.line())
    return 0 if all(r.passed for r in results) else 1


def cmd_plot(args):
    emit_svg(read_csv(args.csv), args.out)
    print(f"wrote {args.out}")
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="discreg", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="write random GridWorld MDP instances as JSON")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--grid", type=_grid, default=(4, 4))
    g.add_argument("--count", type=int, default=1)
    g.add_argument("--out-dir", default="mdps")
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("sweep", help="run a sweep described by a TOML/JSON config")
    s.add_argument("--config", required=True)
    s.add_argument("--out", default="sweep.csv")
    s.add_argument("--svg", default=None)
    s.add_argument("--workers", type=int, default=None, help="overrides DISCREG_WORKERS")
    s.set_defaults(func=cmd_sweep)

    f = sub.add_parser("figure", help="run a figure preset")
    f.add_argument("name", choices=FIGURES)
    f.add_argument("--instances", type=int, default=100)
    f.add_argument("--seed", type=int, default=0)
    f.add_argument("--out-dir", default="results")
    f.add_argument("--workers", type=int, default=None)
    f.set_defaults(func=cmd_figure)

    v = sub.add_parser("verify", help="numerical equivalence checks")
    v.add_argument("what", choices=["equivalences"])
    v.add_argument("--trials", type=int, default=50)
    v.add_argument("--seed", type=int, default=0)
    v.set_defaults(func=cmd_verify)

    pl = sub.add_parser("plot", help="render a sweep CSV as SVG")
    pl.add_argument("csv")
    pl.add_argument("--out", required=True)
    pl.set_defaults(func=cmd_plot)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
