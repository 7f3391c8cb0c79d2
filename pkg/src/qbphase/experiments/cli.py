"""Command-line interface.

Subcommands::

    qbphase run --config FILE [--out DIR]
    qbphase figure NAME [--out DIR] [--frame lab|rwa] [--grid N] [--jobs K]
    qbphase list-figures
    qbphase check

Exit codes: 0 success, 1 config error, 2 physicality or branch-tracking
error, 3 partial batch failure (some scenarios or checks failed).
"""

import argparse
import os
import sys

from ..errors import BranchAmbiguity, ConfigError, PhysicalityViolation, UnknownFigure
from .checks import run_checks
from .config import load_config
from .io import write_table
from .registry import FIGURES, figure_registry
from .runner import run_sweep

EXIT_OK, EXIT_CONFIG, EXIT_PHYSICS, EXIT_PARTIAL = 0, 1, 2, 3


def _parser():
    ap = argparse.ArgumentParser(prog="qbphase", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run the scenario(s) described by a config file")
    run.add_argument("--config", required=True)
    run.add_argument("--out", default=None, help="output directory (default: config 'output' or cwd)")
    run.add_argument("--jobs", type=int, default=1)

    fig = sub.add_parser("figure", help="run every scenario of a registry figure")
    fig.add_argument("name", help="figure panel, e.g. fig2a, or fig-all")
    fig.add_argument("--out", default="results")
    fig.add_argument("--frame", choices=("lab", "rwa"), default=None)
    fig.add_argument("--grid", type=int, default=None)
    fig.add_argument("--jobs", type=int, default=1)

    sub.add_parser("list-figures", help="print the registry figure names")
    sub.add_parser("check", help="run the quick oracle and invariant checks")
    return ap


def _classify(results):
    failed = [r for r in results if not r.ok]
    if not failed:
        return EXIT_OK
    for r in failed:
        print(f"error: {r.error}", file=sys.stderr)
    if len(failed) < len(results):
        return EXIT_PARTIAL
    causes = [r.error.cause for r in failed]
    if all(isinstance(c, (PhysicalityViolation, BranchAmbiguity)) for c in causes):
        return EXIT_PHYSICS
    return EXIT_PARTIAL


def _write(results, out_dir, explicit=None):
    for r in results:
        if not r.ok:
            continue
        if explicit is None and r.config.output:
            path = r.config.output
            if len(results) > 1:
                root, ext = os.path.splitext(path)
                path = f"{root}-{r.config.name}{ext or '.tsv'}"
        else:
            path = os.path.join(out_dir or ".", f"{r.config.name}.tsv")
        write_table(r, path)
        print(path)


def _run(args):
    try:
        cfgs = load_config(args.config)
    except (ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    results = run_sweep(cfgs, parallelism=max(1, args.jobs))
    _write(results, args.out, explicit=args.out)
    return _classify(results)


def _figure(args):
    try:
        cfgs = figure_registry(args.name)
    except UnknownFigure as exc:
        print(f"config error: {exc.args[0]}", file=sys.stderr)
        return EXIT_CONFIG
    if args.grid is not None and args.grid < 2:
        print("config error: --grid must be at least 2", file=sys.stderr)
        return EXIT_CONFIG
    if args.jobs < 1:
        print("config error: --jobs must be at least 1", file=sys.stderr)
        return EXIT_CONFIG
    results = run_sweep(cfgs, parallelism=args.jobs, frame=args.frame, grid_points=args.grid)
    _write(results, args.out, explicit=args.out)
    return _classify(results)


def main(argv=None):
    args = _parser().parse_args(argv)
    if args.command == "list-figures":
        for name in FIGURES:
            print(name)
        return EXIT_OK
    if args.command == "check":
        return EXIT_OK if run_checks() == 0 else EXIT_PARTIAL
    if args.command == "run":
        return _run(args)
    return _figure(args)


if __name__ == "__main__":
    sys.exit(main())
