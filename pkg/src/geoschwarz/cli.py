"""Command line front end: experiment runner, presets, invariant checks."""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from .bench import (
    METHODS,
    PRESET_NAMES,
    load_experiment_configs,
    preset_configs,
    run_experiment,
)


def _parse_methods(text: str) -> tuple[str, ...]:
    methods = tuple(name.strip() for name in text.split(",") if name.strip())
    unknown = set(methods) - set(METHODS)
    if unknown:
        raise argparse.ArgumentTypeError(
            f"unknown methods {sorted(unknown)}; choose from {METHODS}")
    return methods


def _add_override_args(sub):
    sub.add_argument("--out", default="out", help="output directory for CSV files")
    sub.add_argument("--tol", type=float, default=None,
                     help="override the stopping tolerance for every method")
    sub.add_argument("--max-iters", type=int, default=None,
                     help="override the iteration cap for every method")
    sub.add_argument("--methods", type=_parse_methods, default=None,
                     help="comma-separated method subset "
                          "(leapfrog_gs,leapfrog_jacobi,newton_schwarz,global_shooting)")
    sub.add_argument("--no-timings", action="store_true",
                     help="leave wall_time_ms empty so reruns are byte-identical")


def _apply_overrides(cfgs, args):
    out = []
    for cfg in cfgs:
        if args.tol is not None:
            cfg = replace(cfg, tol=args.tol)
        if args.max_iters is not None:
            cfg = replace(cfg, max_iters=args.max_iters)
        if args.methods is not None:
            cfg = replace(cfg, methods=args.methods)
        if args.no_timings:
            cfg = replace(cfg, record_timings=False)
        out.append(cfg)
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="geo-schwarz",
        description="Endpoint-geodesic benchmarks: leapfrog sweeps, "
                    "Newton-Schwarz, and a global shooting baseline.")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run experiments from a YAML config file")
    run.add_argument("--config", required=True, help="YAML experiment file")
    run.add_argument("--seed", type=int, default=None,
                     help="override the seed of every experiment")
    _add_override_args(run)

    preset = sub.add_parser("preset", help="run a stock experiment family")
    preset.add_argument("name", choices=PRESET_NAMES)
    preset.add_argument("--seed", type=int, default=0)
    _add_override_args(preset)

    verify = sub.add_parser("verify", help="run the invariant spot checks")
    verify.add_argument("--seed", type=int, default=0)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)

    if args.command == "verify":
        from .verify import run_invariant_suite

        return 1 if run_invariant_suite(seed=args.seed) else 0

    if args.command == "run":
        cfgs = load_experiment_configs(args.config)
        if args.seed is not None:
            cfgs = [replace(cfg, seed=args.seed) for cfg in cfgs]
    else:
        cfgs = preset_configs(args.name, seed=args.seed)
    cfgs = _apply_overrides(cfgs, args)

    for cfg in cfgs:
        for path in run_experiment(cfg, out_dir=args.out):
            print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
