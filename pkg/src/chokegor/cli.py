"""Batch command-line front end.

Three commands tie the pieces together: ``forward`` generates reference
measurement/truth series from a wellstream profile, ``estimate`` inverts a
measurement series against a seed pair, and ``sweep`` runs the tolerance
or seed-time studies. All user-facing units are bara and Celsius; outputs
are deterministic CSVs.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .estimator import (
    SeedPair,
    estimate_timeseries,
    seeds_from_truth,
    sweep_seed_times,
    sweep_tolerance,
    write_estimates_csv,
    write_sweep_csv,
)
from .fluids import FluidDataError, FluidSystem, load_fluid_system, normalize
from .process import (
    DEFAULT_TRAIN,
    ProcessError,
    SeparatorTrain,
    bundled_train_path,
    forward_timeseries,
    load_train,
    read_measurement_csv,
    read_profile_csv,
    read_truth_csv,
    write_measurement_csv,
    write_truth_csv,
)
from .units import kelvin_to_celsius


class CliError(Exception):
    pass


def _load_train_arg(spec: str) -> SeparatorTrain:
    if spec == "default":
        return load_train(bundled_train_path())
    return load_train(spec)


def _load_seeds(args, fluid: FluidSystem) -> SeedPair:
    if args.seeds and args.seed_from_truth:
        raise CliError("give either --seeds or --seed-from-truth, not both")
    if args.seeds:
        doc = json.loads(Path(args.seeds).read_text())
        try:
            oil = normalize(np.array([float(doc["oil"][n]) for n in fluid.names]))
            gas = normalize(np.array([float(doc["gas"][n]) for n in fluid.names]))
        except KeyError as exc:
            raise CliError(f"{args.seeds}: missing component {exc}") from exc
        return SeedPair(oil=oil, gas=gas, provenance=str(args.seeds))
    if args.seed_from_truth:
        if args.seed_day is None:
            raise CliError("--seed-from-truth requires --seed-day")
        truth = read_truth_csv(args.seed_from_truth, fluid)
        return seeds_from_truth(truth, args.seed_day)
    raise CliError("no seed source: give --seeds or --seed-from-truth")


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_all(writes) -> None:
    """Run deferred file writes; remove everything written on failure."""
    done = []
    try:
        for path, fn in writes:
            fn(path)
            done.append(path)
    except Exception:
        for path in done:
            Path(path).unlink(missing_ok=True)
        raise


def cmd_forward(args) -> int:
    fluid = load_fluid_system(args.fluid)
    train = _load_train_arg(args.train)
    profile = read_profile_csv(args.profile, fluid)
    result = forward_timeseries(fluid, profile, train)
    if not result.measurements:
        raise CliError("forward run produced no successful steps")
    out = _out_dir(args)
    _write_all(
        [
            (
                out / "measurements.csv",
                lambda p: write_measurement_csv(p, result.measurements),
            ),
            (out / "truth.csv", lambda p: write_truth_csv(p, fluid, result.truths)),
        ]
    )
    gors = [t.streams.gor for t in result.truths]
    dts = [
        kelvin_to_celsius(m.t_out_meas) - kelvin_to_celsius(m.t_in)
        for m in result.measurements
    ]
    print(
        f"forward: {len(result.measurements)} steps, "
        f"{len(result.failures)} failures, "
        f"gor [{min(gors):.6g}, {max(gors):.6g}] Sm3/Sm3, "
        f"dT [{min(dts):.6g}, {max(dts):.6g}] C"
    )
    for failure in result.failures:
        print(f"  step {failure.index} (day {failure.time:g}): {failure.message}")
    return 0


def cmd_estimate(args) -> int:
    if args.tol_c <= 0.0:
        raise CliError("--tol-c must be > 0")
    fluid = load_fluid_system(args.fluid)
    train = _load_train_arg(args.train)
    measurements = read_measurement_csv(args.measurements)
    seeds = _load_seeds(args, fluid)
    truth = read_truth_csv(args.truth, fluid) if args.truth else None
    results = estimate_timeseries(fluid, seeds, measurements, args.tol_c, train=train)
    out = _out_dir(args)
    _write_all(
        [
            (
                out / "estimates.csv",
                lambda p: write_estimates_csv(p, fluid, results, truth),
            )
        ]
    )
    n_ok = sum(r.status.value == "CONVERGED" for r in results)
    print(f"estimate: {len(results)} steps, {n_ok} converged")
    return 0


def cmd_sweep(args) -> int:
    fluid = load_fluid_system(args.fluid)
    train = _load_train_arg(args.train)
    measurements = read_measurement_csv(args.measurements)
    truth = read_truth_csv(args.truth, fluid) if args.truth else None
    out = _out_dir(args)
    if args.mode == "tolerance":
        if not args.tolerances_c:
            raise CliError("tolerance mode requires --tolerances-c")
        seeds = _load_seeds(args, fluid)
        tolerances = [float(s) for s in args.tolerances_c.split(",") if s]
        records = sweep_tolerance(
            fluid, seeds, measurements, tolerances, train=train, truth=truth
        )
        _write_all(
            [
                (
                    out / "sweep_tolerance.csv",
                    lambda p: write_sweep_csv(p, fluid, records, "tolerance_c"),
                )
            ]
        )
    else:  # seed-times
        if not args.seed_days:
            raise CliError("seed-times mode requires --seed-days")
        if truth is None:
            raise CliError("seed-times mode requires --truth")
        if args.tol_c <= 0.0:
            raise CliError("--tol-c must be > 0")
        days = [float(s) for s in args.seed_days.split(",") if s]
        records = sweep_seed_times(
            fluid, measurements, truth, days, args.tol_c, train=train
        )
        _write_all(
            [
                (
                    out / "sweep_seed_times.csv",
                    lambda p: write_sweep_csv(p, fluid, records, "seed_day"),
                )
            ]
        )
    print(f"sweep: {len(records)} rows")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chokegor",
        description=(
            "Estimate wellstream composition and surface GOR from "
            "pressure/temperature across a production choke."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--fluid", required=True, help="fluid dataset JSON")
        p.add_argument(
            "--train",
            default="default",
            help="separator train config JSON, or 'default'",
        )
        p.add_argument("--out", required=True, help="output directory")

    p_fwd = sub.add_parser("forward", help="generate reference measurement/truth CSVs")
    common(p_fwd)
    p_fwd.add_argument("--profile", required=True, help="wellstream profile CSV")
    p_fwd.set_defaults(func=cmd_forward)

    def seed_args(p):
        p.add_argument("--seeds", help="seed pair JSON (oil/gas fraction maps)")
        p.add_argument("--seed-from-truth", help="truth CSV to take seeds from")
        p.add_argument("--seed-day", type=float, help="day to pull seeds at")

    p_est = sub.add_parser("estimate", help="invert a measurement series")
    common(p_est)
    p_est.add_argument("--measurements", required=True)
    p_est.add_argument("--truth", help="truth CSV; adds delta/MPE columns")
    p_est.add_argument("--tol-c", type=float, required=True)
    seed_args(p_est)
    p_est.set_defaults(func=cmd_estimate)

    p_sw = sub.add_parser("sweep", help="tolerance or seed-time study")
    common(p_sw)
    p_sw.add_argument("--mode", choices=("tolerance", "seed-times"), required=True)
    p_sw.add_argument("--measurements", required=True)
    p_sw.add_argument("--truth", help="truth CSV (required for seed-times)")
    p_sw.add_argument("--tol-c", type=float, default=0.01)
    p_sw.add_argument("--tolerances-c", help="comma list, tolerance mode")
    p_sw.add_argument("--seed-days", help="comma list, seed-times mode")
    seed_args(p_sw)
    p_sw.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (
        CliError,
        ProcessError,
        FluidDataError,
        FileNotFoundError,
        ValueError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
