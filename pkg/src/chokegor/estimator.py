"""Inverse method: solve for the seed-gas fraction whose isenthalpic choke
expansion reproduces a measured outlet temperature, then report the
recombined wellstream and its surface GOR. Includes the error metrics and
the tolerance / seed-time study sweeps.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Sequence

import numpy as np

from .equilibrium import FlashError
from .fluids import Composition, FluidSystem
from .process import ChokeMeasurement, SeparatorTrain, DEFAULT_TRAIN, \
    FLOAT_FORMAT, TruthRow, choke_expand, recombine, separator_train
from .solvers import brent, scan_brackets
from .units import kelvin_to_celsius

GRID_POINTS = 21
ROOT_MERGE_TOL = 1e-9
# extra Brent steps after |residual| <= tol first holds; the returned root
# then sits deep inside the band instead of at its edge, so converged-
# regime GOR profiles coincide instead of wobbling by the band width
POLISH_STEPS = 2


class EstimationError(RuntimeError):
    pass


class SeedTimeError(ValueError):
    """A requested seed time has no matching truth row."""


class EstimationStatus(Enum):
    CONVERGED = "CONVERGED"
    NO_BRACKET = "NO_BRACKET"
    MULTIPLE_ROOTS = "MULTIPLE_ROOTS"
    FLASH_FAILURE = "FLASH_FAILURE"


@dataclass(frozen=True, eq=False)
class SeedPair:
    """Surface oil/gas compositions recombined by the estimator."""

    oil: Composition
    gas: Composition
    provenance: str = ""


@dataclass(frozen=True, eq=False)
class EstimationResult:
    """Outcome of one gas-fraction solve against one choke measurement."""

    time: float  # days
    status: EstimationStatus
    f_g_est: float
    z_est: Composition | None
    gor_est: float
    t_out_calc: float  # K
    residual: float  # K, t_out_calc - t_out_meas
    iterations: int  # residual evaluations spent
    candidate_roots: tuple[float, ...] = ()
    t_out_lo: float = math.nan  # achievable envelope when NO_BRACKET
    t_out_hi: float = math.nan
    message: str = ""

    def __post_init__(self) -> None:
        if self.status is EstimationStatus.CONVERGED and not (
            0.0 <= self.f_g_est <= 1.0
        ):
            raise ValueError(f"converged f_g {self.f_g_est} outside [0, 1]")


class _FlashFailureSignal(Exception):
    def __init__(self, f_g: float, cause: Exception):
        super().__init__(f"flash failure at f_g={f_g:.6f}: {cause}")
        self.f_g = f_g
        self.cause = cause


def residual_temperature(
    fluid: FluidSystem,
    seeds: SeedPair,
    measurement: ChokeMeasurement,
    f_g: float,
) -> float:
    """Simulated-minus-measured choke outlet temperature (K) at f_g."""
    z = recombine(seeds.oil, seeds.gas, f_g)
    try:
        t_out, _ = choke_expand(
            fluid, z, measurement.p_in, measurement.t_in, measurement.p_out
        )
    except FlashError as exc:
        raise _FlashFailureSignal(f_g, exc) from exc
    return t_out - measurement.t_out_meas


def solve_fg(
    fluid: FluidSystem,
    seeds: SeedPair,
    measurement: ChokeMeasurement,
    tol_t: float,
    *,
    train: SeparatorTrain = DEFAULT_TRAIN,
    prev_gor: float | None = None,
) -> EstimationResult:
    """Find every gas fraction whose simulated outlet temperature matches
    the measurement within tol_t.

    A uniform 21-point grid scan locates sign changes of the residual;
    each is refined by Brent. One root converges directly; several roots
    are all reported, with the default pick being the candidate whose GOR
    is closest to ``prev_gor`` (smallest f_g when no history exists).
    """
    if tol_t <= 0.0:
        raise ValueError("temperature tolerance must be > 0")
    evals = [0]

    def res_fn(f_g: float) -> float:
        evals[0] += 1
        return residual_temperature(fluid, seeds, measurement, f_g)

    try:
        grid, values, pairs = scan_brackets(res_fn, 0.0, 1.0, GRID_POINTS)

        if not pairs:
            best = int(np.argmin(np.abs(values)))
            t_outs = [v + measurement.t_out_meas for v in values]
            return EstimationResult(
                time=measurement.time,
                status=EstimationStatus.NO_BRACKET,
                f_g_est=math.nan,
                z_est=None,
                gor_est=math.nan,
                t_out_calc=t_outs[best],
                residual=values[best],
                iterations=evals[0],
                t_out_lo=min(t_outs),
                t_out_hi=max(t_outs),
                message="measured temperature outside the achievable envelope",
            )

        roots: list[tuple[float, float]] = []
        for i, j in pairs:
            if values[i] == 0.0:
                roots.append((grid[i], 0.0))
                continue
            out = brent(
                res_fn, grid[i], grid[j], values[i], values[j],
                f_tol=tol_t, polish=POLISH_STEPS,
            )
            roots.append((out.root, out.f_root))
        # merge near-identical refinements
        roots.sort()
        merged = [roots[0]]
        for r, fr in roots[1:]:
            if r - merged[-1][0] > ROOT_MERGE_TOL:
                merged.append((r, fr))
    except _FlashFailureSignal as exc:
        return EstimationResult(
            time=measurement.time,
            status=EstimationStatus.FLASH_FAILURE,
            f_g_est=math.nan,
            z_est=None,
            gor_est=math.nan,
            t_out_calc=math.nan,
            residual=math.nan,
            iterations=evals[0],
            message=str(exc),
        )

    if len(merged) == 1:
        f_g, res = merged[0]
        status = EstimationStatus.CONVERGED
        candidates: tuple[float, ...] = ()
    else:
        status = EstimationStatus.MULTIPLE_ROOTS
        candidates = tuple(r for r, _ in merged)
        if prev_gor is not None and math.isfinite(prev_gor):
            gors = [
                separator_train(fluid, recombine(seeds.oil, seeds.gas, r), train).gor
                for r, _ in merged
            ]
            pick = int(np.argmin([abs(g - prev_gor) for g in gors]))
        else:
            pick = 0  # smallest f_g
        f_g, res = merged[pick]

    z_est = recombine(seeds.oil, seeds.gas, f_g)
    gor_est = separator_train(fluid, z_est, train).gor
    return EstimationResult(
        time=measurement.time,
        status=status,
        f_g_est=f_g,
        z_est=z_est,
        gor_est=gor_est,
        t_out_calc=measurement.t_out_meas + res,
        residual=res,
        iterations=evals[0],
        candidate_roots=candidates,
    )


def estimate_timeseries(
    fluid: FluidSystem,
    seeds: SeedPair,
    measurements: Sequence[ChokeMeasurement],
    tol_t: float,
    *,
    train: SeparatorTrain = DEFAULT_TRAIN,
) -> list[EstimationResult]:
    """Per-measurement solve with temporal continuity: when a step has
    several roots, the one whose GOR is closest to the previous step's
    estimate wins. Failing steps are recorded; the run continues."""
    results = []
    prev_gor: float | None = None
    for m in measurements:
        result = solve_fg(
            fluid, seeds, m, tol_t, train=train, prev_gor=prev_gor
        )
        results.append(result)
        if result.status in (
            EstimationStatus.CONVERGED,
            EstimationStatus.MULTIPLE_ROOTS,
        ):
            prev_gor = result.gor_est
    return results


# ---------------------------------------------------------------------------
# Error metrics
# ---------------------------------------------------------------------------


def percent_error(est: float, ref: float) -> float:
    """Signed percent error 100 * (est - ref) / ref."""
    if ref == 0.0:
        raise ZeroDivisionError("percent error undefined for ref == 0")
    return 100.0 * (est - ref) / ref


def mole_fraction_mpe(
    z_est: Composition, z_ref: Composition
) -> tuple[float, tuple[int, ...]]:
    """Mean absolute percent error over components with z_ref > 0.

    Returns (MPE, indices excluded because their reference fraction is 0).
    """
    a = z_est.fractions
    r = z_ref.fractions
    if len(a) != len(r):
        raise ValueError("compositions have different lengths")
    mask = r > 0.0
    if not np.any(mask):
        raise ValueError("all reference fractions are zero")
    mpe = 100.0 * float(np.mean(np.abs(a[mask] - r[mask]) / r[mask]))
    excluded = tuple(int(i) for i in np.flatnonzero(~mask))
    return mpe, excluded


# ---------------------------------------------------------------------------
# Study sweeps
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SweepRecord:
    """One (study parameter, time step) cell of a sweep."""

    parameter: float  # tolerance in K, or seed day
    result: EstimationResult
    delta_gor: float = math.nan  # signed percent error vs truth
    mpe: float = math.nan  # mean absolute percent error of z


def _attach_truth(
    result: EstimationResult, truth_by_time: dict[float, TruthRow] | None
) -> tuple[float, float]:
    if not truth_by_time or result.z_est is None:
        return math.nan, math.nan
    row = truth_by_time.get(result.time)
    if row is None:
        return math.nan, math.nan
    delta = percent_error(result.gor_est, row.gor)
    mpe, _ = mole_fraction_mpe(result.z_est, row.z)
    return delta, mpe


def sweep_tolerance(
    fluid: FluidSystem,
    seeds: SeedPair,
    measurements: Sequence[ChokeMeasurement],
    tolerances: Sequence[float],
    *,
    train: SeparatorTrain = DEFAULT_TRAIN,
    truth: Sequence[TruthRow] | None = None,
) -> list[SweepRecord]:
    """Full-series estimation repeated for each solver tolerance (K)."""
    if not tolerances:
        raise ValueError("tolerance list is empty")
    if any(tol <= 0.0 for tol in tolerances):
        raise ValueError("tolerances must be > 0")
    truth_by_time = {row.time: row for row in truth} if truth else None
    records = []
    for tol in tolerances:
        for result in estimate_timeseries(
            fluid, seeds, measurements, tol, train=train
        ):
            delta, mpe = _attach_truth(result, truth_by_time)
            records.append(
                SweepRecord(parameter=tol, result=result, delta_gor=delta, mpe=mpe)
            )
    return records


def seeds_from_truth(truth: Sequence[TruthRow], day: float) -> SeedPair:
    """Surface oil/gas of the truth row at ``day`` as a seed pair."""
    for row in truth:
        if row.time == day:
            return SeedPair(
                oil=row.oil, gas=row.gas, provenance=f"truth day {day:g}"
            )
    raise SeedTimeError(f"no truth row at day {day:g}")


def sweep_seed_times(
    fluid: FluidSystem,
    measurements: Sequence[ChokeMeasurement],
    truth: Sequence[TruthRow],
    seed_days: Sequence[float],
    tol_t: float,
    *,
    train: SeparatorTrain = DEFAULT_TRAIN,
) -> list[SweepRecord]:
    """Full-series estimation repeated with seeds taken from the truth
    surface streams at each requested day."""
    if not seed_days:
        raise ValueError("seed day list is empty")
    deduped = []
    for day in seed_days:
        if day in deduped:
            warnings.warn(f"duplicate seed day {day:g} ignored", stacklevel=2)
            continue
        deduped.append(day)
    truth_by_time = {row.time: row for row in truth}
    records = []
    for day in deduped:
        seeds = seeds_from_truth(truth, day)
        for result in estimate_timeseries(
            fluid, seeds, measurements, tol_t, train=train
        ):
            delta, mpe = _attach_truth(result, truth_by_time)
            records.append(
                SweepRecord(parameter=day, result=result, delta_gor=delta, mpe=mpe)
            )
    return records


# ---------------------------------------------------------------------------
# CSV output
# ---------------------------------------------------------------------------


def _fmt(value: float) -> str:
    return FLOAT_FORMAT % value


def _result_cells(fluid: FluidSystem, r: EstimationResult) -> list[str]:
    zs = (
        [_fmt(v) for v in r.z_est.fractions]
        if r.z_est is not None
        else ["nan"] * fluid.n_components
    )
    return [
        _fmt(r.time),
        _fmt(r.f_g_est),
        _fmt(r.gor_est),
        _fmt(kelvin_to_celsius(r.t_out_calc)),
        _fmt(r.residual),
        r.status.value,
        str(r.iterations),
        *zs,
    ]


def estimate_header(fluid: FluidSystem, with_truth: bool) -> list[str]:
    cols = [
        "day",
        "f_g_est",
        "gor_est",
        "t_out_calc_c",
        "residual_c",
        "status",
        "iterations",
    ] + [f"z_{n}" for n in fluid.names]
    if with_truth:
        cols += ["delta_gor_pct", "mpe_pct"]
    return cols


def write_estimates_csv(
    path: str | Path,
    fluid: FluidSystem,
    results: Sequence[EstimationResult],
    truth: Sequence[TruthRow] | None = None,
) -> None:
    truth_by_time = {row.time: row for row in truth} if truth else None
    lines = [",".join(estimate_header(fluid, truth is not None))]
    for r in results:
        cells = _result_cells(fluid, r)
        if truth is not None:
            delta, mpe = _attach_truth(r, truth_by_time)
            cells += [_fmt(delta), _fmt(mpe)]
        lines.append(",".join(cells))
    Path(path).write_text("\n".join(lines) + "\n")


def write_sweep_csv(
    path: str | Path,
    fluid: FluidSystem,
    records: Sequence[SweepRecord],
    parameter_name: str,
) -> None:
    """Long-format sweep output; ``parameter_name`` is the leading column
    (``tolerance_c`` or ``seed_day``)."""
    header = [parameter_name] + estimate_header(fluid, with_truth=True)
    lines = [",".join(header)]
    for rec in records:
        cells = [_fmt(rec.parameter)] + _result_cells(fluid, rec.result)
        cells += [_fmt(rec.delta_gor), _fmt(rec.mpe)]
        lines.append(",".join(cells))
    Path(path).write_text("\n".join(lines) + "\n")
