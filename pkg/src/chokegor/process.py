"""Physical unit operations: seed-stream recombination, the isenthalpic
production choke, the staged surface separation train with standard-
conditions conversion, and the forward reference-case generator.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .eos import PhaseLabel, R_GAS, liquid_molar_volume, mixture_params, \
    compressibility_roots, select_root
from .equilibrium import FlashError, FlashState, PhaseEquilibrium, \
    mixture_enthalpy, ph_flash, pt_flash
from .fluids import Composition, FluidSystem, normalize
from .units import STANDARD_PRESSURE_PA, STANDARD_TEMPERATURE_K, \
    bar_to_pascal, celsius_to_kelvin


class ProcessError(RuntimeError):
    pass


class InfiniteGorError(ProcessError):
    """No stock-tank liquid left: the gas-oil ratio is undefined."""


@dataclass(frozen=True)
class StageConditions:
    """Separator stage pressure/temperature, SI."""

    p: float  # Pa
    t: float  # K


@dataclass(frozen=True)
class SeparatorTrain:
    """Ordered separator stages plus the standard-conditions end point."""

    stages: tuple[StageConditions, ...]
    standard: StageConditions

    def __post_init__(self) -> None:
        if len(self.stages) < 1:
            raise ValueError("separator train needs at least one stage")
        pressures = [s.p for s in self.stages]
        if any(p2 >= p1 for p1, p2 in zip(pressures, pressures[1:])):
            raise ValueError("stage pressures must be strictly decreasing")
        if any(s.p <= 0.0 or s.t <= 0.0 for s in self.stages):
            raise ValueError("stage conditions must be positive")


DEFAULT_TRAIN = SeparatorTrain(
    stages=(
        StageConditions(p=bar_to_pascal(20.0), t=celsius_to_kelvin(50.0)),
        StageConditions(p=bar_to_pascal(4.0), t=celsius_to_kelvin(40.0)),
    ),
    standard=StageConditions(p=STANDARD_PRESSURE_PA, t=STANDARD_TEMPERATURE_K),
)


def load_train(path: str | Path) -> SeparatorTrain:
    """Read a train config (stages + standard conditions in bara/Celsius)."""
    doc = json.loads(Path(path).read_text())
    try:
        stages = tuple(
            StageConditions(
                p=bar_to_pascal(float(s["p_bara"])),
                t=celsius_to_kelvin(float(s["t_celsius"])),
            )
            for s in doc["stages"]
        )
        std = doc["standard_conditions"]
        standard = StageConditions(
            p=bar_to_pascal(float(std["p_bara"])),
            t=celsius_to_kelvin(float(std["t_celsius"])),
        )
    except (KeyError, TypeError) as exc:
        raise ProcessError(f"{path}: malformed train config ({exc})") from exc
    return SeparatorTrain(stages=stages, standard=standard)


def bundled_train_path() -> Path:
    return Path(__file__).parent / "data" / "default_train.json"


@dataclass(frozen=True)
class ChokeMeasurement:
    """One logged choke data point (SI internally, days for time)."""

    time: float  # days
    p_in: float  # Pa
    t_in: float  # K
    p_out: float  # Pa
    t_out_meas: float  # K

    def __post_init__(self) -> None:
        # equality permitted: a zero-drop row is a valid (degenerate) step
        if not self.p_in >= self.p_out > 0.0:
            raise ValueError("choke measurement requires p_in >= p_out > 0")


@dataclass(frozen=True, eq=False)
class SurfaceStreams:
    """Stock-tank oil and total surface gas produced by a separation train."""

    oil: Composition  # x_i
    gas: Composition  # y_i
    f_g: float  # gas molar fraction of total surface moles
    gor: float  # Sm3/Sm3
    oil_molar_volume: float  # m3/mol at standard conditions
    gas_molar_volume: float  # m3/mol at standard conditions


def recombine(x: Composition, y: Composition, f_g: float) -> Composition:
    """Molar mixing z_i = f_g * y_i + (1 - f_g) * x_i."""
    if not 0.0 <= f_g <= 1.0:
        raise ValueError(f"gas fraction {f_g} outside [0, 1]")
    if len(x) != len(y):
        raise ValueError("seed compositions have different lengths")
    return Composition(f_g * y.fractions + (1.0 - f_g) * x.fractions)


def choke_expand(
    fluid: FluidSystem,
    z: Composition,
    p_in: float,
    t_in: float,
    p_out: float,
) -> tuple[float, PhaseEquilibrium]:
    """Isenthalpic expansion across the choke.

    The upstream state is flashed first (the feed may already be two-phase
    at the inlet); its mixture enthalpy is the conserved quantity. A zero
    pressure drop degenerates to the upstream state.
    """
    if not p_in >= p_out:
        raise ValueError("choke requires p_in >= p_out")
    upstream = pt_flash(fluid, z, t_in, p_in)
    h_in = mixture_enthalpy(fluid, upstream, t_in, p_in)
    return ph_flash(fluid, z, p_out, h_in, t_in)


def separator_train(
    fluid: FluidSystem, z: Composition, train: SeparatorTrain = DEFAULT_TRAIN
) -> SurfaceStreams:
    """Sequential stage flashes ending in a standard-conditions flash.

    Vapor from every stage (the standard-conditions flash of the last
    liquid included) is mole-weighted into one surface gas, so the train
    is lossless and recombine(oil, gas, f_g) reproduces the feed exactly.
    """
    n = fluid.n_components
    gas_moles = 0.0
    gas_accum = np.zeros(n)
    liquid = z
    liquid_moles = 1.0

    conditions = list(train.stages) + [train.standard]
    for stage in conditions:
        if liquid_moles <= 0.0:
            break
        eq = pt_flash(fluid, liquid, stage.t, stage.p)
        if eq.state is FlashState.SINGLE_PHASE_VAPOR:
            vap_frac = 1.0
        elif eq.state is FlashState.SINGLE_PHASE_LIQUID:
            vap_frac = 0.0
        else:
            vap_frac = eq.beta
        if vap_frac > 0.0:
            moles = liquid_moles * vap_frac
            gas_accum += moles * eq.y.fractions
            gas_moles += moles
            liquid_moles *= 1.0 - vap_frac
        if vap_frac < 1.0:
            liquid = eq.x
        else:
            liquid_moles = 0.0

    oil_moles = liquid_moles
    if oil_moles <= 1e-12:
        raise InfiniteGorError(
            "separation left no stock-tank oil; GOR is undefined"
        )
    oil = liquid

    if gas_moles > 0.0:
        gas = Composition(gas_accum / gas_moles)
    else:
        gas = oil  # degenerate non-volatile feed: any gas composition works
    f_g = gas_moles  # feed basis is one mole

    std = train.standard
    gas_volume = _vapor_molar_volume(fluid, gas, std.t, std.p)
    oil_volume = liquid_molar_volume(fluid, oil, std.t, std.p).value
    gor = (gas_moles * gas_volume) / (oil_moles * oil_volume)
    return SurfaceStreams(
        oil=oil,
        gas=gas,
        f_g=f_g,
        gor=gor,
        oil_molar_volume=oil_volume,
        gas_molar_volume=gas_volume,
    )


def _vapor_molar_volume(
    fluid: FluidSystem, comp: Composition, t: float, p: float
) -> float:
    mp = mixture_params(fluid, comp, t, p)
    zfac = select_root(compressibility_roots(mp), PhaseLabel.VAPOR)
    return zfac * R_GAS * t / p


# ---------------------------------------------------------------------------
# Forward reference-case generation
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ProfileStep:
    """One wellstream time step fed to the forward model (SI)."""

    time: float  # days
    z: Composition
    p_in: float  # Pa
    t_in: float  # K
    p_out: float  # Pa


@dataclass(frozen=True, eq=False)
class TruthRecord:
    """Reference-solution row: what the estimator tries to recover."""

    time: float
    z: Composition
    streams: SurfaceStreams


@dataclass(frozen=True)
class StepFailure:
    index: int
    time: float
    message: str


@dataclass(frozen=True, eq=False)
class ForwardResult:
    measurements: tuple[ChokeMeasurement, ...]
    truths: tuple[TruthRecord, ...]
    failures: tuple[StepFailure, ...]


def forward_timeseries(
    fluid: FluidSystem,
    profile: Sequence[ProfileStep],
    train: SeparatorTrain = DEFAULT_TRAIN,
) -> ForwardResult:
    """Run the forward model over a wellstream profile.

    Per step: choke outlet temperature from the isenthalpic expansion and
    surface streams from the separation train. Failing steps are recorded
    and skipped; the run continues.
    """
    measurements = []
    truths = []
    failures = []
    for i, step in enumerate(profile):
        try:
            if step.p_out > step.p_in:
                raise ProcessError("p_out > p_in")
            t_out, _ = choke_expand(fluid, step.z, step.p_in, step.t_in, step.p_out)
            streams = separator_train(fluid, step.z, train)
        except (FlashError, ProcessError, ValueError) as exc:
            failures.append(StepFailure(index=i, time=step.time, message=str(exc)))
            continue
        measurements.append(
            ChokeMeasurement(
                time=step.time,
                p_in=step.p_in,
                t_in=step.t_in,
                p_out=step.p_out,
                t_out_meas=t_out,
            )
        )
        truths.append(TruthRecord(time=step.time, z=step.z, streams=streams))
    return ForwardResult(
        measurements=tuple(measurements),
        truths=tuple(truths),
        failures=tuple(failures),
    )


def synthesize_profile(
    oil_like: Composition,
    gas_like: Composition,
    *,
    steps: int = 100,
    day_step: float = 28.0,
    p_in_bara: float = 96.0,
    t_in_c: float = 66.0,
    dp_bara: float = 30.0,
) -> list[ProfileStep]:
    """Parametric wellstream history: blend from an oil-like composition
    toward a gas-like one and back (half-sine weight), which produces the
    canonical rise-and-fall GOR shape under a constant choke pressure drop.
    """
    if steps < 2:
        raise ValueError("need at least two steps")
    p_in = bar_to_pascal(p_in_bara)
    p_out = bar_to_pascal(p_in_bara - dp_bara)
    t_in = celsius_to_kelvin(t_in_c)
    if p_out <= 0.0:
        raise ValueError("pressure drop exceeds inlet pressure")
    out = []
    for i in range(steps):
        w = math.sin(math.pi * i / (steps - 1)) ** 2
        z = recombine(oil_like, gas_like, w)
        out.append(
            ProfileStep(time=i * day_step, z=z, p_in=p_in, t_in=t_in, p_out=p_out)
        )
    return out


# ---------------------------------------------------------------------------
# CSV interfaces (boundary units: bara and Celsius; 12 significant digits)
# ---------------------------------------------------------------------------

FLOAT_FORMAT = "%.12g"


def _fmt(value: float) -> str:
    return FLOAT_FORMAT % value


def read_profile_csv(path: str | Path, fluid: FluidSystem) -> list[ProfileStep]:
    """Parse `day,p_in_bara,t_in_c,p_out_bara,z_<name>,...` rows."""
    import csv

    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        needed = ["day", "p_in_bara", "t_in_c", "p_out_bara"] + [
            f"z_{n}" for n in fluid.names
        ]
        missing = [c for c in needed if c not in header]
        if missing:
            raise ProcessError(f"{path}: missing column(s) {', '.join(missing)}")
        steps = []
        for row in reader:
            z = normalize(np.array([float(row[f"z_{n}"]) for n in fluid.names]))
            steps.append(
                ProfileStep(
                    time=float(row["day"]),
                    z=z,
                    p_in=bar_to_pascal(float(row["p_in_bara"])),
                    t_in=celsius_to_kelvin(float(row["t_in_c"])),
                    p_out=bar_to_pascal(float(row["p_out_bara"])),
                )
            )
    if not steps:
        raise ProcessError(f"{path}: no steps")
    return steps


def write_profile_csv(
    path: str | Path, fluid: FluidSystem, profile: Sequence[ProfileStep]
) -> None:
    from .units import kelvin_to_celsius, pascal_to_bar

    header = ",".join(
        ["day", "p_in_bara", "t_in_c", "p_out_bara"]
        + [f"z_{n}" for n in fluid.names]
    )
    lines = [header]
    for s in profile:
        cells = [
            _fmt(s.time),
            _fmt(pascal_to_bar(s.p_in)),
            _fmt(kelvin_to_celsius(s.t_in)),
            _fmt(pascal_to_bar(s.p_out)),
        ] + [_fmt(v) for v in s.z.fractions]
        lines.append(",".join(cells))
    Path(path).write_text("\n".join(lines) + "\n")


def write_measurement_csv(
    path: str | Path, measurements: Sequence[ChokeMeasurement]
) -> None:
    from .units import kelvin_to_celsius, pascal_to_bar

    lines = ["day,p_in_bara,t_in_c,p_out_bara,t_out_c"]
    for m in measurements:
        lines.append(
            ",".join(
                [
                    _fmt(m.time),
                    _fmt(pascal_to_bar(m.p_in)),
                    _fmt(kelvin_to_celsius(m.t_in)),
                    _fmt(pascal_to_bar(m.p_out)),
                    _fmt(kelvin_to_celsius(m.t_out_meas)),
                ]
            )
        )
    Path(path).write_text("\n".join(lines) + "\n")


def read_measurement_csv(path: str | Path) -> list[ChokeMeasurement]:
    import csv

    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.DictReader(fh)
        needed = ["day", "p_in_bara", "t_in_c", "p_out_bara", "t_out_c"]
        missing = [c for c in needed if c not in (reader.fieldnames or [])]
        if missing:
            raise ProcessError(f"{path}: missing column(s) {', '.join(missing)}")
        out = [
            ChokeMeasurement(
                time=float(row["day"]),
                p_in=bar_to_pascal(float(row["p_in_bara"])),
                t_in=celsius_to_kelvin(float(row["t_in_c"])),
                p_out=bar_to_pascal(float(row["p_out_bara"])),
                t_out_meas=celsius_to_kelvin(float(row["t_out_c"])),
            )
            for row in reader
        ]
    if not out:
        raise ProcessError(f"{path}: no measurements")
    return out


def write_truth_csv(
    path: str | Path, fluid: FluidSystem, truths: Sequence[TruthRecord]
) -> None:
    names = fluid.names
    header = (
        ["day", "f_g", "gor_sm3_sm3"]
        + [f"x_{n}" for n in names]
        + [f"y_{n}" for n in names]
        + [f"z_{n}" for n in names]
    )
    lines = [",".join(header)]
    for rec in truths:
        cells = [_fmt(rec.time), _fmt(rec.streams.f_g), _fmt(rec.streams.gor)]
        cells += [_fmt(v) for v in rec.streams.oil.fractions]
        cells += [_fmt(v) for v in rec.streams.gas.fractions]
        cells += [_fmt(v) for v in rec.z.fractions]
        lines.append(",".join(cells))
    Path(path).write_text("\n".join(lines) + "\n")


@dataclass(frozen=True, eq=False)
class TruthRow:
    """A parsed truth-CSV row (compositions only; volumes not persisted)."""

    time: float
    f_g: float
    gor: float
    oil: Composition
    gas: Composition
    z: Composition


def read_truth_csv(path: str | Path, fluid: FluidSystem) -> list[TruthRow]:
    import csv

    path = Path(path)
    names = fluid.names
    with path.open(newline="") as fh:
        reader = csv.DictReader(fh)
        needed = ["day", "f_g", "gor_sm3_sm3"] + [
            f"{p}_{n}" for p in ("x", "y", "z") for n in names
        ]
        missing = [c for c in needed if c not in (reader.fieldnames or [])]
        if missing:
            raise ProcessError(f"{path}: missing column(s) {', '.join(missing)}")
        rows = []
        for row in reader:
            rows.append(
                TruthRow(
                    time=float(row["day"]),
                    f_g=float(row["f_g"]),
                    gor=float(row["gor_sm3_sm3"]),
                    oil=normalize(np.array([float(row[f"x_{n}"]) for n in names])),
                    gas=normalize(np.array([float(row[f"y_{n}"]) for n in names])),
                    z=normalize(np.array([float(row[f"z_{n}"]) for n in names])),
                )
            )
    if not rows:
        raise ProcessError(f"{path}: no rows")
    return rows
