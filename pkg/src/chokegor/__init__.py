"""Wellstream composition and surface gas-oil ratio estimation from
pressure/temperature measurements across a production choke.

The forward path recombines seed oil and gas, expands the mixture
isenthalpically across the choke, and passes it through a staged surface
separation; the inverse path solves for the gas fraction that reproduces
a measured outlet temperature.
"""

from .eos import (
    EnthalpyRangeError,
    EosError,
    LiquidVolume,
    MixtureParams,
    PhaseLabel,
    R_GAS,
    compressibility_roots,
    costald_volume,
    fugacity_coeffs,
    liquid_molar_volume,
    mixture_params,
    molar_enthalpy,
    select_root,
)
from .equilibrium import (
    FlashError,
    FlashState,
    PhaseEquilibrium,
    SinglePhaseError,
    TrivialSolutionError,
    UnreachableEnthalpyError,
    mixture_enthalpy,
    ph_flash,
    pt_flash,
    rachford_rice,
    wilson_k,
)
from .estimator import (
    EstimationResult,
    EstimationStatus,
    SeedPair,
    SeedTimeError,
    SweepRecord,
    estimate_timeseries,
    mole_fraction_mpe,
    percent_error,
    residual_temperature,
    seeds_from_truth,
    solve_fg,
    sweep_seed_times,
    sweep_tolerance,
)
from .fluids import (
    ComponentProps,
    Composition,
    CostaldParams,
    CpPolynomial,
    FluidDataError,
    FluidSystem,
    bundled_fluid_path,
    load_fluid_system,
    normalize,
    save_fluid_system,
)
from .process import (
    ChokeMeasurement,
    DEFAULT_TRAIN,
    ForwardResult,
    InfiniteGorError,
    ProcessError,
    ProfileStep,
    SeparatorTrain,
    StageConditions,
    SurfaceStreams,
    TruthRecord,
    TruthRow,
    bundled_train_path,
    choke_expand,
    forward_timeseries,
    load_train,
    recombine,
    separator_train,
    synthesize_profile,
)

__version__ = "0.1.0"

__all__ = [
    "ChokeMeasurement",
    "ComponentProps",
    "Composition",
    "CostaldParams",
    "CpPolynomial",
    "DEFAULT_TRAIN",
    "EnthalpyRangeError",
    "EosError",
    "EstimationResult",
    "EstimationStatus",
    "FlashError",
    "FlashState",
    "FluidDataError",
    "FluidSystem",
    "ForwardResult",
    "InfiniteGorError",
    "LiquidVolume",
    "MixtureParams",
    "PhaseEquilibrium",
    "PhaseLabel",
    "ProcessError",
    "ProfileStep",
    "R_GAS",
    "SeedPair",
    "SeedTimeError",
    "SeparatorTrain",
    "SinglePhaseError",
    "StageConditions",
    "SurfaceStreams",
    "SweepRecord",
    "TrivialSolutionError",
    "TruthRecord",
    "TruthRow",
    "UnreachableEnthalpyError",
    "bundled_fluid_path",
    "bundled_train_path",
    "choke_expand",
    "compressibility_roots",
    "costald_volume",
    "estimate_timeseries",
    "forward_timeseries",
    "fugacity_coeffs",
    "liquid_molar_volume",
    "load_fluid_system",
    "load_train",
    "mixture_enthalpy",
    "mixture_params",
    "molar_enthalpy",
    "mole_fraction_mpe",
    "normalize",
    "percent_error",
    "ph_flash",
    "pt_flash",
    "rachford_rice",
    "recombine",
    "residual_temperature",
    "save_fluid_system",
    "seeds_from_truth",
    "select_root",
    "separator_train",
    "solve_fg",
    "sweep_seed_times",
    "sweep_tolerance",
    "synthesize_profile",
    "wilson_k",
]
