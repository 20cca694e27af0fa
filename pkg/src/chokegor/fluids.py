"""Component basis, compositions, and fluid dataset ingestion.

All values are stored in SI (K, Pa, g/mol, J/mol/K). Dataset files may
declare field units (psia, degrees Rankine); conversion happens on load
and the raw file payload is retained so re-serialization is lossless.
"""

from __future__ import annotations

import json
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

from .units import psia_to_pascal, rankine_to_kelvin

COMPOSITION_SUM_TOL = 1e-12
TRACE_CLAMP = 1e-15


class FluidDataError(ValueError):
    """A fluid dataset failed validation; message names component and field."""


@dataclass(frozen=True)
class CpPolynomial:
    """Ideal-gas heat capacity cp(T) = c0 + c1*T + c2*T^2 + c3*T^3, J/mol/K.

    ``t_min``/``t_max`` bound the declared validity range in K.
    """

    coeffs: tuple[float, ...]
    t_min: float
    t_max: float

    def __post_init__(self) -> None:
        if not self.coeffs:
            raise FluidDataError("cp_ig: empty coefficient list")
        if not self.t_min < self.t_max:
            raise FluidDataError("cp_ig: t_min must be below t_max")
        grid = np.linspace(self.t_min, self.t_max, 64)
        if np.any(self.evaluate(grid) <= 0.0):
            raise FluidDataError(
                "cp_ig: polynomial non-positive inside declared validity range"
            )

    def evaluate(self, t):
        out = 0.0
        for c in reversed(self.coeffs):
            out = out * t + c
        return out

    def integral(self, t0: float, t1: float) -> float:
        """Integral of cp from t0 to t1 (J/mol). No range check here."""

        def anti(t: float) -> float:
            acc = 0.0
            for k in range(len(self.coeffs) - 1, -1, -1):
                acc = acc * t + self.coeffs[k] / (k + 1)
            return acc * t

        return anti(t1) - anti(t0)

    def in_range(self, t: float) -> bool:
        return self.t_min <= t <= self.t_max


@dataclass(frozen=True)
class CostaldParams:
    """Saturated-liquid correlation inputs: characteristic volume and
    SRK-style acentric factor."""

    v_star: float  # m^3/mol
    omega_srk: float

    def __post_init__(self) -> None:
        if self.v_star <= 0.0:
            raise FluidDataError("costald: v_star must be > 0")


@dataclass(frozen=True)
class ComponentProps:
    """Pure-component properties in SI units."""

    name: str
    tc: float  # K
    pc: float  # Pa
    omega: float
    mw: float  # g/mol
    zc: float
    cp_ig: CpPolynomial
    parachor: float = 0.0  # parsed but unused (surface tension out of scope)
    vshift: float = 0.0
    costald: CostaldParams | None = None

    def __post_init__(self) -> None:
        checks = (
            (self.tc > 0.0, "tc must be > 0"),
            (self.pc > 0.0, "pc must be > 0"),
            (self.mw > 0.0, "mw must be > 0"),
            (0.0 < self.zc < 1.0, "zc must be in (0, 1)"),
        )
        for ok, msg in checks:
            if not ok:
                raise FluidDataError(f"{self.name}: {msg}")


@dataclass(frozen=True, eq=False)
class FluidSystem:
    """Ordered component basis plus symmetric binary-interaction matrix.

    Immutable after construction; safe to share across threads.
    """

    components: tuple[ComponentProps, ...]
    bip: np.ndarray
    metadata: Mapping[str, str] = field(default_factory=dict)
    source: Mapping | None = None  # raw file payload, for lossless re-save

    def __post_init__(self) -> None:
        if len(self.components) < 1:
            raise FluidDataError("fluid system needs at least one component")
        names = [c.name for c in self.components]
        if len(set(names)) != len(names):
            raise FluidDataError("component names must be unique")
        bip = np.asarray(self.bip, dtype=float)
        n = len(self.components)
        if bip.shape != (n, n):
            raise FluidDataError(f"bip matrix must be {n}x{n}")
        if not np.array_equal(bip, bip.T):
            raise FluidDataError("bip matrix must be symmetric")
        if np.any(np.diagonal(bip) != 0.0):
            raise FluidDataError("bip diagonal must be zero")
        bip = bip.copy()
        bip.flags.writeable = False
        object.__setattr__(self, "bip", bip)
        object.__setattr__(self, "components", tuple(self.components))

    @property
    def n_components(self) -> int:
        return len(self.components)

    @cached_property
    def names(self) -> tuple[str, ...]:
        return tuple(c.name for c in self.components)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(f"unknown component {name!r}") from None

    def _array(self, attr: str) -> np.ndarray:
        arr = np.array([getattr(c, attr) for c in self.components], dtype=float)
        arr.flags.writeable = False
        return arr

    @cached_property
    def tc(self) -> np.ndarray:
        return self._array("tc")

    @cached_property
    def pc(self) -> np.ndarray:
        return self._array("pc")

    @cached_property
    def omega(self) -> np.ndarray:
        return self._array("omega")

    @cached_property
    def mw(self) -> np.ndarray:
        return self._array("mw")


@dataclass(frozen=True, eq=False)
class Composition:
    """Mole-fraction vector over a fluid system's component order."""

    fractions: np.ndarray

    def __post_init__(self) -> None:
        z = np.asarray(self.fractions, dtype=float).copy()
        if z.ndim != 1 or z.size < 1:
            raise ValueError("composition must be a nonempty 1-D vector")
        if np.any(z < 0.0):
            raise ValueError("composition has a negative mole fraction")
        if abs(z.sum() - 1.0) > COMPOSITION_SUM_TOL:
            raise ValueError(
                f"mole fractions sum to {z.sum()!r}, expected 1 within "
                f"{COMPOSITION_SUM_TOL}"
            )
        z.flags.writeable = False
        object.__setattr__(self, "fractions", z)

    def __len__(self) -> int:
        return self.fractions.size

    def __getitem__(self, i: int) -> float:
        return float(self.fractions[i])


def normalize(raw: Sequence[float] | np.ndarray) -> Composition:
    """Scale a nonnegative vector to unit sum.

    Fractions below 1e-15 after scaling are clamped to zero (and the rest
    rescaled) so absent components never enter log terms downstream.
    """
    v = np.asarray(raw, dtype=float)
    if v.ndim != 1 or v.size < 1:
        raise ValueError("input must be a nonempty 1-D vector")
    if np.any(v < 0.0):
        raise ValueError("negative entry in composition input")
    total = v.sum()
    if total <= 0.0:
        raise ValueError("all-zero composition cannot be normalized")
    z = v / total
    small = (z > 0.0) & (z < TRACE_CLAMP)
    if np.any(small):
        z[small] = 0.0
        z /= z.sum()
    return Composition(z)


# ---------------------------------------------------------------------------
# Dataset file handling
# ---------------------------------------------------------------------------

_REQUIRED_COMPONENT_FIELDS = ("name", "tc", "pc", "omega", "mw", "zc", "cp_ig")


def _component_from_record(rec: Mapping, units: str) -> ComponentProps:
    name = rec.get("name", "<unnamed>")
    for key in _REQUIRED_COMPONENT_FIELDS:
        if key not in rec:
            raise FluidDataError(f"{name}: missing required field {key!r}")
    cp = rec["cp_ig"]
    try:
        cp_poly = CpPolynomial(
            coeffs=tuple(float(c) for c in cp["coeffs"]),
            t_min=float(cp["t_min"]),
            t_max=float(cp["t_max"]),
        )
    except (KeyError, TypeError) as exc:
        raise FluidDataError(f"{name}: malformed cp_ig block ({exc})") from exc

    tc = float(rec["tc"])
    pc = float(rec["pc"])
    if units == "field":
        tc = rankine_to_kelvin(tc)
        pc = psia_to_pascal(pc)

    costald = None
    if rec.get("costald") is not None:
        cb = rec["costald"]
        try:
            costald = CostaldParams(
                v_star=float(cb["v_star_m3_per_mol"]),
                omega_srk=float(cb["omega_srk"]),
            )
        except (KeyError, TypeError) as exc:
            raise FluidDataError(f"{name}: malformed costald block ({exc})") from exc

    try:
        return ComponentProps(
            name=str(rec["name"]),
            tc=tc,
            pc=pc,
            omega=float(rec["omega"]),
            mw=float(rec["mw"]),
            zc=float(rec["zc"]),
            cp_ig=cp_poly,
            parachor=float(rec.get("parachor", 0.0)),
            vshift=float(rec.get("vshift", 0.0)),
            costald=costald,
        )
    except FluidDataError:
        raise
    except (TypeError, ValueError) as exc:
        raise FluidDataError(f"{name}: {exc}") from exc


def _bip_matrix(raw, n: int) -> np.ndarray:
    """Build the symmetric BIP matrix from either an upper-triangular row
    list (row i holds k_ij for j > i) or a full square matrix."""
    if len(raw) == n and all(len(row) == n for row in raw):
        m = np.asarray(raw, dtype=float)
        if not np.array_equal(m, m.T):
            raise FluidDataError("bip: square matrix has conflicting entries")
        if np.any(np.diagonal(m) != 0.0):
            raise FluidDataError("bip: diagonal entries must be zero")
        return m
    if len(raw) != n - 1:
        raise FluidDataError(
            f"bip: expected {n - 1} upper-triangular rows or a {n}x{n} matrix, "
            f"got {len(raw)} rows"
        )
    m = np.zeros((n, n))
    for i, row in enumerate(raw):
        if len(row) != n - 1 - i:
            raise FluidDataError(
                f"bip: row {i} must have {n - 1 - i} entries, got {len(row)}"
            )
        for off, val in enumerate(row):
            j = i + 1 + off
            m[i, j] = m[j, i] = float(val)
    return m


def load_fluid_system(path: str | Path) -> FluidSystem:
    """Load and validate a fluid dataset file, converting to internal SI."""
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise FluidDataError(f"{path}: not valid JSON ({exc})") from exc

    units = doc.get("units")
    if units not in ("field", "si"):
        raise FluidDataError(f"{path}: units must be 'field' or 'si', got {units!r}")
    records = doc.get("components")
    if not records:
        raise FluidDataError(f"{path}: no components")

    components = tuple(_component_from_record(rec, units) for rec in records)
    bip = _bip_matrix(doc.get("bip", []), len(components)) if len(components) > 1 \
        else _bip_matrix(doc.get("bip", [[0.0]]), 1)
    metadata = dict(doc.get("metadata", {}))
    return FluidSystem(components=components, bip=bip, metadata=metadata, source=doc)


def save_fluid_system(fluid: FluidSystem, path: str | Path) -> None:
    """Serialize a fluid system.

    A system loaded from file re-serializes its retained payload verbatim,
    so every table value round-trips bit-exactly in the declared units.
    Programmatically built systems are written in SI units.
    """
    path = Path(path)
    if fluid.source is not None:
        doc = fluid.source
    else:
        doc = {
            "units": "si",
            "metadata": dict(fluid.metadata),
            "components": [
                {
                    "name": c.name,
                    "tc": c.tc,
                    "pc": c.pc,
                    "omega": c.omega,
                    "mw": c.mw,
                    "zc": c.zc,
                    "parachor": c.parachor,
                    "cp_ig": {
                        "coeffs": list(c.cp_ig.coeffs),
                        "t_min": c.cp_ig.t_min,
                        "t_max": c.cp_ig.t_max,
                    },
                    "vshift": c.vshift,
                    "costald": None
                    if c.costald is None
                    else {
                        "v_star_m3_per_mol": c.costald.v_star,
                        "omega_srk": c.costald.omega_srk,
                    },
                }
                for c in fluid.components
            ],
            "bip": [
                [fluid.bip[i, j] for j in range(i + 1, fluid.n_components)]
                for i in range(fluid.n_components - 1)
            ],
        }
    path.write_text(json.dumps(doc, indent=2) + "\n")


def bundled_fluid_path() -> Path:
    """Path of the packaged six-component dataset."""
    return Path(__file__).parent / "data" / "spe5_fluid.json"
