"""Peng-Robinson equation of state.

Mixture parameters, compressibility roots, fugacity coefficients, molar
enthalpy (ideal-gas part plus departure), and liquid molar volumes. All
functions are pure and reentrant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np

from .fluids import Composition, FluidSystem

R_GAS = 8.314462618  # J/(mol K)
OMEGA_A = 0.45724
OMEGA_B = 0.07780
T_REF = 298.15  # enthalpy reference: H_ig(T_REF) = 0 for every component

_SQRT2 = math.sqrt(2.0)
_D1 = 1.0 + _SQRT2
_D2 = 1.0 - _SQRT2

# COSTALD saturated-liquid correlation constants
_COSTALD_SPH = (-1.52816, 1.43907, -0.81446, 0.190454)
_COSTALD_DEV = (-0.296123, 0.386914, -0.0427258, -0.0480645)


class EosError(RuntimeError):
    """Equation-of-state evaluation failure (non-physical inputs)."""


class EnthalpyRangeError(EosError):
    """Temperature outside the declared cp_ig validity range."""


class PhaseLabel(Enum):
    LIQUID = "liquid"
    VAPOR = "vapor"


@dataclass(frozen=True, eq=False)
class MixtureParams:
    """Dimensionless PR parameters for one (fluid, composition, T, P) state."""

    A: float
    B: float
    a_alpha_mix: float  # Pa m^6 / mol^2
    b_mix: float  # m^3 / mol
    d_a_alpha_dT: float  # d(a_alpha_mix)/dT
    a_c: np.ndarray  # per-component attraction constants
    alpha: np.ndarray  # per-component alpha(T)
    b: np.ndarray  # per-component covolumes
    T: float
    P: float


@dataclass(frozen=True, eq=False)
class _PureParams:
    a_c: np.ndarray
    b: np.ndarray
    m: np.ndarray
    tc: np.ndarray
    one_minus_k: np.ndarray


@lru_cache(maxsize=32)
def _pure_params(fluid: FluidSystem) -> _PureParams:
    tc = fluid.tc
    pc = fluid.pc
    omega = fluid.omega
    a_c = OMEGA_A * R_GAS**2 * tc**2 / pc
    b = OMEGA_B * R_GAS * tc / pc
    # 1976 polynomial, with the corrected high-acentricity form above 0.49
    m = np.where(
        omega <= 0.49,
        0.37464 + 1.54226 * omega - 0.26992 * omega**2,
        0.379642 + 1.48503 * omega - 0.164423 * omega**2 + 0.016666 * omega**3,
    )
    for arr in (a_c, b, m):
        arr.flags.writeable = False
    return _PureParams(a_c=a_c, b=b, m=m, tc=tc, one_minus_k=1.0 - fluid.bip)


class ThermalState:
    """Per-(fluid, T) working arrays shared by the flash inner loops.

    Building one of these once per temperature and reusing it across
    compositions is what keeps successive substitution cheap.
    """

    __slots__ = ("fluid", "t", "pure", "s", "ds", "aij", "dij", "b")

    def __init__(self, fluid: FluidSystem, t: float):
        if t <= 0.0:
            raise ValueError("temperature must be > 0")
        pure = _pure_params(fluid)
        sqrt_ac = np.sqrt(pure.a_c)
        sqrt_alpha = 1.0 + pure.m * (1.0 - np.sqrt(t / pure.tc))
        s = sqrt_ac * sqrt_alpha  # sqrt(a_c,i * alpha_i)
        ds = sqrt_ac * (-pure.m / (2.0 * np.sqrt(t * pure.tc)))  # d s_i / dT
        self.fluid = fluid
        self.t = t
        self.pure = pure
        self.s = s
        self.ds = ds
        self.aij = pure.one_minus_k * np.outer(s, s)
        self.dij = pure.one_minus_k * (np.outer(ds, s) + np.outer(s, ds))
        self.b = pure.b

    def mixture(self, z: np.ndarray) -> tuple[float, float, float]:
        """(a_alpha_mix, d(a_alpha_mix)/dT, b_mix) for mole fractions z."""
        psi = self.aij @ z
        return float(z @ psi), float(z @ (self.dij @ z)), float(z @ self.b)

    def dimensionless(self, z: np.ndarray, p: float) -> tuple[float, float]:
        a_alpha, _, b_mix = self.mixture(z)
        rt = R_GAS * self.t
        return a_alpha * p / (rt * rt), b_mix * p / rt

    def lnphi(self, z: np.ndarray, p: float, phase: PhaseLabel | None):
        """(ln phi vector, Z) for composition z at pressure p.

        ``phase=None`` selects the minimum-Gibbs root.
        """
        psi = self.aij @ z
        a_alpha = float(z @ psi)
        b_mix = float(z @ self.b)
        rt = R_GAS * self.t
        A = a_alpha * p / (rt * rt)
        B = b_mix * p / rt
        roots = _z_roots(A, B)
        if phase is None:
            zfac = _min_gibbs_root(self, z, p, A, B, roots, psi, a_alpha, b_mix)
        else:
            zfac = roots[0] if phase is PhaseLabel.LIQUID else roots[-1]
        return self._lnphi_at(zfac, A, B, psi, a_alpha, b_mix), zfac

    def _lnphi_coeffs(self, zfac, A, B, a_alpha, b_mix):
        """Scalars (ca, cb, cc) such that ln phi = ca*b + cb*psi + cc.

        Algebraic regrouping of the standard PR partial-fugacity
        expression; shared by the single and paired evaluators.
        """
        log_term = math.log((zfac + _D1 * B) / (zfac + _D2 * B))
        s = A / (2.0 * _SQRT2 * B) * log_term
        ca = (zfac - 1.0 + s) / b_mix
        cb = -2.0 * s / a_alpha
        cc = -math.log(zfac - B)
        return ca, cb, cc

    def _lnphi_at(self, zfac, A, B, psi, a_alpha, b_mix):
        ca, cb, cc = self._lnphi_coeffs(zfac, A, B, a_alpha, b_mix)
        return self.b * ca + psi * cb + cc

    def lnphi_pair(self, x: np.ndarray, y: np.ndarray, p: float):
        """(ln phi_l - ln phi_v, Z_liquid, Z_vapor) for a liquid/vapor
        composition pair. The difference is what successive substitution
        needs; computing it directly halves the vector work."""
        psi_l = self.aij @ x
        psi_v = self.aij @ y
        aal = float(x @ psi_l)
        aav = float(y @ psi_v)
        bl = float(x @ self.b)
        bv = float(y @ self.b)
        rt = R_GAS * self.t
        c1 = p / (rt * rt)
        c2 = p / rt
        zl = _z_roots(aal * c1, bl * c2)[0]
        zv = _z_roots(aav * c1, bv * c2)[-1]
        ca_l, cb_l, cc_l = self._lnphi_coeffs(zl, aal * c1, bl * c2, aal, bl)
        ca_v, cb_v, cc_v = self._lnphi_coeffs(zv, aav * c1, bv * c2, aav, bv)
        dlnphi = (
            self.b * (ca_l - ca_v) + psi_l * cb_l - psi_v * cb_v + (cc_l - cc_v)
        )
        return dlnphi, zl, zv

    def enthalpy(self, z: np.ndarray, p: float, phase: PhaseLabel | None) -> float:
        """Molar enthalpy, J/mol, reference H_ig(T_REF) = 0."""
        psi = self.aij @ z
        a_alpha = float(z @ psi)
        d_a_dt = float(z @ (self.dij @ z))
        b_mix = float(z @ self.b)
        rt = R_GAS * self.t
        A = a_alpha * p / (rt * rt)
        B = b_mix * p / rt
        roots = _z_roots(A, B)
        if phase is None:
            zfac = _min_gibbs_root(self, z, p, A, B, roots, psi, a_alpha, b_mix)
        else:
            zfac = roots[0] if phase is PhaseLabel.LIQUID else roots[-1]
        h_dep = rt * (zfac - 1.0) + (self.t * d_a_dt - a_alpha) / (
            2.0 * _SQRT2 * b_mix
        ) * math.log((zfac + _D1 * B) / (zfac + _D2 * B))
        return _ideal_enthalpy(self.fluid, z, self.t) + h_dep


def _ideal_enthalpy(fluid: FluidSystem, z: np.ndarray, t: float) -> float:
    h = 0.0
    for zi, comp in zip(z, fluid.components):
        if zi <= 0.0:
            continue
        if not comp.cp_ig.in_range(t):
            raise EnthalpyRangeError(
                f"{comp.name}: T = {t:.2f} K outside cp_ig validity "
                f"[{comp.cp_ig.t_min}, {comp.cp_ig.t_max}] K"
            )
        h += zi * comp.cp_ig.integral(T_REF, t)
    return h


def cp_validity_window(fluid: FluidSystem, z: np.ndarray) -> tuple[float, float]:
    """Intersection of cp_ig validity ranges over present components."""
    lo, hi = 0.0, math.inf
    for zi, comp in zip(z, fluid.components):
        if zi > 0.0:
            lo = max(lo, comp.cp_ig.t_min)
            hi = min(hi, comp.cp_ig.t_max)
    return lo, hi


def _z_roots(A: float, B: float) -> list[float]:
    """Real roots with Z > B of the PR cubic, ascending."""
    c2 = -(1.0 - B)
    c1 = A - 3.0 * B * B - 2.0 * B
    c0 = -(A * B - B * B - B**3)
    roots = _real_cubic_roots(c2, c1, c0)
    out = sorted(r for r in roots if r > B)
    if not out:
        raise EosError(f"no compressibility root above covolume (A={A}, B={B})")
    return out


def _real_cubic_roots(c2: float, c1: float, c0: float) -> list[float]:
    """Real roots of x^3 + c2 x^2 + c1 x + c0, each polished by Newton."""
    p = c1 - c2 * c2 / 3.0
    q = 2.0 * c2**3 / 27.0 - c2 * c1 / 3.0 + c0
    disc = 0.25 * q * q + p**3 / 27.0
    shift = c2 / 3.0
    if disc > 0.0:
        sq = math.sqrt(disc)
        u = math.copysign(abs(-0.5 * q + sq) ** (1.0 / 3.0), -0.5 * q + sq)
        v = math.copysign(abs(-0.5 * q - sq) ** (1.0 / 3.0), -0.5 * q - sq)
        xs = [u + v - shift]
    elif p == 0.0 and q == 0.0:
        xs = [-shift]
    else:
        # three real roots (trigonometric form)
        rho = math.sqrt(-p**3 / 27.0)
        theta = math.acos(max(-1.0, min(1.0, -0.5 * q / rho)))
        mag = 2.0 * math.sqrt(-p / 3.0)
        xs = [
            mag * math.cos((theta + 2.0 * math.pi * k) / 3.0) - shift
            for k in range(3)
        ]
    polished = []
    for x in xs:
        for _ in range(2):
            f = ((x + c2) * x + c1) * x + c0
            df = (3.0 * x + 2.0 * c2) * x + c1
            if df != 0.0:
                x -= f / df
        polished.append(x)
    return polished


def _min_gibbs_root(ts, z, p, A, B, roots, psi, a_alpha, b_mix) -> float:
    if len(roots) == 1:
        return roots[0]
    best, best_g = None, math.inf
    for zfac in (roots[0], roots[-1]):
        g = float(z @ ts._lnphi_at(zfac, A, B, psi, a_alpha, b_mix))
        if g < best_g:
            best, best_g = zfac, g
    return best


# ---------------------------------------------------------------------------
# Public operations
# ---------------------------------------------------------------------------


def mixture_params(
    fluid: FluidSystem, comp: Composition, t: float, p: float
) -> MixtureParams:
    """Van der Waals one-fluid mixture parameters with the dataset BIPs."""
    if t <= 0.0 or p <= 0.0:
        raise ValueError("temperature and pressure must be > 0")
    _check_len(fluid, comp)
    ts = ThermalState(fluid, t)
    z = comp.fractions
    a_alpha, d_a_dt, b_mix = ts.mixture(z)
    rt = R_GAS * t
    return MixtureParams(
        A=a_alpha * p / (rt * rt),
        B=b_mix * p / rt,
        a_alpha_mix=a_alpha,
        b_mix=b_mix,
        d_a_alpha_dT=d_a_dt,
        a_c=ts.pure.a_c,
        alpha=(ts.s / np.sqrt(ts.pure.a_c)) ** 2,
        b=ts.pure.b,
        T=t,
        P=p,
    )


def compressibility_roots(mp: MixtureParams) -> list[float]:
    """All real roots with Z > B of the PR cubic, ascending (1 to 3)."""
    return _z_roots(mp.A, mp.B)


def select_root(roots, phase: PhaseLabel) -> float:
    """Smallest root for liquid, largest for vapor."""
    roots = sorted(roots)
    if not roots:
        raise ValueError("empty root set")
    return roots[0] if phase is PhaseLabel.LIQUID else roots[-1]


def fugacity_coeffs(
    fluid: FluidSystem,
    comp: Composition,
    t: float,
    p: float,
    phase: PhaseLabel | None,
) -> np.ndarray:
    """ln phi_i for every component; ``phase=None`` uses the stable root."""
    if t <= 0.0 or p <= 0.0:
        raise ValueError("temperature and pressure must be > 0")
    _check_len(fluid, comp)
    lnphi, _ = ThermalState(fluid, t).lnphi(comp.fractions, p, phase)
    return lnphi


def molar_enthalpy(
    fluid: FluidSystem,
    comp: Composition,
    t: float,
    p: float,
    phase: PhaseLabel | None = None,
) -> float:
    """Molar enthalpy in J/mol: ideal-gas part plus PR departure.

    Raises EnthalpyRangeError when T is outside the cp_ig validity range
    of any present component (extrapolation is never performed).
    """
    if t <= 0.0 or p <= 0.0:
        raise ValueError("temperature and pressure must be > 0")
    _check_len(fluid, comp)
    return ThermalState(fluid, t).enthalpy(comp.fractions, p, phase)


@dataclass(frozen=True)
class LiquidVolume:
    """Liquid molar volume with the method that produced it."""

    value: float  # m^3/mol
    method: str  # "pr-shift" or "costald"


def liquid_molar_volume(
    fluid: FluidSystem,
    comp: Composition,
    t: float,
    p: float,
    method: str = "pr-shift",
) -> LiquidVolume:
    """Liquid molar volume at (T, P).

    Default mode is the PR liquid root with the Peneloux-style shift
    sum(z_i * vshift_i * b_i); "costald" applies the saturated-liquid
    correlation when characteristic volumes are present in the dataset.
    """
    _check_len(fluid, comp)
    if method == "costald":
        return LiquidVolume(costald_volume(fluid, comp, t), "costald")
    if method != "pr-shift":
        raise ValueError(f"unknown liquid volume method {method!r}")
    mp = mixture_params(fluid, comp, t, p)
    roots = compressibility_roots(mp)
    z_liq = roots[0]
    v = z_liq * R_GAS * t / p
    # covolume-ratio cutoff: a root this far above b_mix is vapor-like
    if v > 3.0 * mp.b_mix and len(roots) == 1:
        raise EosError(f"no liquid-like root at T={t} K, P={p} Pa")
    shift = float(comp.fractions @ (_pure_params(fluid).b * _vshift(fluid)))
    return LiquidVolume(v - shift, "pr-shift")


@lru_cache(maxsize=32)
def _vshift(fluid: FluidSystem) -> np.ndarray:
    arr = np.array([c.vshift for c in fluid.components])
    arr.flags.writeable = False
    return arr


def costald_volume(fluid: FluidSystem, comp: Composition, t: float) -> float:
    """COSTALD saturated-liquid molar volume (m^3/mol) with the
    Hankinson-Thomson mixing rules."""
    z = comp.fractions
    v_star = np.empty(len(z))
    omega = np.empty(len(z))
    for i, c in enumerate(fluid.components):
        if z[i] > 0.0 and c.costald is None:
            raise EosError(f"{c.name}: no costald parameters in dataset")
        v_star[i] = 0.0 if c.costald is None else c.costald.v_star
        omega[i] = 0.0 if c.costald is None else c.costald.omega_srk
    vm = float(
        0.25
        * (z @ v_star + 3.0 * (z @ v_star ** (2.0 / 3.0)) * (z @ v_star ** (1.0 / 3.0)))
    )
    vt = np.sqrt(v_star * fluid.tc)
    tc_mix = float((z @ vt) ** 2) / vm
    omega_mix = float(z @ omega)
    tr = t / tc_mix
    if not 0.25 < tr < 0.95:
        raise EosError(f"COSTALD reduced temperature {tr:.3f} outside (0.25, 0.95)")
    tau = 1.0 - tr
    a1, a2, a3, a4 = _COSTALD_SPH
    vr0 = 1.0 + a1 * tau ** (1.0 / 3.0) + a2 * tau ** (2.0 / 3.0) + a3 * tau + a4 * tau ** (4.0 / 3.0)
    e1, e2, e3, e4 = _COSTALD_DEV
    vrd = (e1 + e2 * tr + e3 * tr * tr + e4 * tr**3) / (tr - 1.00001)
    return vm * vr0 * (1.0 - omega_mix * vrd)


def _check_len(fluid: FluidSystem, comp: Composition) -> None:
    if len(comp) != fluid.n_components:
        raise ValueError(
            f"composition has {len(comp)} entries for a "
            f"{fluid.n_components}-component system"
        )
