"""Phase-split solvers: Wilson initialization, Rachford-Rice, PT flash by
successive substitution, and the isenthalpic (PH) flash built on top.

Phase-split detection uses the negative-flash window: Rachford-Rice is
solved on the asymptote-bounded interval and the converged vapor fraction
classifies the feed (beta <= 0 single liquid, beta >= 1 single vapor).
No tangent-plane stability analysis is performed; the operating envelope
covered by the test suite is where this shortcut is adequate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .eos import PhaseLabel, ThermalState, cp_validity_window
from .fluids import Composition, FluidSystem
from .solvers import BracketError, brent

K_RESIDUAL_TOL = 1e-10
MAX_FLASH_ITERATIONS = 1000
TRIVIAL_K_TOL = 1e-6
RR_TOL = 1e-13
PH_ENTHALPY_TOL = 0.01  # J/mol
PH_BRACKET_HALF_WIDTH = 60.0  # K

# Near a phase boundary the phantom-phase composition limits how far the
# K residual can fall; accept a stagnated iteration once it is safely
# below the fugacity-equality requirement of 1e-8.
STAGNATION_WINDOW = 20
STAGNATION_RESIDUAL = 1e-8

# A converged vapor fraction this close to 0 or 1 is a single-phase feed:
# the trace phase holds fewer moles than float64 cancellation noise can
# represent in its composition.
BETA_SNAP = 1e-6


class FlashError(RuntimeError):
    """Flash failed to converge; carries the last K-value residual."""

    def __init__(self, message: str, residual: float = math.nan):
        super().__init__(message)
        self.residual = residual


class UnreachableEnthalpyError(FlashError):
    """Target enthalpy outside the achievable range of the T bracket."""


class SinglePhaseError(ValueError):
    """All K-values on one side of 1: no two-phase solution exists."""


class TrivialSolutionError(ValueError):
    """All K-values equal to 1: the phase split is degenerate."""


class FlashState(Enum):
    SINGLE_PHASE_LIQUID = "single-phase-liquid"
    SINGLE_PHASE_VAPOR = "single-phase-vapor"
    TWO_PHASE = "two-phase"


@dataclass(frozen=True, eq=False)
class PhaseEquilibrium:
    """Result of a flash at fixed (T, P)."""

    state: FlashState
    beta: float
    x: Composition
    y: Composition
    zl: float
    zv: float
    iterations: int
    residual: float

    def __post_init__(self) -> None:
        if self.state is FlashState.TWO_PHASE and not 0.0 < self.beta < 1.0:
            raise ValueError(f"two-phase result with beta = {self.beta}")


def wilson_k(fluid: FluidSystem, t: float, p: float) -> np.ndarray:
    """Wilson correlation K_i = (Pc_i/P) exp[5.373 (1+w_i)(1 - Tc_i/T)]."""
    if t <= 0.0 or p <= 0.0:
        raise ValueError("temperature and pressure must be > 0")
    return (fluid.pc / p) * np.exp(
        5.373 * (1.0 + fluid.omega) * (1.0 - fluid.tc / t)
    )


def _rr_solve(
    zp: list[float], km1p: list[float], beta0: float | None = None
) -> float:
    """Rachford-Rice root on the extended (negative-flash) window.

    ``zp``/``km1p`` hold the present components only; K-values equal to 1
    must be filtered out by the caller. Safeguarded Newton with bisection
    fallback; the objective is strictly decreasing between the poles so
    the root is unique. Plain Python on purpose: the component count is
    tiny and this sits in the innermost flash loop.
    """
    km1_max = max(km1p)
    km1_min = min(km1p)
    lo = -1.0 / km1_max  # pole from the most volatile component (negative)
    hi = -1.0 / km1_min  # pole from the heaviest component (above one)
    span = hi - lo

    def g(beta: float) -> float:
        acc = 0.0
        for zi, ki in zip(zp, km1p):
            acc += zi * ki / (1.0 + beta * ki)
        return acc

    a = lo + 1e-12 * span
    b = hi - 1e-12 * span
    # move toward the poles until the analytic signs (+, -) materialize
    guard = 0
    while g(a) <= 0.0 and guard < 60:
        a = lo + 0.5 * (a - lo)
        guard += 1
    guard = 0
    while g(b) >= 0.0 and guard < 60:
        b = hi - 0.5 * (hi - b)
        guard += 1
    if g(a) <= 0.0 or g(b) >= 0.0:
        raise FlashError("rachford-rice bracket could not be established")

    if beta0 is not None and a < beta0 < b:
        beta = beta0
    elif a < 0.5 < b:
        beta = 0.5
    else:
        beta = 0.5 * (a + b)
    for _ in range(200):
        gv = 0.0
        dg = 0.0
        for zi, ki in zip(zp, km1p):
            term = ki / (1.0 + beta * ki)
            w = zi * term
            gv += w
            dg -= w * term
        if abs(gv) < RR_TOL:
            return beta
        if gv > 0.0:
            a = beta
        else:
            b = beta
        nxt = beta - gv / dg if dg != 0.0 else 0.5 * (a + b)
        if not a < nxt < b:
            nxt = 0.5 * (a + b)
        if nxt == beta:
            return beta
        beta = nxt
    raise FlashError(f"rachford-rice did not reach |g| < {RR_TOL}")


def rachford_rice(z: Composition | np.ndarray, k: np.ndarray) -> float:
    """Vapor fraction solving sum z_i (K_i - 1)/(1 + beta (K_i - 1)) = 0.

    The root may lie outside [0, 1] (negative-flash window); callers use
    that to classify single-phase feeds. Raises SinglePhaseError when all
    K-values sit on one side of 1 and TrivialSolutionError when K = 1.
    """
    zf = z.fractions if isinstance(z, Composition) else np.asarray(z, dtype=float)
    k = np.asarray(k, dtype=float)
    act = zf > 0.0
    if not np.any(act):
        raise ValueError("empty composition")
    kp = k[act]
    if np.all(kp == 1.0):
        raise TrivialSolutionError("all K-values equal 1")
    if np.all(kp >= 1.0):
        raise SinglePhaseError("all K-values >= 1 (vapor-like feed)")
    if np.all(kp <= 1.0):
        raise SinglePhaseError("all K-values <= 1 (liquid-like feed)")
    sel = act & (k != 1.0)
    return _rr_solve(zf[sel].tolist(), (k[sel] - 1.0).tolist())


def _single_phase_result(
    ts: ThermalState, z: Composition, p: float, state: FlashState, iterations: int
) -> PhaseEquilibrium:
    _, zfac = ts.lnphi(z.fractions, p, None)
    return PhaseEquilibrium(
        state=state,
        beta=1.0 if state is FlashState.SINGLE_PHASE_VAPOR else 0.0,
        x=z,
        y=z,
        zl=zfac,
        zv=zfac,
        iterations=iterations,
        residual=0.0,
    )


def _label_single_phase(ts: ThermalState, z: np.ndarray, p: float) -> FlashState:
    """Classify a single-phase feed by its stable root's molar volume
    relative to the covolume (classic 3b cutoff)."""
    _, zfac = ts.lnphi(z, p, None)
    b_mix = float(z @ ts.b)
    v = zfac * 8.314462618 * ts.t / p
    if v > 3.0 * b_mix:
        return FlashState.SINGLE_PHASE_VAPOR
    return FlashState.SINGLE_PHASE_LIQUID


def pt_flash(
    fluid: FluidSystem,
    z: Composition,
    t: float,
    p: float,
    *,
    k_init: np.ndarray | None = None,
    k_residual_tol: float = K_RESIDUAL_TOL,
    max_iterations: int = MAX_FLASH_ITERATIONS,
) -> PhaseEquilibrium:
    """Isothermal two-phase flash by successive substitution."""
    eq, _ = _pt_flash_impl(
        fluid, z, t, p,
        k_init=k_init, k_residual_tol=k_residual_tol,
        max_iterations=max_iterations,
    )
    return eq


def _pt_flash_impl(
    fluid: FluidSystem,
    z: Composition,
    t: float,
    p: float,
    *,
    k_init: np.ndarray | None,
    k_residual_tol: float,
    max_iterations: int,
    ts: ThermalState | None = None,
) -> tuple[PhaseEquilibrium, np.ndarray | None]:
    if t <= 0.0 or p <= 0.0:
        raise ValueError("temperature and pressure must be > 0")
    if len(z) != fluid.n_components:
        raise ValueError("composition length mismatch")
    if ts is None:
        ts = ThermalState(fluid, t)
    zf = z.fractions
    present = zf > 0.0

    all_present = bool(present.all())
    zf_list = zf.tolist()

    k = wilson_k(fluid, t, p) if k_init is None else np.asarray(k_init, dtype=float)
    k = np.where(present, k, 1.0)
    lnk = np.log(k)
    wilson_lnk = None
    restarted = False
    residual = math.inf
    best_residual = math.inf
    stagnated = 0
    beta: float | None = None
    x = y = None
    zl = zv = math.nan

    for it in range(1, max_iterations + 1):
        kp = k if all_present else k[present]
        if kp.min() >= 1.0:
            return _single_phase_result(
                ts, z, p, FlashState.SINGLE_PHASE_VAPOR, it
            ), None
        if kp.max() <= 1.0:
            return _single_phase_result(
                ts, z, p, FlashState.SINGLE_PHASE_LIQUID, it
            ), None

        km1 = k - 1.0
        km1_list = km1.tolist()
        if all_present and 0.0 not in km1_list:
            beta = _rr_solve(zf_list, km1_list, beta)
        else:
            sel = present & (km1 != 0.0)
            beta = _rr_solve(zf[sel].tolist(), km1[sel].tolist(), beta)
        x = zf / (1.0 + beta * km1)
        y = k * x
        dlnphi, zl, zv = ts.lnphi_pair(x, y, p)
        lnk_new = dlnphi if all_present else np.where(present, dlnphi, 0.0)
        diff = np.abs(lnk_new - lnk)
        residual = float(diff.max() if all_present else diff[present].max())
        lnk = lnk_new
        k = np.exp(lnk)

        if it >= 5:
            kp = k if all_present else k[present]
            if float(np.abs(kp - 1.0).max()) < TRIVIAL_K_TOL:
                if not restarted:
                    # perturb the Wilson estimate and try once more
                    if wilson_lnk is None:
                        wilson_lnk = np.log(
                            np.where(present, wilson_k(fluid, t, p), 1.0)
                        )
                    lnk = 1.5 * wilson_lnk
                    k = np.exp(lnk)
                    restarted = True
                    beta = None
                    continue
                state = _label_single_phase(ts, zf, p)
                return _single_phase_result(ts, z, p, state, it), None

        if residual < k_residual_tol:
            break
        if residual < 0.9 * best_residual:
            best_residual = residual
            stagnated = 0
        else:
            stagnated += 1
            if stagnated >= STAGNATION_WINDOW and residual < STAGNATION_RESIDUAL:
                break
    else:
        raise FlashError(
            f"flash at T={t} K, P={p} Pa did not converge in "
            f"{max_iterations} iterations",
            residual=residual,
        )

    if beta <= BETA_SNAP:
        return _single_phase_result(
            ts, z, p, FlashState.SINGLE_PHASE_LIQUID, it
        ), k
    if beta >= 1.0 - BETA_SNAP:
        return _single_phase_result(
            ts, z, p, FlashState.SINGLE_PHASE_VAPOR, it
        ), k
    eq = PhaseEquilibrium(
        state=FlashState.TWO_PHASE,
        beta=beta,
        x=Composition(x),
        y=Composition(y),
        zl=zl,
        zv=zv,
        iterations=it,
        residual=residual,
    )
    return eq, k


def mixture_enthalpy(
    fluid: FluidSystem, eq: PhaseEquilibrium, t: float, p: float
) -> float:
    """Molar enthalpy of a flashed stream: beta-weighted phase enthalpies
    for a two-phase state, stable-root enthalpy otherwise."""
    return _mixture_enthalpy(ThermalState(fluid, t), eq, p)


def _mixture_enthalpy(ts: ThermalState, eq: PhaseEquilibrium, p: float) -> float:
    if eq.state is FlashState.TWO_PHASE:
        h_liq = ts.enthalpy(eq.x.fractions, p, PhaseLabel.LIQUID)
        h_vap = ts.enthalpy(eq.y.fractions, p, PhaseLabel.VAPOR)
        return eq.beta * h_vap + (1.0 - eq.beta) * h_liq
    return ts.enthalpy(eq.x.fractions, p, None)


def ph_flash(
    fluid: FluidSystem,
    z: Composition,
    p: float,
    h_target: float,
    t_guess: float,
    *,
    h_tol: float = PH_ENTHALPY_TOL,
    half_width: float = PH_BRACKET_HALF_WIDTH,
) -> tuple[float, PhaseEquilibrium]:
    """Isenthalpic flash: find T such that the flashed mixture enthalpy at
    (T, P) equals h_target.

    Brent search on [t_guess - 60, t_guess + 60] K (clamped to the cp_ig
    validity window), expanded once by another 60 K per side if the target
    is not bracketed.
    """
    if p <= 0.0:
        raise ValueError("pressure must be > 0")
    lo_valid, hi_valid = cp_validity_window(fluid, z.fractions)
    # (t, lnK) history for warm starts: the converged K surface is smooth
    # in T, so linear extrapolation cuts successive substitution way down
    hist: list[tuple[float, np.ndarray]] = []
    cache: dict[float, tuple[float, PhaseEquilibrium]] = {}

    def k_guess(t: float) -> np.ndarray | None:
        if not hist:
            return None
        if len(hist) == 1:
            return np.exp(hist[-1][1])
        (t1, l1), (t2, l2) = hist[-2], hist[-1]
        if t1 == t2:
            return np.exp(l2)
        w = (t - t1) / (t2 - t1)
        return np.exp(l1 + w * (l2 - l1))

    def objective(t: float) -> float:
        ts = ThermalState(fluid, t)
        eq, k = _pt_flash_impl(
            fluid, z, t, p,
            k_init=k_guess(t), k_residual_tol=K_RESIDUAL_TOL,
            max_iterations=MAX_FLASH_ITERATIONS, ts=ts,
        )
        if k is not None:
            hist.append((t, np.log(k)))
            if len(hist) > 2:
                del hist[0]
        h = _mixture_enthalpy(ts, eq, p)
        cache[t] = (h, eq)
        return h - h_target

    def clamp(t: float) -> float:
        return min(max(t, lo_valid), hi_valid)

    lo_lim = clamp(t_guess - half_width)
    hi_lim = clamp(t_guess + half_width)

    # H is strictly increasing in T (cp > 0), so probe outward from the
    # guess in the direction the sign dictates until the root is straddled
    t0 = clamp(t_guess)
    f0 = objective(t0)
    if abs(f0) < h_tol:
        return t0, cache[t0][1]
    going_up = f0 < 0.0
    limit = hi_lim if going_up else lo_lim
    t_prev, f_prev = t0, f0
    step = 1.0
    bracket = None
    for _ in range(64):
        if (going_up and t_prev >= limit) or (not going_up and t_prev <= limit):
            break
        t_new = clamp(min(t_prev + step, limit) if going_up
                      else max(t_prev - step, limit))
        f_new = objective(t_new)
        if abs(f_new) < h_tol:
            return t_new, cache[t_new][1]
        if (f_new > 0.0) != (f_prev > 0.0):
            bracket = (t_prev, t_new, f_prev, f_new)
            break
        t_prev, f_prev = t_new, f_new
        step *= 2.0

    if bracket is None:
        # expand the window once by another half_width, then give up
        limit2 = clamp(limit + half_width) if going_up else clamp(limit - half_width)
        while bracket is None and (
            (going_up and t_prev < limit2) or (not going_up and t_prev > limit2)
        ):
            t_new = clamp(min(t_prev + step, limit2) if going_up
                          else max(t_prev - step, limit2))
            f_new = objective(t_new)
            if abs(f_new) < h_tol:
                return t_new, cache[t_new][1]
            if (f_new > 0.0) != (f_prev > 0.0):
                bracket = (t_prev, t_new, f_prev, f_new)
                break
            t_prev, f_prev = t_new, f_new
            step *= 2.0
        if bracket is None:
            far = objective(clamp(lo_lim - half_width)) if going_up \
                else objective(clamp(hi_lim + half_width))
            h_ends = sorted((f_prev + h_target, far + h_target))
            raise UnreachableEnthalpyError(
                f"enthalpy {h_target:.6g} J/mol not reachable at "
                f"P={p:.6g} Pa (achievable range about "
                f"[{h_ends[0]:.6g}, {h_ends[1]:.6g}] J/mol)"
            )

    a, b, fa, fb = bracket
    try:
        res = brent(objective, a, b, fa, fb, f_tol=h_tol, x_tol=1e-5)
    except BracketError as exc:  # pragma: no cover - guarded above
        raise UnreachableEnthalpyError(str(exc)) from exc
    t_sol = res.root
    _, eq = cache[t_sol]
    return t_sol, eq
