"""Independent reference implementations used to pin expected values.

Everything here is written from the textbook formulas with its own code
paths (numpy polynomial roots, plain loops, bisection), deliberately not
sharing internals with the package: these are the oracles the package is
checked against.
"""

from __future__ import annotations

import numpy as np

R = 8.314462618
SQRT2 = np.sqrt(2.0)


def pr_m(omega: float) -> float:
    if omega <= 0.49:
        return 0.37464 + 1.54226 * omega - 0.26992 * omega**2
    return (
        0.379642
        + 1.48503 * omega
        - 0.164423 * omega**2
        + 0.016666 * omega**3
    )


def pr_ab(tc, pc, omega, kij, z, t, p):
    """Dimensionless A, B plus the helper arrays for one composition."""
    tc = np.asarray(tc, float)
    pc = np.asarray(pc, float)
    omega = np.asarray(omega, float)
    z = np.asarray(z, float)
    n = len(z)
    ac = 0.45724 * R**2 * tc**2 / pc
    b = 0.07780 * R * tc / pc
    m = np.array([pr_m(w) for w in omega])
    alpha = (1.0 + m * (1.0 - np.sqrt(t / tc))) ** 2
    aal = ac * alpha
    amix = 0.0
    for i in range(n):
        for j in range(n):
            amix += z[i] * z[j] * (1.0 - kij[i][j]) * np.sqrt(aal[i] * aal[j])
    bmix = float(np.dot(z, b))
    A = amix * p / (R * t) ** 2
    B = bmix * p / (R * t)
    return A, B, aal, b, amix, bmix


def cubic_real_roots(A: float, B: float) -> np.ndarray:
    """Real PR compressibility roots above B, via numpy's companion solver."""
    coeffs = [1.0, -(1.0 - B), A - 3.0 * B**2 - 2.0 * B, -(A * B - B**2 - B**3)]
    roots = np.roots(coeffs)
    real = roots[np.abs(roots.imag) < 1e-9].real
    return np.sort(real[real > B])


def lnphi(tc, pc, omega, kij, z, t, p, phase: str) -> np.ndarray:
    """Straight transcription of the PR partial fugacity coefficient."""
    z = np.asarray(z, float)
    n = len(z)
    A, B, aal, b, amix, bmix = pr_ab(tc, pc, omega, kij, z, t, p)
    roots = cubic_real_roots(A, B)
    zf = roots[0] if phase == "liquid" else roots[-1]
    out = np.empty(n)
    for i in range(n):
        s_i = 0.0
        for j in range(n):
            s_i += z[j] * (1.0 - kij[i][j]) * np.sqrt(aal[i] * aal[j])
        out[i] = (
            b[i] / bmix * (zf - 1.0)
            - np.log(zf - B)
            - A
            / (2.0 * SQRT2 * B)
            * (2.0 * s_i / amix - b[i] / bmix)
            * np.log((zf + (1 + SQRT2) * B) / (zf + (1 - SQRT2) * B))
        )
    return out


def rachford_rice_bisect(z, k, tol=1e-14) -> float:
    """Bisection on the Rachford-Rice objective over the pole-bounded
    window, driven to machine-level interval width."""
    z = np.asarray(z, float)
    k = np.asarray(k, float)
    act = (z > 0) & (k != 1.0)
    km1 = k[act] - 1.0
    zp = z[act]

    def g(beta):
        return float(np.sum(zp * km1 / (1.0 + beta * km1)))

    lo = -1.0 / km1.max()
    hi = -1.0 / km1.min()
    a = lo + 1e-10 * (hi - lo)
    b = hi - 1e-10 * (hi - lo)
    ga, gb = g(a), g(b)
    assert ga > 0 > gb, "window endpoints must straddle"
    for _ in range(200):
        mid = 0.5 * (a + b)
        gm = g(mid)
        if gm > 0:
            a = mid
        else:
            b = mid
        if b - a < tol:
            break
    return 0.5 * (a + b)


def ss_flash(tc, pc, omega, kij, z, t, p, max_iter=2000, tol=1e-12):
    """Independent successive-substitution flash driver.

    Wilson start, bisected Rachford-Rice inner solve, K updated from the
    oracle fugacity coefficients. Returns (beta, x, y) or None when the
    iteration signals a single phase.
    """
    z = np.asarray(z, float)
    tc = np.asarray(tc, float)
    pc = np.asarray(pc, float)
    omega = np.asarray(omega, float)
    k = (pc / p) * np.exp(5.373 * (1.0 + omega) * (1.0 - tc / t))
    for _ in range(max_iter):
        act = z > 0
        if np.all(k[act] >= 1.0) or np.all(k[act] <= 1.0):
            return None
        beta = rachford_rice_bisect(z, k)
        x = z / (1.0 + beta * (k - 1.0))
        y = k * x
        lp_l = lnphi(tc, pc, omega, kij, x, t, p, "liquid")
        lp_v = lnphi(tc, pc, omega, kij, y, t, p, "vapor")
        k_new = np.exp(lp_l - lp_v)
        delta = np.abs(np.log(k_new[act]) - np.log(k[act])).max()
        k = np.where(act, k_new, 1.0)
        if delta < tol:
            break
    beta = rachford_rice_bisect(z, k)
    x = z / (1.0 + beta * (k - 1.0))
    y = k * x
    if not 0.0 < beta < 1.0:
        return None
    return beta, x, y


def residual_enthalpy_from_gibbs(lnphi_fn, z, t, p, dt=0.05) -> float:
    """H_dep via the Gibbs-Helmholtz identity H_R = -R T^2 d(G_R/RT)/dT,
    with G_R/RT = sum z_i ln phi_i evaluated by central difference."""
    z = np.asarray(z, float)
    g_hi = float(np.dot(z, lnphi_fn(t + dt)))
    g_lo = float(np.dot(z, lnphi_fn(t - dt)))
    return -R * t**2 * (g_hi - g_lo) / (2.0 * dt)


def arrays_of(fluid):
    """(tc, pc, omega, kij) pulled out of a FluidSystem for the oracles."""
    return fluid.tc, fluid.pc, fluid.omega, np.asarray(fluid.bip)
