"""Bracketed scalar root finding shared by the flash and estimator loops."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable


class BracketError(ValueError):
    """The supplied interval does not bracket a sign change."""


@dataclass(frozen=True)
class RootResult:
    root: float
    f_root: float
    iterations: int  # function evaluations, endpoints included


def brent(
    f: Callable[[float], float],
    a: float,
    b: float,
    fa: float | None = None,
    fb: float | None = None,
    *,
    f_tol: float,
    x_tol: float = 0.0,
    max_iter: int = 200,
    polish: int = 0,
) -> RootResult:
    """Safeguarded Brent iteration (inverse quadratic / secant / bisection).

    Terminates when |f| < f_tol and the bracket has shrunk below x_tol
    (x_tol = 0 makes the function-value criterion the only one). The
    endpoints must straddle a sign change.

    ``polish`` allows up to that many extra iterations once the stopping
    criterion is met, returning the best iterate seen; convergence is
    superlinear near the root, so a step or two lands far inside the
    tolerance band at small cost.
    """
    evals = 0
    if fa is None:
        fa = f(a)
        evals += 1
    if fb is None:
        fb = f(b)
        evals += 1
    if fa == 0.0:
        return RootResult(a, fa, evals)
    if fb == 0.0:
        return RootResult(b, fb, evals)
    if (fa > 0.0) == (fb > 0.0):
        raise BracketError(f"no sign change on [{a}, {b}]")

    best: tuple[float, float] | None = None
    polish_left = polish
    c, fc = a, fa
    d = e = b - a
    for _ in range(max_iter):
        if (fb > 0.0) == (fc > 0.0):
            c, fc = a, fa
            d = e = b - a
        if abs(fc) < abs(fb):
            a, b, c = b, c, b
            fa, fb, fc = fb, fc, fb
        tol1 = 2.0 * 2.220446049250313e-16 * abs(b) + 0.5 * x_tol
        xm = 0.5 * (c - b)
        f_ok = abs(fb) < f_tol
        if f_ok and (x_tol <= 0.0 or abs(xm) <= tol1):
            if best is None or abs(fb) < abs(best[1]):
                best = (b, fb)
            if polish_left <= 0:
                return RootResult(*best, evals)
            polish_left -= 1
        elif abs(xm) <= tol1:
            if f_ok:
                return RootResult(b, fb, evals)
            if best is not None:
                return RootResult(*best, evals)
            raise RuntimeError(
                f"brent: bracket exhausted at x={b!r} with |f|={abs(fb)!r} >= "
                f"f_tol={f_tol!r}"
            )
        if abs(e) >= tol1 and abs(fa) > abs(fb):
            s = fb / fa
            if a == c:
                p = 2.0 * xm * s
                q = 1.0 - s
            else:
                q = fa / fc
                r = fb / fc
                p = s * (2.0 * xm * q * (q - r) - (b - a) * (r - 1.0))
                q = (q - 1.0) * (r - 1.0) * (s - 1.0)
            if p > 0.0:
                q = -q
            p = abs(p)
            if 2.0 * p < min(3.0 * xm * q - abs(tol1 * q), abs(e * q)):
                e = d
                d = p / q
            else:
                d = xm
                e = d
        else:
            d = xm
            e = d
        a, fa = b, fb
        if abs(d) > tol1:
            b += d
        else:
            b += tol1 if xm > 0.0 else -tol1
        fb = f(b)
        evals += 1
        if fb == 0.0:
            return RootResult(b, fb, evals)
    # out of iterations: return the best point meeting the f criterion
    if best is not None:
        return RootResult(*best, evals)
    if abs(fb) < f_tol:
        return RootResult(b, fb, evals)
    raise RuntimeError(
        f"brent: no convergence in {max_iter} iterations (last f = {fb!r})"
    )


def scan_brackets(
    f: Callable[[float], float], lo: float, hi: float, count: int
) -> tuple[list[float], list[float], list[tuple[int, int]]]:
    """Evaluate f on a uniform grid and report sign-change intervals.

    Returns (grid, values, index pairs of straddling neighbors). An exact
    zero at a grid point is attached to the interval on its left.
    """
    if count < 2:
        raise ValueError("need at least two grid points")
    step = (hi - lo) / (count - 1)
    xs = [lo + i * step for i in range(count)]
    xs[-1] = hi
    fs = [f(x) for x in xs]
    pairs = []
    for i in range(count - 1):
        f0, f1 = fs[i], fs[i + 1]
        if f0 == 0.0:
            if i == 0:
                pairs.append((i, i + 1))
            continue
        if f1 == 0.0 or (f0 > 0.0) != (f1 > 0.0):
            pairs.append((i, i + 1))
    return xs, fs, pairs
