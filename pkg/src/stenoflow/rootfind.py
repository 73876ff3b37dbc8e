"""Scalar root finding used by the boundary closures.

Newton iteration safeguarded by bisection inside a sign-change bracket,
plus a helper that grows such a bracket outward from a previous solution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable


@dataclass
class RootResult:
    root: float
    residual: float
    iterations: int
    converged: bool


def newton(
    f: Callable[[float], float],
    df: Callable[[float], float],
    x0: float,
    *,
    ftol: float,
    lo: float = -math.inf,
    hi: float = math.inf,
    max_iter: int = 40,
) -> RootResult:
    """Plain Newton from x0; gives up on divergence instead of safeguarding."""
    x = x0
    fx = f(x)
    for it in range(1, max_iter + 1):
        if abs(fx) <= ftol:
            return RootResult(x, fx, it - 1, True)
        d = df(x)
        if d == 0.0 or not math.isfinite(d):
            return RootResult(x, fx, it, False)
        x_new = x - fx / d
        if not (lo <= x_new <= hi) or not math.isfinite(x_new):
            return RootResult(x, fx, it, False)
        fx_new = f(x_new)
        if not math.isfinite(fx_new):
            return RootResult(x, fx, it, False)
        x, fx = x_new, fx_new
    return RootResult(x, fx, max_iter, abs(fx) <= ftol)


def bracketed_newton(
    f: Callable[[float], float],
    df: Callable[[float], float],
    lo: float,
    hi: float,
    f_lo: float,
    f_hi: float,
    x0: float,
    *,
    ftol: float,
    xtol: float = 1e-15,
    max_iter: int = 100,
) -> RootResult:
    """Newton confined to a sign-change bracket, bisecting on bad steps."""
    if f_lo == 0.0:
        return RootResult(lo, 0.0, 0, True)
    if f_hi == 0.0:
        return RootResult(hi, 0.0, 0, True)
    if f_lo * f_hi > 0.0:
        raise ValueError("bracket endpoints must straddle a sign change")

    x = min(max(x0, lo), hi)
    fx = f(x)
    a, b = lo, hi
    fa = f_lo
    step_old = abs(b - a)
    for it in range(1, max_iter + 1):
        if abs(fx) <= ftol:
            return RootResult(x, fx, it - 1, True)
        # shrink the bracket around the sign change
        if fa * fx <= 0.0:
            b = x
        else:
            a, fa = x, fx
        d = df(x)
        use_bisection = True
        if d != 0.0 and math.isfinite(d):
            step = fx / d
            x_new = x - step
            # accept Newton only if it stays in the bracket and keeps shrinking
            if a < x_new < b and abs(step) < 0.5 * step_old:
                use_bisection = False
                step_old = abs(step)
        if use_bisection:
            x_new = 0.5 * (a + b)
            step_old = 0.5 * (b - a)
        if abs(x_new - x) <= xtol * (1.0 + abs(x_new)):
            fx = f(x_new)
            return RootResult(x_new, fx, it, abs(fx) <= ftol)
        x = x_new
        fx = f(x)
    return RootResult(x, fx, max_iter, abs(fx) <= ftol)


def nearest_bracket(
    f: Callable[[float], float],
    x0: float,
    *,
    step0: float,
    lo_limit: float,
    hi_limit: float,
    grow: float = 2.0,
    max_expand: int = 80,
):
    """Search outward from x0 for the closest sign-change interval.

    Probes x0 +/- h with h growing geometrically, nearer offsets first.
    Returns (a, b, f(a), f(b)) with a < b and f(a)*f(b) <= 0, or None.
    """
    f0 = f(x0)
    if f0 == 0.0:
        return x0, x0, 0.0, 0.0
    right_x, right_f = x0, f0
    left_x, left_f = x0, f0
    h = step0
    for _ in range(max_expand):
        progressed = False
        xr = min(x0 + h, hi_limit)
        if xr > right_x:
            fr = f(xr)
            if right_f * fr <= 0.0:
                return right_x, xr, right_f, fr
            right_x, right_f = xr, fr
            progressed = True
        xl = max(x0 - h, lo_limit)
        if xl < left_x:
            fl = f(xl)
            if fl * left_f <= 0.0:
                return xl, left_x, fl, left_f
            left_x, left_f = xl, fl
            progressed = True
        if not progressed:
            return None
        h *= grow
    return None
