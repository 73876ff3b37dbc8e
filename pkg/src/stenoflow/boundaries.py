"""Inlet and outlet closures.

The inlet prescribes the volumetric flow; the outlet hosts the bottleneck
and is closed in one of three ways: a static pressure-drop relation, a
speed ODE coupled to the interior trace, or a non-reflecting condition.
All closures consume the outgoing characteristic from the interior and
produce the incoming one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from .errors import BoundarySolveError, RegimeError, SingularStateError
from .model import (
    UV_FLOOR,
    char_speeds,
    flow_from_riemann,
    friction_source,
    to_riemann,
)
from .params import OutletModel, StenosisParams, VesselParams
from .rootfind import RootResult, bracketed_newton, nearest_bracket, newton


class PressureDropModel(Enum):
    """Which pressure-drop relation describes the stenosis."""

    ZERO_LENGTH = "zero_length"
    FINITE_LENGTH = "finite_length"


def pressure_drop(
    A,
    V,
    stenosis: StenosisParams,
    vessel: VesselParams,
    model: PressureDropModel = PressureDropModel.ZERO_LENGTH,
):
    """Pressure lost across the stenosis.

    The quadratic area-mismatch loss V^2*(K_s*rho/2)*(A/A_s - 1)^2 is always
    present; the finite-length variant adds the viscous term
    (8*pi*mu*L_s/A_s^2)*A*V and therefore needs L_s > 0.
    """
    if np.any(np.asarray(A) <= 0.0):
        raise ValueError("section area must be positive")
    quad = V**2 * (stenosis.K_s * vessel.rho / 2.0) * (A / stenosis.A_s - 1.0) ** 2
    if model is PressureDropModel.ZERO_LENGTH:
        return quad
    if stenosis.L_s <= 0.0:
        raise ValueError("finite-length pressure drop requires L_s > 0")
    return quad + 8.0 * math.pi * stenosis.mu * stenosis.L_s / stenosis.A_s**2 * A * V


def _d1(stenosis: StenosisParams, vessel: VesselParams) -> float:
    resistance = stenosis.R_T + 8.0 * math.pi * stenosis.mu * stenosis.L_s / stenosis.A_s**2
    return resistance * vessel.rho**2 * vessel.A0**2 / (64.0 * vessel.beta**2)


def _d2(stenosis: StenosisParams, vessel: VesselParams) -> float:
    return vessel.rho**2 * vessel.A0**2 / (4.0**5 * vessel.beta**2 * stenosis.A_s)


def static_residual(u, v, stenosis: StenosisParams, vessel: VesselParams):
    """Static outlet residual G(u, v); G = 0 is the combined closure.

    G(u,v) = rho*(u-v)^2 - 32*beta/sqrt(A0) - d1*(u-v)^4*(u+v)
             - 4*K_s*rho*(u+v)^2*(d2*(u-v)^4 - 1)^2
    and equals 32 times the physical-variable residual.
    """
    d1 = _d1(stenosis, vessel)
    d2 = _d2(stenosis, vessel)
    span = u - v
    total = u + v
    return (
        vessel.rho * span**2
        - 32.0 * vessel.beta / math.sqrt(vessel.A0)
        - d1 * span**4 * total
        - 4.0 * stenosis.K_s * vessel.rho * total**2 * (d2 * span**4 - 1.0) ** 2
    )


def static_residual_dv(u, v, stenosis: StenosisParams, vessel: VesselParams):
    """Derivative of the static residual with respect to v."""
    d1 = _d1(stenosis, vessel)
    d2 = _d2(stenosis, vessel)
    span = u - v
    total = u + v
    mismatch = d2 * span**4 - 1.0
    return (
        -2.0 * vessel.rho * span
        - d1 * (span**4 - 4.0 * span**3 * total)
        - 4.0 * stenosis.K_s * vessel.rho
        * (2.0 * total * mismatch**2 - 8.0 * d2 * total**2 * mismatch * span**3)
    )


def static_residual_scale(u, v, stenosis: StenosisParams, vessel: VesselParams) -> float:
    """Magnitude scale of G, the sum of its terms in absolute value."""
    d1 = _d1(stenosis, vessel)
    d2 = _d2(stenosis, vessel)
    span = u - v
    total = u + v
    return (
        abs(vessel.rho * span**2)
        + 32.0 * vessel.beta / math.sqrt(vessel.A0)
        + abs(d1 * span**4 * total)
        + abs(4.0 * stenosis.K_s * vessel.rho * total**2 * (d2 * span**4 - 1.0) ** 2)
    )


def check_static_closure_defined(stenosis: StenosisParams, vessel: VesselParams) -> None:
    """Reject the configuration whose closure degenerates to 0 = 0."""
    no_stenosis = math.isclose(stenosis.A_s, vessel.A0, rel_tol=1e-12)
    if no_stenosis and stenosis.R_T == 0.0 and stenosis.L_s == 0.0:
        raise ValueError(
            "degenerate outlet closure: A_s = A0 with R_T = 0 and L_s = 0 "
            "determines nothing; add a terminal resistance or a real stenosis"
        )


def _check_subcritical(u: float, v: float, where: str) -> None:
    lam2 = char_speeds(u, v)[1]
    if lam2 >= 0.0:
        raise RegimeError(
            f"{where} produced a non-subcritical state (lambda2 = {lam2:.3e})"
        )


def solve_outlet_static(
    u_D: float,
    stenosis: StenosisParams,
    vessel: VesselParams,
    guess: float,
    *,
    rtol: float = 1e-10,
    floor: float = UV_FLOOR,
) -> tuple[float, int]:
    """Solve G(u_D, v) = 0 for the incoming invariant at the outlet.

    Among multiple roots the one nearest to ``guess`` (the previous step's
    solution) is selected: plain Newton from the guess first, then the
    closest sign-change bracket found by outward expansion.

    Returns (v, iterations). Raises BoundarySolveError when no root is
    found and RegimeError when the converged root is not subcritical.
    """
    if not math.isfinite(u_D) or not math.isfinite(guess):
        raise ValueError("u_D and guess must be finite")
    if guess >= u_D - floor:
        guess = u_D - max(floor, 1e-6 * abs(u_D))
    hi = u_D - floor

    def f(v: float) -> float:
        return static_residual(u_D, v, stenosis, vessel)

    def df(v: float) -> float:
        return static_residual_dv(u_D, v, stenosis, vessel)

    def ftol_at(v: float) -> float:
        return rtol * max(static_residual_scale(u_D, v, stenosis, vessel), 1e-300)

    span_scale = max(u_D - guess, vessel.riemann_coeff * vessel.A0**0.25, 1e-6)
    window = 8.0 * span_scale

    res = newton(f, df, guess, ftol=ftol_at(guess), lo=u_D - window, hi=hi)
    iterations = res.iterations
    if not (res.converged and abs(res.residual) <= ftol_at(res.root)):
        bracket = nearest_bracket(
            f, guess, step0=1e-6 * span_scale, lo_limit=u_D - window, hi_limit=hi
        )
        if bracket is None:
            raise BoundarySolveError(
                "static outlet closure has no root near the previous solution "
                f"(residual at guess {f(guess):.3e})",
                residual=f(guess),
            )
        a, b, fa, fb = bracket
        if a == b:
            res = RootResult(a, 0.0, 0, True)
        else:
            res = bracketed_newton(
                f, df, a, b, fa, fb, 0.5 * (a + b), ftol=ftol_at(0.5 * (a + b))
            )
        iterations += res.iterations
        if not res.converged:
            raise BoundarySolveError(
                f"static outlet solve stagnated (residual {res.residual:.3e})",
                residual=res.residual,
            )
    v = res.root
    if u_D - v < floor:
        raise SingularStateError("static outlet root collapsed the area")
    _check_subcritical(u_D, v, "static outlet closure")
    return v, iterations


def step_outlet_dynamic(
    X: float,
    u_D: float,
    dt: float,
    stenosis: StenosisParams,
    vessel: VesselParams,
    *,
    floor: float = UV_FLOOR,
    max_substeps: int = 1_000_000,
) -> tuple[float, float, int]:
    """Advance the stenosis speed state X by one explicit step of dt.

    The rate is G(u_D, 2X - u_D)/(32*rho*L_s), the invariant form of the
    speed ODE at the stenosis. The step is sub-cycled whenever the local
    stiffness would make a plain Euler update unstable
    (h*|dXdot/dX| kept at or below 0.5).

    Returns (X', v_D, substeps) with v_D = 2*X' - u_D.
    """
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    if stenosis.L_s <= 0.0:
        raise ValueError("dynamic outlet closure requires L_s > 0")
    denom = 32.0 * vessel.rho * stenosis.L_s
    remaining = dt
    x = X
    substeps = 0
    while remaining > 0.0:
        v = 2.0 * x - u_D
        if u_D - v < floor:
            raise RegimeError("dynamic outlet state collapsed the area (u_D <= v_D)")
        rate = static_residual(u_D, v, stenosis, vessel) / denom
        stiffness = abs(2.0 * static_residual_dv(u_D, v, stenosis, vessel) / denom)
        if stiffness * remaining <= 0.5 or stiffness == 0.0:
            h = remaining
        else:
            h = 0.5 / stiffness
        x += h * rate
        remaining -= h
        substeps += 1
        if substeps > max_substeps:
            raise BoundarySolveError(
                "dynamic outlet sub-cycling exceeded the substep budget"
            )
    v_D = 2.0 * x - u_D
    if u_D - v_D < floor:
        raise RegimeError("dynamic outlet step produced u_D <= v_D")
    _check_subcritical(u_D, v_D, "dynamic outlet closure")
    return x, v_D, substeps


def step_outlet_nonreflecting(
    u_D: float,
    v_D: float,
    dt: float,
    vessel: VesselParams,
    *,
    floor: float = UV_FLOOR,
) -> float:
    """Advance the boundary value of v by its source term only.

    v_t(D, t) = f1(u, v): no incoming wave is generated, matching a zero
    spatial derivative of the backward invariant at the right boundary.
    """
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    return v_D + dt * float(friction_source(u_D, v_D, vessel, floor=floor))


def solve_inlet(
    v_0: float,
    Q_in: float,
    vessel: VesselParams,
    guess: float,
    *,
    rtol: float = 1e-10,
    floor: float = UV_FLOOR,
) -> tuple[float, int]:
    """Solve g(u, v_0) = Q_in for the incoming invariant at the inlet.

    g is strictly increasing in u on u > -v_0, so the root is unique;
    Newton from the guess is safeguarded by bisection in a grown bracket.
    Returns (u, iterations).
    """
    if Q_in <= 0.0:
        raise ValueError("inlet flow must be positive")

    def f(u: float) -> float:
        return float(flow_from_riemann(u, v_0, vessel)) - Q_in

    coeff = vessel.rho**2 * vessel.A0**2 / (4.0**5.5 * vessel.beta**2)

    def df(u: float) -> float:
        span = u - v_0
        return coeff * span**3 * (5.0 * u + 3.0 * v_0)

    # evaluation of g loses absolute precision ~eps*|dg/du|*|u| near u = -v_0,
    # so the residual target cannot sit below that noise floor
    span_guess = max(abs(guess - v_0), 2.0 * abs(v_0), floor)
    noise = 8.0 * 2.2e-16 * coeff * span_guess**4 * max(1.0, abs(guess), abs(v_0))
    ftol = max(rtol * Q_in, noise)
    lo = max(-v_0, v_0 + floor) + 1e-14 * max(1.0, abs(v_0))

    res = newton(f, df, max(guess, lo), ftol=ftol, lo=lo, hi=math.inf)
    iterations = res.iterations
    if not res.converged:
        hi = max(guess, lo + max(1.0, abs(v_0)))
        for _ in range(200):
            if f(hi) >= 0.0:
                break
            hi = lo + 2.0 * (hi - lo)
        else:
            raise BoundarySolveError("inlet flow exceeds any admissible state")
        res = bracketed_newton(f, df, lo, hi, f(lo), f(hi), min(max(guess, lo), hi), ftol=ftol)
        iterations += res.iterations
        if not res.converged:
            raise BoundarySolveError(
                f"inlet solve stagnated (residual {res.residual:.3e})",
                residual=res.residual,
            )
    u = res.root
    _check_subcritical(u, v_0, "inlet closure")
    return u, iterations


@dataclass(frozen=True)
class OutletState:
    """Persistent outlet-side state carried between steps.

    v_prev is the last incoming invariant at x = D (root-selection guess
    for the static model, the evolved boundary value for the
    non-reflecting one). X is the stenosis speed V(D, t), present only
    under the dynamic model, where v(D, t) = 2X - u(D, t).
    """

    model: OutletModel
    v_prev: float
    X: float | None = None


def initial_outlet_state(
    model: OutletModel, A_end: float, V_end: float, vessel: VesselParams
) -> OutletState:
    """Outlet state consistent with the initial interior field at x = D."""
    v = float(to_riemann(A_end, V_end, vessel).v)
    X = float(V_end) if model is OutletModel.DYNAMIC else None
    return OutletState(model=model, v_prev=v, X=X)


def advance_outlet(
    state: OutletState,
    u_D: float,
    dt: float,
    stenosis: StenosisParams | None,
    vessel: VesselParams,
    *,
    floor: float = UV_FLOOR,
) -> tuple[OutletState, float, int]:
    """One outlet update; returns (new state, incoming invariant v_D, work)."""
    if state.model is OutletModel.NON_REFLECTING:
        v = step_outlet_nonreflecting(u_D, state.v_prev, dt, vessel, floor=floor)
        return replace(state, v_prev=v), v, 1
    if stenosis is None:
        raise ValueError("stenosis parameters required for this outlet model")
    if state.model is OutletModel.STATIC:
        v, work = solve_outlet_static(u_D, stenosis, vessel, state.v_prev, floor=floor)
        return replace(state, v_prev=v), v, work
    X_new, v, work = step_outlet_dynamic(state.X, u_D, dt, stenosis, vessel, floor=floor)
    return OutletState(model=state.model, v_prev=v, X=X_new), v, work


def outlet_residual(
    state: OutletState,
    u_D: float,
    v_D: float,
    stenosis: StenosisParams | None,
    vessel: VesselParams,
) -> float:
    """Closure residual G at the current outlet state; nan when undefined."""
    if stenosis is None or state.model is OutletModel.NON_REFLECTING:
        return math.nan
    if state.model is OutletModel.DYNAMIC:
        return float(static_residual(u_D, 2.0 * state.X - u_D, stenosis, vessel))
    return float(static_residual(u_D, v_D, stenosis, vessel))
