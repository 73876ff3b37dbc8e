"""Scalar reduction of the flow model.

Forcing V = F(A) collapses the system to the conservation law
A_t + (A*F(A))_x = 0, whose flow function is strictly concave on
[0, A1]. This module holds the exact (Godunov) solver for that scalar
law and the consistency check against the full system.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .config import ScenarioConfig
from .errors import SimulationError
from .model import fd_critical_area, fd_flow, fd_speed
from .params import OutletModel, VesselParams
from .waveforms import InletWaveform

#: argmax of the concave flow function, as a fraction of A1
CRITICAL_FRACTION = (4.0 / 5.0) ** 4


def lwr_wave_speed(A, F0: float, vessel: VesselParams):
    """d(A*F(A))/dA = F0 - (5/4)*riemann_coeff*A**(1/4)."""
    return F0 - 1.25 * vessel.riemann_coeff * np.power(A, 0.25)


def godunov_flux(A_l, A_r, F0: float, vessel: VesselParams):
    """Exact Riemann flux of the concave flow function.

    min of the flow over [A_l, A_r] when A_l <= A_r, max over [A_r, A_l]
    otherwise; the interior maximum sits at A* = (4/5)^4 * A1.
    """
    A1 = fd_critical_area(F0, vessel)
    A_l = np.asarray(A_l, dtype=float)
    A_r = np.asarray(A_r, dtype=float)
    if np.any(A_l < 0.0) or np.any(A_r < 0.0) or np.any(A_l > A1 * (1 + 1e-12)) \
            or np.any(A_r > A1 * (1 + 1e-12)):
        raise ValueError("states outside the fundamental-diagram range [0, A1]")
    a_star = CRITICAL_FRACTION * A1
    q_l = fd_flow(A_l, F0, vessel)
    q_r = fd_flow(A_r, F0, vessel)
    q_star = float(fd_flow(a_star, F0, vessel))
    straddles_max = (A_r <= a_star) & (a_star <= A_l)
    flux_max = np.where(straddles_max, q_star, np.maximum(q_l, q_r))
    out = np.where(A_l <= A_r, np.minimum(q_l, q_r), flux_max)
    return float(out) if out.ndim == 0 else out


def lwr_step(
    A: np.ndarray,
    dt: float,
    dx: float,
    inflow: float,
    F0: float,
    vessel: VesselParams,
) -> np.ndarray:
    """One Godunov update with a prescribed inflow flux and free outflow.

    The inflow must not exceed the capacity of the flow function; the
    outflow copies the last cell into the ghost. The invariant region
    [0, A1] is checked after the update and violations abort loudly.
    """
    A = np.asarray(A, dtype=float)
    A1 = fd_critical_area(F0, vessel)
    if not 0.0 <= inflow <= float(fd_flow(CRITICAL_FRACTION * A1, F0, vessel)) * (1 + 1e-12):
        raise ValueError("inflow flux outside the capacity of the flow function")
    speeds = np.abs(lwr_wave_speed(np.array([A.min(), A.max()]), F0, vessel))
    if dt * float(speeds.max()) > dx * (1.0 + 1e-12):
        raise SimulationError("scalar-model CFL violation: dt*max|dQ/dA| > dx")
    interior = godunov_flux(A[:-1], A[1:], F0, vessel)
    outflow = float(fd_flow(A[-1], F0, vessel))
    flux = np.concatenate(([inflow], interior, [outflow]))
    A_new = A - dt / dx * np.diff(flux)
    tol = 1e-12 * max(A1, 1.0)
    if np.any(A_new < -tol) or np.any(A_new > A1 + tol):
        raise SimulationError("scalar solution left the invariant region [0, A1]")
    return np.clip(A_new, 0.0, A1)


def lwr_run(
    A: np.ndarray,
    t_end: float,
    inflow: float,
    F0: float,
    vessel: VesselParams,
    dx: float,
    cfl: float = 0.45,
) -> np.ndarray:
    """Advance the scalar model to t_end with a global CFL bound."""
    if not 0.0 < cfl <= 1.0:
        raise ValueError("cfl must lie in (0, 1]")
    A = np.asarray(A, dtype=float).copy()
    smax = max(abs(F0), 0.25 * F0)  # |dQ/dA| spans [-F0/4, F0] on [0, A1]
    t = 0.0
    while t < t_end * (1.0 - 1e-12):
        dt = min(cfl * dx / smax, t_end - t)
        A = lwr_step(A, dt, dx, inflow, F0, vessel)
        t += dt
    return A


@dataclass(frozen=True)
class ReductionReport:
    """L1 gap between the full system and the scalar reduction per level."""

    n_cells: tuple[int, ...]
    l1_gaps: tuple[float, ...]


def reduction_consistency(
    scenario: ScenarioConfig, F0: float, levels: int = 3
) -> ReductionReport:
    """Run both models from matched data and report the area gap.

    The scenario supplies the vessel, grid, horizon and the initial area
    profile; the speed is overridden with V = F(A) so both models start
    on the reduction manifold, the inlet flow is pinned to the uniform
    upstream value and the outlet is non-reflecting (the scalar model has
    no bottleneck closure). Friction breaks the reduction, so K_r must be
    zero. For smooth data and short horizons the gap should shrink under
    grid refinement.
    """
    from .solver import FlowField, Grid, build_initial_field, run

    vessel = scenario.vessel
    if vessel.K_r != 0.0:
        raise ValueError("reduction consistency requires K_r = 0")
    if levels < 1:
        raise ValueError("need at least one refinement level")
    A1 = fd_critical_area(F0, vessel)
    a_star = CRITICAL_FRACTION * A1

    ns: list[int] = []
    gaps: list[float] = []
    for level in range(levels):
        n = scenario.n_cells * 2**level
        base = replace(
            scenario,
            n_cells=n,
            outlet_model=OutletModel.NON_REFLECTING,
            stenosis=None,
            snapshot_dt=scenario.t_end if scenario.t_end > 0 else 1.0,
        )
        grid = Grid.for_vessel(vessel, n)
        profile = build_initial_field(base, grid)
        A_init = np.asarray(profile.A, dtype=float)
        if np.any(A_init <= a_star) or np.any(A_init >= A1):
            raise ValueError(
                "initial areas must sit strictly inside (A*, A1): that is the "
                "subcritical branch where the reduction applies"
            )
        V_init = fd_speed(A_init, F0, vessel)
        inflow = float(fd_flow(A_init[0], F0, vessel))
        matched = replace(base, inlet=InletWaveform(kind="constant", base=inflow))
        full = run(matched, initial_field=FlowField(A_init.copy(), np.asarray(V_init)))
        A_full = full.A_hist[-1]
        A_scalar = lwr_run(
            A_init.copy(), scenario.t_end, inflow, F0, vessel, grid.dx,
            cfl=min(scenario.cfl, 0.45),
        )
        ns.append(n)
        gaps.append(float(np.sum(np.abs(A_full - A_scalar)) * grid.dx))
    return ReductionReport(n_cells=tuple(ns), l1_gaps=tuple(gaps))
