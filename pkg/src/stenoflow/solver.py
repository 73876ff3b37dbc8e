"""Conservative finite-volume integrator for the interior system.

First-order scheme on (A, Q = A*V) with an HLL two-wave flux, friction by
operator splitting, characteristic boundary closure from `boundaries`,
CFL timestep control and per-step diagnostics. The driver `run` advances
a whole scenario, recording snapshots and boundary/sensor traces at the
configured cadence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .boundaries import (
    OutletState,
    advance_outlet,
    check_static_closure_defined,
    initial_outlet_state,
    outlet_residual,
    solve_inlet,
)
from .config import ScenarioConfig
from .errors import (
    BoundarySolveError,
    PositivityError,
    RegimeError,
    SimulationError,
)
from .model import eigenvalues, from_riemann, pressure, pressure_inverse, to_riemann
from .params import OutletModel, VesselParams
from .waveforms import waveform_eval

_TIME_EPS = 1e-12


@dataclass(frozen=True)
class Grid:
    """Uniform cell-centered grid with n_cells*dx spanning the segment."""

    n_cells: int
    dx: float

    def __post_init__(self):
        if self.n_cells < 16:
            raise ValueError("need at least 16 cells")
        if self.dx <= 0.0:
            raise ValueError("dx must be positive")

    @classmethod
    def for_vessel(cls, vessel: VesselParams, n_cells: int) -> "Grid":
        return cls(n_cells=n_cells, dx=vessel.D / n_cells)

    @property
    def centers(self) -> np.ndarray:
        return (np.arange(self.n_cells) + 0.5) * self.dx


class FlowField(NamedTuple):
    """Cell-averaged section area and speed over the grid."""

    A: np.ndarray
    V: np.ndarray


def to_conserved(field: FlowField) -> tuple[np.ndarray, np.ndarray]:
    """(A, Q) with Q = A*V; rejects non-positive areas."""
    if np.any(field.A <= 0.0):
        raise ValueError("section area must be positive")
    return np.asarray(field.A, dtype=float), np.asarray(field.A * field.V, dtype=float)


def from_conserved(A: np.ndarray, Q: np.ndarray) -> FlowField:
    """Recover the primitive field, V = Q/A."""
    if np.any(A <= 0.0):
        raise ValueError("section area must be positive")
    return FlowField(np.asarray(A, dtype=float), np.asarray(Q / A, dtype=float))


def physical_flux(A, Q, vessel: VesselParams):
    """Fluxes of the conservative form: (Q, Q^2/A + beta*A^(3/2)/(3*rho*A0))."""
    return Q, Q * Q / A + vessel.beta * np.power(A, 1.5) / (3.0 * vessel.rho * vessel.A0)


def hll_flux(A_l, Q_l, A_r, Q_r, vessel: VesselParams):
    """HLL two-wave interface flux with Davis wave-speed bounds.

    Wave speeds are the min/max of the model eigenvalues over the two
    states; equal states reduce to the physical flux.
    """
    lam1_l, lam2_l = eigenvalues(A_l, Q_l / A_l, vessel)
    lam1_r, lam2_r = eigenvalues(A_r, Q_r / A_r, vessel)
    s_l = np.minimum(lam2_l, lam2_r)
    s_r = np.maximum(lam1_l, lam1_r)
    fm_l, fq_l = physical_flux(A_l, Q_l, vessel)
    fm_r, fq_r = physical_flux(A_r, Q_r, vessel)
    span = s_r - s_l
    fm_mid = (s_r * fm_l - s_l * fm_r + s_l * s_r * (A_r - A_l)) / span
    fq_mid = (s_r * fq_l - s_l * fq_r + s_l * s_r * (Q_r - Q_l)) / span
    fm = np.where(s_l >= 0.0, fm_l, np.where(s_r <= 0.0, fm_r, fm_mid))
    fq = np.where(s_l >= 0.0, fq_l, np.where(s_r <= 0.0, fq_r, fq_mid))
    return fm, fq


def cfl_dt(field: FlowField, vessel: VesselParams, dx: float, cfl: float) -> float:
    """CFL-limited timestep cfl*dx/max(|lam1|, |lam2|)."""
    if not 0.0 < cfl <= 1.0:
        raise ValueError("cfl must lie in (0, 1]")
    lam1, lam2 = eigenvalues(field.A, field.V, vessel)
    smax = float(np.max(np.maximum(np.abs(lam1), np.abs(lam2))))
    if not math.isfinite(smax) or smax <= 0.0:
        raise SimulationError("non-finite or zero wave speeds; state is unusable")
    return cfl * dx / smax


@dataclass(frozen=True)
class StepDiagnostics:
    """Bookkeeping for one accepted step."""

    dt: float
    max_cfl: float
    min_lambda2: float
    supercritical_fraction: float
    mass_residual: float
    inlet_iterations: int
    outlet_iterations: int
    halvings: int
    inflow_flux: float
    outflow_flux: float


def step(
    field: FlowField,
    outlet: OutletState,
    t: float,
    dt: float,
    scenario: ScenarioConfig,
    grid: Grid,
    *,
    max_halvings: int = 10,
) -> tuple[FlowField, OutletState, StepDiagnostics]:
    """Advance one explicit step of at most dt.

    Ghost states come from the characteristic closures: the inlet solves
    g(u, v) = Q_in(t) with v extrapolated from the first cell, the outlet
    applies the active closure with u extrapolated from the last cell.
    The interior update is conservative with the HLL flux; friction is
    added to the momentum by splitting, using the post-transport state.
    A step that loses area positivity or fails a boundary solve is
    rejected and retried with dt halved, at most ``max_halvings`` times.
    """
    vessel = scenario.vessel
    lam1, lam2 = eigenvalues(field.A, field.V, vessel)
    smax = float(np.max(np.maximum(np.abs(lam1), np.abs(lam2))))
    min_lam2 = float(np.min(lam2))
    super_frac = float(np.mean(lam2 >= 0.0))
    if scenario.strict_subcritical and super_frac > 0.0:
        raise RegimeError(
            f"strict_subcritical: {super_frac:.1%} of cells left the subcritical "
            f"region at t = {t:.6g} (min lambda2 = {min_lam2:.3e})"
        )
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    if dt * smax / grid.dx > 1.0 + 1e-9:
        raise ValueError("dt violates the CFL bound for this field")

    Q_in = float(waveform_eval(scenario.inlet, t))
    dt_try = dt
    halvings = 0
    while True:
        try:
            new_field, new_outlet, diag = _attempt_step(
                field, outlet, dt_try, Q_in, scenario, grid, smax, min_lam2,
                super_frac, halvings,
            )
            return new_field, new_outlet, diag
        except (PositivityError, BoundarySolveError):
            if halvings >= max_halvings:
                raise
            halvings += 1
            dt_try *= 0.5


def _attempt_step(field, outlet, dt, Q_in, scenario, grid, smax, min_lam2,
                  super_frac, halvings):
    vessel = scenario.vessel
    floor = scenario.uv_floor
    A, Q = to_conserved(field)

    # outgoing characteristics, first-order extrapolation to the walls
    u_first, v_first = to_riemann(field.A[0], field.V[0], vessel)
    u_last, _ = to_riemann(field.A[-1], field.V[-1], vessel)

    u_in, inlet_iters = solve_inlet(
        float(v_first), Q_in, vessel, guess=float(u_first), floor=floor
    )
    new_outlet, v_out, outlet_iters = advance_outlet(
        outlet, float(u_last), dt, scenario.stenosis, vessel, floor=floor
    )
    ghost_in = from_riemann(u_in, float(v_first), vessel, floor=floor)
    ghost_out = from_riemann(float(u_last), v_out, vessel, floor=floor)

    A_ext = np.concatenate(([ghost_in.A], A, [ghost_out.A]))
    Q_ext = np.concatenate(([ghost_in.A * ghost_in.V], Q, [ghost_out.A * ghost_out.V]))
    fm, fq = hll_flux(A_ext[:-1], Q_ext[:-1], A_ext[1:], Q_ext[1:], vessel)

    lam = dt / grid.dx
    A_new = A - lam * np.diff(fm)
    Q_new = Q - lam * np.diff(fq)
    if np.any(A_new <= 0.0) or not np.all(np.isfinite(A_new)):
        raise PositivityError(f"area positivity lost (dt = {dt:.3e})")

    # friction by Lie splitting on the post-transport state
    if vessel.K_r > 0.0:
        Q_new = Q_new - dt * vessel.K_r * (Q_new / A_new)

    mass_old = float(np.sum(A) * grid.dx)
    mass_new = float(np.sum(A_new) * grid.dx)
    residual = abs(mass_new - mass_old + dt * (float(fm[-1]) - float(fm[0]))) / mass_old

    diag = StepDiagnostics(
        dt=dt,
        max_cfl=dt * smax / grid.dx,
        min_lambda2=min_lam2,
        supercritical_fraction=super_frac,
        mass_residual=residual,
        inlet_iterations=inlet_iters,
        outlet_iterations=outlet_iters,
        halvings=halvings,
        inflow_flux=float(fm[0]),
        outflow_flux=float(fm[-1]),
    )
    return from_conserved(A_new, Q_new), new_outlet, diag


def build_initial_field(scenario: ScenarioConfig, grid: Grid) -> FlowField:
    """Construct the t = 0 field from the scenario's initial spec."""
    vessel = scenario.vessel
    spec = scenario.initial
    A0 = vessel.A0
    V0 = float(waveform_eval(scenario.inlet, 0.0)) / A0
    if spec.kind == "at_rest":
        return FlowField(np.full(grid.n_cells, A0), np.full(grid.n_cells, V0))
    if spec.kind == "gaussian_pulse":
        x = grid.centers
        x0 = spec.center * vessel.D
        sigma = spec.width * vessel.D
        A = A0 * (1.0 + spec.amplitude * np.exp(-0.5 * ((x - x0) / sigma) ** 2))
        # uniform backward invariant: the bump rides only the forward wave
        v_base = float(to_riemann(A0, V0, vessel).v)
        V = v_base + vessel.riemann_coeff * np.power(A, 0.25)
        return FlowField(A, V)
    if spec.kind == "file":
        data = np.genfromtxt(spec.path, delimiter=",", names=True)
        for column in ("x", "A", "V"):
            if column not in (data.dtype.names or ()):
                raise ValueError(f"initial profile file must have a '{column}' column")
        x = grid.centers
        A = np.interp(x, data["x"], data["A"])
        V = np.interp(x, data["x"], data["V"])
        if np.any(A <= 0.0):
            raise ValueError("initial profile contains non-positive areas")
        return FlowField(A, V)
    raise ValueError(f"unknown initial kind '{spec.kind}'")


@dataclass
class SensorTrace:
    """Inlet readout: measured pressure plus the reconstructed state."""

    t: np.ndarray
    Q_in: np.ndarray
    y: np.ndarray
    A0_trace: np.ndarray
    V0_trace: np.ndarray


@dataclass
class BoundaryTrace:
    """Outlet-side characteristic trace (X and G only where defined)."""

    t: np.ndarray
    u_D: np.ndarray
    v_D: np.ndarray
    X: np.ndarray
    G_residual: np.ndarray


@dataclass
class StepTrace:
    """Per-step diagnostics over the whole run."""

    t: np.ndarray
    dt: np.ndarray
    max_cfl: np.ndarray
    min_lambda2: np.ndarray
    supercritical_fraction: np.ndarray
    mass_residual: np.ndarray
    inlet_iterations: np.ndarray
    outlet_iterations: np.ndarray


@dataclass
class RunResult:
    """Everything a run produces, in memory."""

    scenario: ScenarioConfig
    grid: Grid
    snapshot_times: np.ndarray
    A_hist: np.ndarray
    V_hist: np.ndarray
    sensor: SensorTrace
    boundary: BoundaryTrace
    steps: StepTrace
    mass_initial: float
    mass_final: float
    boundary_flux_integral: float
    n_steps: int
    completed: bool

    @property
    def final_field(self) -> FlowField:
        return FlowField(self.A_hist[-1].copy(), self.V_hist[-1].copy())


def restrict_by_two(values: np.ndarray) -> np.ndarray:
    """Average fine-grid cell values pairwise onto the coarser nested grid."""
    if values.size % 2 != 0:
        raise ValueError("fine grid must have an even number of cells")
    return values.reshape(-1, 2).mean(axis=1)


def convergence_study(scenario: ScenarioConfig, levels: int = 4):
    """Self-convergence ladder: run at n, 2n, 4n, ... cells.

    Each level is compared with the next finer one (restricted 2:1) in the
    L1 norm of the final area field. Returns (n_cells, dx, errors, orders)
    with len(errors) = levels - 1 and observed orders between consecutive
    error pairs.
    """
    if levels < 2:
        raise ValueError("need at least two levels")
    from dataclasses import replace

    ns = [scenario.n_cells * 2**k for k in range(levels)]
    finals = []
    dxs = []
    for n in ns:
        result = run(replace(scenario, n_cells=n))
        finals.append(result.A_hist[-1])
        dxs.append(result.grid.dx)
    errors = []
    for k in range(levels - 1):
        diff = finals[k] - restrict_by_two(finals[k + 1])
        errors.append(float(np.sum(np.abs(diff)) * dxs[k]))
    orders = [
        math.log2(errors[k] / errors[k + 1]) if errors[k + 1] > 0 else math.inf
        for k in range(len(errors) - 1)
    ]
    return ns, dxs, errors, orders


def sensor_readout(field: FlowField, Q_in: float, vessel: VesselParams,
                   *, floor: float = 1e-9):
    """Virtual inlet sensor: y = P(A(0,t)) plus the reconstructed state.

    The boundary state is the inlet closure's own solution, so the
    reconstruction A = P^-1(y), V = Q_in/A matches it exactly.
    """
    u_first, v_first = to_riemann(field.A[0], field.V[0], vessel)
    u_in, _ = solve_inlet(float(v_first), Q_in, vessel, guess=float(u_first), floor=floor)
    state = from_riemann(u_in, float(v_first), vessel, floor=floor)
    y = float(pressure(state.A, vessel))
    A_rec = float(pressure_inverse(y, vessel))
    return y, A_rec, Q_in / A_rec


def _snapshot_times(t_end: float, cadence: float) -> np.ndarray:
    if t_end <= 0.0:
        return np.array([0.0])
    count = int(math.floor(t_end / cadence + 1e-9))
    times = [k * cadence for k in range(count + 1)]
    if times[-1] < t_end * (1.0 - 1e-12):
        times.append(t_end)
    else:
        times[-1] = min(times[-1], t_end)
    return np.asarray(times)


def run(
    scenario: ScenarioConfig,
    *,
    max_steps: int | None = None,
    initial_field: FlowField | None = None,
) -> RunResult:
    """Integrate the scenario from t = 0 to t_end.

    Deterministic for a given scenario. Snapshots and boundary/sensor
    traces are recorded exactly at the snapshot cadence (the timestep is
    clipped to land on those instants); per-step diagnostics cover every
    accepted step. ``max_steps`` stops the run early without error;
    ``initial_field`` overrides the configured initial condition.
    """
    vessel = scenario.vessel
    grid = Grid.for_vessel(vessel, scenario.n_cells)
    if scenario.stenosis is not None:
        if scenario.stenosis.A_s > vessel.A0 * (1.0 + 1e-12):
            raise ValueError("stenosis A_s exceeds the vessel A0")
        if scenario.outlet_model is OutletModel.STATIC:
            check_static_closure_defined(scenario.stenosis, vessel)
    field = initial_field if initial_field is not None else build_initial_field(scenario, grid)
    if field.A.shape != (grid.n_cells,) or field.V.shape != (grid.n_cells,):
        raise ValueError("initial field does not match the grid")
    outlet = initial_outlet_state(
        scenario.outlet_model, float(field.A[-1]), float(field.V[-1]), vessel
    )

    snap_times = _snapshot_times(scenario.t_end, scenario.snapshot_dt)
    eps = _TIME_EPS * max(1.0, scenario.t_end)

    snapshots_A: list[np.ndarray] = []
    snapshots_V: list[np.ndarray] = []
    recorded_t: list[float] = []
    sensor_rows: list[tuple] = []
    boundary_rows: list[tuple] = []
    step_rows: list[tuple] = []

    def record(t_now: float) -> None:
        recorded_t.append(t_now)
        snapshots_A.append(field.A.copy())
        snapshots_V.append(field.V.copy())
        Q_now = float(waveform_eval(scenario.inlet, t_now))
        y, A_rec, V_rec = sensor_readout(field, Q_now, vessel, floor=scenario.uv_floor)
        sensor_rows.append((t_now, Q_now, y, A_rec, V_rec))
        u_last = float(to_riemann(field.A[-1], field.V[-1], vessel).u)
        if outlet.model is OutletModel.DYNAMIC:
            v_now = 2.0 * outlet.X - u_last
        else:
            v_now = outlet.v_prev
        X_now = outlet.X if outlet.X is not None else math.nan
        G_now = outlet_residual(outlet, u_last, v_now, scenario.stenosis, vessel)
        boundary_rows.append((t_now, u_last, v_now, X_now, G_now))

    record(0.0)
    mass_initial = float(np.sum(field.A) * grid.dx)
    flux_integral = 0.0
    t = 0.0
    n_steps = 0
    snap_idx = 1
    completed = True

    while t < scenario.t_end - eps:
        if max_steps is not None and n_steps >= max_steps:
            completed = False
            break
        t_next = snap_times[snap_idx] if snap_idx < len(snap_times) else scenario.t_end
        dt = min(cfl_dt(field, vessel, grid.dx, scenario.cfl), t_next - t)
        field, outlet, diag = step(field, outlet, t, dt, scenario, grid)
        t += diag.dt
        n_steps += 1
        flux_integral += diag.dt * (diag.inflow_flux - diag.outflow_flux)
        step_rows.append(
            (t, diag.dt, diag.max_cfl, diag.min_lambda2, diag.supercritical_fraction,
             diag.mass_residual, diag.inlet_iterations, diag.outlet_iterations)
        )
        while snap_idx < len(snap_times) and t >= snap_times[snap_idx] - eps:
            record(t)
            snap_idx += 1

    mass_final = float(np.sum(field.A) * grid.dx)
    step_arr = np.asarray(step_rows, dtype=float) if step_rows else np.empty((0, 8))
    sensor_arr = np.asarray(sensor_rows, dtype=float)
    boundary_arr = np.asarray(boundary_rows, dtype=float)
    return RunResult(
        scenario=scenario,
        grid=grid,
        snapshot_times=np.asarray(recorded_t),
        A_hist=np.asarray(snapshots_A),
        V_hist=np.asarray(snapshots_V),
        sensor=SensorTrace(*(sensor_arr[:, k] for k in range(5))),
        boundary=BoundaryTrace(*(boundary_arr[:, k] for k in range(5))),
        steps=StepTrace(*(step_arr[:, k] for k in range(8))),
        mass_initial=mass_initial,
        mass_final=mass_final,
        boundary_flux_integral=flux_integral,
        n_steps=n_steps,
        completed=completed,
    )
