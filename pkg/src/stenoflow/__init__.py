"""1-D arterial flow with an outlet stenosis.

A finite-volume integrator for the 2x2 area/speed system, the three
outlet closures (static pressure drop, speed ODE, non-reflecting), the
scalar fundamental-diagram reduction and a scenario CLI.
"""

from .boundaries import (
    OutletState,
    PressureDropModel,
    advance_outlet,
    check_static_closure_defined,
    initial_outlet_state,
    pressure_drop,
    solve_inlet,
    solve_outlet_static,
    static_residual,
    static_residual_dv,
    step_outlet_dynamic,
    step_outlet_nonreflecting,
)
from .config import InitialSpec, ScenarioConfig, parse_config, parse_config_file, serialize_config
from .errors import (
    BoundarySolveError,
    ConfigError,
    PositivityError,
    RegimeError,
    SimulationError,
    SingularStateError,
)
from .lwr import (
    ReductionReport,
    godunov_flux,
    lwr_run,
    lwr_step,
    lwr_wave_speed,
    reduction_consistency,
)
from .model import (
    UV_FLOOR,
    FlowState,
    Regime,
    RiemannPair,
    char_speeds,
    classify_regime,
    eigenvalues,
    fd_critical_area,
    fd_flow,
    fd_speed,
    flow_from_riemann,
    friction_source,
    from_riemann,
    pressure,
    pressure_inverse,
    to_riemann,
    wave_speed,
)
from .params import (
    OutletModel,
    StenosisParams,
    VesselParams,
    physiological_stenosis,
    physiological_vessel,
    unit_vessel,
)
from .solver import (
    FlowField,
    Grid,
    RunResult,
    build_initial_field,
    cfl_dt,
    convergence_study,
    from_conserved,
    hll_flux,
    physical_flux,
    restrict_by_two,
    run,
    sensor_readout,
    step,
    to_conserved,
)
from .waveforms import InletWaveform, waveform_eval

__version__ = "0.1.0"
