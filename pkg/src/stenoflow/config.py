"""Scenario configuration: dataclasses, the line-oriented text format,
its parser (reporting every violation, with line numbers) and the
serializer that round-trips a config back to text.

Format::

    # comment
    vessel:
      beta = 1.0
      A0 = 1.0
      ...

    stenosis:
      model = static
      ...

Sections are vessel, stenosis, grid, time, inlet, initial and flags;
unknown sections or keys are errors.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError
from .params import OutletModel, StenosisParams, VesselParams
from .waveforms import InletWaveform, validate_waveform

SECTIONS = ("vessel", "stenosis", "grid", "time", "inlet", "initial", "flags")

INITIAL_KINDS = ("at_rest", "gaussian_pulse", "file")


@dataclass(frozen=True)
class InitialSpec:
    """Initial condition selector.

    at_rest        : A = A0 everywhere, V = Q_in(0)/A0
    gaussian_pulse : area bump of relative ``amplitude`` centered at
                     ``center``*D with std ``width``*D, carried on a
                     uniform backward invariant (a clean forward wave)
    file           : CSV with columns x, A, V interpolated onto the grid
    """

    kind: str = "at_rest"
    amplitude: float = 0.05
    center: float = 0.5
    width: float = 0.05
    path: str | None = None

    def violations(self) -> list[str]:
        problems = []
        if self.kind not in INITIAL_KINDS:
            problems.append(f"unknown initial kind '{self.kind}' (choose from {INITIAL_KINDS})")
            return problems
        if self.kind == "gaussian_pulse":
            if self.amplitude <= -1.0:
                problems.append("pulse amplitude must exceed -1 (area stays positive)")
            if not 0.0 < self.center < 1.0:
                problems.append("pulse center must be a fraction of D in (0, 1)")
            if self.width <= 0.0:
                problems.append("pulse width must be positive")
        if self.kind == "file" and not self.path:
            problems.append("initial kind 'file' requires a path")
        return problems


@dataclass(frozen=True)
class ScenarioConfig:
    """Everything one simulation needs, validated on construction."""

    vessel: VesselParams
    n_cells: int
    t_end: float
    inlet: InletWaveform
    outlet_model: OutletModel = OutletModel.NON_REFLECTING
    stenosis: StenosisParams | None = None
    cfl: float = 0.9
    snapshot_dt: float | None = None
    initial: InitialSpec = field(default_factory=InitialSpec)
    strict_subcritical: bool = False
    uv_floor: float = 1e-9
    dimensionless: bool = False

    def __post_init__(self):
        problems = scenario_violations(self)
        if problems:
            raise ValueError("; ".join(problems))
        if self.snapshot_dt is None:
            fallback = self.t_end / 20.0 if self.t_end > 0.0 else 1.0
            object.__setattr__(self, "snapshot_dt", fallback)


def scenario_violations(cfg: ScenarioConfig) -> list[str]:
    """Cross-field checks shared by the constructor and the parser."""
    problems = []
    if cfg.n_cells < 16:
        problems.append("n_cells must be at least 16")
    if cfg.t_end < 0.0:
        problems.append("t_end must be non-negative")
    if not 0.0 < cfg.cfl <= 1.0:
        problems.append("cfl must lie in (0, 1]")
    if cfg.snapshot_dt is not None and cfg.snapshot_dt <= 0.0:
        problems.append("snapshot_dt must be positive")
    if cfg.uv_floor <= 0.0:
        problems.append("uv_floor must be positive")
    problems += validate_waveform(cfg.inlet)
    problems += cfg.initial.violations()
    needs_stenosis = cfg.outlet_model in (OutletModel.STATIC, OutletModel.DYNAMIC)
    if needs_stenosis and cfg.stenosis is None:
        problems.append(f"outlet model '{cfg.outlet_model.value}' requires a stenosis section")
    if cfg.stenosis is not None:
        if cfg.stenosis.A_s > cfg.vessel.A0 * (1.0 + 1e-12):
            problems.append("stenosis must not widen the vessel: A_s <= A0 required")
        if cfg.outlet_model is OutletModel.DYNAMIC and cfg.stenosis.L_s <= 0.0:
            problems.append("dynamic outlet model requires L_s > 0")
        if cfg.outlet_model is OutletModel.STATIC:
            from .boundaries import check_static_closure_defined

            try:
                check_static_closure_defined(cfg.stenosis, cfg.vessel)
            except ValueError as exc:
                problems.append(str(exc))
    return problems


# --- tokenizer ---------------------------------------------------------


def _tokenize(text: str):
    """Split the text into {section: {key: (raw value, line number)}}."""
    sections: dict[str, dict[str, tuple[str, int]]] = {}
    section_lines: dict[str, int] = {}
    errors: list[str] = []
    current: str | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.endswith(":") and "=" not in line:
            name = line[:-1].strip()
            if name not in SECTIONS:
                errors.append(f"line {lineno}: unknown section '{name}'")
                current = None
                continue
            if name in sections:
                errors.append(f"line {lineno}: duplicate section '{name}'")
            current = name
            sections.setdefault(name, {})
            section_lines.setdefault(name, lineno)
            continue
        if "=" not in line:
            errors.append(f"line {lineno}: expected 'key = value' or 'section:', got '{line}'")
            continue
        if current is None:
            errors.append(f"line {lineno}: key outside any section")
            continue
        key, value = (part.strip() for part in line.split("=", 1))
        if key in sections[current]:
            errors.append(f"line {lineno}: duplicate key '{key}' in section '{current}'")
        sections[current][key] = (value, lineno)
    return sections, section_lines, errors


class _SectionReader:
    """Typed access into one tokenized section, accumulating errors."""

    def __init__(self, name, entries, header_line, errors):
        self.name = name
        self.entries = dict(entries)
        self.header_line = header_line
        self.errors = errors
        self.seen: set[str] = set()

    def _raw(self, key, required, default):
        self.seen.add(key)
        if key not in self.entries:
            if required:
                self.errors.append(
                    f"line {self.header_line}: section '{self.name}' is missing key '{key}'"
                )
            return None
        return self.entries[key]

    def get_float(self, key, *, required=False, default=None):
        item = self._raw(key, required, default)
        if item is None:
            return default
        value, lineno = item
        try:
            return float(value)
        except ValueError:
            self.errors.append(f"line {lineno}: {self.name}.{key} must be a number, got '{value}'")
            return default

    def get_int(self, key, *, required=False, default=None):
        item = self._raw(key, required, default)
        if item is None:
            return default
        value, lineno = item
        try:
            return int(value)
        except ValueError:
            self.errors.append(f"line {lineno}: {self.name}.{key} must be an integer, got '{value}'")
            return default

    def get_str(self, key, *, required=False, default=None, choices=None):
        item = self._raw(key, required, default)
        if item is None:
            return default
        value, lineno = item
        if choices is not None and value not in choices:
            self.errors.append(
                f"line {lineno}: {self.name}.{key} must be one of {choices}, got '{value}'"
            )
            return default
        return value

    def get_bool(self, key, *, default=False):
        item = self._raw(key, False, default)
        if item is None:
            return default
        value, lineno = item
        lowered = value.lower()
        if lowered in ("true", "yes", "on", "1"):
            return True
        if lowered in ("false", "no", "off", "0"):
            return False
        self.errors.append(f"line {lineno}: {self.name}.{key} must be true or false, got '{value}'")
        return default

    def get_samples(self, key):
        """Parse 't:value, t:value, ...' pairs."""
        item = self._raw(key, False, None)
        if item is None:
            return (), ()
        value, lineno = item
        times, values = [], []
        for chunk in value.split(","):
            chunk = chunk.strip()
            if not chunk:
                continue
            if ":" not in chunk:
                self.errors.append(
                    f"line {lineno}: {self.name}.{key} entries must look like 't:flow'"
                )
                return (), ()
            t_str, q_str = chunk.split(":", 1)
            try:
                times.append(float(t_str))
                values.append(float(q_str))
            except ValueError:
                self.errors.append(f"line {lineno}: bad sample '{chunk}' in {self.name}.{key}")
                return (), ()
        return tuple(times), tuple(values)

    def check_unknown(self):
        for key, (_, lineno) in self.entries.items():
            if key not in self.seen:
                self.errors.append(
                    f"line {lineno}: unknown key '{key}' in section '{self.name}'"
                )


def parse_config(text: str, overrides: dict[str, str] | None = None) -> ScenarioConfig:
    """Build a validated ScenarioConfig from text.

    ``overrides`` maps dotted keys like 'grid.n_cells' to raw values and is
    applied before validation (used by the CLI flags and sweeps). Raises
    ConfigError carrying every violation found, each with a line number.
    """
    sections, section_lines, errors = _tokenize(text)
    if overrides:
        for dotted, value in overrides.items():
            if "." not in dotted:
                errors.append(f"override '{dotted}' must look like 'section.key'")
                continue
            sec, key = dotted.split(".", 1)
            if sec not in SECTIONS:
                errors.append(f"override targets unknown section '{sec}'")
                continue
            sections.setdefault(sec, {})
            section_lines.setdefault(sec, 0)
            sections[sec][key] = (str(value), 0)

    def reader(name):
        return _SectionReader(
            name, sections.get(name, {}), section_lines.get(name, 0), errors
        )

    for required_section in ("vessel", "grid", "time", "inlet"):
        if required_section not in sections:
            errors.append(f"missing required section '{required_section}'")

    vessel_r = reader("vessel")
    beta = vessel_r.get_float("beta", required=True)
    A0 = vessel_r.get_float("A0", required=True)
    rho = vessel_r.get_float("rho", required=True)
    K_r = vessel_r.get_float("K_r", default=0.0)
    D = vessel_r.get_float("D", required=True)
    vessel_r.check_unknown()
    vessel = None
    if all(v is not None for v in (beta, A0, rho, K_r, D)):
        try:
            vessel = VesselParams(beta=beta, A0=A0, rho=rho, K_r=K_r, D=D)
        except (ValueError, TypeError) as exc:
            errors.append(f"line {section_lines.get('vessel', 0)}: vessel: {exc}")

    sten_r = reader("stenosis")
    outlet_model = OutletModel.NON_REFLECTING
    stenosis = None
    if "stenosis" in sections:
        model_str = sten_r.get_str(
            "model",
            default="static",
            choices=tuple(m.value for m in OutletModel),
        )
        outlet_model = OutletModel(model_str) if model_str else OutletModel.STATIC
        required_here = outlet_model is not OutletModel.NON_REFLECTING
        K_s = sten_r.get_float("K_s", required=required_here)
        A_s = sten_r.get_float("A_s", required=required_here)
        L_s = sten_r.get_float("L_s", default=0.0)
        R_T = sten_r.get_float("R_T", default=0.0)
        mu = sten_r.get_float("mu", default=3.5e-3)
        if required_here and all(v is not None for v in (K_s, A_s, L_s, R_T, mu)):
            try:
                stenosis = StenosisParams(
                    K_s=K_s, A_s=A_s, L_s=L_s, R_T=R_T, mu=mu, outlet_model=outlet_model
                )
            except (ValueError, TypeError) as exc:
                errors.append(f"line {section_lines.get('stenosis', 0)}: stenosis: {exc}")
    sten_r.check_unknown()

    grid_r = reader("grid")
    n_cells = grid_r.get_int("n_cells", required=True)
    grid_r.check_unknown()

    time_r = reader("time")
    t_end = time_r.get_float("t_end", required=True)
    cfl = time_r.get_float("cfl", default=0.9)
    snapshot_dt = time_r.get_float("snapshot_dt", default=None)
    time_r.check_unknown()

    inlet_r = reader("inlet")
    kind = inlet_r.get_str("kind", required=True, default="constant")
    base = inlet_r.get_float("base", default=0.0)
    amplitude = inlet_r.get_float("amplitude", default=0.0)
    period = inlet_r.get_float("period", default=1.0)
    systole = inlet_r.get_float("systole", default=0.3)
    times, values = inlet_r.get_samples("samples")
    inlet_r.check_unknown()
    inlet = InletWaveform(
        kind=kind or "constant",
        base=base,
        amplitude=amplitude,
        period=period,
        systole=systole,
        times=times,
        values=values,
    )

    init_r = reader("initial")
    init_kind = init_r.get_str("kind", default="at_rest", choices=INITIAL_KINDS)
    init_amp = init_r.get_float("amplitude", default=0.05)
    init_center = init_r.get_float("center", default=0.5)
    init_width = init_r.get_float("width", default=0.05)
    init_path = init_r.get_str("path", default=None)
    init_r.check_unknown()
    initial = InitialSpec(
        kind=init_kind or "at_rest",
        amplitude=init_amp,
        center=init_center,
        width=init_width,
        path=init_path,
    )

    flags_r = reader("flags")
    strict = flags_r.get_bool("strict_subcritical", default=False)
    uv_floor = flags_r.get_float("uv_floor", default=1e-9)
    units = flags_r.get_str("units", default="si", choices=("si", "dimensionless"))
    flags_r.check_unknown()

    # cross-field validation runs even when some keys already failed, so one
    # parse reports every violation; missing pieces get neutral placeholders
    probe = _UncheckedScenario(
        vessel=vessel if vessel is not None else VesselParams(1.0, 1.0, 1.0, 0.0, 1.0),
        n_cells=n_cells if n_cells is not None else 64,
        t_end=t_end if t_end is not None else 1.0,
        inlet=inlet,
        outlet_model=outlet_model,
        stenosis=stenosis,
        cfl=cfl if cfl is not None else 0.9,
        snapshot_dt=snapshot_dt,
        initial=initial,
        strict_subcritical=strict,
        uv_floor=uv_floor if uv_floor is not None else 1e-9,
        dimensionless=(units == "dimensionless"),
    )
    errors += scenario_violations(probe)
    if errors or vessel is None:
        raise ConfigError(errors or ["config could not be interpreted"])
    return ScenarioConfig(
        vessel=vessel,
        n_cells=n_cells,
        t_end=t_end,
        inlet=inlet,
        outlet_model=outlet_model,
        stenosis=stenosis,
        cfl=cfl,
        snapshot_dt=snapshot_dt,
        initial=initial,
        strict_subcritical=strict,
        uv_floor=uv_floor,
        dimensionless=(units == "dimensionless"),
    )


@dataclass(frozen=True)
class _UncheckedScenario:
    """Field bag with the ScenarioConfig layout but no validation."""

    vessel: VesselParams
    n_cells: int
    t_end: float
    inlet: InletWaveform
    outlet_model: OutletModel
    stenosis: StenosisParams | None
    cfl: float
    snapshot_dt: float | None
    initial: InitialSpec
    strict_subcritical: bool
    uv_floor: float
    dimensionless: bool


def parse_config_file(path: str | Path, overrides: dict[str, str] | None = None) -> ScenarioConfig:
    return parse_config(Path(path).read_text(), overrides=overrides)


def serialize_config(cfg: ScenarioConfig) -> str:
    """Canonical text form; parse_config(serialize_config(c)) == c."""
    lines = ["vessel:"]
    v = cfg.vessel
    lines += [
        f"  beta = {v.beta!r}",
        f"  A0 = {v.A0!r}",
        f"  rho = {v.rho!r}",
        f"  K_r = {v.K_r!r}",
        f"  D = {v.D!r}",
        "",
        "stenosis:",
        f"  model = {cfg.outlet_model.value}",
    ]
    if cfg.stenosis is not None:
        s = cfg.stenosis
        lines += [
            f"  K_s = {s.K_s!r}",
            f"  A_s = {s.A_s!r}",
            f"  L_s = {s.L_s!r}",
            f"  R_T = {s.R_T!r}",
            f"  mu = {s.mu!r}",
        ]
    lines += [
        "",
        "grid:",
        f"  n_cells = {cfg.n_cells}",
        "",
        "time:",
        f"  t_end = {cfg.t_end!r}",
        f"  cfl = {cfg.cfl!r}",
        f"  snapshot_dt = {cfg.snapshot_dt!r}",
        "",
        "inlet:",
        f"  kind = {cfg.inlet.kind}",
    ]
    w = cfg.inlet
    if w.kind == "constant":
        lines.append(f"  base = {w.base!r}")
    elif w.kind == "half_sine":
        lines += [
            f"  base = {w.base!r}",
            f"  amplitude = {w.amplitude!r}",
            f"  period = {w.period!r}",
            f"  systole = {w.systole!r}",
        ]
    elif w.kind == "sampled":
        pairs = ", ".join(f"{t!r}:{q!r}" for t, q in zip(w.times, w.values))
        lines += [f"  period = {w.period!r}", f"  samples = {pairs}"]
    lines += ["", "initial:", f"  kind = {cfg.initial.kind}"]
    if cfg.initial.kind == "gaussian_pulse":
        lines += [
            f"  amplitude = {cfg.initial.amplitude!r}",
            f"  center = {cfg.initial.center!r}",
            f"  width = {cfg.initial.width!r}",
        ]
    elif cfg.initial.kind == "file":
        lines.append(f"  path = {cfg.initial.path}")
    lines += [
        "",
        "flags:",
        f"  strict_subcritical = {'true' if cfg.strict_subcritical else 'false'}",
        f"  uv_floor = {cfg.uv_floor!r}",
        f"  units = {'dimensionless' if cfg.dimensionless else 'si'}",
        "",
    ]
    return "\n".join(lines)
