"""Delimited text outputs.

Every file carries a header naming columns and units (marked '(-)' for
the dimensionless preset); rows increase strictly in t, and in x within
one snapshot. Floats are written at fixed precision so identical runs
produce identical bytes.
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from .model import pressure, to_riemann
from .solver import RunResult


def _fmt(x: float) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if math.isnan(x):
        return "nan"
    return f"{x:.12e}"


_UNITS = {
    "t": "s", "x": "m", "A": "m^2", "V": "m/s", "P": "Pa",
    "u": "m/s", "v": "m/s", "Q_in": "m^3/s", "y": "Pa",
    "A0_trace": "m^2", "V0_trace": "m/s", "u_D": "m/s", "v_D": "m/s",
    "X": "m/s", "G_residual": "Pa", "dt": "s", "mass_residual": "-",
    "min_lambda2": "m/s", "supercritical_fraction": "-",
    "max_cfl": "-", "inlet_iters": "-",
    "outlet_iters": "-", "dx": "m", "l1_error": "m^3", "order": "-",
    "n_cells": "-", "level": "-",
}


def header(columns: list[str], dimensionless: bool) -> str:
    def label(name: str) -> str:
        unit = "-" if dimensionless else _UNITS.get(name, "-")
        return f"{name} ({unit})"

    return ",".join(label(c) for c in columns)


def _write(path: Path, columns: list[str], rows, dimensionless: bool) -> Path:
    lines = [header(columns, dimensionless)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    path.write_text("\n".join(lines) + "\n")
    return path


def write_run_outputs(result: RunResult, outdir: str | Path) -> dict[str, Path]:
    """Write snapshots, sensor, boundary and diagnostics CSVs."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    dimensionless = result.scenario.dimensionless
    vessel = result.scenario.vessel
    x = result.grid.centers

    snapshot_rows = []
    for k, t in enumerate(result.snapshot_times):
        A = result.A_hist[k]
        V = result.V_hist[k]
        P = pressure(A, vessel)
        u, v = to_riemann(A, V, vessel)
        for i in range(result.grid.n_cells):
            snapshot_rows.append((t, x[i], A[i], V[i], P[i], u[i], v[i]))

    paths = {}
    paths["snapshots"] = _write(
        outdir / "snapshots.csv",
        ["t", "x", "A", "V", "P", "u", "v"],
        snapshot_rows,
        dimensionless,
    )
    s = result.sensor
    paths["sensor"] = _write(
        outdir / "sensor.csv",
        ["t", "Q_in", "y", "A0_trace", "V0_trace"],
        zip(s.t, s.Q_in, s.y, s.A0_trace, s.V0_trace),
        dimensionless,
    )
    b = result.boundary
    paths["boundary"] = _write(
        outdir / "boundary.csv",
        ["t", "u_D", "v_D", "X", "G_residual"],
        zip(b.t, b.u_D, b.v_D, b.X, b.G_residual),
        dimensionless,
    )
    d = result.steps
    paths["diagnostics"] = _write(
        outdir / "diagnostics.csv",
        ["t", "dt", "mass_residual", "min_lambda2", "supercritical_fraction",
         "max_cfl", "inlet_iters", "outlet_iters"],
        zip(d.t, d.dt, d.mass_residual, d.min_lambda2, d.supercritical_fraction,
            d.max_cfl, d.inlet_iterations.astype(int), d.outlet_iterations.astype(int)),
        dimensionless,
    )
    return paths


def write_compare_outputs(
    results: dict[str, RunResult], outdir: str | Path
) -> dict[str, Path]:
    """Aligned outlet-speed and sensor traces for several outlet models."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    names = list(results)
    first = results[names[0]]
    dimensionless = first.scenario.dimensionless
    t = first.boundary.t
    paths = {}

    vd_cols = ["t"] + [f"V_D_{name}" for name in names]
    vd_rows = []
    for k in range(len(t)):
        row = [t[k]]
        for name in names:
            b = results[name].boundary
            row.append(0.5 * (b.u_D[k] + b.v_D[k]))
        vd_rows.append(tuple(row))
    paths["outlet"] = _write(outdir / "compare_outlet.csv", vd_cols, vd_rows, dimensionless)

    y_cols = ["t"] + [f"y_{name}" for name in names]
    y_rows = []
    for k in range(len(t)):
        row = [t[k]] + [results[name].sensor.y[k] for name in names]
        y_rows.append(tuple(row))
    paths["sensor"] = _write(outdir / "compare_sensor.csv", y_cols, y_rows, dimensionless)
    return paths


def write_convergence_csv(
    n_cells: list[int],
    dx: list[float],
    errors: list[float],
    orders: list[float],
    outdir: str | Path,
    dimensionless: bool = False,
) -> Path:
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    rows = []
    for k in range(len(errors)):
        rows.append((k, n_cells[k], dx[k], errors[k], orders[k] if k < len(orders) else math.nan))
    return _write(
        outdir / "convergence.csv",
        ["level", "n_cells", "dx", "l1_error", "order"],
        rows,
        dimensionless,
    )


def write_sweep_summary(rows: list[dict], outdir: str | Path) -> Path:
    """One line per sweep value: status and headline numbers."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    lines = ["param,value,status,n_steps,min_lambda2,y_final"]
    for row in rows:
        lines.append(
            ",".join(
                [
                    row["param"],
                    _fmt(row["value"]),
                    row["status"],
                    str(row.get("n_steps", 0)),
                    _fmt(row.get("min_lambda2", math.nan)),
                    _fmt(row.get("y_final", math.nan)),
                ]
            )
        )
    path = Path(outdir) / "sweep_summary.csv"
    path.write_text("\n".join(lines) + "\n")
    return path
