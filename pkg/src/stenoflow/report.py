"""Figure rendering for the report path.

PNG files land next to the delimited output. The Agg backend keeps this
headless and the stripped metadata keeps the bytes reproducible.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .solver import RunResult

_SAVE = dict(dpi=150, bbox_inches="tight", metadata={"Date": None})


def _finish(fig, path: Path) -> Path:
    fig.savefig(path, **_SAVE)
    plt.close(fig)
    return path


def render_run_figures(result: RunResult, outdir: str | Path) -> list[Path]:
    """Sensor trace, field snapshots and the outlet trace for one run."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    paths = []

    s = result.sensor
    fig, (ax_q, ax_y) = plt.subplots(2, 1, sharex=True, figsize=(7, 5))
    ax_q.plot(s.t, s.Q_in, color="tab:blue")
    ax_q.set_ylabel("inlet flow")
    ax_y.plot(s.t, s.y, color="tab:red")
    ax_y.set_ylabel("inlet pressure")
    ax_y.set_xlabel("t")
    fig.suptitle("virtual sensor at x = 0")
    paths.append(_finish(fig, outdir / "sensor.png"))

    x = result.grid.centers
    times = result.snapshot_times
    keep = np.unique(np.linspace(0, len(times) - 1, min(6, len(times))).astype(int))
    fig, (ax_a, ax_v) = plt.subplots(2, 1, sharex=True, figsize=(7, 5))
    cmap = plt.get_cmap("viridis")
    for j, k in enumerate(keep):
        color = cmap(j / max(1, len(keep) - 1))
        ax_a.plot(x, result.A_hist[k], color=color, label=f"t = {times[k]:.3g}")
        ax_v.plot(x, result.V_hist[k], color=color)
    ax_a.set_ylabel("A")
    ax_v.set_ylabel("V")
    ax_v.set_xlabel("x")
    ax_a.legend(fontsize=8)
    fig.suptitle("field snapshots")
    paths.append(_finish(fig, outdir / "snapshots.png"))

    b = result.boundary
    fig, (ax_vd, ax_g) = plt.subplots(2, 1, sharex=True, figsize=(7, 5))
    ax_vd.plot(b.t, 0.5 * (b.u_D + b.v_D), color="tab:green")
    ax_vd.set_ylabel("V at outlet")
    finite = np.isfinite(b.G_residual)
    if finite.any():
        ax_g.plot(b.t[finite], np.abs(b.G_residual[finite]) + 1e-300, color="tab:purple")
        ax_g.set_yscale("log")
    ax_g.set_ylabel("|G| residual")
    ax_g.set_xlabel("t")
    fig.suptitle("outlet closure")
    paths.append(_finish(fig, outdir / "boundary.png"))
    return paths


def render_compare_figures(results: dict[str, RunResult], outdir: str | Path) -> list[Path]:
    """Overlay the outlet speed and sensor pressure across outlet models."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    paths = []

    fig, ax = plt.subplots(figsize=(7, 4))
    for name, result in results.items():
        b = result.boundary
        ax.plot(b.t, 0.5 * (b.u_D + b.v_D), label=name)
    ax.set_xlabel("t")
    ax.set_ylabel("V at outlet")
    ax.legend()
    fig.suptitle("outlet models compared")
    paths.append(_finish(fig, outdir / "compare_outlet.png"))

    fig, ax = plt.subplots(figsize=(7, 4))
    for name, result in results.items():
        ax.plot(result.sensor.t, result.sensor.y, label=name)
    ax.set_xlabel("t")
    ax.set_ylabel("inlet pressure")
    ax.legend()
    fig.suptitle("sensor readout compared")
    paths.append(_finish(fig, outdir / "compare_sensor.png"))
    return paths


def render_convergence_figure(
    n_cells: list[int], dx: list[float], errors: list[float], outdir: str | Path
) -> Path:
    """Log-log self-convergence plot with a first-order guide line."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    fig, ax = plt.subplots(figsize=(6, 4))
    dx_used = dx[: len(errors)]
    ax.loglog(dx_used, errors, "o-", label="L1 self-convergence error")
    if errors and errors[0] > 0:
        guide = [errors[0] * (d / dx_used[0]) for d in dx_used]
        ax.loglog(dx_used, guide, "k--", alpha=0.5, label="order 1")
    ax.set_xlabel("dx")
    ax.set_ylabel("L1 error")
    ax.legend()
    fig.suptitle("grid refinement")
    return _finish(fig, outdir / "convergence.png")


def render_sweep_figure(
    traces: list[tuple[str, np.ndarray, np.ndarray]], outdir: str | Path
) -> Path:
    """Sensor pressure overlays, one curve per sweep value."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    fig, ax = plt.subplots(figsize=(7, 4))
    for label, t, y in traces:
        ax.plot(t, y, label=label)
    ax.set_xlabel("t")
    ax.set_ylabel("inlet pressure")
    if traces:
        ax.legend(fontsize=8)
    fig.suptitle("parameter sweep")
    return _finish(fig, outdir / "sweep_sensor.png")
