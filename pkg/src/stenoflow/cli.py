"""Command line entry points.

    stenoflow run         --config scenario.cfg --out outdir
    stenoflow compare-bc  --config scenario.cfg --out outdir
    stenoflow convergence --config scenario.cfg --levels 4
    stenoflow sweep       --config scenario.cfg --param stenosis.A_s --values 0.4,0.5

--cells, --cfl and --t-end override the config; every command writes CSV
files and, unless --no-plots is given, PNG figures next to them.
"""

from __future__ import annotations

import argparse
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path

import numpy as np

from .config import ScenarioConfig, parse_config
from .errors import ConfigError, SimulationError
from .output import (
    write_compare_outputs,
    write_convergence_csv,
    write_run_outputs,
    write_sweep_summary,
)
from .params import OutletModel
from .solver import RunResult, convergence_study, run


def _add_common(parser: argparse.ArgumentParser, default_out: str) -> None:
    parser.add_argument("--config", required=True, help="scenario config file")
    parser.add_argument("--out", default=default_out, help="output directory")
    parser.add_argument("--cells", type=int, help="override grid.n_cells")
    parser.add_argument("--cfl", type=float, help="override time.cfl")
    parser.add_argument("--t-end", type=float, dest="t_end", help="override time.t_end")
    parser.add_argument("--no-plots", action="store_true", help="skip figure rendering")


def _overrides(args) -> dict[str, str]:
    overrides = {}
    if args.cells is not None:
        overrides["grid.n_cells"] = str(args.cells)
    if args.cfl is not None:
        overrides["time.cfl"] = repr(args.cfl)
    if args.t_end is not None:
        overrides["time.t_end"] = repr(args.t_end)
    return overrides


def _load(args) -> ScenarioConfig:
    text = Path(args.config).read_text()
    return parse_config(text, overrides=_overrides(args))


def _summary_line(result: RunResult) -> str:
    min_lam2 = float(np.min(result.steps.min_lambda2)) if result.steps.t.size else math.nan
    return (
        f"steps={result.n_steps} t_end={result.snapshot_times[-1]:.6g} "
        f"min_lambda2={min_lam2:.6g} mass_drift="
        f"{abs(result.mass_final - result.mass_initial - result.boundary_flux_integral):.3e}"
    )


def cmd_run(args) -> int:
    scenario = _load(args)
    result = run(scenario)
    outdir = Path(args.out)
    write_run_outputs(result, outdir)
    if not args.no_plots:
        from .report import render_run_figures

        render_run_figures(result, outdir)
    print(f"run: {_summary_line(result)}")
    print(f"run: wrote {outdir}")
    return 0


def cmd_compare_bc(args) -> int:
    scenario = _load(args)
    if scenario.stenosis is None:
        print("compare-bc: the config must define a stenosis section", file=sys.stderr)
        return 2
    outdir = Path(args.out)
    results: dict[str, RunResult] = {}
    failures = 0
    for model in (OutletModel.STATIC, OutletModel.DYNAMIC, OutletModel.NON_REFLECTING):
        name = model.value
        try:
            if model is OutletModel.NON_REFLECTING:
                variant = replace(scenario, outlet_model=model, stenosis=None)
            else:
                variant = replace(
                    scenario,
                    outlet_model=model,
                    stenosis=replace(scenario.stenosis, outlet_model=model),
                )
            result = run(variant)
            results[name] = result
            write_run_outputs(result, outdir / name)
            print(f"compare-bc[{name}]: {_summary_line(result)}")
        except (SimulationError, ValueError) as exc:
            failures += 1
            print(f"compare-bc[{name}]: FAILED: {exc}", file=sys.stderr)
    if results:
        write_compare_outputs(results, outdir)
        if not args.no_plots:
            from .report import render_compare_figures

            render_compare_figures(results, outdir)
    return 1 if failures else 0


def cmd_convergence(args) -> int:
    scenario = _load(args)
    outdir = Path(args.out)
    try:
        ns, dxs, errors, orders = convergence_study(scenario, levels=args.levels)
    except (SimulationError, ValueError) as exc:
        print(f"convergence: FAILED: {exc}", file=sys.stderr)
        return 1
    write_convergence_csv(ns, dxs, errors, [math.nan] + orders, outdir,
                          dimensionless=scenario.dimensionless)
    if not args.no_plots:
        from .report import render_convergence_figure

        render_convergence_figure(ns, dxs, errors, outdir)
    for k, err in enumerate(errors):
        order = f" order={orders[k - 1]:.3f}" if k >= 1 else ""
        print(f"convergence: n={ns[k]} dx={dxs[k]:.6g} l1_error={err:.6e}{order}")
    if orders:
        print(f"convergence: observed order (final pair) = {orders[-1]:.3f}")
    return 0


def _sweep_worker(payload):
    """Run one sweep instance in a worker process."""
    text, overrides, outdir, plots, param, value = payload
    try:
        scenario = parse_config(text, overrides=overrides)
        result = run(scenario)
        write_run_outputs(result, outdir)
        if plots:
            from .report import render_run_figures

            render_run_figures(result, outdir)
        return {
            "param": param,
            "value": float(value),
            "status": "ok",
            "n_steps": result.n_steps,
            "min_lambda2": float(np.min(result.steps.min_lambda2))
            if result.steps.t.size else math.nan,
            "y_final": float(result.sensor.y[-1]),
            "sensor_t": result.sensor.t,
            "sensor_y": result.sensor.y,
            "error": "",
        }
    except (SimulationError, ValueError, OSError) as exc:
        return {
            "param": param,
            "value": float(value),
            "status": "failed",
            "error": str(exc),
        }


def cmd_sweep(args) -> int:
    text = Path(args.config).read_text()
    base_overrides = _overrides(args)
    if "." not in args.param:
        print("sweep: --param must look like 'section.key'", file=sys.stderr)
        return 2
    values = [chunk.strip() for chunk in args.values.split(",") if chunk.strip()]
    if not values:
        print("sweep: --values must list at least one value", file=sys.stderr)
        return 2
    outdir = Path(args.out)
    key = args.param.split(".", 1)[1]
    payloads = []
    for value in values:
        overrides = dict(base_overrides)
        overrides[args.param] = value
        payloads.append(
            (text, overrides, str(outdir / f"{key}={value}"), not args.no_plots,
             args.param, value)
        )
    if len(payloads) == 1:
        outcomes = [_sweep_worker(payloads[0])]
    else:
        with ProcessPoolExecutor(max_workers=min(4, len(payloads))) as pool:
            outcomes = list(pool.map(_sweep_worker, payloads))
    failures = 0
    traces = []
    for outcome in outcomes:
        if outcome["status"] == "ok":
            print(f"sweep[{args.param}={outcome['value']:g}]: ok "
                  f"steps={outcome['n_steps']}")
            traces.append(
                (f"{key}={outcome['value']:g}", outcome["sensor_t"], outcome["sensor_y"])
            )
        else:
            failures += 1
            print(f"sweep[{args.param}={outcome['value']:g}]: FAILED: {outcome['error']}",
                  file=sys.stderr)
    write_sweep_summary(outcomes, outdir)
    if traces and not args.no_plots:
        from .report import render_sweep_figure

        render_sweep_figure(traces, outdir)
    return 1 if failures else 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="stenoflow",
        description="1-D arterial flow with an outlet stenosis: scenario runner",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="integrate one scenario and write outputs")
    _add_common(p_run, "out_run")
    p_run.set_defaults(func=cmd_run)

    p_cmp = sub.add_parser(
        "compare-bc", help="run the scenario under all three outlet closures"
    )
    _add_common(p_cmp, "out_compare")
    p_cmp.set_defaults(func=cmd_compare_bc)

    p_conv = sub.add_parser("convergence", help="self-convergence refinement ladder")
    _add_common(p_conv, "out_convergence")
    p_conv.add_argument("--levels", type=int, default=4, help="grids in the ladder")
    p_conv.set_defaults(func=cmd_convergence)

    p_sweep = sub.add_parser("sweep", help="vary one parameter over a list of values")
    _add_common(p_sweep, "out_sweep")
    p_sweep.add_argument("--param", required=True, help="dotted key, e.g. stenosis.A_s")
    p_sweep.add_argument("--values", required=True, help="comma-separated values")
    p_sweep.set_defaults(func=cmd_sweep)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        for violation in exc.violations:
            print(f"config error: {violation}", file=sys.stderr)
        return 2
    except SimulationError as exc:
        print(f"{args.command}: FAILED: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
