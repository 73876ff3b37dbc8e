"""Inlet flow waveforms: constant, half-sine pulse train, sampled periodic."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

KINDS = ("constant", "half_sine", "sampled")


@dataclass(frozen=True)
class InletWaveform:
    """Prescribed inlet flow Q_in(t) > 0.

    constant  : base
    half_sine : base + amplitude*sin(pi*tau/T_sys) during the systolic
                fraction of each period, base otherwise
    sampled   : piecewise-linear through (times, values) over one period,
                wrapping back to the first sample
    """

    kind: str
    base: float = 0.0
    amplitude: float = 0.0
    period: float = 1.0
    systole: float = 0.3
    times: tuple[float, ...] = ()
    values: tuple[float, ...] = ()


def validate_waveform(w: InletWaveform) -> list[str]:
    """All violations of the waveform contract (empty list when valid)."""
    problems: list[str] = []
    if w.kind not in KINDS:
        problems.append(f"unknown waveform kind '{w.kind}' (choose from {KINDS})")
        return problems
    if w.kind in ("constant", "half_sine") and w.base <= 0.0:
        problems.append("waveform base flow must be positive")
    if w.kind == "half_sine":
        if w.amplitude < 0.0:
            problems.append("waveform amplitude must be non-negative")
        if w.period <= 0.0:
            problems.append("waveform period must be positive")
        if not 0.0 < w.systole < 1.0:
            problems.append("systole must be a fraction in (0, 1)")
    if w.kind == "sampled":
        if w.period <= 0.0:
            problems.append("waveform period must be positive")
        if len(w.times) < 2:
            problems.append("sampled waveform needs at least two samples")
        else:
            if any(t2 <= t1 for t1, t2 in zip(w.times, w.times[1:])):
                problems.append("sample times must be strictly increasing")
            if w.times[0] < 0.0 or w.times[-1] >= w.period:
                problems.append("sample times must lie in [0, period)")
        if any(q <= 0.0 for q in w.values):
            problems.append("sampled flows must all be positive")
        if len(w.times) != len(w.values):
            problems.append("sample times and values must have equal length")
    return problems


def waveform_eval(w: InletWaveform, t):
    """Flow at time t; scalar in, scalar out (arrays also accepted)."""
    if w.kind == "constant":
        return w.base + 0.0 * np.asarray(t, dtype=float) if np.ndim(t) else w.base
    if w.kind == "half_sine":
        tau = np.mod(t, w.period)
        t_sys = w.systole * w.period
        pulse = w.amplitude * np.sin(np.pi * tau / t_sys)
        out = np.where(tau < t_sys, w.base + pulse, w.base)
        return float(out) if np.ndim(out) == 0 else out
    if w.kind == "sampled":
        tau = np.mod(t, w.period)
        xs = np.asarray(w.times + (w.period,))
        ys = np.asarray(w.values + (w.values[0],))
        out = np.interp(tau, xs, ys)
        return float(out) if np.ndim(out) == 0 else out
    raise ValueError(f"unknown waveform kind '{w.kind}'")
