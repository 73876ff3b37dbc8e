"""Shared test helpers: state sampling and independent scalar oracles."""

from __future__ import annotations

import math

import numpy as np

import stenoflow as sf


def sample_subcritical(rng: np.random.Generator, vessel, n: int):
    """Random states with A around A0 and 0 < V < c (strictly subcritical)."""
    A = vessel.A0 * 10.0 ** rng.uniform(-0.3, 0.3, n)
    c = vessel.celerity_coeff * A**0.25
    V = rng.uniform(0.02, 0.95, n) * c
    return A, V


def physical_static_residual(A, V, sten, vessel):
    """The combined outlet relation in physical variables (zero at closure)."""
    resistance = sten.R_T + 8.0 * math.pi * sten.mu * sten.L_s / sten.A_s**2
    return (
        sf.pressure(A, vessel)
        - resistance * A * V
        - V**2 * sten.K_s * vessel.rho / 2.0 * (A / sten.A_s - 1.0) ** 2
    )


def physical_dynamic_rhs(A, V, sten, vessel):
    """Right side of the stenosis speed ODE in physical variables."""
    return (
        vessel.beta / (vessel.rho * vessel.A0 * sten.L_s)
        * (math.sqrt(A) - math.sqrt(vessel.A0))
        - sten.K_s / (2.0 * sten.L_s) * V**2 * (A / sten.A_s - 1.0) ** 2
        - (8.0 * math.pi * sten.mu / (vessel.rho * sten.A_s**2)
           + sten.R_T / (vessel.rho * sten.L_s)) * A * V
    )


def bisect_scalar(f, lo, hi, iters=200):
    """Plain bisection; requires a sign change on [lo, hi]."""
    flo = f(lo)
    fhi = f(hi)
    assert flo * fhi <= 0.0, "oracle bracket must straddle a root"
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        fmid = f(mid)
        if flo * fmid <= 0.0:
            hi, fhi = mid, fmid
        else:
            lo, flo = mid, fmid
    return 0.5 * (lo + hi)


def scan_roots(f, lo, hi, n=40001):
    """All sign-change roots of f on [lo, hi] by scan plus bisection."""
    xs = np.linspace(lo, hi, n)
    ys = np.array([f(x) for x in xs])
    roots = []
    for k in np.where(np.sign(ys[:-1]) * np.sign(ys[1:]) < 0)[0]:
        roots.append(bisect_scalar(f, xs[k], xs[k + 1]))
    return roots


def compatible_terminal_resistance(A, V, K_s, A_s, L_s, mu, vessel):
    """R_T making (A, V) an exact root of the static outlet relation."""
    quad = V**2 * K_s * vessel.rho / 2.0 * (A / A_s - 1.0) ** 2
    return (float(sf.pressure(A, vessel)) - quad) / (A * V) \
        - 8.0 * math.pi * mu * L_s / A_s**2
