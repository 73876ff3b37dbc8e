"""Closed-form physics of the 1-D flow model.

Pressure law, characteristic speeds, the Riemann-variable transforms and
the fundamental-diagram reduction. Every function is pure and accepts
scalars or numpy arrays interchangeably.
"""

from __future__ import annotations

from enum import Enum
from typing import NamedTuple

import numpy as np

from .errors import SingularStateError
from .params import VesselParams

#: default guard for the quartic denominators in the characteristic forms
UV_FLOOR = 1e-9


class Regime(Enum):
    SUBCRITICAL = "subcritical"
    CRITICAL = "critical"
    SUPERCRITICAL = "supercritical"


class FlowState(NamedTuple):
    """Section area A (m^2) and mean speed V (m/s)."""

    A: float | np.ndarray
    V: float | np.ndarray


class RiemannPair(NamedTuple):
    """Forward (u) and backward (v) characteristic variables (m/s)."""

    u: float | np.ndarray
    v: float | np.ndarray


def _require_positive_area(A) -> None:
    if np.any(np.asarray(A) <= 0.0):
        raise ValueError("section area must be positive")


def _require_span(u, v, floor: float):
    span = np.subtract(u, v)
    if np.any(span < floor):
        raise SingularStateError(
            f"u - v fell under the floor {floor:g}; state left the valid region"
        )
    return span


def pressure(A, vessel: VesselParams):
    """Transmural pressure (beta/A0)*(sqrt(A) - sqrt(A0)); zero at A = A0."""
    _require_positive_area(A)
    return vessel.beta / vessel.A0 * (np.sqrt(A) - np.sqrt(vessel.A0))


def pressure_inverse(y, vessel: VesselParams):
    """Area at pressure y: A = (A0*y/beta + sqrt(A0))**2."""
    root = vessel.A0 * np.asarray(y, dtype=float) / vessel.beta + np.sqrt(vessel.A0)
    if np.any(root <= 0.0):
        raise ValueError("pressure below the collapse limit of the wall law")
    return root**2


def wave_speed(A, vessel: VesselParams):
    """Local celerity sqrt(beta/(2*rho*A0))*A**(1/4)."""
    _require_positive_area(A)
    return vessel.celerity_coeff * np.power(A, 0.25)


def eigenvalues(A, V, vessel: VesselParams):
    """Characteristic speeds (V + c, V - c) with c the local celerity."""
    c = wave_speed(A, vessel)
    return V + c, V - c


def classify_regime(A: float, V: float, vessel: VesselParams, tol: float = 1e-9) -> Regime:
    """Regime of a single state from the sign of the slow eigenvalue."""
    if tol < 0.0:
        raise ValueError("tolerance must be non-negative")
    lam2 = eigenvalues(A, V, vessel)[1]
    if lam2 < -tol:
        return Regime.SUBCRITICAL
    if lam2 > tol:
        return Regime.SUPERCRITICAL
    return Regime.CRITICAL


def to_riemann(A, V, vessel: VesselParams) -> RiemannPair:
    """Characteristic pair u, v = V +/- 2*sqrt(2*beta/(rho*A0))*A**(1/4)."""
    _require_positive_area(A)
    r = vessel.riemann_coeff * np.power(A, 0.25)
    return RiemannPair(V + r, V - r)


def from_riemann(u, v, vessel: VesselParams, floor: float = UV_FLOOR) -> FlowState:
    """Invert the characteristic map: V = (u+v)/2, A = rho^2*A0^2/(4^5*beta^2)*(u-v)^4."""
    span = _require_span(u, v, floor)
    coeff = vessel.rho**2 * vessel.A0**2 / (4.0**5 * vessel.beta**2)
    return FlowState(coeff * span**4, 0.5 * (np.add(u, v)))


def char_speeds(u, v):
    """Characteristic speeds in invariant form: ((5u+3v)/8, (3u+5v)/8)."""
    return (5.0 * u + 3.0 * v) / 8.0, (3.0 * u + 5.0 * v) / 8.0


def friction_source(u, v, vessel: VesselParams, floor: float = UV_FLOOR):
    """Friction term shared by both characteristic equations.

    Equals -K_r*V/A written in the invariants:
    -4**(9/2)*K_r*beta^2/(rho*A0)^2 * (u+v)/(u-v)^4.
    """
    span = _require_span(u, v, floor)
    coeff = 4.0**4.5 * vessel.K_r * vessel.beta**2 / (vessel.rho**2 * vessel.A0**2)
    return -coeff * np.add(u, v) / span**4


def flow_from_riemann(u, v, vessel: VesselParams):
    """Volumetric flow A*V expressed in the invariants (the inlet closure g)."""
    coeff = vessel.rho**2 * vessel.A0**2 / (4.0**5.5 * vessel.beta**2)
    return coeff * np.add(u, v) * np.subtract(u, v) ** 4


def fd_speed(A, F0: float, vessel: VesselParams):
    """Speed law F(A) = F0 - 2*sqrt(2*beta/(rho*A0))*A**(1/4); decreasing in A."""
    if F0 <= 0.0:
        raise ValueError("F0 must be positive")
    if np.any(np.asarray(A) < 0.0):
        raise ValueError("area must be non-negative")
    return F0 - vessel.riemann_coeff * np.power(A, 0.25)


def fd_critical_area(F0: float, vessel: VesselParams) -> float:
    """Zero-speed area A1 = F0^4*rho^2*A0^2/(64*beta^2)."""
    if F0 <= 0.0:
        raise ValueError("F0 must be positive")
    return F0**4 * vessel.rho**2 * vessel.A0**2 / (64.0 * vessel.beta**2)


def fd_flow(A, F0: float, vessel: VesselParams):
    """Flow A*F(A) on [0, A1]; concave with zeros at both endpoints."""
    A1 = fd_critical_area(F0, vessel)
    A = np.asarray(A, dtype=float)
    if np.any(A < 0.0) or np.any(A > A1 * (1.0 + 1e-12)):
        raise ValueError("area outside the fundamental-diagram range [0, A1]")
    return A * fd_speed(A, F0, vessel)
