"""Physical parameter bundles and ready-made presets."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum


class OutletModel(Enum):
    """Which closure supplies the incoming characteristic at the outlet."""

    STATIC = "static"
    DYNAMIC = "dynamic"
    NON_REFLECTING = "nonreflecting"


@dataclass(frozen=True)
class VesselParams:
    """Constants of the arterial segment.

    beta : wall stiffness coefficient (Pa*m), the full constitutive story
           (wall thickness, Young's modulus) is folded into this one number
    A0   : reference section area at rest (m^2)
    rho  : blood density (kg/m^3)
    K_r  : friction parameter (m^2/s)
    D    : segment length (m)
    """

    beta: float
    A0: float
    rho: float
    K_r: float = 0.0
    D: float = 1.0

    def __post_init__(self):
        if self.beta <= 0.0:
            raise ValueError("beta must be positive")
        if self.A0 <= 0.0:
            raise ValueError("A0 must be positive")
        if self.rho <= 0.0:
            raise ValueError("rho must be positive")
        if self.K_r < 0.0:
            raise ValueError("K_r must be non-negative")
        if self.D <= 0.0:
            raise ValueError("D must be positive")

    @property
    def riemann_coeff(self) -> float:
        """2*sqrt(2*beta/(rho*A0)); multiplies A**(1/4) in the invariants."""
        return 2.0 * math.sqrt(2.0 * self.beta / (self.rho * self.A0))

    @property
    def celerity_coeff(self) -> float:
        """sqrt(beta/(2*rho*A0)); the wave speed is celerity_coeff*A**(1/4)."""
        return math.sqrt(self.beta / (2.0 * self.rho * self.A0))


@dataclass(frozen=True)
class StenosisParams:
    """Bottleneck description at the outlet of the segment.

    K_s : empirical loss coefficient (-)
    A_s : effective stenosis area (m^2); must not exceed the vessel A0
          (cross-check happens where both bundles are in scope)
    L_s : stenosis length (m); must be positive for the dynamic model
    R_T : terminal resistance lumping the downstream network (Pa*s/m^3)
    mu  : blood viscosity (Pa*s)
    """

    K_s: float
    A_s: float
    L_s: float = 0.0
    R_T: float = 0.0
    mu: float = 3.5e-3
    outlet_model: OutletModel = OutletModel.STATIC

    def __post_init__(self):
        if self.K_s <= 0.0:
            raise ValueError("K_s must be positive")
        if self.A_s <= 0.0:
            raise ValueError("A_s must be positive")
        if self.mu <= 0.0:
            raise ValueError("mu must be positive")
        if self.R_T < 0.0:
            raise ValueError("R_T must be non-negative")
        if self.L_s < 0.0:
            raise ValueError("L_s must be non-negative")
        if self.outlet_model is OutletModel.DYNAMIC and self.L_s <= 0.0:
            raise ValueError("dynamic outlet model requires L_s > 0")


def unit_vessel(K_r: float = 0.0, D: float = 1.0) -> VesselParams:
    """Dimensionless test preset beta = rho = A0 = 1."""
    return VesselParams(beta=1.0, A0=1.0, rho=1.0, K_r=K_r, D=D)


def physiological_vessel() -> VesselParams:
    """A carotid-sized segment; beta gives a 5 m/s rest wave speed."""
    A0 = 3.0e-5
    return VesselParams(
        beta=50.0 * 1050.0 * math.sqrt(A0),
        A0=A0,
        rho=1050.0,
        K_r=2.3e-4,
        D=0.1,
    )


def physiological_stenosis(
    outlet_model: OutletModel = OutletModel.STATIC,
) -> StenosisParams:
    """A 50 % area stenosis with a lumped downstream resistance."""
    return StenosisParams(
        K_s=1.52,
        A_s=1.5e-5,
        L_s=0.005,
        R_T=1.0e8,
        mu=3.5e-3,
        outlet_model=outlet_model,
    )
