"""Exception types shared across the package."""


class SimulationError(Exception):
    """Base class for failures raised by the solver stack."""


class SingularStateError(SimulationError, ValueError):
    """Riemann pair too close to the zero-area line (u - v under the floor)."""


class RegimeError(SimulationError):
    """A state or boundary solution left the subcritical region."""


class BoundarySolveError(SimulationError):
    """A boundary closure equation could not be solved."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class PositivityError(SimulationError):
    """A cell area became non-positive during a step."""


class ConfigError(SimulationError):
    """Scenario text failed validation; carries every violation found."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("invalid scenario config:\n" + "\n".join(self.violations))
