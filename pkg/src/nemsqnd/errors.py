"""Exception and warning types shared across the simulation modules."""


class SimulationError(Exception):
    """Base class for domain errors raised by this package."""


class TruncationError(SimulationError):
    """A Fock-space cutoff is too small for the requested amplitude."""

    def __init__(self, message: str, required_dim: int | None = None):
        super().__init__(message)
        self.required_dim = required_dim


class RegimeError(SimulationError):
    """A parameter-regime assumption is violated in strict mode."""


class IntegrationError(SimulationError):
    """The ODE integrator failed to meet its tolerances."""


class EstimationError(SimulationError):
    """A spectral estimate cannot be formed from the given samples."""


class ConditioningError(SimulationError):
    """A conditional-state projection is degenerate or carries no weight."""


class ConfigError(ValueError):
    """A configuration file is malformed or contains unknown keys."""


class VerificationFailure(SimulationError):
    """One or more cross-validation checks exceeded tolerance."""


class RegimeWarning(UserWarning):
    """Emitted in permissive mode when a regime ratio is out of range."""
