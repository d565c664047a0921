"""Exception types shared across the package."""

from __future__ import annotations


class ScatterLabError(Exception):
    """Base class for package-specific failures."""


class ParameterError(ScatterLabError, ValueError):
    """Invalid argument or inconsistent configuration."""


class InfeasibleParameters(ParameterError):
    """A requested constant chain cannot satisfy its inequality system.

    ``violated`` names the inequality that failed.
    """

    def __init__(self, message: str, violated: str):
        super().__init__(f"{message} [violated: {violated}]")
        self.violated = violated


class IntegrationFailure(ScatterLabError, RuntimeError):
    """Trajectory integration stalled; carries the last good state."""

    def __init__(self, message: str, last_state=None):
        super().__init__(message)
        self.last_state = last_state


class DivergenceError(ScatterLabError, RuntimeError):
    """Fixed-point iteration failed to contract; carries residual history."""

    def __init__(self, message: str, residuals=None):
        super().__init__(message)
        self.residuals = list(residuals) if residuals is not None else []


class TailNotConverged(ScatterLabError, RuntimeError):
    """A doubling schedule hit its cap before the tail fell below tolerance."""

    def __init__(self, message: str, history=None):
        super().__init__(message)
        self.history = list(history) if history is not None else []


class BoundaryContamination(ScatterLabError, RuntimeError):
    """A grid run pushed too much mass against the box boundary."""

    def __init__(self, message: str, fraction: float = float("nan")):
        super().__init__(message)
        self.fraction = fraction
