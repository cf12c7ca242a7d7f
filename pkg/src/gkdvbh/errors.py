"""Exception hierarchy shared by the simulator, analysis and CLI."""


class GKdVBHError(Exception):
    """Base class for all package errors."""


class ConfigError(GKdVBHError, ValueError):
    """Invalid parameters, incompatible law/exponent pair, or bad config file."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DimensionError(GKdVBHError, ValueError):
    """Array length does not match the grid."""


class ConstraintError(GKdVBHError, ValueError):
    """A function violates one of the boundary conditions it was required to satisfy."""

    def __init__(self, message, row=None):
        self.row = row
        super().__init__(message)


class DivergenceError(GKdVBHError, RuntimeError):
    """Newton iteration failed to reach the residual tolerance."""

    def __init__(self, message, residual=float("nan"), time=None):
        self.residual = residual
        self.time = time
        super().__init__(message)


class SingularJacobianError(GKdVBHError, RuntimeError):
    """The Newton linear system could not be solved."""


class HypothesisNotMet(GKdVBHError, ValueError):
    """A decay envelope was requested outside the setting where it is guaranteed."""


class InsufficientDataError(GKdVBHError, ValueError):
    """Too few (or non-positive) samples to fit a decay rate."""
