"""Exception types shared across the package."""


class TulpError(Exception):
    """Base class for all package errors."""


class DimensionError(TulpError, ValueError):
    """Vector or matrix dimensions do not match."""


class ConfigError(TulpError, ValueError):
    """An experiment or solver configuration value is invalid."""


class GuardExceededError(TulpError):
    """A desk-scale enumeration guard was exceeded."""


class InfeasibleProblemError(TulpError):
    """The linear program has no feasible point."""


class UnboundedProblemError(TulpError):
    """The linear program is unbounded below."""


class SingularMatrixError(TulpError):
    """A matrix required to be nonsingular is singular."""


class CertificationError(TulpError):
    """A bound that is supposed to hold was violated numerically."""


class InstanceFormatError(TulpError, ValueError):
    """An instance or generator file could not be parsed."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
