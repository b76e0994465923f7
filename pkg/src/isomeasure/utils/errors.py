class IsomeasureError(Exception):
    """Base class for every error raised by the isomeasure package."""


class PreconditionError(IsomeasureError, ValueError):
    """Raised when an operation's precondition is violated.

    Attributes:
        residuals (dict): Measured quantities that failed the check.
    """

    def __init__(self, message: str, residuals: dict | None = None) -> None:
        super().__init__(message)
        self.residuals = dict(residuals or {})


class DomainError(IsomeasureError, ValueError):
    """Raised when an argument lies outside an operation's domain."""


class NormalizationError(IsomeasureError, ValueError):
    """Raised when values are not normalized as required."""


class DegeneracyError(IsomeasureError, ValueError):
    """Raised when a point set or facet is lower dimensional."""


class UnboundedError(IsomeasureError, ValueError):
    """Raised when a polar body would not be bounded."""


class InfeasibleError(IsomeasureError, RuntimeError):
    """Raised when no isotropic centered weights could be found.

    Attributes:
        residual (float): Residual of the last attempt.
        attempts (int): Number of attempts made.
    """

    def __init__(self, message: str, residual: float, attempts: int) -> None:
        super().__init__(message)
        self.residual = residual
        self.attempts = attempts
