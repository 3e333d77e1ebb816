"""Exception hierarchy shared across the package."""


class PrecipMixError(Exception):
    """Base class for package errors."""


class ParameterError(PrecipMixError, ValueError):
    """Distribution parameters outside their admissible domain."""


class DomainError(PrecipMixError, ValueError):
    """Argument outside the support of a function or distribution."""


class PreconditionError(PrecipMixError, ValueError):
    """Input violates an operation precondition (e.g. sample too small)."""


class DegenerateSampleError(PreconditionError):
    """Sample carries no information for the requested fit."""


class QuadratureError(PrecipMixError, ArithmeticError):
    """Adaptive quadrature failed to reach the requested tolerance.

    Attributes
    ----------
    worst_interval : tuple of float
        Subinterval (in the original variable) with the largest error estimate.
    value, error : float
        Best integral estimate and its error estimate at termination.
    """

    def __init__(self, message, worst_interval=None, value=float("nan"), error=float("inf")):
        super().__init__(message)
        self.worst_interval = worst_interval
        self.value = value
        self.error = error


class ParseError(PrecipMixError, ValueError):
    """Malformed input file. ``problems`` lists ``(line_number, message)``."""

    def __init__(self, problems):
        self.problems = list(problems)
        lines = "; ".join(f"line {ln}: {msg}" for ln, msg in self.problems[:10])
        more = "" if len(self.problems) <= 10 else f" (+{len(self.problems) - 10} more)"
        super().__init__(f"{len(self.problems)} malformed row(s): {lines}{more}")
