"""Exception hierarchy."""


class DmuError(Exception):
    """Base class for every error raised by the package."""


class BoundaryTooClose(DmuError, ValueError):
    pass


class OrderTooLarge(DmuError, ValueError):
    pass


class InvalidWeight(DmuError, ValueError):
    pass


class PreconditionFailed(DmuError, ValueError):
    pass


class IllConditioned(DmuError, ArithmeticError):
    def __init__(self, message, condition=None):
        super().__init__(message)
        self.condition = condition


class EmptySupport(DmuError, ValueError):
    pass


class InvalidArcLength(DmuError, ValueError):
    pass


class Inconclusive(DmuError):
    """A finite trace that is neither clearly bounded nor clearly growing."""

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace


class MajorantViolated(DmuError, ValueError):
    pass


class AdmissibilityFailed(DmuError, ValueError):
    pass


class FitFailed(DmuError):
    pass


class KappaBounded(DmuError):
    pass


class NotConverged(DmuError):
    """Iterative solver stopped early; ``value`` holds the best iterate."""

    def __init__(self, message, value=None):
        super().__init__(message)
        self.value = value


class NonIntegrableLog(DmuError, ValueError):
    pass


class UndefinedBoundaryValue(DmuError, ValueError):
    pass


class ParseError(DmuError, ValueError):
    pass


class InvariantViolation(DmuError, ValueError):
    pass
