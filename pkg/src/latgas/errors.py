"""Exception types."""


class LatgasError(Exception):
    """Base class for all package errors."""


class ModelError(LatgasError, ValueError):
    """Invalid model, hypergraph, or file content."""


class VanishingDenominator(LatgasError, ArithmeticError):
    """A partition function used as a denominator is (numerically) zero.

    ``path`` lists the recursive calls leading to the failure, outermost first,
    when raised from inside a recursion.
    """

    def __init__(self, message: str, path: tuple = ()):
        super().__init__(message)
        self.path = tuple(path)


class DepthGuardExceeded(LatgasError, RecursionError):
    pass


class MissingPotential(LatgasError):
    pass


class SupportTooSmall(LatgasError, ValueError):
    pass


class NoConvergence(LatgasError):
    def __init__(self, message: str, residuals: list[float] | None = None):
        super().__init__(message)
        self.residuals = list(residuals or [])


class EdgeNotIncident(LatgasError, ValueError):
    pass


class DegreeExceeded(LatgasError, ValueError):
    pass
