"""Exception hierarchy shared by every module."""


class FrameError(Exception):
    """Base class for all errors raised by symapprox."""


class DimensionError(FrameError, ValueError):
    """Operands have incompatible shapes."""


class DomainError(FrameError, ValueError):
    """An argument lies outside the domain of the operation."""


class InfeasibleComponentError(DomainError):
    """The requested component index is not in the index set.

    ``lower`` and ``upper`` are the bounds of the index set (possibly
    infinite) and ``bound`` names the one that was violated.
    """

    def __init__(self, k, lower, upper, lower_name="-min(n1, n3)", upper_name="n2"):
        self.k = k
        self.lower = lower
        self.upper = upper
        if k < lower:
            self.bound = "lower"
            msg = f"k={k} is below the lower bound {lower_name} = {lower}"
        else:
            self.bound = "upper"
            msg = f"k={k} exceeds the upper bound {upper_name} = {upper}"
        super().__init__(msg)


class PreconditionError(FrameError, ValueError):
    """A documented precondition was not met (e.g. operators do not commute)."""


class DegenerateFrameError(FrameError, ValueError):
    """The synthesis operator is identically zero."""


class NumericFailure(FrameError, ArithmeticError):
    """An underlying numerical routine failed (e.g. SVD did not converge)."""


class NumericalInstabilityError(NumericFailure):
    """Two routes to the same quantity disagree beyond tolerance."""


class ComponentMismatchError(FrameError):
    """Two Parseval frames lie in different connected components."""

    def __init__(self, kx, ky):
        self.kx = kx
        self.ky = ky
        super().__init__(
            f"frames lie in different components (k={kx} vs k={ky}); "
            "components are at distance >= 1 from each other"
        )


class ResourceLimitError(FrameError):
    """Input exceeds a hard size cap (brute-force enumeration)."""
