"""Exception hierarchy shared by every kstab module."""

from __future__ import annotations

from fractions import Fraction


class KStabError(Exception):
    """Base class for all errors raised by kstab."""


class EmptyFamily(KStabError, ValueError):
    pass


class DivergentPenalty(KStabError, ArithmeticError):
    """The envelope's tail slope ``s`` has ``s * (s - 1) != 0``."""

    def __init__(self, slope) -> None:
        self.slope = Fraction(slope)
        super().__init__(f"penalty integral diverges: tail slope {self.slope}")


class InternalConsistencyError(KStabError, AssertionError):
    """Two independent evaluation routes disagreed."""


# --- support validation ---------------------------------------------------


class SupportError(KStabError, ValueError):
    """Invalid polynomial input; the CLI maps these to exit code 2."""


class PolynomialSyntaxError(SupportError):
    def __init__(self, message: str, position: int) -> None:
        self.position = position
        super().__init__(f"{message} at position {position}")


class SchemaError(SupportError):
    pass


class NotHomogeneous(SupportError):
    pass


class VanishingCoefficient(SupportError):
    pass


class DivisibleByVariable(SupportError):
    def __init__(self, k: int) -> None:
        self.variable = k
        super().__init__(f"DivisibleByVariable({k}): every monomial contains Z{k}")


# --- weights ---------------------------------------------------------------


class WeightError(KStabError, ValueError):
    """Bad weight vector (length or trace); the CLI maps these to exit code 3."""


class DimensionMismatch(WeightError):
    pass


class NonZeroTrace(WeightError):
    pass


class NotInvariant(KStabError, ValueError):
    def __init__(self, weights) -> None:
        self.weights = tuple(weights)
        super().__init__("weight vector does not preserve F: monomial weights are not constant")


class CombinatorialBudgetExceeded(KStabError, RuntimeError):
    def __init__(self, count: int, limit: int) -> None:
        self.count = count
        self.limit = limit
        super().__init__(f"{count} constraint subsets exceed the budget of {limit}")
