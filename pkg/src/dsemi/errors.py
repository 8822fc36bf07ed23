"""Exception hierarchy shared by all modules."""


class DSemiError(Exception):
    """Base class for every error raised by the package."""


class NonConvergent(DSemiError, ArithmeticError):
    pass


class DivergentTerm(DSemiError, ZeroDivisionError):
    pass


class Degenerate(DSemiError, ValueError):
    pass


class DegenerateParameters(Degenerate):
    pass


class GenericityViolated(Degenerate):
    pass


class FixedPointSingular(DSemiError, ZeroDivisionError):
    pass


class PoleCollision(DSemiError, ZeroDivisionError):
    pass


class PoleAtBoundary(PoleCollision):
    pass


class ZeroDenominator(DSemiError, ZeroDivisionError):
    pass


class ZeroWeight(ZeroDenominator):
    pass


class WnZero(ZeroDenominator):
    pass


class RnZero(ZeroDenominator):
    pass


class SingularHankel(DSemiError, ArithmeticError):
    pass


class NotPolynomial(DSemiError, ArithmeticError):
    pass


class LambdaAtFixedPoint(Degenerate):
    pass


class BranchDegenerate(Degenerate):
    pass


class RemovableSingularity(DSemiError, ArithmeticError):
    pass


class HardSingularity(DSemiError, ZeroDivisionError):
    pass


class ConfigInvalid(DSemiError, ValueError):
    pass
