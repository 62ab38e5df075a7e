"""Exception types raised across the package."""


class LeontiefError(Exception):
    pass


class Unbounded(LeontiefError, ArithmeticError):
    """A trader has positive budget but every demanded good is free."""


class ZeroPrices(LeontiefError, ValueError):
    pass


class DimensionMismatch(LeontiefError, ValueError):
    pass


class IllPosed(LeontiefError, ValueError):
    pass


class TooLarge(LeontiefError, ValueError):
    pass


class CycleDetected(LeontiefError, RuntimeError):
    pass


class RangeViolation(LeontiefError, ValueError):
    pass


class ZeroUtilityBlock(LeontiefError, ValueError):
    pass


class ConstructionFailed(LeontiefError, RuntimeError):
    pass


class PreconditionViolated(LeontiefError, ValueError):
    pass


class SolverFailed(LeontiefError, RuntimeError):
    pass
