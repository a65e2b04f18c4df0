"""Error taxonomy shared by every module.

Each class carries a stable ``code`` (its class name) so reports can record
rejections in machine-readable form.
"""


class HyperdualError(Exception):
    @property
    def code(self) -> str:
        return type(self).__name__


class NomeOutOfDomain(HyperdualError, ValueError):
    pass


class UnsupportedRegime(HyperdualError, ValueError):
    pass


class PoleProximity(HyperdualError, ArithmeticError):
    pass


class TruncationNotConverged(HyperdualError, ArithmeticError):
    pass


class QuadratureNotConverged(HyperdualError, ArithmeticError):
    pass


class TailNotDecaying(HyperdualError, ArithmeticError):
    pass


class SumNotConverged(HyperdualError, ArithmeticError):
    pass


class DimensionTooLarge(HyperdualError, ValueError):
    pass


class ConstraintViolated(HyperdualError, ValueError):
    pass


class NonInvertible(HyperdualError, ZeroDivisionError):
    pass


class NonTerminating(HyperdualError, ValueError):
    pass


class OrderTooHigh(HyperdualError, ValueError):
    pass


class DomainTooTight(HyperdualError, RuntimeError):
    pass


class UnknownIdentity(HyperdualError, KeyError):
    def __str__(self):
        return Exception.__str__(self)
