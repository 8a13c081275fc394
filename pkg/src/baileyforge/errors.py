"""Exception types raised across the package."""


class BaileyForgeError(Exception):
    """Base class for all errors raised by this package."""


class NotAUnit(BaileyForgeError, ArithmeticError):
    """The lowest q-coefficient of a series is not of the form +-z^e."""


class InsufficientOrder(BaileyForgeError, ValueError):
    """A comparison or extraction was requested beyond a truncation order."""


class RelMismatch(BaileyForgeError, ValueError):
    """A Bailey pair and a conjugate pair have different relative parameters."""


class BoundViolation(BaileyForgeError, AssertionError):
    """A double-sum term below the truncation order lies beyond the certified bound."""


class UnknownIdentity(BaileyForgeError, KeyError):
    """No identity is registered under the requested id."""


class PreconditionError(BaileyForgeError, ValueError):
    """Arguments violate the documented preconditions of an operation."""
