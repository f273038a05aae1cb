"""Exception types shared across the library."""


class FFDAError(Exception):
    """Base class for all library errors."""


class DomainError(FFDAError):
    """Operation outside its mathematical domain (zero inversion, ...)."""


class FieldMismatch(FFDAError):
    """Operands belong to different base fields."""


class PrecisionExhausted(FFDAError):
    """A comparison or coefficient read would depend on uncertified data.

    Raised instead of guessing: every certified answer is exact.
    """


class BudgetExceeded(FFDAError):
    """An enumeration would exceed the configured node/count budget."""


class SingularMatrix(FFDAError):
    """Rows are linearly dependent over the fraction field."""


class GuardTooSmall(FFDAError):
    """Truncation guard too small to certify a shortest-vector value."""


class EpsAboveRho(FFDAError):
    """The nondivergence bound requires eps <= rho."""


class GoldenMismatch(FFDAError):
    """A recorded golden run no longer reproduces byte-for-byte."""
