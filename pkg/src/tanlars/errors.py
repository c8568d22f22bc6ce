"""Exception types raised by the library."""


class TanlarsError(Exception):
    """Base class for all library-specific errors."""


class ZeroVarianceColumn(TanlarsError):
    """A design column is constant and cannot be normalized."""


class RankDeficient(TanlarsError):
    """The normalized design matrix does not have full column rank."""


class ParseError(TanlarsError):
    """A CSV file could not be parsed as a numeric dataset."""


class DomainError(TanlarsError):
    """A response vector violates the domain required by its family."""


class NotConverged(TanlarsError):
    """An iterative solver exhausted its iteration budget."""


class Separation(TanlarsError):
    """The maximum-likelihood estimate diverged (no finite optimum)."""


class NumericalBreakdown(TanlarsError):
    """An active-set factorization failed, signalling near-collinearity."""
