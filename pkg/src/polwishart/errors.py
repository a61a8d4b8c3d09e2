"""Exception hierarchy shared by all modules."""


class PolWishartError(Exception):
    """Base class for every error raised by this package."""


class DimensionMismatch(PolWishartError, ValueError):
    pass


class DomainError(PolWishartError, ValueError):
    """Argument outside the domain where a formula is defined."""


class NotHermitian(PolWishartError, ValueError):
    pass


class NotPositiveDefinite(PolWishartError, ValueError):
    pass


class NonFiniteEntry(PolWishartError, ValueError):
    pass


class NoRootInBracket(PolWishartError, RuntimeError):
    """The ML score for the number of looks does not change sign."""


class UnsupportedKind(PolWishartError, ValueError):
    pass


class InsufficientSample(PolWishartError, ValueError):
    pass


class FormatError(PolWishartError, ValueError):
    """Malformed input file; the message carries a line number or byte offset."""
