"""Exception types raised across the package."""


class LoglabError(Exception):
    """Base class for package errors."""


class DomainError(LoglabError, ValueError):
    """An argument lies outside the domain of a formula."""


class GridMismatchError(LoglabError, ValueError):
    """Two grid-bound objects live on different grids."""


class KindMismatchError(LoglabError, TypeError):
    """An operator of the wrong kind was supplied."""


class ZeroInputError(LoglabError, ValueError):
    """A nonzero function was required."""


class DegenerateProjectionError(LoglabError, ArithmeticError):
    """Nehari projection exponent fell outside the admissible range."""


class ConfigError(LoglabError, ValueError):
    """Invalid run configuration."""


class FourierTruncationWarning(UserWarning):
    """The truncated Fourier tail is not negligible."""
