"""Exception types shared across the package."""

from __future__ import annotations


class CacforgeError(Exception):
    """Base class for all package-specific errors."""


class PatternError(CacforgeError):
    """Malformed transition pattern (bad width, symbol, or examined index)."""


class NoTransitionError(CacforgeError):
    """The examined wire holds, so a 50%-crossing delay is undefined."""


class BracketingError(CacforgeError):
    """The response never settled on the far side of the 50% level within
    the scan horizon; the closed form is considered divergent."""


class ClassificationInvalidError(CacforgeError):
    """Coupling ratio below the range where the class intervals are disjoint."""


class UnsupportedConstraintError(CacforgeError):
    """Constraint pair without a nontrivial codebook construction."""


class WidthError(CacforgeError):
    """Bus width outside the range supported by an operation."""


class MembershipError(CacforgeError):
    """Word offered to the codec is not a member of the codebook."""


class ConfigError(CacforgeError):
    """Bad or inconsistent run configuration."""


class GoldenMismatchError(CacforgeError):
    """Computed results disagree with the shipped golden tables."""
