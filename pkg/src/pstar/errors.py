"""Exception types shared across the package.

The CLI maps these onto sysexits-style codes: DomainError -> 2,
SieveBudgetError -> 69.  Anything else is a bug and propagates.
"""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class SieveBudgetError(RuntimeError):
    """A query needs primes beyond the ceiling the cache was built for."""


class CacheFormatError(ValueError):
    """A persisted prime cache failed magic, version, or content validation."""


class UnsupportedCaseError(DomainError):
    """The requested bound only exists for boundary cases (i) and (ii)."""


class EmptyRangeError(DomainError):
    """The admissible block-index range for the threshold inequality is empty."""


class ThresholdNotFoundError(RuntimeError):
    """No threshold was certified within the search ceiling."""
