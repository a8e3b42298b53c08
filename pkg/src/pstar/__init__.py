"""Residue coverage of primes in intervals.

Classifies P*-type moduli (every reduced residue class mod k hit by the
primes in an interval, with controlled multiplicity), counts primes by
half-block position, and evaluates the explicit analytic bounds that
certify when the lower residue half must outnumber the upper half.
"""

__version__ = "0.1.0"

from .errors import (
    CacheFormatError,
    DomainError,
    EmptyRangeError,
    SieveBudgetError,
    ThresholdNotFoundError,
    UnsupportedCaseError,
)
from .primes import ArithmeticProfile, PrimeCache, build_cache, load_cache
from .classify import (
    PStarParams,
    PStarVerdict,
    classical_census,
    is_classical_p_integer,
    is_pstar,
)
from .blocks import IntervalDecomposition, classify_case, half_counts_direct
from .bounds import (
    BoundConfig,
    MarginReport,
    REFERENCE_CONFIG,
    effective_threshold,
    final_inequality,
)
from .coverage import SimConfig, SimResult, simulate_coverage
from .semigroup import GaussianSemigroup, NaturalSemigroup

__all__ = [
    "ArithmeticProfile",
    "BoundConfig",
    "CacheFormatError",
    "DomainError",
    "EmptyRangeError",
    "GaussianSemigroup",
    "IntervalDecomposition",
    "MarginReport",
    "NaturalSemigroup",
    "PStarParams",
    "PStarVerdict",
    "PrimeCache",
    "REFERENCE_CONFIG",
    "SieveBudgetError",
    "SimConfig",
    "SimResult",
    "ThresholdNotFoundError",
    "UnsupportedCaseError",
    "build_cache",
    "classical_census",
    "classify_case",
    "effective_threshold",
    "final_inequality",
    "half_counts_direct",
    "is_classical_p_integer",
    "is_pstar",
    "load_cache",
    "simulate_coverage",
    "__version__",
]
