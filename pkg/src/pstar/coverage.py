"""Monte-Carlo calibration of the residue-coverage heuristic.

Treat each prime as landing in a uniformly random invertible residue class
mod k.  After n = round(C * phi(k) * log k) draws, what is the chance some
class is still empty?  The first-order prediction is phi(k) * k^(-C): each
class is empty with probability (1 - 1/phi)^n ~ k^(-C) and a union bound
sums over classes.  This module measures that failure probability by
simulation, computes it exactly by inclusion-exclusion when phi is small,
and exposes the interval-length estimate the heuristic implies.

Trials are seeded individually as (seed, trial-index), so results do not
depend on execution order or worker count; the generator algorithm is
recorded in every result for reproducibility.

The "real-primes" mode replays the same coverage question against the
actual first n primes coprime to k instead of synthetic draws.  Primes are
not independent uniform draws, so no agreement with the prediction is
asserted anywhere; the mode exists to expose the gap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .primes import PrimeCache
from .classify import prime_stream

__all__ = [
    "SimConfig",
    "SimResult",
    "draw_count",
    "predicted_failure",
    "exact_failure_probability",
    "beta_estimate",
    "simulate_coverage",
]

GENERATOR_ID = "numpy-PCG64"

MODES = ("synthetic", "real-primes")


def _totient(k: int) -> int:
    phi, rem, p = k, k, 2
    while p * p <= rem:
        if rem % p == 0:
            phi -= phi // p
            while rem % p == 0:
                rem //= p
        p += 1 if p == 2 else 2
    if rem > 1:
        phi -= phi // rem
    return phi


@dataclass(frozen=True)
class SimConfig:
    """One simulation setup; immutable so a result can cite it verbatim."""

    k: int
    coverage_exponent: float
    trials: int
    seed: int
    mode: str = "synthetic"

    def __post_init__(self):
        if self.k < 3:
            raise DomainError(f"modulus must be >= 3, got {self.k}")
        if self.coverage_exponent <= 0:
            raise DomainError("coverage exponent must be positive")
        if self.trials < 1:
            raise DomainError(f"trials must be >= 1, got {self.trials}")
        if self.mode not in MODES:
            raise DomainError(f"mode must be one of {MODES}, got {self.mode!r}")


@dataclass(frozen=True)
class SimResult:
    config: SimConfig
    phi: int
    draws: int
    empirical: float
    stderr: float
    predicted: float

    def to_json(self) -> dict:
        cfg = self.config
        return {
            "k": cfg.k,
            "C": cfg.coverage_exponent,
            "f": self.draws,
            "trials": cfg.trials,
            "empirical": self.empirical,
            "stderr": self.stderr,
            "predicted": self.predicted,
            "mode": cfg.mode,
            "seed": cfg.seed,
            "generator": GENERATOR_ID,
        }


def draw_count(k: int, coverage_exponent: float) -> int:
    """Number of draws the heuristic allots: round(C * phi(k) * log k)."""
    if k < 3:
        raise DomainError(f"modulus must be >= 3, got {k}")
    return round(coverage_exponent * _totient(k) * math.log(k))


def predicted_failure(k: int, coverage_exponent: float) -> float:
    """First-order predicted failure probability min(1, phi(k) * k^-C)."""
    if k < 3:
        raise DomainError(f"modulus must be >= 3, got {k}")
    if coverage_exponent <= 0:
        raise DomainError("coverage exponent must be positive")
    return min(1.0, _totient(k) * k ** -coverage_exponent)


def exact_failure_probability(phi: int, draws: int) -> float:
    """Exact P(some class empty) after uniform draws, by inclusion-exclusion.

    Sum over j >= 1 of (-1)^(j+1) C(phi, j) (1 - j/phi)^draws, carried out
    in integer arithmetic so the alternating sum cancels exactly; the only
    rounding is the final division.  Cost grows with phi * draws digits, so
    this is meant for the small phi (<= a few hundred) the tests exercise.
    """
    if phi < 1 or draws < 0:
        raise DomainError(f"need phi >= 1 and draws >= 0, got ({phi}, {draws})")
    acc = 0
    for j in range(1, phi + 1):
        term = math.comb(phi, j) * (phi - j) ** draws
        acc += -term if j % 2 == 0 else term
    return min(1.0, max(0.0, acc / phi**draws))


def beta_estimate(k: int) -> float:
    """Interval length the heuristic needs: phi log k * log(phi log k)."""
    if k < 3:
        raise DomainError(f"modulus must be >= 3, got {k}")
    budget = _totient(k) * math.log(k)
    return budget * math.log(budget)


def simulate_coverage(
    cfg: SimConfig, cache: PrimeCache | None = None
) -> SimResult:
    """Measured probability that some invertible class stays empty.

    Synthetic mode draws class indices uniformly; real-primes mode reduces
    the first `draws` primes coprime to k (needs a cache large enough to
    supply them).  Returns the failure fraction with its binomial standard
    error and the first-order prediction.
    """
    phi = _totient(cfg.k)
    draws = round(cfg.coverage_exponent * phi * math.log(cfg.k))
    predicted = predicted_failure(cfg.k, cfg.coverage_exponent)

    if cfg.mode == "real-primes":
        empirical = 1.0 if _real_primes_fail(cfg.k, phi, draws, cache) else 0.0
        return SimResult(cfg, phi, draws, empirical, 0.0, predicted)

    failures = 0
    for trial in range(cfg.trials):
        rng = np.random.default_rng((cfg.seed, trial))
        if draws == 0:
            failures += 1 if phi > 0 else 0
            continue
        hits = np.bincount(rng.integers(0, phi, size=draws), minlength=phi)
        if int(hits.min()) == 0:
            failures += 1
    empirical = failures / cfg.trials
    stderr = math.sqrt(empirical * (1.0 - empirical) / cfg.trials)
    return SimResult(cfg, phi, draws, empirical, stderr, predicted)


def _real_primes_fail(
    k: int, phi: int, draws: int, cache: PrimeCache | None
) -> bool:
    if cache is None:
        raise DomainError("real-primes mode needs a prime cache")
    seen = bytearray(k)
    covered = 0
    remaining = draws
    for p in prime_stream(cache, k):
        if remaining <= 0:
            break
        if k % p == 0:
            continue
        remaining -= 1
        r = p % k
        if not seen[r]:
            seen[r] = 1
            covered += 1
    return covered < phi
