"""P*-integer classification by direct sieving.

A modulus k is a P*(alpha, beta, gamma, iota)-integer when the primes
in [alpha, beta] put at least gamma members into every invertible
residue class mod k and their total count is exactly
gamma*phi(k) + iota.  Surplus primes may sit in any class; the total is
the only constraint on them.  The classical P-integer notion (the first
phi(k) primes not dividing k form a complete reduced residue system) is
the special case alpha=2, beta=p_{phi+omega}, gamma=1, iota=omega(k).

Conventions: the modulus must be >= 2 (mod-1 classes are degenerate),
and iota = 0 is accepted even though the definition reads iota > 0,
since degenerate instances are useful in tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, NamedTuple

import numpy as np

from .errors import DomainError, SieveBudgetError
from .primes import PrimeCache


@dataclass(frozen=True)
class PStarParams:
    k: int
    alpha: int
    beta: int
    gamma: int = 1
    iota: int = 0

    def __post_init__(self):
        if self.k < 2:
            raise DomainError(f"modulus must be >= 2, got k={self.k}")
        if not (1 <= self.alpha <= self.beta):
            raise DomainError(
                f"need 1 <= alpha <= beta, got [{self.alpha}, {self.beta}]")
        if self.gamma < 1:
            raise DomainError(f"gamma must be >= 1, got {self.gamma}")
        if self.iota < 0:
            raise DomainError(f"iota must be >= 0, got {self.iota}")


@dataclass(frozen=True)
class ResidueTally:
    k: int
    counts: np.ndarray
    total: int
    invertible_min: int


@dataclass(frozen=True)
class PStarVerdict:
    is_pstar: bool
    tally: ResidueTally
    deficit_classes: tuple[int, ...]
    total_mismatch: int


class BalanceCheck(NamedTuple):
    holds: bool
    a1: int
    a2: int


class ClassicalCheck(NamedTuple):
    is_p_integer: bool
    witness: dict[int, int]


def invertible_residues(k: int) -> np.ndarray:
    if k < 2:
        raise DomainError(f"modulus must be >= 2, got k={k}")
    r = np.arange(k)
    return np.flatnonzero(np.gcd(r, k) == 1)


def residue_tally(cache: PrimeCache, k: int, alpha: int, beta: int) -> ResidueTally:
    """Per-class prime counts over [alpha, beta]: counts[r] = #{p = r mod k}."""
    if k < 2:
        raise DomainError(f"modulus must be >= 2, got k={k}")
    if not (1 <= alpha <= beta):
        raise DomainError(f"need 1 <= alpha <= beta, got [{alpha}, {beta}]")
    primes = cache.primes_in(alpha, beta)
    counts = np.bincount(primes % k, minlength=k).astype(np.int64)
    inv = invertible_residues(k)
    return ResidueTally(k, counts, int(counts.sum()), int(counts[inv].min()))


def is_pstar(cache: PrimeCache, params: PStarParams) -> PStarVerdict:
    tally = residue_tally(cache, params.k, params.alpha, params.beta)
    phi = cache.profile(params.k).phi
    inv = invertible_residues(params.k)
    deficits = tuple(int(r) for r in inv if tally.counts[r] < params.gamma)
    mismatch = tally.total - (params.gamma * phi + params.iota)
    return PStarVerdict(not deficits and mismatch == 0, tally, deficits, mismatch)


def prime_stream(cache: PrimeCache, k: int):
    """All primes in ascending order; fetch chunks sized for modulus k."""
    lo = 2
    hi = min(cache.limit, max(1024, 8 * k))
    while True:
        for p in cache.primes_in(lo, hi).tolist():
            yield p
        if hi >= cache.limit:
            raise SieveBudgetError(
                f"modulus k={k} needs primes beyond the ceiling {cache.limit}")
        lo, hi = hi + 1, min(cache.limit, hi * 4)


def is_classical_p_integer(cache: PrimeCache, k: int) -> ClassicalCheck:
    """First phi(k) primes not dividing k hit each reduced class exactly once.

    The witness maps residue -> prime for the classes placed before the
    verdict was reached (complete exactly when the verdict is positive).
    """
    if k < 2:
        raise DomainError(f"modulus must be >= 2, got k={k}")
    phi = cache.profile(k).phi
    seen = bytearray(k)
    witness: dict[int, int] = {}
    placed = 0
    for p in prime_stream(cache, k):
        if k % p == 0:
            continue
        r = p % k
        if seen[r]:
            return ClassicalCheck(False, witness)
        seen[r] = 1
        witness[r] = p
        placed += 1
        if placed == phi:
            return ClassicalCheck(True, witness)
    raise AssertionError("unreachable")


def is_block_p_integer(cache: PrimeCache, k: int) -> bool:
    """Block form: among the first phi(k)+omega(k) primes, every invertible
    class occurs exactly once and the rest are divisors of k in distinct
    non-invertible classes.

    Unlike the classical form, this assumes all prime divisors of k show
    up inside the block; compare_classical_forms reports any split.
    """
    prof = cache.profile(k)
    n = prof.phi + prof.omega
    seen_inv = bytearray(k)
    seen_div = bytearray(k)
    inv_hits = div_hits = 0
    taken = 0
    for p in prime_stream(cache, k):
        if taken == n:
            break
        taken += 1
        r = p % k
        if k % p == 0:
            if seen_div[r]:
                return False
            seen_div[r] = 1
            div_hits += 1
        else:
            if seen_inv[r]:
                return False
            seen_inv[r] = 1
            inv_hits += 1
    return inv_hits == prof.phi and div_hits == prof.omega


def compare_classical_forms(cache: PrimeCache, k: int) -> tuple[bool, bool]:
    """(classical, block) verdicts side by side; callers report disagreement."""
    return is_classical_p_integer(cache, k).is_p_integer, is_block_p_integer(cache, k)


def balance_condition(cache: PrimeCache, k: int, alpha: int, beta: int,
                      iota: int) -> BalanceCheck:
    """Necessary condition: the lower-half residue count a1 (residues r with
    2r <= k) and upper-half count a2 differ by at most iota."""
    tally = residue_tally(cache, k, alpha, beta)
    r = np.arange(k)
    a1 = int(tally.counts[2 * r <= k].sum())
    a2 = tally.total - a1
    return BalanceCheck(abs(a1 - a2) <= iota, a1, a2)


def classical_params(cache: PrimeCache, k: int) -> PStarParams:
    """Embed the classical form: alpha=2, beta=p_{phi+omega}, gamma=1, iota=omega."""
    prof = cache.profile(k)
    beta = cache.nth_prime(prof.phi + prof.omega)
    return PStarParams(k, 2, beta, 1, prof.omega)


def search(cache: PrimeCache, k_values: Iterable[int],
           rule: Callable[[int], PStarParams]) -> list[tuple[int, PStarVerdict]]:
    """Classify every k in ascending order under rule(k); budget errors carry k."""
    out = []
    for k in sorted(set(int(k) for k in k_values)):
        try:
            out.append((k, is_pstar(cache, rule(k))))
        except SieveBudgetError as exc:
            raise SieveBudgetError(f"search stopped at k={k}: {exc}") from exc
    return out


def totient_table(n: int) -> np.ndarray:
    """phi(0..n) by the sieve of multiplicative corrections."""
    phi = np.arange(n + 1, dtype=np.int64)
    for p in range(2, n + 1):
        if phi[p] == p:  # untouched so far means p is prime
            phi[p::p] -= phi[p::p] // p
    return phi


def classical_census(cache: PrimeCache, k_max: int) -> list[int]:
    """All classical P-integers with 2 <= k <= k_max, by exhaustive scan.

    Fast filter: primes below k have themselves as residue, so they never
    collide; the first possible repeat involves a prime above k.  For each
    k a window of wrapped residues (primes just above k, all within the
    first phi(k) coprime primes) is checked against a table of small
    primes and against itself.  A hit refutes k.  The filter window almost
    always refutes within 256 draws; the few survivors are settled by the
    exact scalar walk.
    """
    if k_max < 2:
        return []
    phi_tab = totient_table(k_max)
    # p_n < n (log n + log log n) for n >= 6 covers the worst case phi(k)+omega(k)
    n_need = k_max + 16
    bound = int(n_need * (math.log(n_need) + math.log(math.log(n_need)))) + 10
    primes = cache.primes_in(2, min(bound, cache.limit))
    if len(primes) < n_need:
        raise SieveBudgetError(
            f"census to {k_max} wants ~{n_need} primes, ceiling {cache.limit} is too low")
    prime_flags = np.zeros(k_max + 1, dtype=bool)
    prime_flags[primes[primes <= k_max]] = True
    ks = np.arange(2, k_max + 1)
    above_k = np.searchsorted(primes, ks, side="right")
    above_2k = np.searchsorted(primes, 2 * ks, side="right")
    hits = []
    for k in range(2, k_max + 1):
        # Two windows of wrapped residues: primes just above k (residue
        # p - k, opposite parity to k) and just above 2k (residue p - 2k,
        # same parity).  Between them the small-prime table applies to
        # both parities of k.  Windows are clipped to index < phi(k) so
        # every sampled draw is one of the first phi coprime primes.
        phi = int(phi_tab[k])
        s1, s2 = int(above_k[k - 2]), int(above_2k[k - 2])
        parts = []
        for s, width in ((s1, 96), (s2, 96)):
            e = min(s + width, phi)
            if s < e:
                chunk = primes[s:e]
                parts.append((chunk % k)[k % chunk != 0])
        if parts:
            r = np.concatenate(parts) if len(parts) > 1 else parts[0]
            if np.any(prime_flags[r]):
                continue  # repeat against a small coprime prime
            if r.size > 1 and np.any(np.diff(np.sort(r)) == 0):
                continue  # repeat among the wrapped residues
        if is_classical_p_integer(cache, k).is_p_integer:
            hits.append(k)
    return hits
