"""Segmented odd-only prime sieve with packed storage and Chebyshev sums.

The cache sieves once up to a fixed ceiling and then answers pi(x),
theta(x) = sum of log p over primes p <= x, n-th prime, and interval
queries in O(segment) time via per-segment checkpoints.  Storage is a
bit per odd number (np.packbits, little bit order), so a ceiling of
10^9 costs about 62 MB.  Segment length is configurable and never
affects results; it only trades memory for checkpoint density.

theta checkpoints are accumulated with Kahan compensation so that the
running sum stays well below 1e-9 relative error at a 10^9 ceiling.
The cache is immutable after construction; concurrent readers are safe.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import CacheFormatError, DomainError, SieveBudgetError

DEFAULT_SEGMENT_ODDS = 1 << 20

_MAGIC = b"PSTC"
_VERSION = 1
_HEADER = struct.Struct("<4sIQ")  # magic, version, prime count


@dataclass(frozen=True)
class ArithmeticProfile:
    """Multiplicative profile of a modulus: totient, distinct prime divisors."""

    k: int
    phi: int
    omega: int
    prime_divisors: tuple[int, ...]


def simple_sieve(limit: int) -> np.ndarray:
    """Dense sieve of Eratosthenes; fine up to ~10^7, used for base primes."""
    if limit < 2:
        return np.empty(0, dtype=np.int64)
    is_prime = np.ones(limit + 1, dtype=bool)
    is_prime[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if is_prime[p]:
            is_prime[p * p :: p] = False
    return np.flatnonzero(is_prime).astype(np.int64)


class PrimeCache:
    """Immutable packed bitmap of odd primes up to ``limit`` (inclusive)."""

    def __init__(self, limit: int, packed: np.ndarray, segment_odds: int,
                 cum_pi: np.ndarray, cum_theta: np.ndarray):
        self.limit = limit
        self._packed = packed
        self._segment_odds = segment_odds
        self._cum_pi = cum_pi
        self._cum_theta = cum_theta
        self._n_indices = (limit - 1) // 2 + 1 if limit >= 1 else 0

    # -- construction ---------------------------------------------------

    @classmethod
    def build(cls, limit: int, segment_odds: int = DEFAULT_SEGMENT_ODDS) -> "PrimeCache":
        if limit < 2:
            raise DomainError(f"sieve ceiling must be >= 2, got {limit}")
        if segment_odds % 8 != 0 or segment_odds < 64:
            raise DomainError("segment_odds must be a multiple of 8, >= 64")
        n_indices = (limit - 1) // 2 + 1  # bit i <-> odd number 2i+1
        n_segments = (n_indices + segment_odds - 1) // segment_odds

        base = simple_sieve(math.isqrt(limit))
        base_odd = [int(p) for p in base if p > 2]

        packed = np.empty(((n_indices + 7) // 8,), dtype=np.uint8)
        cum_pi = np.zeros(n_segments + 1, dtype=np.int64)
        cum_theta = np.zeros(n_segments + 1, dtype=np.float64)
        theta_sum = 0.0
        theta_comp = 0.0  # Kahan carry across segments
        count = np.int64(0)  # set bits so far; the prime 2 is not a bit

        for seg in range(n_segments):
            i0 = seg * segment_odds
            i1 = min(i0 + segment_odds, n_indices)
            width = i1 - i0
            mask = np.ones(width, dtype=bool)
            if i0 == 0:
                mask[0] = False  # the number 1
            lo_val = 2 * i0 + 1
            hi_val = 2 * (i1 - 1) + 1
            for p in base_odd:
                pp = p * p
                if pp > hi_val:
                    break
                m = max(pp, ((lo_val + p - 1) // p) * p)
                if m % 2 == 0:
                    m += p
                mask[(m - 1) // 2 - i0 :: p] = False
            values = 2.0 * np.flatnonzero(mask) + (2 * i0 + 1)
            seg_theta = float(np.sum(np.log(values))) if values.size else 0.0
            y = seg_theta - theta_comp
            t = theta_sum + y
            theta_comp = (t - theta_sum) - y
            theta_sum = t
            count += mask.sum()
            cum_pi[seg + 1] = count
            cum_theta[seg + 1] = theta_sum
            if width % 8:
                mask = np.concatenate([mask, np.zeros(8 - width % 8, dtype=bool)])
            packed[i0 // 8 : i0 // 8 + len(mask) // 8] = np.packbits(mask, bitorder="little")

        return cls(limit, packed, segment_odds, cum_pi, cum_theta)

    @classmethod
    def from_primes(cls, primes: np.ndarray,
                    segment_odds: int = DEFAULT_SEGMENT_ODDS,
                    limit: int | None = None) -> "PrimeCache":
        """Rebuild a cache from an explicit prime list (e.g. a loaded file).

        ``limit`` is the ceiling the list was sieved through; it defaults to
        the largest listed prime, which silently shrinks the answerable
        range when the original ceiling was composite.
        """
        if primes.size == 0:
            raise CacheFormatError("prime list is empty")
        if primes[0] != 2 or np.any(np.diff(primes) <= 0):
            raise CacheFormatError("prime list must start at 2 and increase strictly")
        if limit is None:
            limit = int(primes[-1])
        elif limit < int(primes[-1]):
            raise CacheFormatError(
                f"ceiling {limit} is below the largest listed prime {primes[-1]}")
        n_indices = (limit - 1) // 2 + 1
        bits = np.zeros(n_indices, dtype=bool)
        bits[(primes[1:] - 1) // 2] = True
        n_segments = (n_indices + segment_odds - 1) // segment_odds
        cum_pi = np.zeros(n_segments + 1, dtype=np.int64)
        cum_theta = np.zeros(n_segments + 1, dtype=np.float64)
        theta_sum = 0.0
        theta_comp = 0.0
        count = np.int64(0)
        packed = np.empty(((n_indices + 7) // 8,), dtype=np.uint8)
        for seg in range(n_segments):
            i0 = seg * segment_odds
            i1 = min(i0 + segment_odds, n_indices)
            mask = bits[i0:i1]
            values = 2.0 * np.flatnonzero(mask) + (2 * i0 + 1)
            seg_theta = float(np.sum(np.log(values))) if values.size else 0.0
            y = seg_theta - theta_comp
            t = theta_sum + y
            theta_comp = (t - theta_sum) - y
            theta_sum = t
            count += mask.sum()
            cum_pi[seg + 1] = count
            cum_theta[seg + 1] = theta_sum
            if len(mask) % 8:
                mask = np.concatenate([mask, np.zeros(8 - len(mask) % 8, dtype=bool)])
            packed[i0 // 8 : i0 // 8 + len(mask) // 8] = np.packbits(mask, bitorder="little")
        return cls(limit, packed, segment_odds, cum_pi, cum_theta)

    # -- persistence -----------------------------------------------------

    def save(self, path: str | Path) -> None:
        """Write magic PSTC, version, count, then primes as little-endian u64.

        The file records the prime list only, so a reloaded cache's ceiling
        is the largest stored prime, not the original build ceiling.
        """
        n = self.pi(self.limit)
        with open(path, "wb") as fh:
            fh.write(_HEADER.pack(_MAGIC, _VERSION, n))
            step = 1 << 22
            for lo in range(2, self.limit + 1, step):
                chunk = self.primes_in(lo, min(lo + step - 1, self.limit))
                fh.write(chunk.astype("<u8").tobytes())

    @classmethod
    def load(cls, path: str | Path,
             segment_odds: int = DEFAULT_SEGMENT_ODDS) -> "PrimeCache":
        with open(path, "rb") as fh:
            header = fh.read(_HEADER.size)
            if len(header) < _HEADER.size:
                raise CacheFormatError("truncated cache header")
            magic, version, n = _HEADER.unpack(header)
            if magic != _MAGIC:
                raise CacheFormatError(f"bad magic {magic!r}, expected {_MAGIC!r}")
            if version != _VERSION:
                raise CacheFormatError(f"unsupported cache version {version}")
            primes = np.fromfile(fh, dtype="<u8", count=n)
        if primes.size != n:
            raise CacheFormatError(f"expected {n} primes, file holds {primes.size}")
        return cls.from_primes(primes.astype(np.int64), segment_odds)

    # -- queries ----------------------------------------------------------

    def _check_budget(self, x: float) -> None:
        if x > self.limit:
            raise SieveBudgetError(
                f"query at {x} exceeds the sieve ceiling {self.limit}")

    def _count_bits_through(self, idx: int) -> int:
        """Number of set bits with index <= idx."""
        if idx < 0:
            return 0
        seg = (idx + 1) // self._segment_odds
        base = int(self._cum_pi[seg])
        lo_byte = seg * self._segment_odds // 8
        stop = idx + 1
        hi_byte = stop // 8
        n = int(np.bitwise_count(self._packed[lo_byte:hi_byte]).sum()) if hi_byte > lo_byte else 0
        if stop % 8:
            n += int(np.bitwise_count(self._packed[hi_byte] & ((1 << (stop % 8)) - 1)))
        return base + n

    def pi(self, x: float) -> int:
        """Number of primes <= x; x may be any real."""
        m = math.floor(x)
        if m < 2:
            return 0
        self._check_budget(m)
        return 1 + self._count_bits_through((m - 1) // 2)

    def _odd_values_between(self, idx_lo: int, idx_hi: int) -> np.ndarray:
        """Values 2i+1 of set bits with idx_lo <= i <= idx_hi."""
        if idx_hi < idx_lo:
            return np.empty(0, dtype=np.int64)
        lo_byte = idx_lo // 8
        hi_byte = idx_hi // 8 + 1
        window = np.unpackbits(self._packed[lo_byte:hi_byte], bitorder="little")
        window = window[idx_lo - 8 * lo_byte : idx_lo - 8 * lo_byte + (idx_hi - idx_lo + 1)]
        return (2 * (np.flatnonzero(window) + idx_lo) + 1).astype(np.int64)

    def theta(self, x: float) -> float:
        """Chebyshev theta: sum of log p over primes p <= x."""
        m = math.floor(x)
        if m < 2:
            return 0.0
        self._check_budget(m)
        idx = (m - 1) // 2
        seg = (idx + 1) // self._segment_odds
        tail = self._odd_values_between(seg * self._segment_odds, idx)
        partial = float(np.sum(np.log(tail.astype(np.float64)))) if tail.size else 0.0
        return math.log(2.0) + float(self._cum_theta[seg]) + partial

    def theta_extended(self, x: float) -> np.longdouble:
        """theta(x) re-evaluated in 80-bit extended precision (slow path)."""
        m = math.floor(x)
        if m < 2:
            return np.longdouble(0.0)
        self._check_budget(m)
        total = np.log(np.longdouble(2.0))
        step = 1 << 22
        for lo in range(3, m + 1, step):
            chunk = self.primes_in(lo, min(lo + step - 1, m))
            if chunk.size:
                total += np.sum(np.log(chunk.astype(np.longdouble)))
        return total

    def primes_in(self, lo: float, hi: float) -> np.ndarray:
        """Ordered primes p with lo <= p <= hi, as int64."""
        lo = math.ceil(lo)
        hi = math.floor(hi)
        if hi < lo:
            return np.empty(0, dtype=np.int64)
        if lo < 0:
            raise DomainError(f"range start must be >= 0, got {lo}")
        self._check_budget(hi)
        head = [2] if lo <= 2 <= hi else []
        o = max(lo, 3)
        if o % 2 == 0:
            o += 1
        e = hi if hi % 2 else hi - 1
        odds = self._odd_values_between((o - 1) // 2, (e - 1) // 2) if e >= o else np.empty(0, dtype=np.int64)
        if head:
            return np.concatenate([np.array(head, dtype=np.int64), odds])
        return odds

    # spec'd range query name; identical to primes_in
    sieve_range = primes_in

    def nth_prime(self, n: int) -> int:
        if n < 1:
            raise DomainError(f"prime index must be >= 1, got {n}")
        if n == 1:
            return 2
        k = n - 1  # k-th set bit, 1-based
        total = 1 + int(self._cum_pi[-1])
        if n > total:
            raise SieveBudgetError(
                f"cache holds {total} primes, cannot answer nth_prime({n})")
        seg = int(np.searchsorted(self._cum_pi, k, side="left")) - 1
        i0 = seg * self._segment_odds
        i1 = min(i0 + self._segment_odds, self._n_indices)
        vals = self._odd_values_between(i0, i1 - 1)
        return int(vals[k - int(self._cum_pi[seg]) - 1])

    def prime_count(self) -> int:
        """Total primes below the ceiling (pi(limit))."""
        return 1 + int(self._cum_pi[-1])

    def profile(self, k: int) -> ArithmeticProfile:
        """Totient and distinct prime divisors of k by trial division.

        Valid for any k whose square root is within the ceiling, i.e. all
        k <= limit**2.
        """
        if k < 1:
            raise DomainError(f"profile needs k >= 1, got {k}")
        root = math.isqrt(k)
        if root > self.limit:
            raise SieveBudgetError(
                f"factoring {k} needs primes to {root}, ceiling is {self.limit}")
        divisors = []
        phi = k
        rem = k
        for p in map(int, self.primes_in(2, root)):
            if p * p > rem:
                break
            if rem % p == 0:
                divisors.append(p)
                phi = phi // p * (p - 1)
                while rem % p == 0:
                    rem //= p
        if rem > 1:
            divisors.append(rem)
            phi = phi // rem * (rem - 1)
        return ArithmeticProfile(k, phi, len(divisors), tuple(divisors))


def build_cache(limit: int, segment_odds: int = DEFAULT_SEGMENT_ODDS) -> PrimeCache:
    return PrimeCache.build(limit, segment_odds)


def load_cache(path: str | Path) -> PrimeCache:
    return PrimeCache.load(path)
