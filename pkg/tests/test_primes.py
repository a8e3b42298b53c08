"""Prime cache tests against an independent oracle (sympy) and known values."""

import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from pstar.errors import CacheFormatError, DomainError, SieveBudgetError
from pstar.primes import PrimeCache, build_cache, load_cache, simple_sieve

# Classical table values, e.g. Sloane A006880 / A006988.
PI_TABLE = {
    10: 4,
    100: 25,
    1_000: 168,
    10_000: 1_229,
    100_000: 9_592,
    1_000_000: 78_498,
}
MILLIONTH_PRIME = 15_485_863


def test_pi_table(cache_main):
    for x, expected in PI_TABLE.items():
        assert cache_main.pi(x) == expected


def test_pi_small_edges(cache_small):
    assert cache_small.pi(1) == 0
    assert cache_small.pi(2) == 1
    assert cache_small.pi(2.5) == 1
    assert cache_small.pi(3) == 2
    assert cache_small.pi(0) == 0
    assert cache_small.pi(-7) == 0


def test_simple_sieve_matches_sympy():
    got = simple_sieve(1_000)
    want = np.array(list(sympy.primerange(2, 1_001)))
    assert np.array_equal(got, want)


def test_primes_in_matches_sympy_windows(cache_main):
    rng = np.random.default_rng(7)
    for _ in range(25):
        lo = int(rng.integers(1, 2_000_000))
        hi = lo + int(rng.integers(0, 50_000))
        got = cache_main.primes_in(lo, hi)
        want = np.fromiter(sympy.primerange(lo, hi + 1), dtype=np.int64)
        assert np.array_equal(got, want), (lo, hi)


def test_theta_small_values(cache_small):
    # theta(10) = log(2*3*5*7)
    assert cache_small.theta(10) == pytest.approx(np.log(210.0), abs=1e-12)
    assert cache_small.theta(1) == 0.0


def test_theta_matches_sympy_sum(cache_small):
    rng = np.random.default_rng(11)
    for x in rng.integers(2, 2_000, size=12):
        want = float(sum(np.log(float(p)) for p in sympy.primerange(2, int(x) + 1)))
        assert cache_small.theta(int(x)) == pytest.approx(want, rel=1e-13)


def test_theta_extended_agrees_with_double(cache_main):
    for x in (149.0, 9_973.0, 1_234_567.0, 16_000_000.0):
        d = cache_main.theta(x)
        e = float(cache_main.theta_extended(x))
        assert abs(d - e) <= 1e-7 * max(1.0, abs(d))


def test_nth_prime(cache_main):
    assert cache_main.nth_prime(1) == 2
    assert cache_main.nth_prime(6) == 13
    assert cache_main.nth_prime(1_000_000) == MILLIONTH_PRIME
    with pytest.raises(DomainError):
        cache_main.nth_prime(0)


def test_prime_count_consistency(cache_small):
    assert cache_small.prime_count() == cache_small.pi(cache_small.limit)


@given(n=st.integers(min_value=1, max_value=300))
@settings(max_examples=60, deadline=None)
def test_nth_prime_pi_roundtrip(n):
    cache = _shared()
    p = cache.nth_prime(n)
    assert cache.pi(p) == n
    assert cache.pi(p - 1) == n - 1
    assert sympy.isprime(p)


_CACHE = None


def _shared() -> PrimeCache:
    # hypothesis cannot take pytest fixtures as arguments; keep one module cache
    global _CACHE
    if _CACHE is None:
        _CACHE = build_cache(10_000)
    return _CACHE


def test_profile_values(cache_small):
    prof = cache_small.profile(30)
    assert prof.phi == 8
    assert prof.omega == 3
    assert prof.prime_divisors == (2, 3, 5)
    assert cache_small.profile(7).phi == 6
    assert cache_small.profile(2).phi == 1


def test_budget_errors(cache_small):
    with pytest.raises(SieveBudgetError):
        cache_small.pi(cache_small.limit + 1)
    with pytest.raises(SieveBudgetError):
        cache_small.primes_in(1, 10_000)


def test_save_load_roundtrip(tmp_path, cache_small):
    path = tmp_path / "cache.bin"
    cache_small.save(path)
    loaded = load_cache(path)
    # the file stores primes only, so the ceiling reloads as the last prime
    assert loaded.limit == 1_999
    rng = np.random.default_rng(5)
    for x in rng.integers(2, loaded.limit + 1, size=100):
        x = int(x)
        assert loaded.pi(x) == cache_small.pi(x)
        assert loaded.theta(x) == pytest.approx(cache_small.theta(x), rel=1e-15)
    assert np.array_equal(loaded.primes_in(1, 1_999), cache_small.primes_in(1, 1_999))


def test_from_primes_explicit_ceiling(cache_small):
    primes = cache_small.primes_in(2, 1_999)
    extended = PrimeCache.from_primes(primes, limit=2_000)
    assert extended.limit == 2_000
    assert extended.pi(2_000) == cache_small.pi(2_000)
    with pytest.raises(CacheFormatError):
        PrimeCache.from_primes(primes, limit=1_998)


def test_load_rejects_foreign_file(tmp_path):
    path = tmp_path / "junk.bin"
    path.write_bytes(b"not a sieve cache at all, just filler bytes")
    with pytest.raises(CacheFormatError):
        load_cache(path)
    short = tmp_path / "short.bin"
    short.write_bytes(b"\x01\x02")
    with pytest.raises(CacheFormatError):
        load_cache(short)
