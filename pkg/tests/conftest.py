"""Shared sieve fixtures.

Three cache sizes: a tiny one for fast unit tests and hypothesis shrinking,
the 16M workhorse that covers the millionth prime, and a lazy 1e9 cache
that only the deep block-excess checks request.  All are session scoped;
the big one costs a few seconds once.
"""

import pytest

from pstar.primes import build_cache


@pytest.fixture(scope="session")
def cache_small():
    return build_cache(2_000)


@pytest.fixture(scope="session")
def cache_main():
    return build_cache(16_000_000)


@pytest.fixture(scope="session")
def cache_1g():
    return build_cache(1_000_000_000)
