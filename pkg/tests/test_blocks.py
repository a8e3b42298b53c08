"""Block decomposition tests: case table, boundary terms, oracle equality."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pstar.blocks import (
    block_counts,
    block_rows,
    boundary_terms,
    classify_case,
    excess_formula,
    half_block_count,
    half_block_excess,
    half_counts_direct,
    half_counts_formula,
)
from pstar.errors import DomainError
from pstar.primes import build_cache


# -- case classification ---------------------------------------------------

def test_case_table_examples():
    d = classify_case(10, 23, 58)
    assert (d.lam, d.big_lam, d.case_label) == (2, 5, "ii")
    d = classify_case(10, 1, 10)
    assert (d.lam, d.big_lam, d.case_label) == (0, 1, "i")
    d = classify_case(10, 27, 69)
    assert (d.lam, d.big_lam, d.case_label) == (2, 6, "iv")


def test_case_boundary_offsets_are_exact():
    # offset exactly k/2 is a first half; one more is a second half
    assert classify_case(10, 25, 100).case_label == "i"
    assert classify_case(10, 26, 100).case_label == "iii"


def test_classify_rejects_bad_inputs():
    with pytest.raises(DomainError):
        classify_case(1, 3, 10)
    with pytest.raises(DomainError):
        classify_case(10, 11, 10)


def test_inner_blocks_range():
    d = classify_case(10, 23, 58)
    assert list(d.inner_blocks) == [3, 4]
    d = classify_case(10, 1, 10)
    assert list(d.inner_blocks) == []


@given(k=st.integers(2, 300), alpha=st.integers(1, 1_900), width=st.integers(0, 800))
@settings(max_examples=120, deadline=None)
def test_exactly_one_case_applies(k, alpha, width):
    beta = alpha + width
    d = classify_case(k, alpha, beta)
    assert d.case_label in ("i", "ii", "iii", "iv")
    assert d.lam * k <= alpha < (d.lam + 1) * k
    assert d.big_lam * k <= beta < (d.big_lam + 1) * k
    # the label is a function of the two half-block offsets alone
    first_a = 2 * (alpha - d.lam * k) <= k
    first_b = 2 * (beta - d.big_lam * k) <= k
    want = {(True, True): "i", (True, False): "ii",
            (False, True): "iii", (False, False): "iv"}[(first_a, first_b)]
    assert d.case_label == want


# -- half-block counts -----------------------------------------------------

def test_half_block_hand_values(cache_small):
    assert half_block_count(cache_small, 10, 1, 1) == 2  # 11, 13
    assert half_block_count(cache_small, 10, 1, 2) == 2  # 17, 19
    assert half_block_count(cache_small, 10, 0, 1) == 3  # 2, 3, 5
    assert half_block_excess(cache_small, 10, 1) == 0


def test_half_block_rejects_bad_args(cache_small):
    with pytest.raises(DomainError):
        half_block_count(cache_small, 10, 1, 3)
    with pytest.raises(DomainError):
        half_block_count(cache_small, 10, -1, 1)


# -- boundary terms --------------------------------------------------------

def test_boundary_terms_case_i_example(cache_small):
    d = classify_case(10, 1, 10)
    assert boundary_terms(cache_small, d) == (3, 1)


def test_boundary_terms_case_ii_example(cache_small):
    d = classify_case(10, 1, 18)
    assert boundary_terms(cache_small, d) == (5, 2)


def test_boundary_terms_degenerate_tail(cache_small):
    # beta exactly at a block edge: the tail contributes pi(beta)-pi(beta)=0
    d = classify_case(10, 1, 20)
    m1, m2 = boundary_terms(cache_small, d)
    assert (m1, m2) == (3, 1)


def test_literal_convention_diverges_at_prime_edge(cache_small):
    # with k = 7 the lead block's right edge is the prime 7 itself; closing
    # the half-open second half there double-counts it
    d = classify_case(7, 1, 10)
    resolved = boundary_terms(cache_small, d)
    literal = boundary_terms(cache_small, d, convention="literal")
    direct = half_counts_direct(cache_small, 7, 1, 10)
    assert resolved == (3, 1) == direct
    assert literal == (3, 2)
    assert literal != direct


def test_literal_convention_agrees_at_composite_edges(cache_small):
    d = classify_case(10, 3, 47)
    assert boundary_terms(cache_small, d) == boundary_terms(
        cache_small, d, convention="literal")


def test_unknown_convention_rejected(cache_small):
    d = classify_case(10, 1, 18)
    with pytest.raises(DomainError):
        boundary_terms(cache_small, d, convention="verbatim")


def test_literal_convention_undefined_within_one_block(cache_small):
    d = classify_case(10, 12, 17)
    assert d.single_block
    with pytest.raises(DomainError):
        boundary_terms(cache_small, d, convention="literal")


# -- assembled counts vs the oracle ----------------------------------------

def test_direct_hand_example(cache_small):
    assert half_counts_direct(cache_small, 5, 1, 25) == (5, 4)
    assert half_counts_direct(cache_small, 10, 24, 28) == (0, 0)


def test_formula_equals_direct_on_named_triples(cache_small):
    for k, a, b in ((10, 1, 30), (10, 23, 58), (10, 1, 100), (10, 27, 69),
                    (5, 1, 25), (2, 1, 1_999), (3, 7, 7)):
        d = classify_case(k, a, b)
        assert half_counts_formula(cache_small, d) == \
            half_counts_direct(cache_small, k, a, b), (k, a, b)


@given(k=st.integers(3, 400), alpha=st.integers(1, 1_999), width=st.integers(0, 1_200))
@settings(max_examples=150, deadline=None)
def test_formula_equals_direct_property(k, alpha, width):
    cache = _shared()
    # The formula fetches a window padded to the next multiple of k, so
    # keep beta at least one block length under the sieve ceiling.
    beta = min(alpha + width, cache.limit - 400)
    try:
        d = classify_case(k, alpha, beta)
    except DomainError:
        return
    a1, a2 = half_counts_formula(cache, d)
    assert (a1, a2) == half_counts_direct(cache, k, alpha, beta)
    assert a1 + a2 == cache.pi(beta) - cache.pi(alpha - 1)


_CACHE = None


def _shared():
    global _CACHE
    if _CACHE is None:
        _CACHE = build_cache(2_400)
    return _CACHE


def test_excess_hand_example(cache_small):
    # [1, 10] mod 10: A1 = {2,3,5}, A2 = {7}
    d = classify_case(10, 1, 10)
    assert excess_formula(cache_small, d) == 2


def test_block_counts_assembly(cache_small):
    d = classify_case(10, 23, 58)
    counts = block_counts(cache_small, d)
    assert counts.first_total + counts.second_total == \
        cache_small.pi(58) - cache_small.pi(22)
    assert counts.excess == counts.first_total - counts.second_total
    assert set(counts.inner_first) == {3, 4}
    rows = block_rows(cache_small, d)
    assert [r["block"] for r in rows] == [3, 4]


def test_seeded_triples_against_oracle(cache_main):
    # the wide-range version of the hypothesis property, frozen seed
    rng = np.random.default_rng(417)
    for _ in range(60):
        k = int(rng.integers(3, 5_001))
        alpha = int(rng.integers(1, 2_000_001))
        beta = int(rng.integers(alpha, 2_000_001))
        try:
            d = classify_case(k, alpha, beta)
        except DomainError:
            continue
        assert half_counts_formula(cache_main, d) == \
            half_counts_direct(cache_main, k, alpha, beta), (k, alpha, beta)
