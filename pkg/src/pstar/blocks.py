"""Half-block decomposition of prime counts over an integer interval.

The interval [alpha, beta] is tiled by length-k blocks [j*k, (j+1)*k).  Each
block splits at its midpoint j*k + k/2 into a first half (residues r with
2r <= k) and a second half.  Counting primes per half, block by block, turns
the question "does the first half of [alpha, beta] hold at least as many
primes as the second half" into a sum of per-block excesses plus two boundary
corrections M1 (first-half mass of the two partial blocks) and M2
(second-half mass).

Exactness is the whole point here: every count below is an integer computed
by binary search over an explicitly fetched prime table, and the identity

    first_half_count - second_half_count == (M1 - M2) + sum_j excess(j)

holds exactly, not approximately.  The analytic machinery in
:mod:`pstar.bounds` lower-bounds the same quantities; this module is the
oracle it is checked against.

Boundary conventions
--------------------
Endpoint membership is easy to get wrong by one, so the conventions are
pinned here and verified against direct residue counts in the test suite:

==========  =======================================================
quantity    convention
==========  =======================================================
half point  pi((j + 1/2)k) means pi evaluated at floor((2j+1)k/2),
            computed in integer arithmetic (no float rounding).
first half  primes p in [j*k, (j+1/2)k], i.e. pi(half) - pi(j*k - 1).
second half primes p in ((j+1/2)k, (j+1)k), i.e.
            pi((j+1)k - 1) - pi(half).  For j >= 1 the right endpoint
            (j+1)k is composite, so closing the interval there would
            count the same primes; the open form is used uniformly.
lead block  in cases (i)/(ii) the second-half boundary term starts at
            the half point of block lam: pi(x_{lam+1} - 1) - pi(half).
final block in case (i) the first-half tail is pi(beta) - pi(Lam*k - 1).
==========  =======================================================

An alternative "literal" convention (closed second halves, closed block
right endpoints) is kept for comparison via ``boundary_terms(...,
convention="literal")``; it differs only when a block endpoint is prime,
which for j >= 1 never happens, and it does not define the degenerate
single-block case.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .primes import PrimeCache

__all__ = [
    "IntervalDecomposition",
    "BlockCounts",
    "classify_case",
    "half_block_count",
    "half_block_excess",
    "boundary_terms",
    "half_counts_formula",
    "half_counts_direct",
    "excess_formula",
    "block_counts",
    "block_rows",
]

CASE_LABELS = ("i", "ii", "iii", "iv")


@dataclass(frozen=True)
class IntervalDecomposition:
    """How [alpha, beta] sits inside the length-k block tiling.

    ``lam`` and ``big_lam`` are the block indices of alpha and beta
    (floor division), ``case_label`` records which of the four
    endpoint-position cases applies:

    * ``"i"``   alpha in the first half of its block, beta in the first half
    * ``"ii"``  alpha first half, beta second half
    * ``"iii"`` alpha second half, beta first half
    * ``"iv"``  both in second halves
    """

    k: int
    alpha: int
    beta: int
    lam: int
    big_lam: int
    case_label: str

    @property
    def inner_blocks(self) -> range:
        """Indices j of blocks fully contained in (alpha, beta)."""
        return range(self.lam + 1, self.big_lam)

    @property
    def single_block(self) -> bool:
        return self.lam == self.big_lam


def classify_case(k: int, alpha: int, beta: int) -> IntervalDecomposition:
    """Locate alpha and beta in the block tiling and name the case.

    An endpoint sits in the "first half" of block j when its offset t from
    j*k satisfies 2t <= k.  Raises :class:`DomainError` for k < 2 or an
    empty interval.
    """
    if k < 2:
        raise DomainError(f"block length k must be >= 2, got {k}")
    if not (1 <= alpha <= beta):
        raise DomainError(f"need 1 <= alpha <= beta, got alpha={alpha}, beta={beta}")
    lam, big_lam = alpha // k, beta // k
    alpha_first = 2 * (alpha - lam * k) <= k
    beta_first = 2 * (beta - big_lam * k) <= k
    if alpha_first:
        label = "i" if beta_first else "ii"
    else:
        label = "iii" if beta_first else "iv"
    if lam == big_lam and label == "iii":
        # Within one block alpha <= beta forces offset(alpha) <= offset(beta),
        # so "alpha in second half, beta in first half" cannot happen.
        raise DomainError(
            f"inconsistent offsets for alpha={alpha}, beta={beta}, k={k}"
        )
    return IntervalDecomposition(k, alpha, beta, lam, big_lam, label)


def _half_point(k: int, j: int) -> int:
    # floor((j + 1/2) * k) without any float arithmetic
    return ((2 * j + 1) * k) // 2


def half_block_count(cache: PrimeCache, k: int, j: int, half: int) -> int:
    """Number of primes in one half of block j.

    ``half=1`` counts [j*k, (j+1/2)k]; ``half=2`` counts ((j+1/2)k, (j+1)k).
    """
    if half not in (1, 2):
        raise DomainError(f"half must be 1 or 2, got {half}")
    if j < 0:
        raise DomainError(f"block index must be >= 0, got {j}")
    mid = cache.pi(_half_point(k, j))
    if half == 1:
        return mid - cache.pi(j * k - 1)
    return cache.pi((j + 1) * k - 1) - mid


def half_block_excess(cache: PrimeCache, k: int, j: int) -> int:
    """First-half minus second-half prime count of block j."""
    lo = cache.pi(j * k - 1)
    mid = cache.pi(_half_point(k, j))
    hi = cache.pi((j + 1) * k - 1)
    return 2 * mid - lo - hi


class _LocalCounter:
    """pi restricted to a fetched prime window, exact for differences.

    Counts are relative to the window start, so only differences of counts
    are meaningful; every formula in this module uses differences.
    """

    def __init__(self, cache: PrimeCache, lo: int, hi: int):
        self.primes = cache.primes_in(max(2, lo), hi)

    def count(self, x) -> int:
        return int(np.searchsorted(self.primes, x, side="right"))

    def counts(self, xs: np.ndarray) -> np.ndarray:
        return np.searchsorted(self.primes, xs, side="right")


def boundary_terms(
    cache: PrimeCache,
    decomp: IntervalDecomposition,
    convention: str = "resolved",
) -> tuple[int, int]:
    """Boundary corrections (M1, M2) for the partial blocks at alpha and beta.

    M1 collects first-half primes of the lead block (from alpha) and the
    final block (to beta); M2 the second-half primes of the same two blocks.
    Which pieces appear depends on the case label.  ``convention="literal"``
    closes the second halves at the block right endpoint instead; it is only
    defined for lam < big_lam.
    """
    if convention not in ("resolved", "literal"):
        raise DomainError(f"unknown convention {convention!r}")
    k, alpha, beta = decomp.k, decomp.alpha, decomp.beta
    lam, big_lam, label = decomp.lam, decomp.big_lam, decomp.case_label
    ctr = _LocalCounter(cache, alpha, (big_lam + 1) * k)
    cnt = ctr.count
    half_lam = _half_point(k, lam)
    half_big = _half_point(k, big_lam)

    if decomp.single_block:
        if convention == "literal":
            raise DomainError(
                "literal convention does not define the single-block case"
            )
        if label == "i":
            return cnt(beta) - cnt(alpha - 1), 0
        if label == "ii":
            return cnt(half_lam) - cnt(alpha - 1), cnt(beta) - cnt(half_lam)
        return 0, cnt(beta) - cnt(alpha - 1)  # case iv

    # Right endpoint of a second half: open at (j+1)k for "resolved",
    # closed for "literal".  They agree whenever (j+1)k is composite.
    def second_upper(j: int) -> int:
        edge = (j + 1) * k
        return cnt(edge - 1) if convention == "resolved" else cnt(edge)

    lead_first = cnt(half_lam) - cnt(alpha - 1)
    lead_second = second_upper(lam) - cnt(half_lam)
    lead_full = second_upper(lam) - cnt(alpha - 1)
    final_first_full = cnt(half_big) - cnt(big_lam * k - 1)
    final_tail = cnt(beta) - cnt(big_lam * k - 1)

    if label == "i":
        return lead_first + final_tail, lead_second
    if label == "ii":
        return lead_first + final_first_full, lead_second + cnt(beta) - cnt(half_big)
    if label == "iii":
        return final_tail, lead_full
    # case iv
    return final_first_full, lead_full + cnt(beta) - cnt(half_big)


def half_counts_formula(
    cache: PrimeCache, decomp: IntervalDecomposition
) -> tuple[int, int]:
    """Per-half prime counts of [alpha, beta] assembled from block pieces.

    Returns (first_half_count, second_half_count).  Inner blocks are summed
    with vectorised binary searches over a single fetched window; boundary
    blocks come from :func:`boundary_terms`.
    """
    k = decomp.k
    m1, m2 = boundary_terms(cache, decomp)
    a1, a2 = m1, m2
    js = np.arange(decomp.inner_blocks.start, decomp.inner_blocks.stop,
                   dtype=np.int64)
    if js.size:
        ctr = _LocalCounter(cache, int(js[0]) * k, int(js[-1] + 1) * k)
        lows = ctr.counts(js * k - 1)
        mids = ctr.counts((2 * js + 1) * k // 2)
        highs = ctr.counts((js + 1) * k - 1)
        a1 += int((mids - lows).sum())
        a2 += int((highs - mids).sum())
    return a1, a2


def half_counts_direct(
    cache: PrimeCache, k: int, alpha: int, beta: int
) -> tuple[int, int]:
    """Per-half prime counts by direct residue inspection (the oracle)."""
    if k < 2:
        raise DomainError(f"block length k must be >= 2, got {k}")
    if not (1 <= alpha <= beta):
        raise DomainError(f"need 1 <= alpha <= beta, got alpha={alpha}, beta={beta}")
    primes = cache.primes_in(alpha, beta)
    in_first = 2 * (primes % k) <= k
    a1 = int(np.count_nonzero(in_first))
    return a1, int(primes.size) - a1


def excess_formula(cache: PrimeCache, decomp: IntervalDecomposition) -> int:
    """First-half minus second-half count via the block decomposition."""
    a1, a2 = half_counts_formula(cache, decomp)
    return a1 - a2


@dataclass(frozen=True)
class BlockCounts:
    """Full diagnostic breakdown of a decomposed interval."""

    decomp: IntervalDecomposition
    m1: int
    m2: int
    inner_first: dict[int, int]
    inner_second: dict[int, int]
    first_total: int
    second_total: int

    @property
    def excess(self) -> int:
        return self.first_total - self.second_total


def block_counts(cache: PrimeCache, decomp: IntervalDecomposition) -> BlockCounts:
    k = decomp.k
    m1, m2 = boundary_terms(cache, decomp)
    inner_first: dict[int, int] = {}
    inner_second: dict[int, int] = {}
    for j in decomp.inner_blocks:
        inner_first[j] = half_block_count(cache, k, j, 1)
        inner_second[j] = half_block_count(cache, k, j, 2)
    total1 = m1 + sum(inner_first.values())
    total2 = m2 + sum(inner_second.values())
    return BlockCounts(decomp, m1, m2, inner_first, inner_second, total1, total2)


def block_rows(cache: PrimeCache, decomp: IntervalDecomposition) -> list[dict]:
    """Per-block rows (j, first, second, excess) for tabular output."""
    counts = block_counts(cache, decomp)
    rows = []
    for j in decomp.inner_blocks:
        e1, e2 = counts.inner_first[j], counts.inner_second[j]
        rows.append({"block": j, "first": e1, "second": e2, "excess": e1 - e2})
    return rows
