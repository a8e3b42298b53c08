"""Coverage-simulation tests: exact oracle, calibration, determinism."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pstar.coverage import (
    GENERATOR_ID,
    SimConfig,
    beta_estimate,
    draw_count,
    exact_failure_probability,
    predicted_failure,
    simulate_coverage,
)
from pstar.errors import DomainError


def test_draw_count_formula():
    assert draw_count(1_009, 2.0) == 13_944
    assert draw_count(1_009, 0.5) == 3_486
    assert draw_count(3, 1.0) == round(2 * math.log(3))


def test_predicted_failure_union_bound():
    assert predicted_failure(1_009, 0.5) == 1.0  # clamped
    assert predicted_failure(1_009, 2.0) == pytest.approx(1_008 / 1_009**2, rel=1e-12)


def test_exact_probability_hand_cases():
    # one draw cannot cover two classes; two draws miss one half the time
    assert exact_failure_probability(2, 1) == 1.0
    assert exact_failure_probability(2, 2) == 0.5
    assert exact_failure_probability(1, 1) == 0.0
    assert exact_failure_probability(3, 1) == 1.0


@given(phi=st.integers(1, 40), draws=st.integers(1, 200))
@settings(max_examples=120, deadline=None)
def test_exact_probability_is_a_probability(phi, draws):
    p = exact_failure_probability(phi, draws)
    assert 0.0 <= p <= 1.0
    # one more draw can only help coverage
    assert exact_failure_probability(phi, draws + 1) <= p + 1e-12


def test_exact_probability_against_enumeration():
    # phi = 3, 4 draws: count assignments leaving a class empty
    phi, draws = 3, 4
    total = phi ** draws
    fails = sum(1 for v in range(total)
                if len({(v // phi**i) % phi for i in range(draws)}) < phi)
    assert exact_failure_probability(phi, draws) == pytest.approx(
        fails / total, rel=1e-12)


def test_simulation_is_reproducible():
    cfg = SimConfig(k=101, coverage_exponent=1.0, trials=2_000, seed=42)
    a = simulate_coverage(cfg)
    b = simulate_coverage(cfg)
    assert a.empirical == b.empirical
    assert a.draws == b.draws
    c = simulate_coverage(SimConfig(k=101, coverage_exponent=1.0,
                                    trials=2_000, seed=43))
    assert c.empirical != a.empirical  # same knobs, fresh stream


def test_simulation_matches_exact_oracle():
    for k in (7, 25):
        cfg = SimConfig(k=k, coverage_exponent=1.0, trials=10_000, seed=7)
        res = simulate_coverage(cfg)
        exact = exact_failure_probability(res.phi, res.draws)
        se = max(res.stderr, math.sqrt(exact * (1.0 - exact) / cfg.trials))
        assert abs(res.empirical - exact) <= 3.0 * se, k


def test_failure_rate_falls_with_exponent():
    lo = simulate_coverage(SimConfig(k=101, coverage_exponent=0.5,
                                     trials=2_000, seed=11))
    hi = simulate_coverage(SimConfig(k=101, coverage_exponent=2.0,
                                     trials=2_000, seed=11))
    assert lo.empirical > hi.empirical


def test_real_primes_mode_is_deterministic(cache_main):
    cfg = SimConfig(k=1_009, coverage_exponent=2.0, trials=3,
                    seed=1, mode="real-primes")
    res = simulate_coverage(cfg, cache_main)
    assert res.draws == 13_944
    assert res.empirical in (0.0, 1.0)  # one deterministic outcome repeated
    assert res.empirical == 0.0  # the first 13944 coprime primes cover mod 1009
    assert res.stderr == 0.0


def test_real_primes_mode_needs_cache():
    cfg = SimConfig(k=1_009, coverage_exponent=2.0, trials=1, seed=0,
                    mode="real-primes")
    with pytest.raises(DomainError):
        simulate_coverage(cfg)


def test_config_validation():
    with pytest.raises(DomainError):
        SimConfig(k=2, coverage_exponent=1.0, trials=10, seed=0)
    with pytest.raises(DomainError):
        SimConfig(k=7, coverage_exponent=0.0, trials=10, seed=0)
    with pytest.raises(DomainError):
        SimConfig(k=7, coverage_exponent=1.0, trials=0, seed=0)
    with pytest.raises(DomainError):
        SimConfig(k=7, coverage_exponent=1.0, trials=10, seed=0, mode="surreal")


def test_result_json_shape():
    cfg = SimConfig(k=11, coverage_exponent=1.0, trials=100, seed=5)
    payload = simulate_coverage(cfg).to_json()
    assert payload["generator"] == GENERATOR_ID == "numpy-PCG64"
    assert payload["k"] == 11
    assert payload["trials"] == 100
    assert set(payload) >= {"k", "C", "f", "trials", "empirical", "stderr",
                            "predicted", "mode", "seed", "generator"}


def test_beta_estimate_grows():
    assert beta_estimate(1_009) > beta_estimate(101) > 0
