"""Explicit analytic estimates used by the block-counting bounds.

Every formula here is an effective (fully explicit, non-asymptotic)
estimate:

* ``epsilon(x)``: envelope for the Chebyshev theta deviation,
  |theta(x) - x| < x * epsilon(x) for x >= 149, with
  epsilon(x) = sqrt(8 L / (17 pi eta)) * exp(-sqrt(L / eta)),
  L = log x and eta = 6.455.  The envelope increases up to
  x = e^eta ~ 636 and decreases strictly afterwards.

* ``dusart_excess_lower(k)``: lower bound for 2 pi(k/2) - pi(k) valid
  for k >= 2,953,652,287, built from Dusart-style two-sided pi bounds:
  k/log(k/2) * (1 + 1/log(k/2) + 2/log^2(k/2))
  - k/log k * (1 + 1/log k + 2.334/log^2 k).

* ``wallis_bounds(S)``: the Wallis product sandwich
  sqrt((2/pi)(2S+1)) <= prod_{s<=S} (2s+1)/(2s) <= (2S+1)/sqrt(S pi).

* ``phi_lower_bound(k)``: k / (1.7811 loglog k + 2.51/loglog k) <= phi(k)
  for k >= 3.

* ``li(x)``: offset logarithmic integral int_2^x dt/log t, evaluated
  through the exponential integral (li(x) = Ei(log x) - Ei(log 2)).
  ``li_quadrature`` recomputes it by adaptive quadrature and serves as
  the independent cross-check.

* ``pi_via_theta_identity``: pi(x) = theta(x)/log x
  + int_2^x theta(t)/(t log^2 t) dt.  theta is a step function, so the
  integral is a finite sum of closed-form pieces
  (int dt/(t log^2 t) = -1/log t); the evaluation is exact up to
  rounding, no quadrature error.

All evaluators accept floats or numpy arrays and preserve the input
dtype, so passing np.longdouble re-runs a formula in 80-bit precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.special import expi

from .errors import DomainError

ETA = 6.455
EPSILON_MIN_X = 149.0
DUSART_MIN_K = 2_953_652_287
_LI_OFFSET = float(expi(math.log(2.0)))


@dataclass(frozen=True)
class EpsilonParams:
    """Shape constants of the theta envelope; defaults are the proven ones."""

    eta: float = ETA
    min_x: float = EPSILON_MIN_X


DEFAULT_EPSILON = EpsilonParams()


def epsilon(x, params: EpsilonParams = DEFAULT_EPSILON):
    """Envelope epsilon(x) with |theta(x) - x| < x epsilon(x), x >= params.min_x."""
    arr = np.asarray(x)
    if np.any(arr < params.min_x):
        raise DomainError(f"epsilon needs x >= {params.min_x}")
    L = np.log(arr)
    val = np.sqrt(8.0 * L / (17.0 * np.pi * params.eta)) * np.exp(-np.sqrt(L / params.eta))
    return val[()] if val.ndim == 0 else val


def li(x):
    """Offset logarithmic integral int_2^x dt/log t; li(2) = 0."""
    arr = np.asarray(x, dtype=np.float64)
    if np.any(arr < 2.0):
        raise DomainError("li is defined here for x >= 2")
    val = expi(np.log(arr)) - _LI_OFFSET
    return float(val) if arr.ndim == 0 else val


def li_quadrature(x: float, epsrel: float = 1e-12) -> float:
    """li by adaptive quadrature of e^u/u over u = log t; cross-check path."""
    if x < 2.0:
        raise DomainError("li is defined here for x >= 2")
    val, _ = quad(lambda u: math.exp(u) / u, math.log(2.0), math.log(x),
                  epsabs=0.0, epsrel=epsrel, limit=200)
    return val


def dusart_excess_lower(k, checked: bool = True):
    """Proven lower bound for 2 pi(k/2) - pi(k); valid for k >= DUSART_MIN_K.

    With checked=False the formula is evaluated outside its proven range
    (exploratory use only).
    """
    arr = np.asarray(k)
    if checked and np.any(arr < DUSART_MIN_K):
        raise DomainError(f"bound is proven only for k >= {DUSART_MIN_K}")
    if np.any(arr <= 2):
        raise DomainError("needs k > 2 for both logarithms to be positive")
    lh = np.log(0.5 * arr)
    lk = np.log(arr)
    val = arr / lh * (1.0 + 1.0 / lh + 2.0 / lh**2) \
        - arr / lk * (1.0 + 1.0 / lk + 2.334 / lk**2)
    return val[()] if val.ndim == 0 else val


def wallis_bounds(S: int) -> tuple[float, float, float]:
    """(lower, product, upper) for prod_{s=1..S} (2s+1)/(2s)."""
    if S < 1:
        raise DomainError(f"Wallis sandwich needs S >= 1, got {S}")
    s = np.arange(1, S + 1, dtype=np.float64)
    product = float(np.prod((2.0 * s + 1.0) / (2.0 * s)))
    lower = math.sqrt((2.0 / math.pi) * (2.0 * S + 1.0))
    upper = (2.0 * S + 1.0) / math.sqrt(S * math.pi)
    return lower, product, upper


def wallis_sweep(S_max: int, dtype=np.float64):
    """Vectorised sandwich for every S = 1..S_max; returns three arrays."""
    if S_max < 1:
        raise DomainError(f"Wallis sandwich needs S >= 1, got {S_max}")
    s = np.arange(1, S_max + 1, dtype=dtype)
    products = np.cumprod((2 * s + 1) / (2 * s))
    lowers = np.sqrt((2.0 / np.pi) * (2 * s + 1))
    uppers = (2 * s + 1) / np.sqrt(s * np.pi)
    return lowers, products, uppers


def phi_lower_bound(k):
    """Effective totient lower bound k/(1.7811 loglog k + 2.51/loglog k), k >= 3."""
    arr = np.asarray(k, dtype=np.float64)
    if np.any(arr < 3):
        raise DomainError("totient bound needs k >= 3")
    ll = np.log(np.log(arr))
    val = arr / (1.7811 * ll + 2.51 / ll)
    return val[()] if val.ndim == 0 else val


def pi_via_theta_identity(cache, x: float, quadrature_step: float | None = None) -> float:
    """Evaluate pi(x) from theta via the partial-summation identity.

    Default mode sums the integral exactly over the prime breakpoints.
    Passing quadrature_step switches to a midpoint rule with that step,
    which is only approximate and exists for cross-checking.
    """
    if x < 2.0:
        raise DomainError("identity needs x >= 2")
    m = math.floor(x)
    primes = cache.primes_in(2, m).astype(np.float64)
    logs = np.log(primes)
    cum_theta = np.cumsum(logs)
    theta_x = float(cum_theta[-1])
    if quadrature_step is None:
        inv = 1.0 / logs
        right = np.empty_like(inv)
        right[:-1] = inv[1:]
        right[-1] = 1.0 / math.log(x) if x > primes[-1] else inv[-1]
        integral = float(np.sum(cum_theta * (inv - right)))
    else:
        if quadrature_step <= 0:
            raise DomainError("quadrature_step must be positive")
        edges = np.append(np.arange(2.0, x, quadrature_step), x)
        mids = 0.5 * (edges[:-1] + edges[1:])
        widths = np.diff(edges)
        integral = float(sum(cache.theta(t) / (t * math.log(t) ** 2) * w
                             for t, w in zip(mids, widths)))
    return theta_x / math.log(x) + integral
