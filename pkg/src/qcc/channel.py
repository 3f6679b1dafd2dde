"""Binary asymmetric channel induced by the signalling protocol.

Alice's bit choice (couple / don't couple) shifts Bob's excitation
probability from q to p = q + |lambda_A lambda_B S2|; this module turns
(p, q) into guessing advantage and Shannon capacity.  The closed-form
capacity is checked against an independent concave-maximization oracle,
and the small-signal expansion against both.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .scenario import Scenario
from .signalling import s2_observable

__all__ = [
    "ChannelStats",
    "binary_entropy",
    "channel_probs",
    "guess_success",
    "capacity_closed",
    "capacity_bruteforce",
    "capacity_bruteforce_grid",
    "optimal_input_prior",
    "capacity_expansion",
    "channel_stats",
]

_LN2 = math.log(2.0)


@dataclass(frozen=True)
class ChannelStats:
    """Channel parameters and capacities for one scenario.

    p is P(Bob reads 1 | Alice sent 1), q is P(1 | 0); orientation is
    normalized so q <= p (the sign of the signal is absorbed into the
    bit mapping).  All capacities in bits per use.
    """

    p: float
    q: float
    success: float
    capacity_closed: float
    capacity_expansion: float
    capacity_bruteforce: float


def binary_entropy(x: float) -> float:
    """h(x) = -x log2 x - (1-x) log2(1-x), with h(0) = h(1) = 0."""
    x = float(x)
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"binary_entropy needs x in [0, 1], got {x!r}")
    if x == 0.0 or x == 1.0:
        return 0.0
    return -x * math.log2(x) - (1.0 - x) * math.log2(1.0 - x)


def _entropy_arr(x: np.ndarray) -> np.ndarray:
    """binary_entropy for arrays, 0 log 0 handled without warnings."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    inner = (x > 0.0) & (x < 1.0)
    xi = x[inner]
    out[inner] = -xi * np.log2(xi) - (1.0 - xi) * np.log2(1.0 - xi)
    return out


def _entropy_diff(p: float, q: float) -> float:
    """h(p) - h(q), evaluated without cancellation when p is near q.

    Writing p = q + d and splitting the logarithms gives
    d log2((1-q)/q) - [p log1p(d/q) + (1-p) log1p(-d/(1-q))]/ln2,
    every term O(d); used whenever the log1p arguments are small.
    """
    d = p - q
    if d == 0.0:
        return 0.0
    interior = min(p, 1.0 - p, q, 1.0 - q)
    if interior > 0.0 and abs(d) <= 0.5 * interior:
        return (
            d * math.log2((1.0 - q) / q)
            - (
                p * math.log1p(d / q)
                + (1.0 - p) * math.log1p(-d / (1.0 - q))
            ) / _LN2
        )
    return binary_entropy(p) - binary_entropy(q)


def capacity_closed(p: float, q: float) -> float:
    """Shannon capacity of the binary asymmetric channel, closed form.

    C = [-q h(p) + p h(q)]/(q - p) + log2(1 + 2^E) with
    E = (h(p) - h(q))/(q - p); equivalently -qE - h(q) + log2(1 + 2^E),
    which is the algebra used here (it avoids the 1/(q-p) blow-up of the
    first term's two pieces separately).  p = q returns 0; nearly
    degenerate channels use the quadratic limit
    (p - q)^2 / (8 ln2 q(1-q)).

    Absolute accuracy is at the 1e-15 level; once |p - q| drops below
    ~1e-5 the true capacity sinks toward that floor, so only absolute
    (not relative) accuracy survives there.  Capacity is provably
    nonnegative, so noise-level negatives are clamped to 0.
    """
    for name, v in (("p", p), ("q", q)):
        if not 0.0 <= v <= 1.0:
            raise ValueError(f"{name} must be in [0, 1], got {v!r}")
    if p == q:
        return 0.0
    d = p - q
    if abs(d) < 1e-9 and min(q, 1.0 - q) > 1e-6:
        return d * d / (8.0 * _LN2 * q * (1.0 - q))
    e = _entropy_diff(p, q) / (q - p)
    # log2(1 + 2^e) without overflow for |e| up to ~1/|q-p|
    softplus = max(e, 0.0) + math.log2(1.0 + 2.0 ** (-abs(e)))
    return max(-q * e - binary_entropy(q) + softplus, 0.0)


def _mutual_information(pi, p, q):
    """I(pi) = h(pi p + (1-pi) q) - pi h(p) - (1-pi) h(q), vectorized."""
    y = pi * p + (1.0 - pi) * q
    return _entropy_arr(y) - pi * _entropy_arr(p) - (1.0 - pi) * _entropy_arr(q)


def _ternary_search(p, q, pi_tol: float):
    """Maximize the concave I(pi) over [0, 1] elementwise; returns the
    bracket midpoint.  Works on equal-shape arrays (at least 1-d)."""
    p = np.atleast_1d(np.asarray(p, dtype=float))
    q = np.atleast_1d(np.asarray(q, dtype=float))
    a = np.zeros(np.broadcast(p, q).shape)
    b = np.ones_like(a)
    while float(np.max(b - a)) > pi_tol:
        m1 = a + (b - a) / 3.0
        m2 = b - (b - a) / 3.0
        lower_wins = _mutual_information(m1, p, q) < _mutual_information(m2, p, q)
        a = np.where(lower_wins, m1, a)
        b = np.where(lower_wins, b, m2)
    return 0.5 * (a + b)


def _bruteforce_pi_tol(p, q, tol):
    """Bracket width giving I-error <= tol via the curvature bound
    |I''| = (p-q)^2 / (ln2 y(1-y)), y(1-y) >= min(p(1-p), q(1-q))."""
    m = np.minimum(p * (1.0 - p), q * (1.0 - q))
    d2 = np.maximum((p - q) ** 2, 1e-300)
    width = np.sqrt(8.0 * _LN2 * tol * m / d2)
    return float(np.min(np.clip(width, 1e-12, 1e-4)))


def capacity_bruteforce(p: float, q: float, tol: float = 1e-10) -> float:
    """Capacity by direct concave maximization over the input prior.

    Independent of :func:`capacity_closed`: ternary search on the mutual
    information I(pi), which is concave in pi.  The bracket is shrunk
    until the quadratic-curvature error bound sits below ``tol``.
    """
    for name, v in (("p", p), ("q", q)):
        if not 0.0 <= v <= 1.0:
            raise ValueError(f"{name} must be in [0, 1], got {v!r}")
    if p == q:
        return 0.0
    pi = _ternary_search(p, q, _bruteforce_pi_tol(p, q, tol))
    value = _mutual_information(pi, np.atleast_1d(p), np.atleast_1d(q))
    return max(float(value.ravel()[0]), 0.0)


def capacity_bruteforce_grid(p, q, tol: float = 1e-10) -> np.ndarray:
    """Vectorized :func:`capacity_bruteforce` over arrays of (p, q)."""
    p = np.atleast_1d(np.asarray(p, dtype=float))
    q = np.atleast_1d(np.asarray(q, dtype=float))
    pi = _ternary_search(p, q, _bruteforce_pi_tol(p, q, tol))
    return np.maximum(_mutual_information(pi, p, q), 0.0)


def optimal_input_prior(p: float, q: float, tol: float = 1e-8) -> float:
    """Input prior achieving the bruteforce capacity (bracket midpoint)."""
    if p == q:
        return 0.5
    pi = _ternary_search(p, q, tol)
    return float(pi.ravel()[0])


def guess_success(p: float, q: float) -> float:
    """Single-shot guessing probability 1/2 p + 1/2 (1 - q) = 1/2 + (p-q)/2."""
    if p < q:
        raise ValueError(f"orientation requires p >= q, got p={p!r} < q={q!r}")
    return 0.5 + 0.5 * (p - q)


def capacity_expansion(
    s2_value: float,
    alpha_B: complex,
    beta_B: complex,
    lambda_A: float = 1.0,
    lambda_B: float = 1.0,
) -> float:
    """Small-signal capacity expansion
    lambda_A^2 lambda_B^2 (2/ln2) (S2 / (4 |alpha_B||beta_B|))^2."""
    mod = abs(alpha_B) * abs(beta_B)
    if mod == 0.0:
        raise ValueError(
            "capacity expansion undefined when Bob starts in an energy "
            "eigenstate (|alpha_B||beta_B| = 0)"
        )
    return (
        (lambda_A * lambda_B) ** 2
        * (2.0 / _LN2)
        * (s2_value / (4.0 * mod)) ** 2
    )


def channel_probs(
    s: Scenario,
    lambda_product: float,
    noise_R: float,
    tol: Optional[float] = None,
) -> Tuple[float, float]:
    """(p, q) for the scenario: q = |alpha_B|^2 + R,
    p = q + |lambda_product * S2(T2)|.

    Out-of-range probabilities are an error, never a silent clamp: the
    leading-order expressions have left their regime of validity there.
    """
    if noise_R < 0:
        raise ValueError(f"noise_R must be >= 0, got {noise_R!r}")
    q = abs(s.bob.state.alpha) ** 2 + noise_R
    if q > 1.0:
        raise ValueError(
            f"q = |alpha_B|^2 + R = {q!r} exceeds 1; noise_R too large"
        )
    s2_val = s2_observable(s, tol=tol).value
    p = q + abs(lambda_product * s2_val)
    if p > 1.0:
        raise ValueError(
            f"p = q + |lambda s2| = {p!r} exceeds 1; the leading-order "
            "channel description breaks down for this coupling"
        )
    return p, q


def channel_stats(
    s: Scenario,
    lambda_product: float,
    noise_R: float = 0.0,
    tol: Optional[float] = None,
) -> ChannelStats:
    """Full channel characterization for one scenario."""
    if noise_R < 0:
        raise ValueError(f"noise_R must be >= 0, got {noise_R!r}")
    q = abs(s.bob.state.alpha) ** 2 + noise_R
    if q > 1.0:
        raise ValueError(
            f"q = |alpha_B|^2 + R = {q!r} exceeds 1; noise_R too large"
        )
    s2_val = s2_observable(s, tol=tol).value
    p = q + abs(lambda_product * s2_val)
    if p > 1.0:
        raise ValueError(
            f"p = q + |lambda s2| = {p!r} exceeds 1; the leading-order "
            "channel description breaks down for this coupling"
        )
    return ChannelStats(
        p=p,
        q=q,
        success=guess_success(p, q),
        capacity_closed=capacity_closed(p, q),
        capacity_expansion=capacity_expansion(
            s2_val, s.bob.state.alpha, s.bob.state.beta, lambda_product, 1.0
        ),
        capacity_bruteforce=capacity_bruteforce(p, q),
    )
