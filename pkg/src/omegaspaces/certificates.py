"""Exact rational certificates for the detour pipeline constants.

Every inequality that the geometric construction leans on at every stage is
checked here once, in `fractions.Fraction` arithmetic, so the floating-point
pipeline never has to re-derive them.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

# Per-stage contraction of detour scales.
STAGE_RATIO = Fraction(1, 50)
# Follow-scale multiplier: stage n output (FOLLOW_FACTOR * ratio^n * lam * r_p)-follows its input.
FOLLOW_FACTOR = Fraction(5)


def geometric_tail(ratio: Fraction, first_exponent: int) -> Fraction:
    """Sum of ratio^k for k >= first_exponent, exactly."""
    if not 0 < ratio < 1:
        raise ValueError("ratio must lie in (0,1)")
    return ratio**first_exponent / (1 - ratio)


def drift_tail_bound() -> Fraction:
    """Total drift factor of the limit arc from the starting circle: 5 * sum_{k>=1} 50^-k."""
    return FOLLOW_FACTOR * geometric_tail(STAGE_RATIO, 1)


def drift_certificate() -> bool:
    """Drift stays within a ninth of the circle radius: 5/49 <= 1/9."""
    return drift_tail_bound() <= Fraction(1, 9)


def stage_tail_bound(n: int) -> Fraction:
    """Drift accumulated after stage n, in units of 50^-n * lam * r_p."""
    return FOLLOW_FACTOR * geometric_tail(STAGE_RATIO, n + 1) / STAGE_RATIO**n


def avoidance_certificate() -> bool:
    """Stage-n clearance beats the target ball: (1 - 1/10) >= 3/4."""
    return (1 - Fraction(1, 10)) >= Fraction(3, 4)


def avoidance_certificate_sharp() -> bool:
    """Same clearance with the exact tail 5/49 in place of the rounded 1/10."""
    return (1 - stage_tail_bound(1)) >= Fraction(3, 4)


def follow_schedule_ok(s: Fraction, big_s: Fraction, delta: Fraction) -> bool:
    """Quasi-arc limit schedule constraint: delta <= min(s/(4+2S), 1/10)."""
    return delta <= min(s / (4 + 2 * big_s), Fraction(1, 10))


@dataclass(frozen=True)
class GaugeBound:
    """Neighborhood bound for a geodesic with divergence profile f.

    R is the least sampled argument with f(R) >= K^2 + K, and
    D = K*C*f(R) + K*f(R) + K*C + C; quasi-geodesics with the given
    constants stay within R + D of the geodesic.
    """

    R: object
    D: object
    bound: object


class ProfileRangeError(ValueError):
    """The divergence profile never clears the required threshold."""


def gauge_bound(profile, K, C) -> GaugeBound:
    """Evaluate the neighborhood bound exactly on a sampled divergence profile.

    `profile` is a sequence of (R, f(R)) pairs with f nondecreasing. Inputs
    may be ints, Fractions or floats; arithmetic stays in the input types, so
    integer/rational grids come back exact.
    """
    if K < 1:
        raise ValueError("K must be >= 1")
    if C < 0:
        raise ValueError("C must be >= 0")
    pairs = sorted(profile)
    if not pairs:
        raise ProfileRangeError("empty divergence profile")
    threshold = K * K + K
    for r, fr in pairs:
        if fr >= threshold:
            d = K * C * fr + K * fr + K * C + C
            return GaugeBound(R=r, D=d, bound=r + d)
    raise ProfileRangeError(
        f"profile tops out at f={pairs[-1][1]} < required threshold K^2+K={threshold}"
    )
