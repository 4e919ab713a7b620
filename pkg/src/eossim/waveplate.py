"""Wave-plate factor P(theta) and the coefficient triple it induces.

The ellipsometry phase factor is P(theta) = sqrt(-cos(theta))
+ i*sqrt(2)*cos(theta/2), defined for cos(theta) <= 0.  Two such factors
weight the vacuum and source contributions of the two-beam signal through

    p_vac     = Im[P(theta1)] * Im[P(theta2)]
    p_s_prime = Im[P(theta1) * P(theta2)]
    p_s_dprime = Im[P(theta1) * conj(P(theta2))]

These are computed from the exact closed form; they feed sign-sensitive
difference signals, so no lookup tables are involved.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

TWO_PI = 2.0 * math.pi

# cos(pi/2) is ~6e-17 in floats; tolerate that much spill over the domain edge.
_COS_TOL = 1e-9


class WavePlateDomainError(ValueError):
    """Angle outside [pi/2, 3*pi/2] (mod 2*pi), where cos(theta) > 0."""


@dataclass(frozen=True)
class WavePlateCoeffs:
    """Raw factors P(theta1), P(theta2) and their three real combinations."""

    theta1: float
    theta2: float
    p1: complex
    p2: complex
    p_vac: float
    p_s_prime: float
    p_s_dprime: float


def normalize_angle(theta: float) -> float:
    """Reduce an angle to the canonical branch [0, 2*pi)."""
    return theta % TWO_PI


def waveplate_factor(theta: float) -> complex:
    """Evaluate P(theta) = sqrt(-cos(theta)) + i*sqrt(2)*cos(theta/2).

    The angle is reduced modulo 2*pi first (configs may write 4*pi/3 as
    -2*pi/3).  Raises WavePlateDomainError when cos(theta) > 0.
    """
    theta = normalize_angle(theta)
    c = math.cos(theta)
    if c > _COS_TOL:
        raise WavePlateDomainError(
            f"theta={theta:.6g} rad has cos(theta)={c:.3g} > 0; "
            "P(theta) requires theta in [pi/2, 3*pi/2] (mod 2*pi)"
        )
    re = math.sqrt(max(0.0, -c))
    im = math.sqrt(2.0) * math.cos(0.5 * theta)
    return complex(re, im)


def coefficients(theta1: float, theta2: float) -> WavePlateCoeffs:
    """Return the wave-plate coefficient triple for a pair of angles."""
    p1 = waveplate_factor(theta1)
    p2 = waveplate_factor(theta2)
    return WavePlateCoeffs(
        theta1=normalize_angle(theta1),
        theta2=normalize_angle(theta2),
        p1=p1,
        p2=p2,
        p_vac=p1.imag * p2.imag,
        p_s_prime=(p1 * p2).imag,
        p_s_dprime=(p1 * p2.conjugate()).imag,
    )
