"""Integer-argument digamma and exact harmonic numbers.

The spectrum formulas only ever need psi at positive integers, where
psi(k) = H_{k-1} - gamma. Harmonic numbers are kept in exact rational
arithmetic so telescoping identities hold exactly; gamma is a frozen
120-digit constant (cross-checked against a limit-definition oracle in the
test suite).
"""

from __future__ import annotations

import functools
from fractions import Fraction

# Euler-Mascheroni constant, 120 decimal digits.
EULER_GAMMA_STR = (
    "0.57721566490153286060651209008240243104215933593992359880576723488486"
    "7726777664670936947063291746749514631447249807082480960504"
)
EULER_GAMMA = float(EULER_GAMMA_STR)


@functools.lru_cache(maxsize=None)
def harmonic(k: int) -> Fraction:
    """Exact harmonic number H_k = sum_{j=1..k} 1/j, with H_0 = 0."""
    if not isinstance(k, int) or isinstance(k, bool):
        raise TypeError(f"harmonic expects an integer, got {k!r}")
    if k < 0:
        raise ValueError(f"harmonic expects k >= 0, got {k}")
    total = Fraction(0)
    for j in range(1, k + 1):
        total += Fraction(1, j)
    return total


def digamma_int(k: int) -> float:
    """psi(k) = H_{k-1} - gamma for integer k >= 1."""
    if not isinstance(k, int) or isinstance(k, bool):
        raise TypeError(f"digamma_int expects an integer, got {k!r}")
    if k < 1:
        raise ValueError(f"digamma_int expects k >= 1, got {k}")
    return float(harmonic(k - 1)) - EULER_GAMMA


def euler_gamma_mp(ctx):
    """The frozen constant as an mpf in the given mpmath context."""
    return ctx.mpf(EULER_GAMMA_STR)
