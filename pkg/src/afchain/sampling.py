"""Seeded random draws: circularly symmetric complex Gaussians and log-normals.

All draws happen in float64 from a caller-owned numpy Generator, whatever the
precision backend; big-float arithmetic lifts the same values exactly. A
complex variance sigma^2 splits evenly between real and imaginary parts.
"""

from __future__ import annotations

import numpy as np


def sample_complex_gaussian(variance: float, rng: np.random.Generator, size=None):
    """Complex Gaussian with E|x|^2 = variance (halved per component)."""
    if not variance > 0:
        raise ValueError(f"variance must be > 0, got {variance}")
    scale = np.sqrt(variance / 2.0)
    re = rng.standard_normal(size)
    im = rng.standard_normal(size)
    return (re + 1j * im) * scale


def sample_channel_matrix(d: int, mu: float, rng: np.random.Generator) -> np.ndarray:
    """d x d fading matrix with i.i.d. complex Gaussian entries of total variance mu."""
    return sample_complex_gaussian(mu, rng, size=(d, d))


def sample_channel_batch(count: int, d: int, mu, rng: np.random.Generator) -> np.ndarray:
    """(count, d, d) stack; mu may be a scalar or a per-draw vector."""
    h = sample_complex_gaussian(1.0, rng, size=(count, d, d))
    mu = np.asarray(mu, dtype=float)
    if mu.ndim == 0:
        if not mu > 0:
            raise ValueError(f"mu must be > 0, got {mu}")
        return h * np.sqrt(float(mu))
    if (mu <= 0).any():
        raise ValueError("all mu values must be > 0")
    return h * np.sqrt(mu)[:, None, None]


def sample_unit_noise_vector(d: int, rng: np.random.Generator) -> np.ndarray:
    """Noise direction Z = V / sqrt(n0): entries CN(0, 1)."""
    return sample_complex_gaussian(1.0, rng, size=d)


def sample_lognormal(a: float, b: float, rng: np.random.Generator, size=None):
    """exp(a + sqrt(b) Z): a is the mean and b the variance of the log."""
    if not b > 0:
        raise ValueError(f"b must be > 0, got {b}")
    return np.exp(a + np.sqrt(b) * rng.standard_normal(size))


def sample_source_vector(d: int, p0: float, kind: str, rng: np.random.Generator) -> np.ndarray:
    """Source symbols with per-entry power p0/d: Gaussian or unit-modulus."""
    if kind == "gaussian":
        return sample_complex_gaussian(p0 / d, rng, size=d)
    if kind == "unit-modulus":
        theta = rng.uniform(0.0, 2.0 * np.pi, size=d)
        return np.sqrt(p0 / d) * np.exp(1j * theta)
    raise ValueError(f"unknown source symbol kind {kind!r}")
