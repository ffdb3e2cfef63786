"""Moment checks for the seeded samplers."""

import math

import numpy as np
import pytest

from afchain.sampling import (
    sample_channel_matrix,
    sample_complex_gaussian,
    sample_lognormal,
    sample_source_vector,
    sample_unit_noise_vector,
)
from afchain.special import digamma_int


def test_total_variance_splits_evenly():
    rng = np.random.default_rng(100)
    x = sample_complex_gaussian(1.0, rng, size=1_000_000)
    assert abs(np.mean(np.abs(x) ** 2) - 1.0) < 0.005
    # each component carries half
    assert abs(np.var(x.real) - 0.5) < 0.005
    assert abs(np.var(x.imag) - 0.5) < 0.005


def test_rejects_nonpositive_variance():
    rng = np.random.default_rng(0)
    with pytest.raises(ValueError):
        sample_complex_gaussian(0.0, rng)
    with pytest.raises(ValueError):
        sample_complex_gaussian(-1.0, rng)


def test_log_frobenius_matches_digamma():
    # E log(||H||_F^2 / mu) equals psi(d^2) for d x d entries of variance mu
    rng = np.random.default_rng(101)
    d, mu, draws = 3, 2.7, 200_000
    h = sample_complex_gaussian(mu, rng, size=(draws, d, d))
    logs = np.log(np.sum(np.abs(h) ** 2, axis=(1, 2)) / mu)
    stderr = logs.std(ddof=1) / math.sqrt(draws)
    assert abs(logs.mean() - digamma_int(d * d)) < 4 * stderr + 1e-4


def test_channel_matrix_shape_and_power():
    rng = np.random.default_rng(102)
    h = sample_channel_matrix(4, 3.0, rng)
    assert h.shape == (4, 4)
    many = np.stack([sample_channel_matrix(4, 3.0, rng) for _ in range(4000)])
    assert abs(np.mean(np.abs(many) ** 2) - 3.0) < 0.05


def test_noise_vector_unit_variance():
    rng = np.random.default_rng(103)
    z = np.concatenate([sample_unit_noise_vector(8, rng) for _ in range(20_000)])
    assert abs(np.mean(np.abs(z) ** 2) - 1.0) < 0.01


class TestLogNormal:
    def test_mean_of_log(self):
        rng = np.random.default_rng(104)
        x = sample_lognormal(0.0, 1.0, rng, size=1_000_000)
        assert abs(np.mean(np.log(x))) < 0.01

    def test_variance_of_log(self):
        rng = np.random.default_rng(105)
        x = sample_lognormal(0.0, 2.0, rng, size=1_000_000)
        assert abs(np.var(np.log(x)) - 2.0) < 0.05

    def test_rejects_nonpositive_b(self):
        rng = np.random.default_rng(0)
        with pytest.raises(ValueError):
            sample_lognormal(0.0, 0.0, rng)
        with pytest.raises(ValueError):
            sample_lognormal(0.0, -1.0, rng)

    def test_tiny_b_degenerates_to_constant(self):
        rng = np.random.default_rng(106)
        x = sample_lognormal(1.5, 1e-20, rng, size=1000)
        np.testing.assert_allclose(x, math.exp(1.5), rtol=1e-8)


class TestSourceVector:
    def test_gaussian_per_entry_power(self):
        rng = np.random.default_rng(107)
        xs = np.stack(
            [sample_source_vector(4, 2.0, "gaussian", rng) for _ in range(50_000)]
        )
        assert abs(np.mean(np.abs(xs) ** 2) - 0.5) < 0.01

    def test_unit_modulus_exact_power(self):
        rng = np.random.default_rng(108)
        x = sample_source_vector(4, 2.0, "unit-modulus", rng)
        np.testing.assert_allclose(np.abs(x) ** 2, 0.5, rtol=1e-12)

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            sample_source_vector(2, 1.0, "qam", np.random.default_rng(0))
