import math
import random

import pytest

from specsing import (InvalidParameterError, NonlinearityKind, NonlinearitySpec,
                      SlabMedium, WavePoint, gain_from_kappa, kerr_law,
                      scale_to_dimensionless, time_reverse_to_cpa)

NONE = NonlinearitySpec()
KERR = NonlinearitySpec(kind=NonlinearityKind.KERR, sigma=0.5)


def test_scaling_empty_slab():
    medium = SlabMedium(eta=1.0, kappa=0.0, thickness_a=1.0)
    K, z, gamma = scale_to_dimensionless(medium, 2.0, NONE)
    assert K == 2.0
    assert z == 0.0
    assert gamma == 0.0


def test_scaling_direct_evaluation():
    medium = SlabMedium(eta=3.0, kappa=0.0, thickness_a=2.0)
    K, z, gamma = scale_to_dimensionless(medium, 1.0, KERR)
    assert K == 2.0
    assert z == 4.0 * (1.0 - 9.0)
    assert gamma == -2.0


def test_scaling_complex_index_oracle():
    # frozen from a 50-digit arbitrary-precision evaluation of 25*(1-(3-0.01i)^2)
    medium = SlabMedium(eta=3.0, kappa=-0.01, thickness_a=1.0)
    K, z, _ = scale_to_dimensionless(medium, 5.0, NONE)
    assert K == 5.0
    assert abs(z - complex(-199.9975, 1.5)) <= 1e-15 * abs(z)


def test_scaling_roundtrip_k():
    random.seed(7)
    for _ in range(50):
        a = random.uniform(0.01, 10.0)
        k = random.uniform(0.1, 1e5)
        medium = SlabMedium(eta=2.0, kappa=-0.1, thickness_a=a)
        K, _, _ = scale_to_dimensionless(medium, k, NONE)
        assert abs(K / a - k) <= 1e-15 * k


def test_scaling_rejects_bad_k():
    medium = SlabMedium(eta=2.0, kappa=0.0, thickness_a=1.0)
    for k in (0.0, -1.0, float("nan")):
        with pytest.raises(InvalidParameterError):
            scale_to_dimensionless(medium, k, NONE)


def test_gain_examples():
    assert gain_from_kappa(SlabMedium(1.5, 0.0, 1.0), 3.0) == 0.0
    assert gain_from_kappa(SlabMedium(1.5, -0.5, 1.0), 1.0) == 1.0
    assert gain_from_kappa(SlabMedium(1.5, 0.5, 1.0), 1.0) == -1.0


def test_gain_linearity():
    random.seed(11)
    for _ in range(50):
        kappa = random.uniform(-1.0, 1.0)
        K = random.uniform(0.1, 50.0)
        a = random.uniform(0.1, 5.0)
        g = gain_from_kappa(SlabMedium(2.0, kappa, a), K)
        assert gain_from_kappa(SlabMedium(2.0, 2 * kappa, a), K) == 2 * g
        assert gain_from_kappa(SlabMedium(2.0, kappa, a), 2 * K) == 2 * g


def test_time_reverse_involution_and_sign():
    medium = SlabMedium(eta=3.0, kappa=-0.004, thickness_a=1.0)
    image = time_reverse_to_cpa(medium)
    assert image.kappa == 0.004
    assert image.eta == medium.eta and image.thickness_a == medium.thickness_a
    assert time_reverse_to_cpa(image) == medium
    assert gain_from_kappa(image, 2.0) == -gain_from_kappa(medium, 2.0)


def test_medium_validation():
    with pytest.raises(InvalidParameterError):
        SlabMedium(eta=0.9, kappa=0.0, thickness_a=1.0)
    with pytest.raises(InvalidParameterError):
        SlabMedium(eta=2.0, kappa=0.0, thickness_a=0.0)
    with pytest.raises(InvalidParameterError):
        SlabMedium(eta=2.0, kappa=float("inf"), thickness_a=1.0)


def test_medium_reconstructs_index():
    medium = SlabMedium(eta=2.5, kappa=-0.03, thickness_a=0.7)
    assert medium.n == complex(2.5, -0.03)


def test_wave_point_consistency():
    medium = SlabMedium(eta=2.0, kappa=0.0, thickness_a=0.3)
    wp = WavePoint.from_k(medium, 12.0)
    assert abs(wp.K - 0.3 * 12.0) <= 1e-15 * wp.K
    wp2 = WavePoint.from_K(medium, wp.K)
    assert abs(wp2.k - 12.0) <= 1e-15 * 12.0
    with pytest.raises(InvalidParameterError):
        WavePoint.from_k(medium, -1.0)


def test_nonlinearity_kinds():
    assert NONE.f is None
    assert NONE.gamma(10.0) == 0.0
    # kind NONE zeroes gamma even with sigma set
    assert NonlinearitySpec(sigma=5.0).gamma(2.0) == 0.0
    assert KERR.f is kerr_law
    assert KERR.f(3.0) == 9.0
    assert KERR.gamma(2.0) == -4.0 * 0.5

    custom = NonlinearitySpec(kind=NonlinearityKind.CUSTOM, sigma=1.0,
                              custom_f=lambda t: t)
    assert custom.f(2.5) == 2.5
    with pytest.raises(InvalidParameterError):
        NonlinearitySpec(kind=NonlinearityKind.CUSTOM, sigma=1.0)


def test_gamma_not_cached_across_K():
    # same spec, different spectral points
    assert KERR.gamma(1.0) == -0.5
    assert KERR.gamma(3.0) == -4.5
