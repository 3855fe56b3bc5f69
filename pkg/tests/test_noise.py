import numpy as np
import pytest

from cartex.noise import add_gaussian_noise, make_pixel_mask


def test_zero_sigma_is_identity():
    img = np.random.default_rng(0).random((16, 16))
    out = add_gaussian_noise(img, 0.0, seed=1)
    assert np.array_equal(out, img)


def test_sample_variance_matches_sigma():
    img = np.full((256, 256), 0.5)
    out = add_gaussian_noise(img, 0.1, seed=2)
    var = np.var(out - img)
    assert abs(var - 0.01) <= 0.05 * 0.01


def test_deterministic_for_fixed_seed():
    img = np.random.default_rng(1).random((32, 32))
    a = add_gaussian_noise(img, 0.1, seed=7)
    b = add_gaussian_noise(img, 0.1, seed=7)
    assert np.array_equal(a, b)
    c = add_gaussian_noise(img, 0.1, seed=8)
    assert not np.array_equal(a, c)


def test_mean_preserved():
    img = np.full((128, 128), 0.5)
    sigma = 0.1
    out = add_gaussian_noise(img, sigma, seed=3)
    n = img.size
    assert abs(out.mean() - img.mean()) <= 3 * sigma / np.sqrt(n)


def test_negative_sigma_rejected():
    with pytest.raises(ValueError):
        add_gaussian_noise(np.zeros((8, 8)), -0.1, seed=0)


def test_pixel_mask_fraction_and_determinism():
    m1 = make_pixel_mask((64, 64), 0.6, seed=5)
    m2 = make_pixel_mask((64, 64), 0.6, seed=5)
    assert np.array_equal(m1, m2)
    assert m1.sum() == round(0.6 * 64 * 64)
    with pytest.raises(ValueError):
        make_pixel_mask((8, 8), 0.0, seed=0)
