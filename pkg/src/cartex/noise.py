"""Synthetic degradation of test images."""

import numpy as np

__all__ = ["add_gaussian_noise", "make_pixel_mask"]


def add_gaussian_noise(img, sigma, seed):
    """Add i.i.d. zero-mean Gaussian noise with standard deviation ``sigma``.

    The output is intentionally not clamped to [0, 1]: the decomposition
    treats the noise as a third additive component and must be able to
    recover it exactly.  Deterministic for a fixed (img, sigma, seed).
    """
    img = np.asarray(img, dtype=np.float64)
    if sigma < 0:
        raise ValueError("sigma must be non-negative")
    if sigma == 0:
        return img.copy()
    rng = np.random.default_rng(seed)
    return img + rng.normal(0.0, sigma, size=img.shape)


def make_pixel_mask(shape, known_fraction, seed):
    """Random boolean mask with the given fraction of True (observed) pixels."""
    if not 0.0 < known_fraction <= 1.0:
        raise ValueError("known_fraction must lie in (0, 1]")
    rng = np.random.default_rng(seed)
    n = int(np.prod(shape))
    n_known = int(round(known_fraction * n))
    mask = np.zeros(n, dtype=bool)
    mask[rng.permutation(n)[:n_known]] = True
    return mask.reshape(shape)
