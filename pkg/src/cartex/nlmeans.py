"""Nonlocal-means smoothing used to stabilise patch matching on noisy input.

The smoothed image is only ever fed to the neighbour search; the solver
itself always works on the raw observations, so the smoother may be
biased without affecting the data fidelity.
"""

import numpy as np

from cartex._patches import PatchDistanceEngine
from cartex.frame import analyze

__all__ = ["pre_denoise", "estimate_noise_sigma"]


def pre_denoise(img, sigma, patch_size=7, search_size=21):
    """Nonlocal-means filter with weights exp(-d / (0.35 sigma^2)).

    ``d`` is the mean squared difference over ``patch_size`` patches
    (edge-replicated at borders); candidates come from a ``search_size``
    window clipped to the image.  Deterministic, pure.
    """
    img = np.asarray(img, dtype=np.float64)
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    reach = search_size // 2
    engine = PatchDistanceEngine(img, patch_size, reach)
    h = 0.35 * sigma * sigma
    num = np.zeros_like(img)
    den = np.zeros_like(img)
    for oy in range(-reach, reach + 1):
        for ox in range(-reach, reach + 1):
            d = engine.map_for(oy, ox)
            w = np.where(np.isfinite(d), np.exp(-np.minimum(d, 700 * h) / h), 0.0)
            num += w * engine.shifted_values(oy, ox)
            den += w
    return num / den


def estimate_noise_sigma(img):
    """Robust noise estimate from the finest diagonal wavelet channel.

    Median absolute coefficient / 0.6745, corrected for the l2 norm of the
    diagonal kernel so the result is the standard deviation of i.i.d.
    Gaussian pixel noise.
    """
    c = analyze(np.asarray(img, dtype=np.float64))
    diag = c[-1]
    kernel_norm = 0.375  # l2 norm of the (a3 x a3) kernel
    return float(np.median(np.abs(diag)) / 0.6745 / kernel_norm)
