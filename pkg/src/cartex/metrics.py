"""Image quality metrics: PSNR and SSIM on [0, 1] grayscale images."""

import numpy as np
from scipy.signal import convolve2d

__all__ = ["psnr", "ssim", "PSNR_CAP_DB"]

# Identical images would give +inf dB; reports use this cap instead.
PSNR_CAP_DB = 99.0


def _pair(a, b):
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"image shapes differ: {a.shape} vs {b.shape}")
    return a, b


def psnr(a, b, peak=1.0):
    """Peak signal-to-noise ratio in dB, capped at 99 dB."""
    a, b = _pair(a, b)
    mse = np.mean((a - b) ** 2)
    if mse == 0.0:
        return PSNR_CAP_DB
    return min(PSNR_CAP_DB, 10.0 * np.log10(peak * peak / mse))


def _gaussian_window(size=11, sigma=1.5):
    r = np.arange(size) - (size - 1) / 2.0
    g = np.exp(-(r * r) / (2.0 * sigma * sigma))
    win = np.outer(g, g)
    return win / win.sum()


def ssim(a, b):
    """Mean structural similarity with the standard 11x11 Gaussian window.

    Uses sigma = 1.5, stabilizers K1 = 0.01 and K2 = 0.03, dynamic range 1.
    Local statistics are taken over the interior (valid) region, so both
    images must be at least 11 pixels on each side.
    """
    a, b = _pair(a, b)
    if min(a.shape) < 11:
        raise ValueError(f"images must be at least 11x11 for SSIM, got {a.shape}")
    win = _gaussian_window()
    c1 = 0.01 ** 2
    c2 = 0.03 ** 2

    mu1 = convolve2d(a, win, mode="valid")
    mu2 = convolve2d(b, win, mode="valid")
    s11 = convolve2d(a * a, win, mode="valid") - mu1 * mu1
    s22 = convolve2d(b * b, win, mode="valid") - mu2 * mu2
    s12 = convolve2d(a * b, win, mode="valid") - mu1 * mu2

    num = (2.0 * mu1 * mu2 + c1) * (2.0 * s12 + c2)
    den = (mu1 * mu1 + mu2 * mu2 + c1) * (s11 + s22 + c2)
    return float(np.mean(num / den))
