"""Single-level linear spline wavelet tight frame.

The frame is generated by the three 1D filters

    a1 = (1, 2, 1)/4          (low-pass)
    a2 = sqrt(2)/4 * (1, 0, -1)
    a3 = (-1, 2, -1)/4

whose 2D tensor products give a 9-channel undecimated filter bank.  The
squared frequency responses of the 1D filters sum to one, so analysis
followed by synthesis reproduces the input exactly (tight frame).  All
convolutions are periodic, which makes the synthesis operator the exact
adjoint of the analysis operator.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.ndimage import convolve1d, correlate1d

__all__ = ["FilterBank", "build_spline_bank", "analyze", "synthesize"]

_SPLINE_1D = (
    np.array([1.0, 2.0, 1.0]) / 4.0,
    np.array([1.0, 0.0, -1.0]) * (np.sqrt(2.0) / 4.0),
    np.array([-1.0, 2.0, -1.0]) / 4.0,
)


@dataclass(frozen=True)
class FilterBank:
    """Separable 2D filter bank; channel 0 is the low-pass channel."""

    filters_1d: tuple = field(default_factory=lambda: _SPLINE_1D)

    @property
    def n_channels(self):
        return len(self.filters_1d) ** 2

    def kernel(self, k):
        """Return the full 2D kernel of channel ``k`` (row filter x column filter)."""
        n = len(self.filters_1d)
        return np.outer(self.filters_1d[k // n], self.filters_1d[k % n])

    def kernels(self):
        return np.stack([self.kernel(k) for k in range(self.n_channels)])


def build_spline_bank():
    """Build the default 9-channel linear spline bank."""
    return FilterBank()


def _check_image(img):
    img = np.asarray(img, dtype=np.float64)
    if img.ndim != 2:
        raise ValueError(f"expected a 2D image, got shape {img.shape}")
    if min(img.shape) < 3:
        raise ValueError(f"image {img.shape} smaller than the 3x3 filter support")
    return img


def analyze(img, bank=None):
    """Forward transform: periodic correlation with every channel kernel.

    Parameters
    ----------
    img : (H, W) array
    bank : FilterBank, optional

    Returns
    -------
    (m, H, W) array of coefficient planes, channel 0 low-pass.
    """
    img = _check_image(img)
    bank = bank or build_spline_bank()
    f1d = bank.filters_1d
    out = np.empty((bank.n_channels,) + img.shape)
    for i, fi in enumerate(f1d):
        rows = correlate1d(img, fi, axis=0, mode="wrap")
        for j, fj in enumerate(f1d):
            out[i * len(f1d) + j] = correlate1d(rows, fj, axis=1, mode="wrap")
    return out


def synthesize(coeffs, bank=None):
    """Adjoint of :func:`analyze`; reconstructs the image for tight frames.

    Raises
    ------
    ValueError
        If the channel count does not match the bank.
    """
    coeffs = np.asarray(coeffs, dtype=np.float64)
    bank = bank or build_spline_bank()
    if coeffs.ndim != 3 or coeffs.shape[0] != bank.n_channels:
        raise ValueError(
            f"expected ({bank.n_channels}, H, W) coefficients, got {coeffs.shape}"
        )
    f1d = bank.filters_1d
    out = np.zeros(coeffs.shape[1:])
    for i, fi in enumerate(f1d):
        acc = np.zeros_like(out)
        for j, fj in enumerate(f1d):
            acc += convolve1d(coeffs[i * len(f1d) + j], fj, axis=1, mode="wrap")
        out += convolve1d(acc, fi, axis=0, mode="wrap")
    return out
