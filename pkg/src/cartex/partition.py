"""Directional partition of the square neighbour-search window.

The S x S window around a pixel is split into D banded regions running
through the centre at angles 0, 180/D, ..., (D-1)*180/D degrees, plus one
central region where all bands overlap.  A window pixel belongs to a band
when its perpendicular distance to the band's centre line is at most the
band half-width; pixels inside every band form the central region.  A
pixel within the half-width of several (but not all) lines is assigned to
the nearest line only, which keeps the regions pairwise disjoint.  Corner
pixels beyond every band are left out and never become neighbours.  The
centre pixel is excluded everywhere: a patch is never its own neighbour.
"""

from dataclasses import dataclass

import numpy as np

__all__ = ["PartitionMasks", "build_partition"]


@dataclass(frozen=True)
class PartitionMasks:
    """Boolean window masks: ``masks[0]`` central, ``masks[1..D]`` bands."""

    window_size: int
    direction_count: int
    band_halfwidth: float
    masks: np.ndarray  # (D+1, S, S) bool

    def region_offsets(self, region):
        """Window offsets (dy, dx) of one region, row-major ordered."""
        ys, xs = np.nonzero(self.masks[region])
        r = self.window_size // 2
        return np.stack([ys - r, xs - r], axis=1)


def build_partition(window_size, direction_count, band_halfwidth):
    """Partition an odd window into D bands plus a central region.

    Raises
    ------
    ValueError
        For even windows, D < 2, or a window too small for the bands.
    """
    s, d, bh = window_size, direction_count, band_halfwidth
    if s % 2 == 0:
        raise ValueError("window size must be odd")
    if d < 2:
        raise ValueError("at least 2 directions required")
    if bh < 0 or s < 2 * bh + 3:
        raise ValueError(f"window {s} too small for band half-width {bh}")

    r = s // 2
    ys, xs = np.mgrid[-r:r + 1, -r:r + 1].astype(np.float64)
    angles = np.pi * np.arange(d) / d
    cos, sin = np.cos(angles), np.sin(angles)
    # snap the axis-aligned and diagonal directions so pixels exactly on a
    # centre line get distance 0, not a few ulp
    cos[np.abs(cos) < 1e-12] = 0.0
    sin[np.abs(sin) < 1e-12] = 0.0
    diag = np.abs(np.abs(cos) - np.abs(sin)) < 1e-12
    mag = 0.5 * (np.abs(cos) + np.abs(sin))
    cos = np.where(diag, np.sign(cos) * mag, cos)
    sin = np.where(diag, np.sign(sin) * mag, sin)
    # perpendicular distance of every window pixel to each centre line
    dist = np.abs(ys[None] * cos[:, None, None] - xs[None] * sin[:, None, None])
    in_band = dist <= bh

    centre = in_band.all(axis=0)
    banded = in_band.any(axis=0) & ~centre
    nearest = np.argmin(np.where(in_band, dist, np.inf), axis=0)

    masks = np.zeros((d + 1, s, s), dtype=bool)
    masks[0] = centre
    for j in range(d):
        masks[j + 1] = banded & (nearest == j)
    masks[:, r, r] = False
    return PartitionMasks(s, d, float(bh), masks)
