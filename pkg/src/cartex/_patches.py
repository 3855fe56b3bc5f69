"""Shared machinery for windowed patch comparisons.

Patch distances at a fixed spatial offset are computed for every pixel at
once: square the shifted difference field, then box-sum it with an
integral image.  Out-of-image patch samples are edge-replicated, which the
clamped lookup table below provides for free as plain array slices.
"""

import numpy as np

__all__ = ["clamped_table", "box_sum", "PatchDistanceEngine"]


def clamped_table(img, pad):
    """Edge-replicated extension of ``img`` by ``pad`` pixels on every side."""
    h, w = img.shape
    ry = np.clip(np.arange(-pad, h + pad), 0, h - 1)
    rx = np.clip(np.arange(-pad, w + pad), 0, w - 1)
    return img[np.ix_(ry, rx)]


def box_sum(a, radius):
    """Sum of (2r+1)^2 windows of the extended field ``a``.

    ``a`` must be the (H + 2r, W + 2r) extension of an (H, W) grid; the
    result is the (H, W) array of window sums centred on the interior.
    """
    s = 2 * radius + 1
    acc = np.pad(a, ((1, 0), (1, 0))).cumsum(axis=0).cumsum(axis=1)
    return acc[s:, s:] - acc[:-s, s:] - acc[s:, :-s] + acc[:-s, :-s]


class PatchDistanceEngine:
    """Mean-squared patch distances between every pixel and a shifted copy.

    For offset ``o`` the map holds d(i, i+o) for all pixels i, with +inf at
    centres whose partner falls outside the image.  With a pixel mask, only
    jointly-known samples enter the mean (count-renormalised), candidates
    with unknown centres are +inf, and pairs sharing no known sample are
    +inf as well.
    """

    def __init__(self, img, patch_size, reach, mask=None):
        if patch_size % 2 == 0 or patch_size < 1:
            raise ValueError("patch size must be odd and positive")
        self.shape = img.shape
        self.radius = patch_size // 2
        self.reach = reach
        self.pad = self.radius + reach
        if mask is None:
            self.ftab = clamped_table(np.asarray(img, dtype=np.float64), self.pad)
            self.mtab = None
            self.area = float(patch_size * patch_size)
        else:
            mask = np.asarray(mask, dtype=bool)
            if mask.shape != img.shape:
                raise ValueError("mask shape must match the image")
            self.ftab = clamped_table(np.where(mask, img, 0.0), self.pad)
            self.mtab = clamped_table(mask.astype(np.float64), self.pad)
            self.area = None

    def _view(self, tab, oy, ox):
        r = self.radius
        h, w = self.shape
        y0 = self.pad - r + oy
        x0 = self.pad - r + ox
        return tab[y0:y0 + h + 2 * r, x0:x0 + w + 2 * r]

    def _zero_irrelevant(self, field, oy, ox):
        """Zero samples no valid centre's patch can touch.

        Keeps the integral-image prefix sums free of border garbage, so a
        window of structurally identical samples sums to exactly zero.
        """
        r = self.radius
        h, w = self.shape
        lo_y, hi_y = max(0, -oy), (h - 1) - max(0, oy)
        lo_x, hi_x = max(0, -ox), (w - 1) - max(0, ox)
        field[:lo_y] = 0.0
        field[hi_y + 2 * r + 1:] = 0.0
        field[:, :lo_x] = 0.0
        field[:, hi_x + 2 * r + 1:] = 0.0

    def map_for(self, oy, ox):
        r = self.radius
        h, w = self.shape
        base = self.ftab[self.reach:self.reach + h + 2 * r,
                         self.reach:self.reach + w + 2 * r]
        diff = base - self._view(self.ftab, oy, ox)
        sq = diff * diff
        self._zero_irrelevant(sq, oy, ox)
        if self.mtab is None:
            dist = box_sum(sq, r) / self.area
        else:
            mbase = self.mtab[self.reach:self.reach + h + 2 * r,
                              self.reach:self.reach + w + 2 * r]
            joint = mbase * self._view(self.mtab, oy, ox)
            self._zero_irrelevant(joint, oy, ox)
            count = box_sum(joint, r)
            with np.errstate(invalid="ignore", divide="ignore"):
                dist = box_sum(sq * joint, r) / count
            dist[count == 0.0] = np.inf
            # candidates must be centred on an observed pixel
            mcent = self._view(self.mtab, oy, ox)[r:r + h, r:r + w]
            dist[mcent == 0.0] = np.inf
        self._invalidate_out_of_bounds(dist, oy, ox)
        return dist

    def shifted_values(self, oy, ox):
        """Image values at i + o (edge-replicated outside the image)."""
        h, w = self.shape
        y0 = self.pad + oy
        x0 = self.pad + ox
        return self.ftab[y0:y0 + h, x0:x0 + w]

    def _invalidate_out_of_bounds(self, dist, oy, ox):
        h, w = self.shape
        if oy > 0:
            dist[h - oy:, :] = np.inf
        elif oy < 0:
            dist[:-oy, :] = np.inf
        if ox > 0:
            dist[:, w - ox:] = np.inf
        elif ox < 0:
            dist[:, :-ox] = np.inf
