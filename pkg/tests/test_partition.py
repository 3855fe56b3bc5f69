import numpy as np
import pytest

from cartex.partition import build_partition


def test_two_direction_degenerate_bands():
    # D=2, zero half-width, 5x5 window: centre row and column, no overlap
    masks = build_partition(5, 2, 0).masks
    horizontal = np.zeros((5, 5), dtype=bool)
    horizontal[2] = True
    horizontal[2, 2] = False
    vertical = np.zeros((5, 5), dtype=bool)
    vertical[:, 2] = True
    vertical[2, 2] = False
    assert not masks[0].any()
    assert np.array_equal(masks[1], horizontal)
    assert np.array_equal(masks[2], vertical)


def test_default_band_angles():
    part = build_partition(51, 4, 2)
    r = 51 // 2
    # far-out pixels on each centre line land in that direction's band
    assert part.masks[1][r, r + 20]        # 0 degrees: along +x
    assert part.masks[2][r + 20, r + 20]   # 45 degrees
    assert part.masks[3][r + 20, r]        # 90 degrees
    assert part.masks[4][r + 20, r - 20]   # 135 degrees
    # a wedge pixel between the 45- and 90-degree bands is uncovered
    assert not part.masks[:, 0, r - 13].any()


def test_masks_pairwise_disjoint():
    for s, d, bh in [(51, 4, 2), (11, 4, 2), (9, 3, 1), (25, 6, 2)]:
        masks = build_partition(s, d, bh).masks
        assert masks.sum(axis=0).max() <= 1


def test_centre_pixel_excluded():
    part = build_partition(11, 4, 2)
    assert not part.masks[:, 5, 5].any()


def test_cover_is_bands_plus_corners():
    part = build_partition(13, 4, 2)
    r = 13 // 2
    ys, xs = np.mgrid[-r:r + 1, -r:r + 1].astype(float)
    angles = np.pi * np.arange(4) / 4
    dist = np.abs(ys[None] * np.cos(angles)[:, None, None]
                  - xs[None] * np.sin(angles)[:, None, None])
    near_some_line = (dist <= 2 + 1e-9).any(axis=0)
    near_some_line[r, r] = False
    assert np.array_equal(part.masks.any(axis=0), near_some_line)


def test_central_region_is_intersection():
    part = build_partition(17, 4, 4)
    # (4, 0) and (0, 4) lie within 4px of all four lines
    r = 17 // 2
    assert part.masks[0][r + 4, r]
    assert part.masks[0][r, r + 4]
    assert not part.masks[0][r + 4, r + 4]  # 135-degree distance 5.66 > 4


def test_region_offsets_row_major():
    part = build_partition(9, 4, 1)
    for region in range(5):
        offs = part.region_offsets(region)
        keys = offs[:, 0] * 100 + offs[:, 1]
        assert np.all(np.diff(keys) > 0)


def test_invalid_geometry_rejected():
    with pytest.raises(ValueError):
        build_partition(10, 4, 2)   # even window
    with pytest.raises(ValueError):
        build_partition(11, 1, 2)   # too few directions
    with pytest.raises(ValueError):
        build_partition(5, 4, 2)    # window too small for the band
