"""Directional patch graph and the combined nonlocal Laplacian.

For every pixel, the K most similar patches are collected separately in
each region of the partitioned search window; similarity is the Gaussian
kernel exp(-d/h) of the mean squared patch difference.  Each region yields
a row-normalised graph Laplacian (diagonal 1, off-diagonals -w/sum(w)),
and the combined operator averages the per-region Laplacians, so every
direction contributes equally regardless of how similar its patches are.
The same spatial operator acts on every wavelet channel.

Distances are evaluated with one shifted-difference pass per window
offset, so the construction is O(#window pixels) full-image passes rather
than per-pixel patch loops.  Candidate ties in distance are broken by
row-major neighbour index, making the graph fully deterministic.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from cartex._patches import PatchDistanceEngine
from cartex.partition import PartitionMasks, build_partition

__all__ = [
    "GraphParams",
    "PatchGraph",
    "NonlocalLaplacian",
    "patch_distance",
    "build_patch_graph",
    "build_union_graph",
    "build_laplacian",
    "apply_laplacian",
    "apply_laplacian_adjoint",
    "dump_laplacian",
]

_CHUNK = 256


@dataclass(frozen=True)
class GraphParams:
    """Neighbour-search settings; defaults follow the reference setup."""

    window: int = 51
    directions: int = 4
    knn: int = 16
    h: float = 0.3
    patch: int = 7
    band: float = 2.0
    directional: bool = True


@dataclass
class PatchGraph:
    """Per-pixel, per-region neighbour lists with similarity weights.

    ``neighbors[r, i]`` holds up to K row-major pixel indices (-1 padding),
    ``weights`` the matching kernel values (0 padding), ``weight_sums`` and
    ``counts`` the per-region totals.
    """

    shape: tuple
    knn: int
    h: float
    patch: int
    neighbors: np.ndarray    # (R, N, K) int32
    weights: np.ndarray      # (R, N, K) float64
    weight_sums: np.ndarray  # (R, N)
    counts: np.ndarray       # (R, N) int32

    @property
    def n_regions(self):
        return self.neighbors.shape[0]


@dataclass
class NonlocalLaplacian:
    """Sparse combined Laplacian over the pixel grid, applied channel-wise."""

    shape: tuple
    matrix: sp.csr_matrix
    matrix_t: sp.csr_matrix
    isolated: np.ndarray  # row indices with no neighbours in any region

    @property
    def n_isolated(self):
        return int(self.isolated.size)


def patch_distance(img, i, q, patch_size):
    """Mean squared difference between the patches centred at ``i`` and ``q``.

    Patches are extracted with edge replication, so they are defined for
    every pixel; the result is symmetric and zero iff the patches agree.
    """
    if patch_size % 2 == 0 or patch_size < 1:
        raise ValueError("patch size must be odd and positive")
    img = np.asarray(img, dtype=np.float64)
    r = patch_size // 2
    h, w = img.shape

    def grab(center):
        ys = np.clip(np.arange(center[0] - r, center[0] + r + 1), 0, h - 1)
        xs = np.clip(np.arange(center[1] - r, center[1] + r + 1), 0, w - 1)
        return img[np.ix_(ys, xs)]

    d = grab(i) - grab(q)
    return float(np.mean(d * d))


def _select_topk(engine, offsets, knn, width):
    """Streaming top-K by (distance, neighbour index) over window offsets.

    ``offsets`` must be in (dy, dx) lexicographic order, which coincides
    with row-major neighbour order for every centre pixel.
    """
    h, w = engine.shape
    n = h * w
    base = np.arange(n, dtype=np.int64)
    best_d = np.empty((0, n))
    best_id = np.empty((0, n), dtype=np.int64)
    for start in range(0, len(offsets), _CHUNK):
        block = offsets[start:start + _CHUNK]
        cat_d = np.vstack(
            [best_d] + [engine.map_for(dy, dx).ravel()[None] for dy, dx in block]
        )
        cat_id = np.vstack(
            [best_id] + [(base + dy * width + dx)[None] for dy, dx in block]
        )
        if cat_d.shape[0] <= knn:
            best_d, best_id = cat_d, cat_id
            continue
        kth = np.partition(cat_d, knn - 1, axis=0)[knn - 1]
        lt = cat_d < kth
        eq = cat_d == kth
        room = knn - lt.sum(axis=0)
        keep = lt | (eq & (np.cumsum(eq, axis=0) <= room))
        order = np.argsort(~keep, axis=0, kind="stable")[:knn]
        best_d = np.take_along_axis(cat_d, order, axis=0)
        best_id = np.take_along_axis(cat_id, order, axis=0)
    valid = np.isfinite(best_d)
    best_id[~valid] = -1
    return best_d, best_id, valid


def _assemble(img, region_offsets, knn, h, patch_size, reach, mask):
    img = np.asarray(img, dtype=np.float64)
    height, width = img.shape
    n = height * width
    engine = PatchDistanceEngine(img, patch_size, reach, mask)
    n_regions = len(region_offsets)
    neighbors = np.full((n_regions, n, knn), -1, dtype=np.int32)
    weights = np.zeros((n_regions, n, knn))
    for r, offsets in enumerate(region_offsets):
        if len(offsets) == 0:
            continue
        dist, ids, valid = _select_topk(engine, offsets, knn, width)
        k_eff = dist.shape[0]
        wts = np.where(valid, np.exp(-np.where(valid, dist, 0.0) / h), 0.0)
        neighbors[r, :, :k_eff] = ids.T
        weights[r, :, :k_eff] = wts.T
    weight_sums = weights.sum(axis=2)
    counts = (weights > 0.0).sum(axis=2).astype(np.int32)
    return PatchGraph((height, width), knn, h, patch_size,
                      neighbors, weights, weight_sums, counts)


def build_patch_graph(img, masks, knn, h, patch_size, mask=None):
    """Directional graph: top-K matches in every region of the partition.

    Parameters
    ----------
    img : (H, W) array
        Image used for matching (a pre-smoothed copy on noisy input).
    masks : PartitionMasks
    knn : int
        Matches kept per region (all, when a region has fewer candidates).
    h : float
        Similarity kernel bandwidth.
    patch_size : int
        Odd side length of the comparison patches.
    mask : (H, W) bool array, optional
        Observed-pixel mask; restricts candidates to observed centres and
        distances to jointly-observed samples.
    """
    if knn < 1:
        raise ValueError("knn must be at least 1")
    if h <= 0:
        raise ValueError("h must be positive")
    offsets = [masks.region_offsets(r) for r in range(masks.direction_count + 1)]
    return _assemble(img, offsets, knn, h, patch_size, masks.window_size // 2, mask)


def build_union_graph(img, window_size, knn, h, patch_size, mask=None):
    """Top-K-anywhere graph over the whole window (the non-directional baseline)."""
    if window_size % 2 == 0:
        raise ValueError("window size must be odd")
    r = window_size // 2
    ys, xs = np.mgrid[-r:r + 1, -r:r + 1]
    keep = (ys != 0) | (xs != 0)
    offsets = np.stack([ys[keep], xs[keep]], axis=1)
    return _assemble(img, [offsets], knn, h, patch_size, r, mask)


def build_laplacian(graph):
    """Combined Laplacian from a patch graph.

    Every region with at least one neighbour contributes its normalised
    row, and rows average over the regions that are non-empty there, so
    non-isolated rows sum to zero exactly.  Pixels with no neighbours in
    any region become identity rows and are reported in ``isolated``.
    """
    height, width = graph.shape
    n = height * width
    nonempty = graph.counts > 0
    n_nonempty = nonempty.sum(axis=0)
    isolated = np.nonzero(n_nonempty == 0)[0]

    rows = [np.arange(n, dtype=np.int64)]
    cols = [np.arange(n, dtype=np.int64)]
    vals = [np.ones(n)]
    safe_regions = np.maximum(n_nonempty, 1).astype(np.float64)
    for r in range(graph.n_regions):
        valid = graph.weights[r] > 0.0
        if not valid.any():
            continue
        scale = np.zeros(n)
        nz = graph.weight_sums[r] > 0.0
        scale[nz] = 1.0 / (graph.weight_sums[r][nz] * safe_regions[nz])
        i_idx, k_idx = np.nonzero(valid)
        rows.append(i_idx)
        cols.append(graph.neighbors[r][valid].astype(np.int64))
        vals.append(-graph.weights[r][valid] * scale[i_idx])
    mat = sp.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(n, n),
    )
    return NonlocalLaplacian((height, width), mat, mat.T.tocsr(), isolated)


def _apply(mat, shape, coeffs):
    coeffs = np.asarray(coeffs, dtype=np.float64)
    if coeffs.shape[-2:] != shape:
        raise ValueError(f"coefficient field {coeffs.shape} does not match grid {shape}")
    planes = coeffs.reshape(-1, shape[0] * shape[1])
    out = mat @ np.ascontiguousarray(planes.T)
    return np.ascontiguousarray(out.T).reshape(coeffs.shape)


def apply_laplacian(lap, coeffs):
    """Channel-wise sparse product: each coefficient minus its neighbour mean."""
    return _apply(lap.matrix, lap.shape, coeffs)


def apply_laplacian_adjoint(lap, coeffs):
    """Exact transpose of :func:`apply_laplacian`."""
    return _apply(lap.matrix_t, lap.shape, coeffs)


def dump_laplacian(lap, path):
    """Write the operator as '(row, col, value)' triplets plus a diagnostics note."""
    coo = lap.matrix.tocoo()
    with open(path, "w") as fh:
        fh.write(f"# nonlocal laplacian {lap.shape[0]}x{lap.shape[1]} grid, "
                 f"{coo.nnz} entries, {lap.n_isolated} isolated rows\n")
        for i, j, v in zip(coo.row, coo.col, coo.data):
            fh.write(f"{i} {j} {float(v)!r}\n")
