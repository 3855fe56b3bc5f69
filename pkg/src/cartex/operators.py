"""Matrix-free operator algebra for the coupled decomposition system.

The solver works on stacked vectors x = (u, v) stored as (2, H, W) arrays.
The block analysis operator D maps x to (W u, J v) stored as (2, m, H, W),
where W is the spline frame and J = L T chains the frame with the nonlocal
Laplacian; A sums the two layers back to an image.  Everything is applied
on the fly; no N x N matrix is ever materialised.
"""

from dataclasses import dataclass

import numpy as np

from cartex.frame import FilterBank, analyze, build_spline_bank, synthesize
from cartex.graph import (
    GraphParams,
    NonlocalLaplacian,
    apply_laplacian,
    apply_laplacian_adjoint,
    build_laplacian,
    build_patch_graph,
    build_union_graph,
)
from cartex.partition import build_partition

__all__ = [
    "DecompositionSystem",
    "build_system",
    "apply_j",
    "apply_j_adjoint",
    "apply_d",
    "apply_d_adjoint",
    "apply_a",
    "apply_a_adjoint",
    "normal_operator",
]


@dataclass(frozen=True)
class DecompositionSystem:
    """Immutable bundle of the built operators for one image size."""

    shape: tuple
    bank: FilterBank
    laplacian: NonlocalLaplacian

    @property
    def n_channels(self):
        return self.bank.n_channels


def build_system(match_img, params=None, mask=None, bank=None):
    """Build the frame + graph + Laplacian stack for one image.

    ``match_img`` drives the neighbour search (pass the pre-smoothed copy
    on noisy input); ``mask`` restricts matching to observed pixels.  With
    ``params.directional`` false the baseline top-K-anywhere graph is used.
    """
    match_img = np.asarray(match_img, dtype=np.float64)
    params = params or GraphParams()
    bank = bank or build_spline_bank()
    if params.directional:
        masks = build_partition(params.window, params.directions, params.band)
        graph = build_patch_graph(match_img, masks, params.knn, params.h,
                                  params.patch, mask=mask)
    else:
        graph = build_union_graph(match_img, params.window, params.knn,
                                  params.h, params.patch, mask=mask)
    return DecompositionSystem(match_img.shape, bank, build_laplacian(graph))


def apply_j(system, v):
    """Texture system J: frame analysis followed by the nonlocal Laplacian."""
    return apply_laplacian(system.laplacian, analyze(v, system.bank))


def apply_j_adjoint(system, coeffs):
    """Adjoint of :func:`apply_j`."""
    return synthesize(apply_laplacian_adjoint(system.laplacian, coeffs), system.bank)


def apply_d(system, x):
    """Block analysis: (u, v) -> (W u, J v), shape (2, m, H, W)."""
    u, v = x
    return np.stack([analyze(u, system.bank), apply_j(system, v)])


def apply_d_adjoint(system, coeffs):
    """Adjoint block synthesis: (c_w, c_j) -> (W^T c_w, J^T c_j)."""
    cw, cj = coeffs
    return np.stack([synthesize(cw, system.bank), apply_j_adjoint(system, cj)])


def apply_a(x):
    """Mixing operator A x = u + v."""
    return x[0] + x[1]


def apply_a_adjoint(residual):
    """A^T r = (r, r)."""
    return np.stack([residual, residual])


def normal_operator(system, x, gamma, mask=None):
    """Normal operator A^T A x + gamma D^T D x of the least-squares step.

    With ``mask`` the data term only covers observed pixels, so A becomes
    M A and the first block is A^T M A x.  Symmetric positive semidefinite
    by construction.
    """
    x = np.asarray(x, dtype=np.float64)
    mixed = apply_a(x)
    if mask is not None:
        mixed = np.where(mask, mixed, 0.0)
    out = apply_a_adjoint(mixed)
    if gamma != 0.0:
        out += gamma * apply_d_adjoint(system, apply_d(system, x))
    return out
