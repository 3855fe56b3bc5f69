"""cartex: cartoon-texture image decomposition.

A grayscale image is modelled as the sum of a piecewise-constant cartoon
layer and an oscillatory texture layer.  Both layers are driven towards
sparsity under dedicated systems: the cartoon under a spline wavelet tight
frame, the texture under a direction-aware nonlocal Laplacian composed
with the same frame.  The coupled l1 problem is solved matrix-free with
split-Bregman iterations; noisy and missing-pixel variants are supported.
"""

from cartex.frame import FilterBank, analyze, build_spline_bank, synthesize
from cartex.image_io import read_image, write_image
from cartex.graph import (
    GraphParams,
    NonlocalLaplacian,
    PatchGraph,
    apply_laplacian,
    apply_laplacian_adjoint,
    build_laplacian,
    build_patch_graph,
    build_union_graph,
    patch_distance,
)
from cartex.metrics import psnr, ssim
from cartex.nlmeans import estimate_noise_sigma, pre_denoise
from cartex.noise import add_gaussian_noise
from cartex.operators import (
    DecompositionSystem,
    apply_a,
    apply_a_adjoint,
    apply_d,
    apply_d_adjoint,
    apply_j,
    apply_j_adjoint,
    build_system,
    normal_operator,
)
from cartex.partition import PartitionMasks, build_partition
from cartex.solver import (
    DecompositionResult,
    SolverParams,
    cg_solve,
    decompose,
    soft_threshold,
    solve_inpaint,
    solve_noiseless,
    solve_noisy,
    texturelessness,
    update_lambda,
)
from cartex.synthetic import SyntheticSpec, make_random_spec, render_synthetic

__version__ = "0.1.0"
