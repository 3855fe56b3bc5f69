"""Noiseless cartoon-texture decomposition, with an ablation.

Renders a synthetic cartoon+texture mix with known ground truth, solves
the constrained model with the direction-aware system and with the plain
top-K-anywhere baseline, and compares PSNR/SSIM per component.

Run:  python3 demos/03_noiseless_decomposition.py      (about a minute)
"""

from pathlib import Path

import numpy as np

from cartex import GraphParams, SolverParams, decompose, psnr, ssim
from cartex.image_io import write_image
from cartex.synthetic import make_random_spec, render_synthetic

out_dir = Path(__file__).parent / "output" / "noiseless"
out_dir.mkdir(parents=True, exist_ok=True)

cartoon, texture, mix = render_synthetic(make_random_spec(0, size=128))
write_image(mix, out_dir / "input.png", bit_depth=16)

params = SolverParams.noiseless(eta1=300.0, eta2=150.0, iters=5,
                                outer_limit=8, lambda_refresh_iters=20)

print(f"{'method':>12}  {'PSNR u':>8}  {'SSIM u':>8}  {'PSNR v':>8}  {'SSIM v':>8}")
for name, directional in (("isotropic", True), ("baseline", False)):
    res = decompose(mix, "noiseless", params=params,
                    graph_params=GraphParams(directional=directional))
    assert np.max(np.abs(mix - res.cartoon - res.texture)) <= 1e-6
    write_image(res.cartoon, out_dir / f"{name}_u.png", bit_depth=16)
    write_image(res.texture + 0.5, out_dir / f"{name}_v.png", bit_depth=16)
    print(f"{name:>12}  {psnr(res.cartoon, cartoon):8.2f}  "
          f"{ssim(np.clip(res.cartoon, 0, 1), np.clip(cartoon, 0, 1)):8.3f}  "
          f"{psnr(res.texture, texture):8.2f}  "
          f"{ssim(res.texture + 0.5, texture + 0.5):8.3f}")

print(f"components written to {out_dir}")
print("the baseline finds matches along contour edges too, so pieces of")
print("the cartoon leak into its texture layer; the directional variant")
print("keeps the edges where they belong.")
