"""Directional patch matching and the nonlocal Laplacian.

The central idea: around a straight contour, similar patches line up along
one direction, while in texture they scatter isotropically.  Forcing the
neighbour search to keep matches from every direction therefore produces
an operator that sparsifies texture but NOT contours.  This script
visualises the window partition, plots where the kept matches of an edge
pixel and a texture pixel actually lie, and quantifies the sparsification
asymmetry.

Run:  python3 demos/02_patch_graph.py
"""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from cartex import (
    analyze,
    apply_laplacian,
    build_laplacian,
    build_partition,
    build_patch_graph,
    build_union_graph,
)

out_dir = Path(__file__).parent / "output" / "patch_graph"
out_dir.mkdir(parents=True, exist_ok=True)

# ---- the window partition -------------------------------------------------
part = build_partition(51, 4, 2)
labels = np.zeros((51, 51))
for region in range(5):
    labels[part.masks[region]] = region + 1
fig, ax = plt.subplots(figsize=(5, 5))
ax.imshow(labels, cmap="tab10", vmin=0, vmax=9)
ax.set_title("search window: central region + 4 directional bands")
ax.axis("off")
fig.savefig(out_dir / "partition.png", dpi=120)
plt.close(fig)

# ---- where do the matches live? -------------------------------------------
size = 64
edge = np.full((size, size), 0.3)
edge[:, size // 2:] = 0.7
ys, xs = np.mgrid[0:size, 0:size]
texture = 0.5 + 0.2 * np.sin(2 * np.pi * xs / 6) * np.sin(2 * np.pi * ys / 6)

fig, axes = plt.subplots(1, 2, figsize=(10, 5))
for ax, img, name in ((axes[0], edge, "step edge"),
                      (axes[1], texture, "texture")):
    graph = build_patch_graph(img, part, knn=8, h=0.3, patch_size=7)
    centre = (size // 2) * size + size // 2 - 2
    ax.imshow(img, cmap="gray", vmin=0, vmax=1)
    cy, cx = divmod(centre, size)
    ax.plot(cx, cy, "r*", markersize=12)
    for region in range(graph.n_regions):
        nbrs = graph.neighbors[region, centre]
        nbrs = nbrs[nbrs >= 0]
        ax.plot(nbrs % size, nbrs // size, "o", markersize=4,
                label=f"region {region}")
    ax.set_title(f"kept matches on {name}")
    ax.axis("off")
axes[1].legend(loc="lower right", fontsize=7)
fig.savefig(out_dir / "matches.png", dpi=120)
plt.close(fig)

# ---- sparsification asymmetry ----------------------------------------------
# on texture, both operators sparsify; on a contour, only the operator that
# may pick its matches anywhere does - the directional one refuses.
nyquist = 0.3 * np.cos(np.pi * xs) * np.cos(np.pi * ys)
for name, build in (("directional", lambda im: build_patch_graph(im, part, 16, 0.3, 7)),
                    ("top-K-anywhere", lambda im: build_union_graph(im, 51, 16, 0.3, 7))):
    lap_t = build_laplacian(build(0.5 + nyquist))
    c_t = analyze(nyquist)
    tex_ratio = np.abs(apply_laplacian(lap_t, c_t)).sum() / np.abs(c_t).sum()

    lap_e = build_laplacian(build(edge))
    c_e = analyze(edge)
    tube = np.abs(apply_laplacian(lap_e, c_e))[:, :, size // 2 - 1:size // 2 + 1]
    print(f"{name:>15}: texture |Lc|/|c| = {tex_ratio:.3f}   "
          f"edge-tube mean |Lc| = {tube.mean():.2e}")
print("both sparsify the texture, but only the directional operator keeps a")
print("large response on the contour - that asymmetry drives the separation.")
print(f"figures in {out_dir}")
