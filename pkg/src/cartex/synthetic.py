"""Synthetic cartoon + texture test images.

A synthetic instance is described declaratively: a list of flat geometric
primitives (disks, filled polygons) painted over a constant background,
plus a list of windowed oriented sinusoid patches.  Rendering returns the
cartoon and texture layers separately so decomposition quality can be
measured against ground truth.

Spec files are flat key-value text, one primitive per line::

    width = 128
    height = 128
    background = 0.5
    seed = 7
    # disk = cx cy radius intensity
    disk = 40 40 18 0.25
    # polygon = intensity x1 y1 x2 y2 x3 y3 ...
    polygon = 0.8 70 20 110 40 90 70
    # sinusoid = x0 y0 width height frequency orientation amplitude [phase] [taper]
    sinusoid = 8 70 100 48 0.2 0.6 0.18 0.0 4
"""

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Disk",
    "Polygon",
    "SinusoidPatch",
    "SyntheticSpec",
    "render_synthetic",
    "make_random_spec",
    "read_spec_file",
    "write_spec_file",
]


@dataclass(frozen=True)
class Disk:
    cx: float
    cy: float
    radius: float
    intensity: float


@dataclass(frozen=True)
class Polygon:
    points: tuple  # ((x, y), ...)
    intensity: float


@dataclass(frozen=True)
class SinusoidPatch:
    """Oriented sinusoid on a rectangular support with a cosine edge taper.

    ``frequency`` is in cycles/pixel along the direction ``orientation``
    (radians); ``taper`` is the width in pixels of the raised-cosine ramp
    at the support boundary (0 gives a hard window).
    """

    x0: float
    y0: float
    width: float
    height: float
    frequency: float
    orientation: float
    amplitude: float
    phase: float = 0.0
    taper: float = 0.0


@dataclass
class SyntheticSpec:
    width: int = 128
    height: int = 128
    background: float = 0.5
    cartoon: list = field(default_factory=list)
    texture: list = field(default_factory=list)
    seed: int = 0


def _require_inside(name, xmin, xmax, ymin, ymax, shape):
    h, w = shape
    if xmin < 0 or ymin < 0 or xmax > w or ymax > h:
        raise ValueError(
            f"{name} extends outside the {w}x{h} canvas "
            f"(x: {xmin:.1f}..{xmax:.1f}, y: {ymin:.1f}..{ymax:.1f})"
        )


def _paint_disk(canvas, xs, ys, d):
    _require_inside("disk", d.cx - d.radius, d.cx + d.radius,
                    d.cy - d.radius, d.cy + d.radius, canvas.shape)
    inside = (xs - d.cx) ** 2 + (ys - d.cy) ** 2 <= d.radius ** 2
    canvas[inside] = d.intensity


def _paint_polygon(canvas, xs, ys, poly):
    pts = np.asarray(poly.points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[0] < 3 or pts.shape[1] != 2:
        raise ValueError("polygon needs at least 3 (x, y) vertices")
    _require_inside("polygon", pts[:, 0].min(), pts[:, 0].max(),
                    pts[:, 1].min(), pts[:, 1].max(), canvas.shape)
    # even-odd ray casting over all edges at once
    inside = np.zeros(canvas.shape, dtype=bool)
    x1, y1 = pts[:, 0], pts[:, 1]
    x2, y2 = np.roll(x1, -1), np.roll(y1, -1)
    for ex1, ey1, ex2, ey2 in zip(x1, y1, x2, y2):
        if ey1 == ey2:
            continue
        crosses = (ys >= min(ey1, ey2)) & (ys < max(ey1, ey2))
        xcross = ex1 + (ys - ey1) * (ex2 - ex1) / (ey2 - ey1)
        inside ^= crosses & (xs < xcross)
    canvas[inside] = poly.intensity


def _ramp(t, taper):
    """Raised-cosine ramp from the support edge: 0 outside, 1 past ``taper``."""
    if taper <= 0:
        return (t >= 0).astype(np.float64)
    r = np.clip(t / taper, 0.0, 1.0)
    return np.where(t < 0, 0.0, 0.5 - 0.5 * np.cos(np.pi * r))


def _add_sinusoid(canvas, xs, ys, p):
    _require_inside("sinusoid", p.x0, p.x0 + p.width, p.y0, p.y0 + p.height,
                    canvas.shape)
    win = (
        _ramp(xs - p.x0, p.taper) * _ramp(p.x0 + p.width - xs, p.taper)
        * _ramp(ys - p.y0, p.taper) * _ramp(p.y0 + p.height - ys, p.taper)
    )
    carrier = np.sin(
        2.0 * np.pi * p.frequency * (xs * np.cos(p.orientation) + ys * np.sin(p.orientation))
        + p.phase
    )
    canvas += p.amplitude * carrier * win


def render_synthetic(spec):
    """Render a spec into (cartoon, texture, mix) float images.

    The mix is ``clip(cartoon + texture, 0, 1)`` pixelwise; cartoon and
    texture are returned unclipped as ground truth.
    """
    h, w = spec.height, spec.width
    ys, xs = np.mgrid[0:h, 0:w].astype(np.float64)
    cartoon = np.full((h, w), float(spec.background))
    for prim in spec.cartoon:
        if isinstance(prim, Disk):
            _paint_disk(cartoon, xs, ys, prim)
        elif isinstance(prim, Polygon):
            _paint_polygon(cartoon, xs, ys, prim)
        else:
            raise ValueError(f"unknown cartoon primitive {type(prim).__name__}")
    texture = np.zeros((h, w))
    for patch in spec.texture:
        _add_sinusoid(texture, xs, ys, patch)
    mix = np.clip(cartoon + texture, 0.0, 1.0)
    return cartoon, texture, mix


def _regular_polygon(cx, cy, radius, n_sides, angle, intensity):
    th = angle + 2.0 * np.pi * np.arange(n_sides) / n_sides
    pts = tuple((cx + radius * np.cos(t), cy + radius * np.sin(t)) for t in th)
    return Polygon(points=pts, intensity=intensity)


def make_random_spec(seed, size=128, n_shapes=3, n_patches=3, amplitude=0.18):
    """Random cartoon/texture spec whose unclipped sum stays inside [0, 1].

    Shapes are disks and regular polygons (straight contour edges dominate,
    as in typical cartoon layers); textures are oriented sinusoid patches
    with mid-band frequencies.  Patches occupy disjoint quadrant cells so
    their amplitudes never add up, which keeps the mix free of clipping
    and the returned layers an exact decomposition of it.
    """
    if n_patches > 4:
        raise ValueError("at most 4 texture patches (one per quadrant cell)")
    rng = np.random.default_rng(seed)
    lo, hi = amplitude + 0.02, 1.0 - amplitude - 0.02
    spec = SyntheticSpec(
        width=size,
        height=size,
        background=float(rng.uniform(max(lo, 0.4), min(hi, 0.6))),
        seed=seed,
    )
    for _ in range(n_shapes):
        r = float(rng.uniform(0.12, 0.27) * size)
        cx = float(rng.uniform(r + 1, size - r - 1))
        cy = float(rng.uniform(r + 1, size - r - 1))
        level = float(rng.uniform(lo, hi))
        if rng.random() < 0.4:
            spec.cartoon.append(Disk(cx, cy, r, level))
        else:
            n_sides = int(rng.integers(3, 7))
            spec.cartoon.append(
                _regular_polygon(cx, cy, r, n_sides, float(rng.uniform(0, np.pi)), level)
            )
    half = size // 2
    cells = [(0, 0), (0, half), (half, 0), (half, half)]
    rng.shuffle(cells)
    for cy0, cx0 in cells[:n_patches]:
        w = float(rng.uniform(0.6, 0.95) * (half - 2))
        h = float(rng.uniform(0.6, 0.95) * (half - 2))
        x0 = float(cx0 + rng.uniform(1, half - w - 1))
        y0 = float(cy0 + rng.uniform(1, half - h - 1))
        spec.texture.append(
            SinusoidPatch(
                x0=x0, y0=y0, width=w, height=h,
                frequency=float(rng.uniform(1 / 10, 1 / 4)),
                orientation=float(rng.uniform(0, np.pi)),
                amplitude=float(rng.uniform(0.6, 1.0) * amplitude),
                phase=float(rng.uniform(0, 2 * np.pi)),
                taper=4.0,
            )
        )
    return spec


def _fmt(value):
    return repr(float(value))


def write_spec_file(spec, path):
    lines = [
        f"width = {spec.width}",
        f"height = {spec.height}",
        f"background = {_fmt(spec.background)}",
        f"seed = {spec.seed}",
    ]
    for prim in spec.cartoon:
        if isinstance(prim, Disk):
            lines.append("disk = " + " ".join(
                map(_fmt, (prim.cx, prim.cy, prim.radius, prim.intensity))))
        else:
            coords = " ".join(f"{_fmt(x)} {_fmt(y)}" for x, y in prim.points)
            lines.append(f"polygon = {_fmt(prim.intensity)} {coords}")
    for p in spec.texture:
        lines.append("sinusoid = " + " ".join(
            map(_fmt, (p.x0, p.y0, p.width, p.height, p.frequency,
                       p.orientation, p.amplitude, p.phase, p.taper))))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_spec_file(path):
    spec = SyntheticSpec(cartoon=[], texture=[])
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value'")
            key, _, value = line.partition("=")
            key = key.strip().lower()
            parts = value.split()
            try:
                if key == "width":
                    spec.width = int(parts[0])
                elif key == "height":
                    spec.height = int(parts[0])
                elif key == "background":
                    spec.background = float(parts[0])
                elif key == "seed":
                    spec.seed = int(parts[0])
                elif key == "disk":
                    cx, cy, r, level = map(float, parts)
                    spec.cartoon.append(Disk(cx, cy, r, level))
                elif key == "polygon":
                    level = float(parts[0])
                    coords = list(map(float, parts[1:]))
                    if len(coords) < 6 or len(coords) % 2:
                        raise ValueError("polygon needs >= 3 coordinate pairs")
                    pts = tuple(zip(coords[0::2], coords[1::2]))
                    spec.cartoon.append(Polygon(points=pts, intensity=level))
                elif key == "sinusoid":
                    vals = list(map(float, parts))
                    if len(vals) < 7:
                        raise ValueError("sinusoid needs at least 7 numbers")
                    spec.texture.append(SinusoidPatch(*vals))
                else:
                    raise ValueError(f"unknown key {key!r}")
            except (ValueError, TypeError) as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from exc
    return spec
