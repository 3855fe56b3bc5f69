"""Grayscale image file I/O.

Supported formats: binary PGM (P5) and grayscale PNG, both 8-bit and
16-bit.  Samples map linearly to [0, 1] on read; writers quantise with
round-half-up via ``np.rint``.  16-bit PGM is big-endian per the format.
"""

import re
from pathlib import Path

import numpy as np
from PIL import Image as PILImage

__all__ = ["read_image", "write_image", "read_pgm", "write_pgm",
           "read_png", "write_png", "read_mask", "write_mask"]


def _quantise(img, maxval):
    data = np.rint(np.clip(np.asarray(img, dtype=np.float64), 0.0, 1.0) * maxval)
    return data.astype(np.uint8 if maxval == 255 else np.uint16)


def write_pgm(img, path, bit_depth=8):
    if bit_depth not in (8, 16):
        raise ValueError("bit depth must be 8 or 16")
    maxval = 255 if bit_depth == 8 else 65535
    data = _quantise(img, maxval)
    if bit_depth == 16:
        data = data.astype(">u2")
    with open(path, "wb") as fh:
        fh.write(f"P5\n{img.shape[1]} {img.shape[0]}\n{maxval}\n".encode("ascii"))
        fh.write(data.tobytes())


def read_pgm(path):
    raw = Path(path).read_bytes()
    header = re.match(
        rb"P5\s+(?:#[^\n]*\s+)*(\d+)\s+(?:#[^\n]*\s+)*(\d+)\s+(?:#[^\n]*\s+)*(\d+)\s",
        raw,
    )
    if header is None:
        raise ValueError(f"{path}: not a binary PGM file")
    width, height, maxval = map(int, header.groups())
    if maxval not in (255, 65535):
        raise ValueError(f"{path}: unsupported maxval {maxval}")
    dtype = np.dtype(">u2") if maxval == 65535 else np.dtype(np.uint8)
    pixels = np.frombuffer(raw, dtype=dtype, count=width * height,
                           offset=header.end())
    return pixels.reshape(height, width).astype(np.float64) / maxval


def write_png(img, path, bit_depth=8):
    if bit_depth not in (8, 16):
        raise ValueError("bit depth must be 8 or 16")
    if bit_depth == 8:
        PILImage.fromarray(_quantise(img, 255), mode="L").save(path)
    else:
        PILImage.fromarray(_quantise(img, 65535)).save(path)


def read_png(path):
    with PILImage.open(path) as im:
        if im.mode in ("I;16", "I;16B", "I;16L", "I"):
            arr = np.asarray(im, dtype=np.float64)
            return arr / 65535.0
        if im.mode != "L":
            im = im.convert("L")
        return np.asarray(im, dtype=np.float64) / 255.0


def read_image(path):
    """Read a PGM or PNG file into a float image in [0, 1]."""
    suffix = Path(path).suffix.lower()
    if suffix == ".pgm":
        return read_pgm(path)
    if suffix == ".png":
        return read_png(path)
    raise ValueError(f"{path}: unsupported format {suffix!r} (use .pgm or .png)")


def write_image(img, path, bit_depth=8):
    """Write a float image in [0, 1] as PGM or PNG (clipping first)."""
    suffix = Path(path).suffix.lower()
    if suffix == ".pgm":
        write_pgm(img, path, bit_depth)
    elif suffix == ".png":
        write_png(img, path, bit_depth)
    else:
        raise ValueError(f"{path}: unsupported format {suffix!r} (use .pgm or .png)")


def read_mask(path):
    """Read an image file as a boolean mask: True where the sample is > 1/2."""
    return read_image(path) > 0.5


def write_mask(mask, path):
    write_image(mask.astype(np.float64), path, bit_depth=8)
