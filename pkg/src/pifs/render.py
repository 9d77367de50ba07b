"""Plain-text PGM (P2) rasters of point sets.

The carrier box is split into ``width x height`` cells; a pixel is 255 when
at least one point falls in its cell and 0 otherwise.  Row 0 is the bottom
of the box (smallest y), so the origin pixel is the box minimum corner.
1-D carriers render as a single row.  No anti-aliasing, so the output is
bit-exact for a given point set.
"""

from __future__ import annotations

import numpy as np

from .hyperspace import Interval1D, rasterize

MAXVAL = 255


def raster(space, A, width=256, height=256):
    """Occupancy image as a ``(rows, width)`` uint8 array."""
    if isinstance(A, Interval1D):
        A = rasterize(space, A)
    if width < 1 or height < 1:
        raise ValueError("image dimensions must be positive")
    pts = A.points
    lo = np.asarray(space.lo, dtype=float)
    span = np.asarray(space.hi, dtype=float) - lo
    span = np.where(span > 0, span, 1.0)
    rows = 1 if space.dim == 1 else height
    img = np.zeros((rows, width), dtype=np.uint8)
    col = np.clip(np.floor((pts[:, 0] - lo[0]) / span[0] * width), 0, width - 1).astype(int)
    if space.dim == 1:
        row = np.zeros_like(col)
    else:
        row = np.clip(np.floor((pts[:, 1] - lo[1]) / span[1] * height), 0, height - 1).astype(int)
    img[row, col] = MAXVAL
    return img


def pgm_text(img):
    """Serialize a raster as ASCII PGM: ``P2``, ``width height``, ``255``, then rows."""
    h, w = img.shape
    lines = ["P2", f"{w} {h}", str(MAXVAL)]
    lines += [" ".join(str(int(v)) for v in row) for row in img]
    return "\n".join(lines) + "\n"


def write_pgm(path, space, A, width=256, height=256):
    with open(path, "w", newline="\n") as fh:
        fh.write(pgm_text(raster(space, A, width, height)))


def read_pgm(path):
    with open(path) as fh:
        tokens = fh.read().split()
    if not tokens or tokens[0] != "P2":
        raise ValueError("not an ASCII PGM (P2) file")
    w, h, maxval = int(tokens[1]), int(tokens[2]), int(tokens[3])
    vals = np.array([int(v) for v in tokens[4:]], dtype=np.int64)
    if vals.size != w * h or maxval != MAXVAL:
        raise ValueError("PGM body does not match its header")
    return vals.reshape(h, w).astype(np.uint8)
