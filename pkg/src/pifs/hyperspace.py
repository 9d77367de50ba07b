"""Compact sets and the Hausdorff partial metric between them.

Two backends:

* :class:`FinitePointSet` -- a non-empty array of points, optionally rounded
  to the nodes of a grid (``resolution``) and deduplicated.
* :class:`Interval1D` -- an exact closed interval on a 1-D carrier, so that
  sup/inf over continuous sets is evaluated in closed form.

``directed_distance(A, B) = sup_{x in A} inf_{y in B} p(x, y)`` and
``hausdorff_partial(A, B)`` is the larger of the two directions.  Under a
proper partial metric ``hausdorff_partial(A, A)`` can be positive.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import CarrierError, PreconditionError

#: Default grid spacing as a fraction of the carrier box width.
DEFAULT_SNAP = 2.0**-10


@dataclass(frozen=True, eq=False)
class FinitePointSet:
    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim == 1:
            pts = pts.reshape(-1, 1)
        if pts.ndim != 2 or pts.shape[0] == 0:
            raise ValueError("a compact set needs at least one point")
        if not np.all(np.isfinite(pts)):
            raise ValueError("points must be finite")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @classmethod
    def build(cls, points, resolution=None, origin=None):
        """Deduplicate ``points``, after rounding them to grid nodes if ``resolution`` is set."""
        return cls(snap_dedup(points, resolution, origin))

    @property
    def dim(self):
        return self.points.shape[1]

    def __len__(self):
        return self.points.shape[0]

    def __repr__(self):
        return f"FinitePointSet(n={len(self)}, dim={self.dim})"


@dataclass(frozen=True)
class Interval1D:
    a: float
    b: float

    def __post_init__(self):
        if not (np.isfinite(self.a) and np.isfinite(self.b)):
            raise ValueError("interval endpoints must be finite")
        if self.a > self.b:
            raise ValueError(f"interval needs a <= b, got [{self.a}, {self.b}]")

    dim = 1


def snap_dedup(points, resolution=None, origin=None):
    """Round points to the nearest node of a grid and drop duplicates.

    Nodes sit at ``origin + k * resolution``.  With ``resolution=None``
    points are kept as they are and only exact duplicates are removed.  The
    result is sorted lexicographically, so it depends only on the input set.
    """
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts.reshape(-1, 1)
    if pts.shape[0] == 0:
        raise ValueError("cannot deduplicate an empty point set")
    if resolution is not None:
        res = np.broadcast_to(np.asarray(resolution, dtype=np.float64), (pts.shape[1],))
        org = np.zeros(pts.shape[1]) if origin is None else np.asarray(origin, dtype=np.float64)
        pts = np.rint((pts - org) / res) * res + org
    return np.unique(pts, axis=0)


def resolution_for(space, snap=DEFAULT_SNAP):
    """Per-axis grid spacing: ``snap`` times the carrier box width."""
    if snap is None:
        return None
    width = space.box_width
    return np.where(width > 0, width * snap, snap)


def snap_displacement(space, snap=DEFAULT_SNAP):
    """Largest distance a point moves when rounded to its grid node (offset excluded)."""
    if snap is None:
        return 0.0
    half = 0.5 * resolution_for(space, snap)
    if space.kind in ("max", "min"):
        return float(half[0])
    return float(np.sqrt(np.sum(half * half)))


def rasterize(space, A, snap=DEFAULT_SNAP):
    """Turn an interval into grid points (endpoints included); finite sets pass through."""
    if isinstance(A, FinitePointSet):
        return A
    _check_interval(space, A)
    if A.a == A.b:
        return FinitePointSet(np.array([[A.a]]))
    h = float(resolution_for(space, snap)[0]) if snap is not None else (A.b - A.a) / 1024
    n = int(np.ceil((A.b - A.a) / h))
    xs = np.linspace(A.a, A.b, n + 1)
    return FinitePointSet(xs.reshape(-1, 1))


def as_array(space, A):
    if isinstance(A, Interval1D):
        raise PreconditionError("interval has no finite point array; rasterize it first")
    if A.dim != space.dim:
        raise CarrierError(f"{A.dim}-D set on a {space.dim}-D carrier")
    return A.points


def union(*sets, resolution=None, origin=None):
    pts = np.vstack([s.points for s in sets])
    return FinitePointSet.build(pts, resolution, origin)


def _check_interval(space, A):
    if space.dim != 1:
        raise CarrierError("Interval1D is only valid on a 1-D carrier")
    if space.kind not in ("max", "euclid", "shifted"):
        raise PreconditionError(f"no interval closed form under the {space.kind} rule")
    if space.kind == "max" and A.a < 0:
        raise CarrierError("max-metric intervals need non-negative endpoints")


def _interval_inf(space, xs, B):
    """inf over y in B=[a, b] of p(x, y), vectorised over xs."""
    if space.kind == "max":
        return np.maximum(xs, B.a)
    return np.maximum.reduce([B.a - xs, np.zeros_like(xs), xs - B.b]) + space.offset


def point_to_set(space, x, B):
    """``inf_{y in B} p(x, y)``; exact for both backends."""
    X = space.points(x)
    if X.shape[0] != 1:
        raise ValueError("point_to_set takes a single point")
    if isinstance(B, Interval1D):
        _check_interval(space, B)
        return float(_interval_inf(space, X[:, 0], B)[0])
    return float(kernels.point_to_set(*space.kernel_args(), X, as_array(space, B))[0])


def directed_distance(space, A, B):
    """``sup_{x in A} inf_{y in B} p(x, y)``."""
    a_int = isinstance(A, Interval1D)
    b_int = isinstance(B, Interval1D)
    if a_int:
        _check_interval(space, A)
    if b_int:
        _check_interval(space, B)
    if not a_int and not b_int:
        return kernels.directed(*space.kernel_args(), as_array(space, A), as_array(space, B))
    if b_int:
        if a_int:
            # inf-distance to B is monotone (max) or convex (euclid) in x
            xs = np.array([A.a, A.b])
        else:
            xs = as_array(space, A)[:, 0]
        return float(_interval_inf(space, xs, B).max())
    ys = np.sort(as_array(space, B)[:, 0])
    if space.kind == "max":
        # x -> min_j max(x, y_j) is non-decreasing, sup at the right end
        return float(max(A.b, ys[0]))
    # piecewise-linear distance to the nearest y: maxima at ends or midpoints
    mids = 0.5 * (ys[1:] + ys[:-1])
    xs = np.concatenate([[A.a, A.b], mids[(mids > A.a) & (mids < A.b)]])
    d = np.min(np.abs(xs[:, None] - ys[None, :]), axis=1) + space.offset
    return float(d.max())


def hausdorff_partial(space, A, B):
    """``max(directed(A, B), directed(B, A))``."""
    return max(directed_distance(space, A, B), directed_distance(space, B, A))


def diameter(space, A):
    """``sup_{x, y in A} p(x, y)``, including x = y."""
    if isinstance(A, Interval1D):
        _check_interval(space, A)
        if space.kind == "max":
            return float(A.b)
        return float(A.b - A.a + space.offset)
    return kernels.diameter(*space.kernel_args(), as_array(space, A))


def self_hausdorff(space, A):
    """``h_p(A, A)``, which reduces to ``sup_{x in A} p(x, x)`` because of P1."""
    if isinstance(A, Interval1D):
        _check_interval(space, A)
        return float(A.b) if space.kind == "max" else float(space.offset)
    return float(space.self_distances(as_array(space, A)).max())


def excess_over(space, A, B):
    """``sup_{x in A} (inf_{y in B} p(x, y) - p(x, x))``: how far A sticks out of B.

    Zero (up to rounding) exactly when every point of A lies in B.
    """
    X = as_array(space, A)
    near = kernels.point_to_set(*space.kernel_args(), X, as_array(space, B))
    return float(np.max(near - space.self_distances(X)))


# --------------------------------------------------------------------------
# serialization
# --------------------------------------------------------------------------


def format_float(v):
    return repr(float(v))


def write_set(path, A):
    """One point per CSV row, or the single line ``interval a b``."""
    with open(path, "w", newline="") as fh:
        if isinstance(A, Interval1D):
            fh.write(f"interval {format_float(A.a)} {format_float(A.b)}\n")
            return
        writer = csv.writer(fh, lineterminator="\n")
        for row in A.points:
            writer.writerow([format_float(v) for v in row])


def parse_set(text):
    """Inverse of :func:`write_set` on the file contents."""
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    if not lines:
        raise ValueError("empty set file")
    if lines[0].startswith("interval"):
        parts = lines[0].split()
        if len(parts) != 3 or len(lines) != 1:
            raise ValueError("interval line must read 'interval a b'")
        return Interval1D(float(parts[1]), float(parts[2]))
    rows = [[float(tok) for tok in ln.split(",")] for ln in lines]
    if len({len(r) for r in rows}) != 1:
        raise ValueError("ragged point CSV")
    return FinitePointSet(np.array(rows))


def read_set(path):
    with open(path) as fh:
        return parse_set(fh.read())
