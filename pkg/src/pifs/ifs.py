"""Partial iterated function systems: fixed points, the Hutchinson operator, attractors.

Stopping rules use the partial-metric gap ``p(a, b) - min(p(a, a), p(b, b))``
rather than ``p(a, b)`` itself, so carriers with positive self-distances
can still converge.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import CarrierError, ConvergenceError, PreconditionError, SizeCapError
from .hyperspace import (
    DEFAULT_SNAP,
    FinitePointSet,
    Interval1D,
    excess_over,
    hausdorff_partial,
    rasterize,
    resolution_for,
    self_hausdorff,
    snap_displacement,
    union,
)
from .maps import check_self_map, interval_image

SELF_TOL = 1e-12
DEFAULT_SET_CAP = 10**6


@dataclass(frozen=True, eq=False)
class IFSp:
    """A carrier with finitely many contractions and an optional condensation set."""

    space: object
    maps: tuple
    condensation: object = None
    check_maps: bool = field(default=True, compare=False)

    def __post_init__(self):
        maps = tuple(self.maps)
        object.__setattr__(self, "maps", maps)
        if not maps:
            raise PreconditionError("an IFS_p needs at least one map")
        for f in maps:
            if f.lip is None:
                raise PreconditionError(f"map {f.label} has no declared contraction factor")
            if not 0 <= f.lip < 1:
                raise PreconditionError(f"map {f.label} has factor {f.lip}, need 0 <= s < 1")
            if f.dim != self.space.dim:
                raise CarrierError(f"map {f.label} is {f.dim}-D on a {self.space.dim}-D carrier")
            if self.check_maps:
                check_self_map(f, self.space)
        if self.condensation is not None:
            hcc = self_hausdorff(self.space, self.condensation)
            if hcc > SELF_TOL:
                raise PreconditionError(
                    f"condensation set has h_p(C, C) = {hcc:g} > 0; "
                    "its condensation transformation is not a contraction"
                )

    @property
    def factor(self):
        return max(f.lip for f in self.maps)

    @property
    def n_maps(self):
        return len(self.maps)


# --------------------------------------------------------------------------
# single maps
# --------------------------------------------------------------------------


@dataclass
class FixedPointDiagnostics:
    iterations: int
    gap: float
    self_distance: float
    residual: float


def _gap(space, x, y):
    pxy = float(space.rowwise(x, y)[0])
    sx, sy = space.self_distances(np.vstack([x, y]))
    return pxy - min(sx, sy), float(sy)


def fixed_point(f, space, x0=None, tol=1e-10, max_iter=10_000):
    """Iterate ``x <- f(x)`` until the partial-metric gap and the self-distance are both <= tol.

    Returns ``(x, diagnostics)``.  ``x0`` defaults to the carrier centre.
    The residual reported is ``p(x, f(x))``.
    """
    if f.lip is None or not f.lip < 1:
        raise PreconditionError(f"fixed_point needs a declared factor < 1, {f.label} has {f.lip}")
    if x0 is None:
        x0 = 0.5 * (np.asarray(space.lo) + np.asarray(space.hi))
    x = space.points(x0)
    if x.shape[0] != 1:
        raise ValueError("fixed_point starts from a single point")
    for n in range(1, max_iter + 1):
        y = f.evaluate(x)
        space.check_inside(y)
        gap, selfd = _gap(space, x, y)
        x = y
        if gap <= tol and selfd <= tol:
            fx = f.evaluate(x)
            residual = float(space.rowwise(x, fx)[0])
            return x[0], FixedPointDiagnostics(n, float(gap), float(selfd), residual)
    raise ConvergenceError(
        f"fixed point of {f.label} not reached in {max_iter} steps (gap {gap:.3g}, "
        f"self-distance {selfd:.3g}); tolerance too tight or declared factor wrong"
    )


def apriori_bound_check(f, space, x, tol=1e-9, return_terms=False, x_f=None):
    """Check ``p(x, x_f) <= p(x, f(x)) / (1 - s)`` with s the declared factor.

    ``x_f`` may be passed when the fixed point is already known; otherwise
    it is computed.  ``return_terms=True`` gives ``(holds, lhs, rhs)``.
    """
    X = space.points(x)
    if x_f is None:
        xf, _ = fixed_point(f, space, tol=min(tol, 1e-10))
    else:
        xf = space.points(x_f)[0]
    lhs = float(space.rowwise(X, xf[None, :])[0])
    rhs = float(space.rowwise(X, f.evaluate(X))[0]) / (1.0 - f.lip)
    holds = lhs <= rhs + tol
    return (holds, lhs, rhs) if return_terms else holds


def invariant_set_check(f, space, H, tol=1e-9):
    """If ``f(H)`` lies in ``H``, the fixed point of f lies in ``H`` too.

    The precondition is verified first (exactly for monotone maps on an
    interval, member by member for finite sets, within ``tol``) and a
    violation raises :class:`PreconditionError`.  Returns whether the
    computed fixed point is a member of ``H`` at resolution ``tol``.
    """
    if isinstance(H, Interval1D):
        img = interval_image(f, H)
        if img is None:
            pts = rasterize(space, H).points
            lo, hi = float(f.evaluate(pts).min()), float(f.evaluate(pts).max())
        else:
            lo, hi = img.a, img.b
        if lo < H.a - tol or hi > H.b + tol:
            raise PreconditionError(f"f(H) = [{lo:g}, {hi:g}] is not inside H = [{H.a:g}, {H.b:g}]")
        start = np.array([H.a])
    else:
        img = FinitePointSet(f.evaluate(H.points))
        out = excess_over(space, img, H)
        if out > tol:
            raise PreconditionError(f"f(H) leaves H by {out:.3g}")
        start = H.points[0]
    xf, _ = fixed_point(f, space, x0=start, tol=min(tol, 1e-10))
    if isinstance(H, Interval1D):
        return bool(H.a - tol <= xf[0] <= H.b + tol)
    return excess_over(space, FinitePointSet(xf[None, :]), H) <= tol


# --------------------------------------------------------------------------
# sets
# --------------------------------------------------------------------------


def _as_points(space, B, snap):
    if isinstance(B, Interval1D):
        return rasterize(space, B, snap if snap is not None else DEFAULT_SNAP)
    return B


def hutchinson(ifs, B, snap=DEFAULT_SNAP, cap=DEFAULT_SET_CAP):
    """``W(B)``: the union of the map images of B (and the condensation set).

    The union is deduplicated at grid resolution ``snap`` (a fraction of
    the carrier box), or exactly when ``snap`` is None.
    """
    space = ifs.space
    P = _as_points(space, B, snap).points
    parts = [f.evaluate(P) for f in ifs.maps]
    if ifs.condensation is not None:
        parts.append(_as_points(space, ifs.condensation, snap).points)
    pts = np.vstack(parts)
    space.check_inside(pts)
    out = FinitePointSet.build(pts, resolution_for(space, snap), space.lo)
    if len(out) > cap:
        raise SizeCapError(f"Hutchinson image has {len(out)} points, cap is {cap}")
    return out


def default_tol(space):
    return 1e-9 if space.dim == 1 else 1e-6


@dataclass
class AttractorDiagnostics:
    iterations: int
    gap: float
    plain_gap: float
    invariance_gap: float
    resolution: float
    tol: float
    cycle_length: int = 0
    gaps: list = field(default_factory=list)


def set_gap(space, A, B):
    """``h_p(A, B) - min(h_p(A, A), h_p(B, B))`` and the plain ``h_p(A, B)``."""
    if A.points.shape == B.points.shape and np.array_equal(A.points, B.points):
        same = self_hausdorff(space, A)
        return 0.0, same
    plain = hausdorff_partial(space, A, B)
    return plain - min(self_hausdorff(space, A), self_hausdorff(space, B)), plain


def attractor(ifs, seed=None, tol=None, max_iter=200, snap=DEFAULT_SNAP, cap=DEFAULT_SET_CAP):
    """Iterate the Hutchinson operator from ``seed`` until the set gap is <= tol.

    Returns ``(A, diagnostics)``.  With a grid (``snap`` not None) the
    iteration lives on finitely many node sets and so becomes periodic; when
    a state repeats before the gap rule fires, the union of the cycle is
    returned, which is mapped exactly onto itself.  ``cycle_length`` is 1
    for a plain fixed set, the period for a cycle union and 0 when the gap
    rule stopped the loop first.  ``resolution`` is the largest distance a
    point moves when snapped, the accuracy floor of the result.
    """
    space = ifs.space
    if tol is None:
        tol = default_tol(space)
    if seed is None:
        seed = FinitePointSet(np.asarray(space.lo, dtype=float)[None, :])
    res = resolution_for(space, snap)
    A = FinitePointSet.build(_as_points(space, seed, snap).points, res, space.lo)
    seen = {A.points.tobytes(): 0}
    history = [A]
    gaps = []
    cycle = 0
    for n in range(1, max_iter + 1):
        B = hutchinson(ifs, A, snap, cap)
        gap, plain = set_gap(space, A, B)
        gaps.append(gap)
        key = B.points.tobytes()
        if gap > tol and snap is not None and key in seen:
            start = seen[key]
            cycle = n - start
            B = union(*history[start:])
            gap, plain = set_gap(space, B, hutchinson(ifs, B, snap, cap))
        A = B
        if gap <= tol or cycle:
            inv, _ = set_gap(space, A, hutchinson(ifs, A, snap, cap))
            diag = AttractorDiagnostics(
                n, gap, plain, inv, snap_displacement(space, snap), tol, max(cycle, int(inv == 0.0)), gaps
            )
            return A, diag
        seen[key] = n
        history.append(B)
    raise ConvergenceError(
        f"attractor not reached in {max_iter} iterations (last gap {gaps[-1]:.3g} > tol {tol:g})"
    )


# --------------------------------------------------------------------------
# condensation
# --------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class CondensationMap:
    """The constant hyperspace transformation ``B -> C``."""

    C: object

    def __post_init__(self):
        if self.C is None:
            raise ValueError("a condensation set must be a non-empty compact set")

    def __call__(self, B):
        return self.C


def condensation_map(C):
    return CondensationMap(C)


@dataclass
class ProbeRow:
    B1: object
    B2: object
    image_distance: float
    distance: float

    @property
    def contracts(self):
        return self.image_distance < self.distance or self.image_distance == 0.0


@dataclass
class CondensationVerdict:
    contraction: bool
    self_distance: float
    rows: list
    witness: ProbeRow | None

    def __str__(self):
        if self.contraction:
            return f"contraction: h_p(C, C) = {self.self_distance:g}"
        parts = [
            f"h_p(w0(B1), w0(B2)) = {r.image_distance:g} vs h_p(B1, B2) = {r.distance:g}"
            for r in self.rows
        ]
        return "NOT a contraction; " + "; ".join(parts)


def condensation_contraction_check(C, space, probes=(), tol=SELF_TOL):
    """Decide whether ``B -> C`` is a contraction of the hyperspace.

    It is one exactly when ``h_p(C, C) = 0``.  The pair ``(C, C)`` is always
    appended to ``probes`` and serves as the witness otherwise.
    """
    w0 = condensation_map(C)
    pairs = list(probes) + [(C, C)]
    rows = [
        ProbeRow(B1, B2, hausdorff_partial(space, w0(B1), w0(B2)), hausdorff_partial(space, B1, B2))
        for B1, B2 in pairs
    ]
    hcc = self_hausdorff(space, C)
    contraction = hcc <= tol
    return CondensationVerdict(contraction, hcc, rows, None if contraction else rows[-1])
