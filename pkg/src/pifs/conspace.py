"""The space of t-contractions, its capped sup partial metric and the fixed-point map.

``Con_t`` holds the self-maps f of a bounded carrier with
``p(f(x), f(y)) <= t * p(x, y)``.  Two elements are compared by

    pbar(f, g) = min(1, sup_x p(f(x), g(x)))

and ``r(f)`` is the fixed point of f.  Sups are taken over a deterministic
grid of the carrier that always contains the box corners.  For pairs of
``affine1d`` maps under a 1-D euclidean or max rule the pointwise distance
is convex in x, so the sup sits at an endpoint and is computed there in
closed form; every other pair gets a grid lower approximation, and the
reports say which one was used.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import PreconditionError
from .hyperspace import format_float
from .ifs import fixed_point
from .maps import affine1d, check_self_map
from .pmetric import AxiomReport, check_axioms_matrix

DEFAULT_GRID = 2**10 + 1
CAP = 1.0


@dataclass(frozen=True, eq=False)
class ConElement:
    """A map with declared factor ``<= t`` on a bounded carrier."""

    map: object
    t: float
    space: object

    def __post_init__(self):
        if not 0 <= self.t < 1:
            raise PreconditionError(f"Con_t needs 0 <= t < 1, got t = {self.t}")
        if self.map.lip is None or self.map.lip > self.t:
            raise PreconditionError(
                f"{self.map.label} has declared factor {self.map.lip}, which is not <= t = {self.t}"
            )
        if self.space.kind == "shift_space":
            raise PreconditionError("Con_t is only built over real carriers")
        check_self_map(self.map, self.space)

    @property
    def label(self):
        return self.map.label


def _same_setting(f, g):
    if f.t != g.t:
        raise PreconditionError(f"elements live in different spaces Con_{f.t} and Con_{g.t}")
    if f.space.key != g.space.key or not (
        np.array_equal(f.space.lo, g.space.lo) and np.array_equal(f.space.hi, g.space.hi)
    ):
        raise PreconditionError(f"space mismatch: {f.space.key} vs {g.space.key}")


def _grid(space, grid):
    if grid < 2:
        raise ValueError("the evaluation grid needs at least 2 points per axis")
    return space.grid(grid)


def _affine_pair(f, g):
    space = f.space
    return (
        f.map.kind == "affine1d"
        and g.map.kind == "affine1d"
        and space.dim == 1
        and space.kind in ("euclid", "shifted", "max")
    )


def _affine_sup(f, g):
    (a1, b1), (a2, b2) = f.map.params, g.map.params
    ends = np.array([f.space.lo[0], f.space.hi[0]])
    if f.space.kind == "max":
        return float(np.maximum(a1 * ends + b1, a2 * ends + b2).max())
    # |(a1 - a2) x + (b1 - b2)| keeps the exact offset when the slopes agree
    return float(np.abs((a1 - a2) * ends + (b1 - b2)).max()) + f.space.offset


def raw_sup(f, g, grid=DEFAULT_GRID):
    """``(sup_x p(f(x), g(x)), exact)`` without the cap."""
    _same_setting(f, g)
    if _affine_pair(f, g):
        return _affine_sup(f, g), True
    X = _grid(f.space, grid)
    return float(f.space.rowwise(f.map.evaluate(X), g.map.evaluate(X)).max()), False


def con_distance(f, g, grid=DEFAULT_GRID, with_status=False):
    """``min(1, sup_x p(f(x), g(x)))``.

    ``with_status=True`` returns ``(value, exact)`` where ``exact`` tells
    whether the closed form was used instead of the grid lower bound.
    """
    sup, exact = raw_sup(f, g, grid)
    value = min(CAP, sup)
    return (value, exact) if with_status else value


def con_distance_matrix(elements, grid=DEFAULT_GRID):
    """Every ``pbar(f_i, f_j)``, self pairs included."""
    n = len(elements)
    D = np.empty((n, n))
    for i in range(n):
        for j in range(i, n):
            D[i, j] = D[j, i] = con_distance(elements[i], elements[j], grid)
    return D


def verify_con_axioms(elements, grid=DEFAULT_GRID, tol=1e-12):
    """P1-P4 for ``pbar`` on a list of elements, every triple checked."""
    if not elements:
        raise ValueError("need at least one element")
    for e in elements[1:]:
        _same_setting(elements[0], e)
    D = con_distance_matrix(elements, grid)
    X = _grid(elements[0].space, grid)
    vals = [e.map.evaluate(X) for e in elements]
    n = len(elements)
    distinct = np.array([[not np.array_equal(vals[i], vals[j]) for j in range(n)] for i in range(n)])
    results = check_axioms_matrix(D, distinct, tol, labels=[e.label for e in elements])
    return AxiomReport(results, n, n**3)


def fixed_point_map(f, tol=1e-10, max_iter=10_000):
    """``r(f)``: the fixed point of the element, by fixed-point iteration."""
    x, _ = fixed_point(f.map, f.space, tol=tol, max_iter=max_iter)
    return x


# --------------------------------------------------------------------------
# continuity of r
# --------------------------------------------------------------------------

PROBE_HEADER = ("n", "pbar", "fixed_point_distance", "bound", "holds")


@dataclass
class ProbeRowC:
    n: int
    pbar: float
    exact: bool
    fp_distance: float
    excess: float
    bound: float
    holds: bool

    def row(self):
        return (
            str(self.n),
            format_float(self.pbar),
            format_float(self.fp_distance),
            format_float(self.bound),
            "true" if self.holds else "false",
        )


@dataclass
class ContinuityReport:
    rows: list
    limit_point: np.ndarray
    limit_self: float

    @property
    def holds(self):
        return all(r.holds for r in self.rows)

    @property
    def final_excess(self):
        """``p(r(f_N), r(f)) - p(r(f), r(f))`` for the last element."""
        return self.rows[-1].excess

    @property
    def witness(self):
        return next((r for r in self.rows if not r.holds), None)

    def to_csv(self):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(PROBE_HEADER)
        for r in self.rows:
            writer.writerow(r.row())
        return buf.getvalue()


def continuity_probe(sequence, limit, tol=1e-9, grid=DEFAULT_GRID):
    """Track ``p(r(f_n), r(f))`` against ``sup_x p(f_n(x), f(x)) / (1 - t)``.

    Each row holds when
    ``p(r(f_n), r(f)) - p(r(f), r(f)) <= sup / (1 - t) + tol``.  The bound
    uses the uncapped sup: once the sup passes 1 the capped ``pbar`` no
    longer controls the fixed points.  Rows report the capped ``pbar``.
    A sequence whose ``pbar`` to the limit ever increases is a malformed
    probe and raises :class:`PreconditionError`.
    """
    if not sequence:
        raise ValueError("continuity_probe needs a non-empty sequence")
    for f in sequence:
        _same_setting(f, limit)
    space = limit.space
    xf = fixed_point_map(limit)[None, :]
    self_lim = float(space.self_distances(xf)[0])
    rows = []
    prev = np.inf
    for n, f in enumerate(sequence, start=1):
        sup, exact = raw_sup(f, limit, grid)
        pbar = min(CAP, sup)
        if pbar > prev:
            raise PreconditionError(
                f"malformed probe: pbar(f_{n}, f) = {pbar:g} > pbar(f_{n - 1}, f) = {prev:g}"
            )
        prev = pbar
        xn = fixed_point_map(f)[None, :]
        dist = float(space.rowwise(xn, xf)[0])
        bound = sup / (1.0 - limit.t)
        excess = dist - self_lim
        rows.append(ProbeRowC(n, pbar, exact, dist, excess, bound, excess <= bound + tol))
    return ContinuityReport(rows, xf[0], self_lim)


# --------------------------------------------------------------------------
# completeness
# --------------------------------------------------------------------------


@dataclass
class CauchyReport:
    grid: np.ndarray
    limit_values: np.ndarray
    tail_gap: float
    distances: np.ndarray
    con_excess: float
    in_con_t: bool
    converges: bool
    limit_map: object = None


def _sup_dist(space, U, V):
    return float(space.rowwise(U, V).max())


def cauchy_completeness_probe(sequence, grid=DEFAULT_GRID, tol=1e-6):
    """Probe that a Cauchy sequence in ``Con_t`` has its limit in ``Con_t``.

    The sequence is Cauchy at this resolution when, over its second half,
    every ``pbar(f_m, f_n) - min(pbar(f_m, f_m), pbar(f_n, f_n))`` is at most
    ``tol``; otherwise :class:`PreconditionError` is raised.  The limit is
    the pointwise limit on the grid, estimated by the last element.  It is
    then checked against the ``Con_t`` condition on every grid pair, and
    ``pbar(f_n, limit)`` must settle (successive tail values within ``tol``).
    For sequences of ``affine1d`` maps a ``limit_map`` is read off the
    limit values at the carrier ends.
    """
    if len(sequence) < 2:
        raise ValueError("a Cauchy probe needs at least two elements")
    first = sequence[0]
    for f in sequence[1:]:
        _same_setting(first, f)
    space, t = first.space, first.t
    X = _grid(space, grid)
    vals = [f.map.evaluate(X) for f in sequence]

    tail = vals[len(vals) // 2 :]
    selfs = [min(CAP, float(space.self_distances(v).max())) for v in tail]
    gap = 0.0
    for i in range(len(tail)):
        for j in range(i + 1, len(tail)):
            d = min(CAP, _sup_dist(space, tail[i], tail[j]))
            gap = max(gap, d - min(selfs[i], selfs[j]))
    if gap > tol:
        raise PreconditionError(
            f"sequence is not Cauchy at this resolution: tail gap {gap:.3g} > tol {tol:g}"
        )

    limit = vals[-1]
    space.check_inside(limit, slack=tol)
    excess = kernels.contraction_excess(*space.kernel_args(), X, limit, t)
    dists = np.array([min(CAP, _sup_dist(space, v, limit)) for v in vals])
    settled = dists[len(dists) // 2 :]
    converges = bool(np.all(np.abs(np.diff(settled)) <= tol)) if settled.size > 1 else True

    limit_map = None
    if all(f.map.kind == "affine1d" for f in sequence) and space.dim == 1:
        lo, hi = float(X[0, 0]), float(X[-1, 0])
        slope = (float(limit[-1, 0]) - float(limit[0, 0])) / (hi - lo)
        limit_map = affine1d(slope, float(limit[0, 0]) - slope * lo, lip=t, label="limit")
    return CauchyReport(X, limit, gap, dists, excess, excess <= tol, converges, limit_map)
