"""Collage gap and the collage bound ``h_p(L, A) <= h_p(L, W(L)) / (1 - s)``."""

from __future__ import annotations

import csv
import io
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .hyperspace import (
    DEFAULT_SNAP,
    FinitePointSet,
    format_float,
    hausdorff_partial,
    rasterize,
    snap_displacement,
)
from .ifs import IFSp, attractor, default_tol, hutchinson
from .maps import affine1d
from .pmetric import PartialMetric

CSV_HEADER = ("case", "epsilon", "distance", "bound", "slack", "holds")


def collage_gap(ifs, L, snap=DEFAULT_SNAP):
    """``h_p(L, W(L))`` with the exact (unsnapped) Hutchinson image.

    An interval L is rasterized at ``snap`` first.
    """
    L = rasterize(ifs.space, L, snap)
    return hausdorff_partial(ifs.space, L, hutchinson(ifs, L, snap=None))


@dataclass
class CollageResult:
    epsilon: float
    distance: float
    bound: float
    slack: float
    holds: bool
    iterations: int

    def row(self, case=""):
        return (
            str(case),
            format_float(self.epsilon),
            format_float(self.distance),
            format_float(self.bound),
            format_float(self.slack),
            "true" if self.holds else "false",
        )

    def verdict(self):
        rel = "<=" if self.holds else ">"
        return (
            f"{'holds' if self.holds else 'VIOLATED'}: h_p(L, A) = {self.distance:.12g} "
            f"{rel} eps/(1-s) + slack = {self.bound:.12g} + {self.slack:.3g}"
        )


def collage_slack(ifs, tol, snap):
    """Numerical allowance ``(tol + d) / (1 - s)``, d the largest snapping move.

    The computed attractor A_n satisfies ``h_p(A_n, W(A_n)) <= tol + d`` for
    the exact operator W; the collage bound applied to A_n itself turns that
    into its distance from the true attractor.
    """
    return (tol + snap_displacement(ifs.space, snap)) / (1.0 - ifs.factor)


def collage_bound_check(ifs, L, tol=None, snap=DEFAULT_SNAP, max_iter=200, A=None):
    """Compute the collage gap, the attractor and check the bound with explicit slack."""
    space = ifs.space
    if tol is None:
        tol = default_tol(space)
    L = rasterize(space, L, snap)
    eps = collage_gap(ifs, L, snap)
    iterations = 0
    if A is None:
        A, diag = attractor(ifs, seed=L, tol=tol, max_iter=max_iter, snap=snap)
        iterations = diag.iterations
    dist = hausdorff_partial(space, L, A)
    bound = eps / (1.0 - ifs.factor)
    slack = collage_slack(ifs, tol, snap)
    return CollageResult(eps, dist, bound, slack, dist <= bound + slack, iterations)


# --------------------------------------------------------------------------
# random sweeps
# --------------------------------------------------------------------------


@dataclass
class CollageCase:
    ifs: IFSp
    L: FinitePointSet


def random_affine_pair(rng, space, lip_range=(0.05, 0.8)):
    """Two random affine contractions of [lo, hi] (slopes of either sign)."""
    lo, hi = space.lo[0], space.hi[0]
    width = hi - lo
    maps = []
    for j in range(2):
        a = rng.uniform(*lip_range) * rng.choice([-1.0, 1.0])
        # image of [lo, hi] has length |a| * width; place it inside the box
        start = lo + rng.uniform(0.0, 1.0 - abs(a)) * width
        b = start - a * (lo if a >= 0 else hi)
        maps.append(affine1d(a, b, lip=abs(a), label=f"f{j + 1}"))
    return IFSp(space, maps)


def random_collage_cases(n_cases, seed=0, max_points=64):
    rng = np.random.default_rng(seed)
    space = PartialMetric.from_key("euclid")
    cases = []
    for _ in range(n_cases):
        ifs = random_affine_pair(rng, space)
        k = int(rng.integers(1, max_points + 1))
        cases.append(CollageCase(ifs, FinitePointSet(rng.uniform(0.0, 1.0, size=(k, 1)))))
    return cases


def collage_sweep(cases, workers=1, tol=None, snap=2.0**-8):
    """Run :func:`collage_bound_check` on every case; results keep the input order."""

    def run(case):
        return collage_bound_check(case.ifs, case.L, tol=tol, snap=snap)

    if workers <= 1:
        return [run(c) for c in cases]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run, cases))


def sweep_csv(results):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for i, r in enumerate(results):
        writer.writerow(r.row(i))
    return buf.getvalue()
