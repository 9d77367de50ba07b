import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pifs.collage import (
    CSV_HEADER,
    collage_bound_check,
    collage_gap,
    collage_slack,
    collage_sweep,
    random_affine_pair,
    random_collage_cases,
    sweep_csv,
)
from pifs.hyperspace import FinitePointSet, Interval1D, hausdorff_partial, snap_displacement
from pifs.ifs import IFSp, attractor
from pifs.maps import affine1d
from pifs.pmetric import PartialMetric


@pytest.fixture
def halves(euclid_space):
    return IFSp(euclid_space, [affine1d(0.5, 0.0, lip=0.5), affine1d(0.5, 0.5, lip=0.5)])


def test_single_point_gap(euclid_space):
    ifs = IFSp(euclid_space, [affine1d(0.5, 0.25, lip=0.5)])
    assert collage_gap(ifs, FinitePointSet([[0.0]])) == 0.25


def test_single_point_bound_is_tight(euclid_space):
    # A = {0.5}; h_p({0}, A) = 0.5 = 0.25 / (1 - 0.5)
    ifs = IFSp(euclid_space, [affine1d(0.5, 0.25, lip=0.5)])
    res = collage_bound_check(ifs, FinitePointSet([[0.0]]))
    assert res.epsilon == 0.25
    assert res.distance == pytest.approx(0.5, abs=1e-9)
    assert res.bound == 0.5
    assert res.holds


def test_unit_interval_is_nearly_invariant(halves):
    snap = 2.0**-8
    assert collage_gap(halves, Interval1D(0, 1), snap=snap) <= snap
    res = collage_bound_check(halves, Interval1D(0, 1), snap=snap)
    assert res.distance == 0.0 and res.holds


def test_slack_formula(halves):
    tol, snap = 1e-9, 2.0**-8
    d = snap_displacement(halves.space, snap)
    assert collage_slack(halves, tol, snap) == pytest.approx((tol + d) / 0.5)


def test_precomputed_attractor_is_used(halves):
    A, _ = attractor(halves)
    res = collage_bound_check(halves, FinitePointSet([[0.2], [0.9]]), A=A)
    assert res.iterations == 0
    assert res.distance == hausdorff_partial(halves.space, FinitePointSet([[0.2], [0.9]]), A)


def test_row_and_verdict(euclid_space):
    ifs = IFSp(euclid_space, [affine1d(0.5, 0.25, lip=0.5)])
    res = collage_bound_check(ifs, FinitePointSet([[0.0]]))
    row = res.row(3)
    assert len(row) == len(CSV_HEADER)
    assert row[0] == "3" and row[1] == "0.25" and row[-1] == "true"
    assert res.verdict().startswith("holds")


def test_max_rule_collage():
    space = PartialMetric.from_key("max", box=((0.0,), (1.0,)))
    ifs = IFSp(space, [affine1d(0.5, 0.0, lip=0.5)])
    res = collage_bound_check(ifs, FinitePointSet([[1.0]]), tol=1e-9)
    assert res.holds


# -- sweeps ----------------------------------------------------------------------


def test_random_pairs_are_self_maps(rng, euclid_space):
    for _ in range(50):
        ifs = random_affine_pair(rng, euclid_space)
        assert ifs.factor < 1


def test_sweep_holds_and_is_deterministic():
    cases = random_collage_cases(12, seed=7)
    one = sweep_csv(collage_sweep(cases, workers=1))
    many = sweep_csv(collage_sweep(random_collage_cases(12, seed=7), workers=4))
    assert one == many
    lines = one.splitlines()
    assert lines[0] == ",".join(CSV_HEADER)
    assert len(lines) == 13
    assert all(line.endswith("true") for line in lines[1:])


def test_cases_depend_on_the_seed():
    a = random_collage_cases(3, seed=1)
    b = random_collage_cases(3, seed=2)
    assert not np.array_equal(a[0].L.points, b[0].L.points)


# -- properties ------------------------------------------------------------------


@settings(max_examples=25)
@given(seed=st.integers(0, 2**32 - 1))
def test_collage_bound_property(seed):
    case = random_collage_cases(1, seed=seed)[0]
    assert collage_sweep([case])[0].holds


@given(
    a=st.floats(0.05, 0.9),
    b=st.floats(0.0, 1.0),
    pts=st.lists(st.floats(0.0, 1.0), min_size=1, max_size=10),
)
def test_fixed_point_singleton_has_zero_gap(a, b, pts):
    space = PartialMetric.from_key("euclid")
    f = affine1d(a, b * (1 - a), lip=a)
    ifs = IFSp(space, [f])
    L = FinitePointSet(np.array(pts)[:, None])
    eps = collage_gap(ifs, L, snap=None)
    # the fixed point is b, and {b} has zero gap
    assert eps >= 0
    assert collage_gap(ifs, FinitePointSet([[b]]), snap=None) <= 1e-12
