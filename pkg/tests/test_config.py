import glob
import os

import numpy as np
import pytest

from pifs.config import (
    ConfigError,
    evaluate_coefficient,
    load_config,
    loads_config,
    parse_set_literal,
    sequence_literal,
)
from pifs.hyperspace import FinitePointSet, Interval1D, write_set

CONFIG_DIR = os.path.join(os.path.dirname(__file__), os.pardir, "configs")

BASIC = """
[space]
metric = euclid

[ifs]
snap = 2**-6
tol = 1e-8
seed_set = 0; 1   # two points

[map.10]
form = affine1d 1/2 1/2
lip = 1/2
label = right

[map.2]
form = affine1d 0.5 0
lip = 0.5
"""


def test_basic_recipe():
    exp = loads_config(BASIC)
    assert exp.space.key == "euclid"
    assert exp.snap == 2.0**-6 and exp.tol == 1e-8
    # sections sorted by numeric suffix; labels default to the suffix
    assert [m.label for m in exp.maps] == ["2", "right"]
    assert exp.maps[1].params == (0.5, 0.5)
    np.testing.assert_array_equal(exp.seed_set.points, [[0.0], [1.0]])
    assert exp.ifs().factor == 0.5


@pytest.mark.parametrize("path", sorted(glob.glob(os.path.join(CONFIG_DIR, "*.cfg"))))
def test_shipped_configs_load(path):
    exp = load_config(path)
    if exp.maps and all(m.lip < 1 for m in exp.maps):
        assert exp.ifs().n_maps == len(exp.maps)
    elif exp.maps:
        assert exp.semigroup
    else:
        assert exp.conspace or exp.collage


def test_coefficients():
    assert evaluate_coefficient("2**-8") == 2.0**-8
    assert evaluate_coefficient("-(1/3)") == -1 / 3
    assert evaluate_coefficient("0.2-0.1*2**-n", n=3) == pytest.approx(0.1875)
    assert sequence_literal("affine1d 0.5 1/n", 4) == "affine1d 0.5 0.25"


@pytest.mark.parametrize("bad", ["__import__('os')", "n", "1/0", "9**9**9", "x+1", "1 +"])
def test_unsafe_or_bad_coefficients(bad):
    with pytest.raises(ConfigError):
        evaluate_coefficient(bad)


def test_set_literals(tmp_path):
    assert parse_set_literal("interval 0.25 0.5") == Interval1D(0.25, 0.5)
    A = parse_set_literal("0 0 ; 0.5 0.5")
    np.testing.assert_array_equal(A.points, [[0, 0], [0.5, 0.5]])
    np.testing.assert_array_equal(parse_set_literal("0.5").points, [[0.5]])
    write_set(tmp_path / "pts.csv", FinitePointSet([[0.1], [0.2]]))
    np.testing.assert_array_equal(parse_set_literal("pts.csv", str(tmp_path)).points, [[0.1], [0.2]])
    with pytest.raises(ConfigError):
        parse_set_literal("0 0; 1")
    with pytest.raises(ConfigError):
        parse_set_literal("missing.csv", str(tmp_path))


@pytest.mark.parametrize(
    "text",
    [
        "[ifs]\nsnap = 1\n",
        "[space]\nlo = 0\n",
        "[space]\nmetric = nope\n",
        "[space]\nmetric = euclid\nlo = 0\n",
        "[space]\nmetric = euclid\n[map.1]\nlip = 0.5\n",
        "[space]\nmetric = euclid\n[map.1]\nform = cubic 1\n",
        "[space]\nmetric = euclid\n[conspace]\nt = 0.5\nsequence = affine1d 0.5 0\nmode = weird\n",
        "[space]\nmetric = euclid\n[ifs]\nmax_iter = many\n",
        "not an ini file",
    ],
)
def test_config_errors(text):
    with pytest.raises(ConfigError):
        loads_config(text)


def test_recipe_without_maps_has_no_ifs():
    with pytest.raises(ConfigError):
        loads_config("[space]\nmetric = euclid\n").ifs()


def test_snap_can_be_disabled():
    assert loads_config("[space]\nmetric = euclid\n[ifs]\nsnap = none\n").snap is None


def test_missing_file():
    with pytest.raises(ConfigError):
        load_config("/nonexistent/recipe.cfg")
