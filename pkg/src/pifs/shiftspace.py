"""Words over the map alphabet, the shift-space partial metric and addressing.

Infinite words are held as finite prefixes.  Where the metric needs letters
past the end of a prefix, the prefix is extended by repeating its last
letter.  Addressing only ever uses the explicit prefix.

The shift-space distance is

    p(a, b) = pi**2 / 6 + sum_{k>=1} [a_k != b_k] / 3**k

so every word has self-distance pi**2/6; the 1/k**2 series contributes the
constant :data:`pifs.pmetric.SHIFT_CONSTANT`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError
from .hyperspace import FinitePointSet, diameter
from .ifs import attractor, fixed_point
from .maps import compose_all
from .pmetric import SHIFT_CONSTANT, PartialMetric

DEFAULT_TRUNCATION = 40


@dataclass(frozen=True)
class Word:
    letters: tuple
    n: int

    def __post_init__(self):
        letters = tuple(int(v) for v in self.letters)
        object.__setattr__(self, "letters", letters)
        if self.n < 1:
            raise ValueError("alphabet size must be >= 1")
        bad = [v for v in letters if not 1 <= v <= self.n]
        if bad:
            raise ValueError(f"letters {bad} outside 1..{self.n}")

    @classmethod
    def parse(cls, digits, n):
        """``Word.parse("121", 2)``; letters are single digits 1..9."""
        digits = digits.strip()
        if digits and not digits.isdigit():
            raise ValueError(f"word must be a digit string, got {digits!r}")
        return cls(tuple(int(c) for c in digits), n)

    def __len__(self):
        return len(self.letters)

    def __str__(self):
        return "".join(str(v) for v in self.letters)

    def extend(self, letter):
        return Word(self.letters + (letter,), self.n)

    def padded(self, K):
        """First K letters, extending by the last letter when the prefix is short."""
        if not self.letters:
            raise ValueError("the empty word has no letters to pad with")
        out = list(self.letters[:K])
        out += [self.letters[-1]] * (K - len(out))
        return np.asarray(out, dtype=np.float64)


def words_to_array(words, K, n=None):
    """Stack words (Word, digit strings or letter rows) into a float array of shape ``(m, K)``."""
    if isinstance(words, (Word, str)):
        words = [words]
    if isinstance(words, np.ndarray):
        arr = np.atleast_2d(words).astype(np.float64)
        if arr.shape[1] < K:
            arr = np.hstack([arr, np.repeat(arr[:, -1:], K - arr.shape[1], axis=1)])
        arr = arr[:, :K]
    else:
        rows = []
        for w in words:
            if isinstance(w, str):
                w = Word.parse(w, n or 9)
            elif not isinstance(w, Word):
                w = Word(tuple(w), n or 9)
            rows.append(w.padded(K))
        arr = np.vstack(rows)
    if n is not None and (arr.min() < 1 or arr.max() > n):
        raise ValueError(f"letters outside 1..{n}")
    return arr


def shift_space(n, K=DEFAULT_TRUNCATION):
    return PartialMetric("shift_space", alphabet=n, truncation=K)


def shift_metric(alpha, beta, K=DEFAULT_TRUNCATION):
    """Distance between two words truncated at K letters.

    Returns ``(value, error_bound)``; the bound ``3**-K / 2`` covers the
    neglected tail of the letter-mismatch sum.
    """
    if K < 1:
        raise ValueError("truncation K must be >= 1")
    n = max(getattr(alpha, "n", 9), getattr(beta, "n", 9))
    space = shift_space(n, K)
    X = words_to_array([alpha, beta], K, n)
    value = float(space.pairwise(X[:1], X[1:])[0, 0])
    return value, 0.5 * 3.0**-K


def random_words(n_words, n, K, rng):
    return [Word(tuple(row), n) for row in rng.integers(1, n + 1, size=(n_words, K))]


# --------------------------------------------------------------------------
# addressing
# --------------------------------------------------------------------------


def _check_letters(ifs, w):
    bad = [v for v in w.letters if v > ifs.n_maps]
    if bad:
        raise ValueError(f"letters {bad} do not index the {ifs.n_maps} maps")


def word_map(ifs, w):
    """``f_{w1} o f_{w2} o ... o f_{wm}``."""
    _check_letters(ifs, w)
    return compose_all([ifs.maps[v - 1] for v in w.letters])


def cylinder_set(ifs, w, A):
    """Image of A under the word map (the first letter's map is applied last)."""
    if len(w) == 0:
        return A
    f = word_map(ifs, w)
    return FinitePointSet.build(f.evaluate(A.points))


def _diam_of_attractor(ifs):
    A, _ = attractor(ifs)
    return diameter(ifs.space, A)


def address_to_point(ifs, w, seed, attractor_diameter=None):
    """``f_w(seed)`` with error bound ``c**m * diam(A)``, c the largest declared factor."""
    if len(w) == 0:
        raise PreconditionError("addressing needs a word of length >= 1")
    f = word_map(ifs, w)
    x = ifs.space.points(seed)
    if attractor_diameter is None:
        attractor_diameter = _diam_of_attractor(ifs)
    return f.evaluate(x)[0], ifs.factor ** len(w) * attractor_diameter


@dataclass
class AddressCheck:
    word: Word
    fixed_point: np.ndarray
    address: np.ndarray
    distance: float
    bound: float
    holds: bool

    def __bool__(self):
        return self.holds


def composed_fixed_point_check(ifs, w, A=None, tol=1e-9):
    """Fixed point of the word map versus the addressed point, within ``c**m * diam(A)``."""
    if len(w) == 0:
        raise PreconditionError("need a word of length >= 1")
    if A is None:
        A, _ = attractor(ifs)
    diam = diameter(ifs.space, A)
    f = word_map(ifs, w)
    xw, _ = fixed_point(f, ifs.space, tol=min(tol, 1e-10))
    aw, bound = address_to_point(ifs, w, A.points[0], diam)
    dist = float(ifs.space.rowwise(xw[None, :], aw[None, :])[0])
    return AddressCheck(w, xw, aw, dist, bound, dist <= bound + tol)

