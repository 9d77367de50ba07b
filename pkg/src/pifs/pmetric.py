"""Partial metrics: the bundled instances, distance evaluation and axiom checks.

A partial metric relaxes a metric by letting the self-distance ``p(x, x)``
be positive.  The axioms checked here are

* P1  ``0 <= p(x, x) <= p(x, y)``
* P2  ``p(x, x) = p(x, y) = p(y, y)`` implies ``x = y``
* P3  ``p(x, y) = p(y, x)``
* P4  ``p(x, z) <= p(x, y) + p(y, z) - p(y, y)``

Instances are addressed by string keys: ``"max"``, ``"euclid"``,
``"shifted:<c>"`` and ``"shift_space:<N>:<K>"``.  The key ``"min"`` builds a
rule that is *not* a partial metric; it is only available with
``allow_broken=True`` and exists to exercise failure reporting.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import CarrierError

#: Self-distance of every word in the shift space (sum of 1/k^2).
SHIFT_CONSTANT = math.pi**2 / 6

_DEFAULT_BOX = {
    "max": ((0.0,), (10.0,)),
    "min": ((0.0,), (10.0,)),
    "euclid": ((0.0,), (1.0,)),
    "shifted": ((0.0,), (1.0,)),
}
_KINDS = ("max", "euclid", "shifted", "shift_space", "min")


@dataclass(frozen=True)
class PartialMetric:
    """A carrier box plus a distance rule.

    For ``shift_space`` the carrier is the set of words over ``{1..alphabet}``
    truncated to ``truncation`` letters, and ``lo``/``hi`` are unused.
    """

    kind: str
    lo: tuple = (0.0,)
    hi: tuple = (1.0,)
    offset: float = 0.0
    alphabet: int = 2
    truncation: int = 40
    name: str = field(default="", compare=False)

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown partial metric kind {self.kind!r}")
        if len(self.lo) != len(self.hi) or not self.lo:
            raise ValueError("carrier box needs matching non-empty lo/hi")
        if any(not (a <= b) for a, b in zip(self.lo, self.hi)):
            raise ValueError(f"empty carrier box {self.lo} .. {self.hi}")
        if self.offset < 0:
            raise ValueError("shifted_euclid offset must be >= 0")
        if self.kind in ("max", "min"):
            if self.dim != 1:
                # max(x, y) over several coordinates breaks P2
                raise ValueError(f"{self.kind} metric is one-dimensional")
            if self.lo[0] < 0:
                raise ValueError(f"{self.kind} metric lives on the non-negative reals")
        if self.kind == "shift_space" and (self.alphabet < 1 or self.truncation < 1):
            raise ValueError("shift space needs alphabet >= 1 and truncation K >= 1")
        if not self.name:
            object.__setattr__(self, "name", self.key)

    @classmethod
    def from_key(cls, key, box=None, allow_broken=False):
        """Build an instance from its config key.

        ``box`` is ``(lo, hi)`` with one entry per coordinate; each kind has
        a one-dimensional default.
        """
        key = key.strip()
        head, _, rest = key.partition(":")
        if head == "min" and not allow_broken:
            raise ValueError("the min rule is not a partial metric; pass allow_broken=True")
        if head == "shift_space":
            try:
                n, k = (int(v) for v in rest.split(":"))
            except ValueError:
                raise ValueError(f"expected shift_space:<N>:<K>, got {key!r}") from None
            return cls("shift_space", alphabet=n, truncation=k)
        offset = 0.0
        if head == "shifted":
            try:
                offset = float(rest)
            except ValueError:
                raise ValueError(f"expected shifted:<c>, got {key!r}") from None
        elif rest:
            raise ValueError(f"unexpected parameter in metric key {key!r}")
        if head not in _DEFAULT_BOX:
            raise ValueError(f"unknown metric key {key!r}")
        lo, hi = box if box is not None else _DEFAULT_BOX[head]
        return cls(head, tuple(map(float, lo)), tuple(map(float, hi)), offset=offset)

    @property
    def key(self):
        if self.kind == "shifted":
            return f"shifted:{self.offset:g}"
        if self.kind == "shift_space":
            return f"shift_space:{self.alphabet}:{self.truncation}"
        return self.kind

    @property
    def dim(self):
        return self.truncation if self.kind == "shift_space" else len(self.lo)

    @property
    def code(self):
        return {
            "euclid": kernels.EUCLID,
            "shifted": kernels.EUCLID,
            "max": kernels.MAX,
            "min": kernels.MIN,
            "shift_space": kernels.WORD,
        }[self.kind]

    @property
    def constant(self):
        if self.kind == "shift_space":
            return SHIFT_CONSTANT
        return self.offset

    @property
    def weights(self):
        if self.kind != "shift_space":
            return None
        return 3.0 ** -np.arange(1, self.truncation + 1)

    @property
    def box_width(self):
        return np.asarray(self.hi) - np.asarray(self.lo)

    def kernel_args(self):
        return self.code, self.constant, self.weights

    def points(self, pts):
        """Validate ``pts`` and return them as a float array of shape ``(n, dim)``."""
        if self.kind == "shift_space":
            from .shiftspace import words_to_array

            return words_to_array(pts, self.truncation, self.alphabet)
        arr = np.asarray(pts, dtype=np.float64)
        if arr.ndim == 0:
            arr = arr.reshape(1, 1)
        elif arr.ndim == 1:
            arr = arr.reshape(-1, 1) if self.dim == 1 else arr.reshape(1, -1)
        if arr.shape[1] != self.dim:
            raise CarrierError(f"points of dimension {arr.shape[1]} on a {self.dim}-D carrier")
        if not np.all(np.isfinite(arr)):
            raise CarrierError("points must be finite")
        self.check_inside(arr)
        return arr

    def check_inside(self, arr, slack=1e-12):
        lo = np.asarray(self.lo)
        hi = np.asarray(self.hi)
        pad = slack * np.maximum(1.0, np.abs(hi - lo))
        bad = np.any((arr < lo - pad) | (arr > hi + pad), axis=1)
        if bad.any():
            i = int(np.argmax(bad))
            raise CarrierError(
                f"point {arr[i].tolist()} outside carrier {list(self.lo)}..{list(self.hi)}"
            )

    def contains(self, arr, slack=1e-12):
        try:
            self.check_inside(np.atleast_2d(arr), slack)
        except CarrierError:
            return False
        return True

    def sample(self, n, rng):
        """``n`` uniform points of the carrier (random words for the shift space)."""
        if self.kind == "shift_space":
            return rng.integers(1, self.alphabet + 1, size=(n, self.truncation)).astype(float)
        return rng.uniform(self.lo, self.hi, size=(n, self.dim))

    def grid(self, per_axis):
        """Deterministic tensor grid including every box corner."""
        axes = [np.linspace(a, b, per_axis) for a, b in zip(self.lo, self.hi)]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)

    def pairwise(self, X, Y):
        return kernels.pairwise(*self.kernel_args(), X, Y)

    def rowwise(self, X, Y):
        """``p(X_i, Y_i)`` for matching rows."""
        X = np.asarray(X, dtype=np.float64)
        Y = np.asarray(Y, dtype=np.float64)
        if self.kind in ("euclid", "shifted"):
            return np.sqrt(np.sum((X - Y) ** 2, axis=1)) + self.offset
        if self.kind == "max":
            return np.maximum(X.max(axis=1), Y.max(axis=1))
        if self.kind == "min":
            return np.minimum(X.min(axis=1), Y.min(axis=1))
        return self.constant + (X != Y) @ self.weights

    def self_distances(self, X):
        """``p(x, x)`` for every row, in closed form."""
        X = np.asarray(X, dtype=np.float64)
        if self.kind == "max":
            return X.max(axis=1)
        if self.kind == "min":
            return X.min(axis=1)
        return np.full(X.shape[0], float(self.constant))


def pm_distance(space, x, y):
    """p(x, y) for two single points of ``space``."""
    X = space.points(_one(x))
    Y = space.points(_one(y))
    if X.shape[0] != 1 or Y.shape[0] != 1:
        raise ValueError("pm_distance takes single points")
    return float(space.pairwise(X, Y)[0, 0])


def self_distance(space, x):
    return pm_distance(space, x, x)


def _one(x):
    # words and scalars pass through; lists of coords become one row
    if hasattr(x, "letters"):
        return [x]
    return x


@dataclass
class AxiomResult:
    axiom: str
    passed: bool
    witness: tuple | None = None
    excess: float = 0.0
    detail: str = ""

    def __str__(self):
        state = "pass" if self.passed else "FAIL"
        line = f"{self.axiom}: {state}"
        if not self.passed:
            line += f"  witness={self.witness} excess={self.excess:.3g}  {self.detail}"
        return line


@dataclass
class AxiomReport:
    results: dict
    n_samples: int
    n_triples: int

    @property
    def passed(self):
        return all(r.passed for r in self.results.values())

    def __getitem__(self, axiom):
        return self.results[axiom]

    def __str__(self):
        return "\n".join(str(r) for r in self.results.values())


def check_axioms_matrix(D, distinct, tol=1e-12, triples=None, labels=None):
    """Check P1-P4 on a precomputed distance matrix.

    ``distinct[i, j]`` says whether samples i and j are different elements.
    ``triples`` is an ``(k, 3)`` index array; ``None`` means every triple.
    ``labels`` turns indices into printable witnesses.
    """
    n = D.shape[0]
    lab = labels if labels is not None else list(range(n))
    diag = np.diag(D)
    results = {}

    # P1 over ordered pairs (x, y): p(x, x) <= p(x, y) and p(x, x) >= 0
    excess = np.maximum(diag[:, None] - D, -diag[:, None])
    idx = np.argwhere(excess > tol)
    if idx.size:
        i, j = idx[0]
        results["P1"] = AxiomResult(
            "P1", False, (lab[i], lab[j]), float(excess[i, j]),
            f"p(x,x)={D[i, i]:.6g} > p(x,y)={D[i, j]:.6g}",
        )
    else:
        results["P1"] = AxiomResult("P1", True)

    # P2 over distinct pairs
    close = (np.abs(diag[:, None] - D) <= tol) & (np.abs(diag[None, :] - D) <= tol)
    idx = np.argwhere(close & distinct & np.triu(np.ones((n, n), dtype=bool), 1))
    if idx.size:
        i, j = idx[0]
        results["P2"] = AxiomResult(
            "P2", False, (lab[i], lab[j]), 0.0,
            f"p(x,x)=p(x,y)=p(y,y)={D[i, j]:.6g} for distinct x, y",
        )
    else:
        results["P2"] = AxiomResult("P2", True)

    asym = np.abs(D - D.T)
    idx = np.argwhere(asym > tol)
    if idx.size:
        i, j = idx[0]
        results["P3"] = AxiomResult(
            "P3", False, (lab[i], lab[j]), float(asym[i, j]),
            f"p(x,y)={D[i, j]:.17g} != p(y,x)={D[j, i]:.17g}",
        )
    else:
        results["P3"] = AxiomResult("P3", True)

    if triples is None:
        x, y, z, e = kernels.first_triangle_violation(D, tol)
        found = x >= 0
    else:
        t = np.asarray(triples)
        xs, ys, zs = t[:, 0], t[:, 1], t[:, 2]
        ex = D[xs, zs] - ((D[xs, ys] - D[ys, ys]) + D[ys, zs])
        bad = np.flatnonzero(ex > tol)
        found = bad.size > 0
        if found:
            k = bad[0]
            x, y, z, e = int(xs[k]), int(ys[k]), int(zs[k]), float(ex[k])
    if found:
        results["P4"] = AxiomResult(
            "P4", False, (lab[x], lab[y], lab[z]), e,
            f"p(x,z)={D[x, z]:.6g} > p(x,y)+p(y,z)-p(y,y)={D[x, y] + D[y, z] - D[y, y]:.6g}",
        )
    else:
        results["P4"] = AxiomResult("P4", True)
    return results


def verify_axioms(space, samples, tol=1e-12, n_triples=None, seed=0):
    """Check P1-P4 for ``space`` on a sample of its points.

    Pairs are always checked exhaustively.  Triples are exhaustive when
    ``n_triples`` is None, otherwise ``n_triples`` index triples are drawn
    with a seeded generator.  Failing axioms carry the first witness found.
    """
    X = space.points(samples)
    n = X.shape[0]
    if n == 0:
        raise ValueError("verify_axioms needs at least one sample")
    D = space.pairwise(X, X)
    distinct = np.any(X[:, None, :] != X[None, :, :], axis=2)
    triples = None
    if n_triples is not None:
        triples = np.random.default_rng(seed).integers(0, n, size=(n_triples, 3))
    labels = [_label(row, space) for row in X]
    results = check_axioms_matrix(D, distinct, tol, triples, labels)
    return AxiomReport(results, n, n**3 if triples is None else n_triples)


def _label(row, space):
    if space.kind == "shift_space":
        return "".join(str(int(v)) for v in row)
    if row.shape[0] == 1:
        return float(row[0])
    return tuple(float(v) for v in row)


def metric_continuity_probe(space, a, x1, x2, tol=1e-12):
    """Quantitative continuity of ``p(a, .)``.

    True when ``|p(a,x1) - p(a,x2)| <= p(x1,x2) - min(p(x1,x1), p(x2,x2))``
    up to ``tol``.
    """
    A, P, Q = (space.points(_one(v)) for v in (a, x1, x2))
    pts = np.vstack([A, P, Q])
    D = space.pairwise(pts, pts)
    lhs = abs(D[0, 1] - D[0, 2])
    rhs = D[1, 2] - min(D[1, 1], D[2, 2])
    return bool(lhs <= rhs + tol)
