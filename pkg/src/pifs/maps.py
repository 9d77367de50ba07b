"""Lipschitz self-maps of a carrier and the algebra of their compositions.

Map literals (config files, CLI)::

    affine1d a b                     x -> a*x + b
    quad1d a                         x -> a*x**2
    affine2d m11 m12 m21 m22 v1 v2   x -> M @ x + v

A :class:`LipMap` carries an optional *declared* Lipschitz constant.
Declared constants compose by multiplication; :func:`lipschitz_estimate`
gives a sampled lower bound of the true constant to cross-check them.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import CarrierError, PreconditionError, SizeCapError
from .hyperspace import FinitePointSet, Interval1D

_KINDS = ("affine1d", "quad1d", "affine2d", "identity", "composition")


@dataclass(frozen=True, eq=False)
class LipMap:
    kind: str
    params: tuple = ()
    lip: float | None = None
    parts: tuple = ()
    label: str = ""
    metric: str | None = field(default=None)

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown map form {self.kind!r}")
        if self.lip is not None and not (self.lip >= 0):
            raise ValueError("declared Lipschitz constant must be >= 0")
        if not self.label:
            object.__setattr__(self, "label", self.literal)

    @property
    def dim(self):
        if self.kind == "affine2d":
            return 2
        if self.kind == "identity":
            return int(self.params[0])
        if self.kind == "composition":
            return self.parts[0].dim
        return 1

    @property
    def literal(self):
        if self.kind == "composition":
            return " o ".join(f"({p.label})" for p in self.parts)
        if self.kind == "identity":
            return "identity"
        return " ".join([self.kind] + [f"{v:g}" for v in self.params])

    def evaluate(self, X):
        """Apply to an ``(n, dim)`` array without any carrier checks."""
        X = np.asarray(X, dtype=np.float64)
        k = self.kind
        if k == "affine1d":
            a, b = self.params
            return a * X + b
        if k == "quad1d":
            return self.params[0] * (X * X)
        if k == "affine2d":
            m11, m12, m21, m22, v1, v2 = self.params
            out = np.empty_like(X)
            out[:, 0] = m11 * X[:, 0] + m12 * X[:, 1] + v1
            out[:, 1] = m21 * X[:, 0] + m22 * X[:, 1] + v2
            return out
        if k == "identity":
            return X.copy()
        for part in reversed(self.parts):
            X = part.evaluate(X)
        return X

    def __call__(self, X):
        return self.evaluate(X)

    def __repr__(self):
        lip = "unknown" if self.lip is None else f"{self.lip:g}"
        return f"LipMap({self.label!r}, lip={lip})"


def affine1d(alpha, beta=0.0, lip=None, label="", metric=None):
    return LipMap("affine1d", (float(alpha), float(beta)), lip, label=label, metric=metric)


def quad1d(alpha, lip=None, label="", metric=None):
    return LipMap("quad1d", (float(alpha),), lip, label=label, metric=metric)


def affine2d(matrix, shift, lip=None, label="", metric=None):
    m = np.asarray(matrix, dtype=float).reshape(2, 2)
    v = np.asarray(shift, dtype=float).reshape(2)
    params = (m[0, 0], m[0, 1], m[1, 0], m[1, 1], v[0], v[1])
    return LipMap("affine2d", tuple(float(p) for p in params), lip, label=label, metric=metric)


def identity(dim=1, label="id", metric=None):
    return LipMap("identity", (dim,), 1.0, label=label, metric=metric)


def parse_map(literal, lip=None, label="", metric=None):
    """Parse ``"affine1d a b"``, ``"quad1d a"`` or ``"affine2d m11 m12 m21 m22 v1 v2"``."""
    tokens = literal.split()
    if not tokens:
        raise ValueError("empty map literal")
    head, args = tokens[0], tokens[1:]
    try:
        vals = [float(t) for t in args]
    except ValueError:
        raise ValueError(f"non-numeric coefficient in map literal {literal!r}") from None
    arity = {"affine1d": 2, "quad1d": 1, "affine2d": 6}
    if head not in arity:
        raise ValueError(f"unknown map form {head!r}")
    if len(vals) != arity[head]:
        raise ValueError(f"{head} takes {arity[head]} coefficients, got {len(vals)}")
    if head == "affine2d":
        return affine2d(vals[:4], vals[4:], lip, label, metric)
    return LipMap(head, tuple(vals), lip, label=label, metric=metric)


def compose(f, g):
    """``f o g`` (g applied first); declared constants multiply when both are known."""
    if f.dim != g.dim:
        raise PreconditionError(f"cannot compose a {f.dim}-D map with a {g.dim}-D map")
    if f.metric and g.metric and f.metric != g.metric:
        raise PreconditionError(f"metric mismatch: {f.metric} vs {g.metric}")
    lip = f.lip * g.lip if f.lip is not None and g.lip is not None else None
    parts = _flatten(f) + _flatten(g)
    label = " o ".join(p.label for p in parts)
    return LipMap("composition", (), lip, parts, label, f.metric or g.metric)


def _flatten(f):
    return f.parts if f.kind == "composition" else (f,)


def compose_all(maps):
    """``maps[0] o maps[1] o ... o maps[-1]``."""
    out = maps[0]
    for m in maps[1:]:
        out = compose(out, m)
    return out


def apply(f, x, space=None):
    """Evaluate ``f`` at a point (or rows of points).

    With ``space`` given, both the input and the image must lie in the
    carrier; an escaping image raises :class:`CarrierError`.
    """
    arr = np.asarray(x, dtype=np.float64)
    shape = arr.shape
    X = arr.reshape(-1, f.dim)
    if space is not None:
        space.check_inside(X)
    Y = f.evaluate(X)
    if space is not None:
        try:
            space.check_inside(Y)
        except CarrierError as exc:
            raise CarrierError(f"image of {f.label} escapes the carrier: {exc}") from None
    return Y.reshape(shape)


def image(f, A):
    """``f(A)`` for a finite point set (exactly deduplicated)."""
    if isinstance(A, Interval1D):
        img = interval_image(f, A)
        if img is None:
            raise PreconditionError(f"no exact interval image for {f.label}")
        return img
    return FinitePointSet.build(f.evaluate(A.points))


def _monotone_on(f, a, b):
    """+1 / -1 if f is non-decreasing / non-increasing on [a, b], else 0."""
    if f.kind == "affine1d":
        return 1 if f.params[0] >= 0 else -1
    if f.kind == "identity":
        return 1
    if f.kind == "quad1d":
        alpha = f.params[0]
        if a >= 0:
            return 1 if alpha >= 0 else -1
        if b <= 0:
            return -1 if alpha >= 0 else 1
        return 0
    if f.kind == "composition":
        sign = 1
        lo, hi = a, b
        for part in reversed(f.parts):
            s = _monotone_on(part, lo, hi)
            if s == 0:
                return 0
            ends = part.evaluate(np.array([[lo], [hi]]))[:, 0]
            lo, hi = float(ends.min()), float(ends.max())
            sign *= s
        return sign
    return 0


def interval_image(f, A):
    """Exact image of an interval under a monotone 1-D map, or None."""
    if f.dim != 1 or _monotone_on(f, A.a, A.b) == 0:
        return None
    ends = f.evaluate(np.array([[A.a], [A.b]]))[:, 0]
    return Interval1D(float(ends.min()), float(ends.max()))


def check_self_map(f, space, per_axis=65, n_random=256, seed=0):
    """Raise :class:`CarrierError` unless f maps corners, a grid and random points into the carrier."""
    pts = np.vstack([space.grid(per_axis), space.sample(n_random, np.random.default_rng(seed))])
    try:
        space.check_inside(f.evaluate(pts))
    except CarrierError as exc:
        raise CarrierError(f"{f.label} does not map the carrier into itself: {exc}") from None
    return True


def analytic_lip(f, space):
    """An upper bound on the Lipschitz constant of f under ``space``, or None if unknown.

    Covers affine and quadratic forms under the euclidean rules and the
    non-negative linear and quadratic forms under the max rule.
    """
    if f.kind == "composition":
        bounds = [analytic_lip(p, space) for p in f.parts]
        return None if None in bounds else math.prod(bounds)
    if f.kind == "identity":
        return 1.0
    kind = space.kind
    if kind in ("euclid", "shifted"):
        if f.kind == "affine1d":
            L = abs(f.params[0])
        elif f.kind == "affine2d":
            m = np.array(f.params[:4]).reshape(2, 2)
            L = float(np.linalg.norm(m, 2))
        else:
            reach = max(abs(space.lo[0]), abs(space.hi[0]))
            L = 2 * abs(f.params[0]) * reach
        # a positive offset pins every ratio at x = y to 1
        return max(L, 1.0) if kind == "shifted" and space.offset > 0 else L
    if kind == "max":
        alpha = f.params[0]
        if f.kind == "affine1d" and alpha >= 0 and f.params[1] == 0:
            return alpha
        if f.kind == "quad1d" and alpha >= 0:
            return alpha * space.hi[0]
    return None


def estimate_points(space, n_samples, seed=0):
    """Deterministic carrier grid (corners included) plus seeded uniform samples."""
    per_axis = max(2, int(round(n_samples ** (1.0 / space.dim))))
    rng = np.random.default_rng(seed)
    return np.vstack([space.grid(per_axis), space.sample(n_samples, rng)])


def lipschitz_estimate(f, space, n_samples=257, seed=0, return_pair=False):
    """Sampled lower bound of ``sup p(f(x), f(y)) / p(x, y)`` over the carrier.

    The sample is a grid containing every carrier corner plus ``n_samples``
    seeded uniform points.  Images are not required to stay in the carrier.
    """
    if n_samples < 2:
        raise ValueError("lipschitz_estimate needs n_samples >= 2")
    X = estimate_points(space, n_samples, seed)
    ratio, i, j = kernels.ratio_max(*space.kernel_args(), X, f.evaluate(X))
    if i < 0:
        raise PreconditionError("every sampled pair has p(x, y) = 0; degenerate carrier")
    if return_pair:
        return ratio, (X[i], X[j])
    return ratio


# --------------------------------------------------------------------------
# semigroups
# --------------------------------------------------------------------------


@dataclass
class ClosureEntry:
    word: tuple
    declared: float | None
    estimate: float
    member: bool


@dataclass
class ClosureReport:
    predicate: str
    depth: int
    entries: list

    @property
    def violations(self):
        return [e for e in self.entries if not e.member]

    @property
    def closed(self):
        return not self.violations

    @property
    def witness(self):
        v = self.violations
        return v[0] if v else None

    def __str__(self):
        if self.closed:
            return f"{self.predicate}: closed up to word length {self.depth} ({len(self.entries)} words)"
        lines = [f"{self.predicate}: NOT closed; {len(self.violations)} violating words"]
        for e in self.violations:
            declared = "unknown" if e.declared is None else f"{e.declared:.12g}"
            lines.append(f"  {' o '.join(e.word)}: estimated Lip {e.estimate:.12g}, declared {declared}")
        return "\n".join(lines)


def parse_predicate(predicate):
    """``"lipschitz"``, ``"contraction"`` or ``"fixed_lip(L)"`` / ``"fixed_lip:L"``."""
    if isinstance(predicate, tuple):
        return predicate
    m = re.fullmatch(r"fixed_lip[(:]\s*([^)]+?)\s*\)?", predicate.strip())
    if m:
        return ("fixed_lip", float(m.group(1)))
    if predicate in ("lipschitz", "contraction"):
        return (predicate, None)
    raise ValueError(f"unknown predicate {predicate!r}")


def _member(kind, level, declared, estimate, tol):
    if declared is not None and estimate > declared + tol:
        # the declared constant is contradicted by a sampled pair
        return False
    if kind == "lipschitz":
        bound = declared if declared is not None else estimate
        return math.isfinite(bound)
    if kind == "contraction":
        bound = declared if declared is not None else estimate
        return bound < 1
    return abs(estimate - level) <= tol


def semigroup_closure_check(family, predicate, depth, space, n_samples=257, tol=1e-9):
    """Enumerate every composition of ``family`` up to ``depth`` factors and test membership.

    Words are visited by length, then lexicographically in family order.
    The generators themselves are listed first; if one of them already
    fails the predicate, the family does not lie in the set at all.
    """
    if not family:
        raise ValueError("empty family")
    if depth < 1:
        raise ValueError("depth must be >= 1")
    kind, level = parse_predicate(predicate)
    name = kind if level is None else f"{kind}({level:g})"
    entries = []
    for length in range(1, depth + 1):
        for combo in itertools.product(range(len(family)), repeat=length):
            f = compose_all([family[i] for i in combo])
            est = lipschitz_estimate(f, space, n_samples)
            entries.append(
                ClosureEntry(
                    tuple(family[i].label for i in combo),
                    f.lip,
                    est,
                    _member(kind, level, f.lip, est, tol),
                )
            )
    return ClosureReport(name, depth, entries)


def ifsp_semigroup_words(ifs, max_len, cap=10**5):
    """All compositions ``f_w1 o ... o f_wm`` for words of length 1..max_len.

    Returned in order of length, then lexicographically; each map carries
    the product of the generators' declared constants.
    """
    from .shiftspace import Word

    if max_len < 1:
        raise ValueError("max_len must be >= 1")
    n = len(ifs.maps)
    count = sum(n**m for m in range(1, max_len + 1))
    if count > cap:
        raise SizeCapError(f"{count} semigroup elements exceed the cap of {cap}")
    out = []
    for length in range(1, max_len + 1):
        for combo in itertools.product(range(1, n + 1), repeat=length):
            w = Word(combo, n)
            out.append((w, compose_all([ifs.maps[i - 1] for i in combo])))
    return out
