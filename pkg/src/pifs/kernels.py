"""Hot numeric loops, in a numba flavour and a pure-numpy flavour.

Every kernel takes a metric *code* plus two parameters so that one compiled
function serves all bundled partial metrics:

=========  ===========================================================
code       p(x, y)
=========  ===========================================================
EUCLID     ``||x - y||_2 + c``  (c = 0 is the plain metric)
MAX        ``max(max(x), max(y))``
MIN        ``min(min(x), min(y))`` (deliberately broken, tests only)
WORD       ``c + sum_k w[k] * [x_k != y_k]`` (letters stored as floats)
=========  ===========================================================

The two flavours are interchangeable; :func:`set_backend` switches the
module-level dispatch, and ``PIFS_BACKEND=numpy`` selects the fallback at
import time.  All reductions are max/min, so both flavours return identical
values for EUCLID/MAX/MIN; WORD sums may differ in the last ulp.
"""

import numpy as np

from ._backend import DEFAULT_BACKEND, NUMBA_AVAILABLE, njit

EUCLID = 0
MAX = 1
MIN = 2
WORD = 3

_EMPTY_W = np.zeros(0)
_CHUNK = 512


# --------------------------------------------------------------------------
# numba flavour
# --------------------------------------------------------------------------


@njit(cache=True)
def _pd(code, c, w, x, y):
    if code == EUCLID:
        s = 0.0
        for k in range(x.shape[0]):
            d = x[k] - y[k]
            s += d * d
        return np.sqrt(s) + c
    if code == MAX:
        m = x[0]
        for k in range(x.shape[0]):
            if x[k] > m:
                m = x[k]
            if y[k] > m:
                m = y[k]
        return m
    if code == MIN:
        m = x[0]
        for k in range(x.shape[0]):
            if x[k] < m:
                m = x[k]
            if y[k] < m:
                m = y[k]
        return m
    s = 0.0
    for k in range(x.shape[0]):
        if x[k] != y[k]:
            s += w[k]
    return c + s


@njit(cache=True, nogil=True)
def _pairwise_nb(code, c, w, X, Y):
    n, m = X.shape[0], Y.shape[0]
    out = np.empty((n, m))
    for i in range(n):
        for j in range(m):
            out[i, j] = _pd(code, c, w, X[i], Y[j])
    return out


@njit(cache=True, nogil=True)
def _directed_nb(code, c, w, X, Y):
    # Visiting Y outward from X[i]'s position in the first coordinate finds a
    # close point early, so the break below fires fast.  Scan order never
    # changes the min, only how soon we may stop.
    m = Y.shape[0]
    first = Y[:, 0].copy()
    best = -np.inf
    for i in range(X.shape[0]):
        low = np.inf
        up = np.searchsorted(first, X[i, 0])
        down = up - 1
        while up < m or down >= 0:
            if up < m:
                d = _pd(code, c, w, X[i], Y[up])
                up += 1
                if d < low:
                    low = d
                    if low <= best:
                        break
            if down >= 0:
                d = _pd(code, c, w, X[i], Y[down])
                down -= 1
                if d < low:
                    low = d
                    if low <= best:
                        break
        if low > best:
            best = low
    return best


@njit(cache=True, nogil=True)
def _point_to_set_nb(code, c, w, X, Y):
    out = np.empty(X.shape[0])
    for i in range(X.shape[0]):
        low = np.inf
        for j in range(Y.shape[0]):
            d = _pd(code, c, w, X[i], Y[j])
            if d < low:
                low = d
        out[i] = low
    return out


@njit(cache=True, nogil=True)
def _diameter_nb(code, c, w, X):
    best = -np.inf
    for i in range(X.shape[0]):
        for j in range(i, X.shape[0]):
            d = _pd(code, c, w, X[i], X[j])
            if d > best:
                best = d
    return best


@njit(cache=True, nogil=True)
def _ratio_max_nb(code, c, w, X, FX):
    best = -1.0
    bi = -1
    bj = -1
    for i in range(X.shape[0]):
        for j in range(i + 1, X.shape[0]):
            den = _pd(code, c, w, X[i], X[j])
            if den > 0.0:
                r = _pd(code, c, w, FX[i], FX[j]) / den
                if r > best:
                    best = r
                    bi = i
                    bj = j
    return best, bi, bj


@njit(cache=True, nogil=True)
def _excess_nb(code, c, w, X, FX, t):
    best = -np.inf
    for i in range(X.shape[0]):
        for j in range(i, X.shape[0]):
            e = _pd(code, c, w, FX[i], FX[j]) - t * _pd(code, c, w, X[i], X[j])
            if e > best:
                best = e
    return best


@njit(cache=True, nogil=True)
def _triangle_nb(D, tol):
    n = D.shape[0]
    for x in range(n):
        for y in range(n):
            base = D[x, y] - D[y, y]
            for z in range(n):
                excess = D[x, z] - (base + D[y, z])
                if excess > tol:
                    return x, y, z, excess
    return -1, -1, -1, 0.0


# --------------------------------------------------------------------------
# numpy flavour
# --------------------------------------------------------------------------


def _pairwise_np(code, c, w, X, Y):
    if code == EUCLID:
        diff = X[:, None, :] - Y[None, :, :]
        return np.sqrt(np.sum(diff * diff, axis=2)) + c
    if code == MAX:
        return np.maximum.outer(X.max(axis=1), Y.max(axis=1))
    if code == MIN:
        return np.minimum.outer(X.min(axis=1), Y.min(axis=1))
    return c + (X[:, None, :] != Y[None, :, :]) @ w


def _row_chunks(n):
    for start in range(0, n, _CHUNK):
        yield start, min(start + _CHUNK, n)


def _directed_np(code, c, w, X, Y):
    return float(_point_to_set_np(code, c, w, X, Y).max())


def _point_to_set_np(code, c, w, X, Y):
    out = np.empty(X.shape[0])
    for a, b in _row_chunks(X.shape[0]):
        out[a:b] = _pairwise_np(code, c, w, X[a:b], Y).min(axis=1)
    return out


def _diameter_np(code, c, w, X):
    best = -np.inf
    for a, b in _row_chunks(X.shape[0]):
        best = max(best, float(_pairwise_np(code, c, w, X[a:b], X).max()))
    return best


def _ratio_max_np(code, c, w, X, FX):
    best, bi, bj = -1.0, -1, -1
    n = X.shape[0]
    for a, b in _row_chunks(n):
        den = _pairwise_np(code, c, w, X[a:b], X)
        num = _pairwise_np(code, c, w, FX[a:b], FX)
        rows = np.arange(a, b)[:, None]
        valid = (np.arange(n)[None, :] > rows) & (den > 0.0)
        if not valid.any():
            continue
        ratio = np.where(valid, num / np.where(valid, den, 1.0), -1.0)
        k = int(np.argmax(ratio))
        r = float(ratio.flat[k])
        if r > best:
            best, bi, bj = r, a + k // n, k % n
    return best, bi, bj


def _excess_np(code, c, w, X, FX, t):
    best = -np.inf
    n = X.shape[0]
    for a, b in _row_chunks(n):
        e = _pairwise_np(code, c, w, FX[a:b], FX) - t * _pairwise_np(code, c, w, X[a:b], X)
        mask = np.arange(n)[None, :] >= np.arange(a, b)[:, None]
        best = max(best, float(e[mask].max()))
    return best


def _triangle_np(D, tol):
    n = D.shape[0]
    diag = np.diag(D)
    for x in range(n):
        # excess[y, z] = D[x, z] - (D[x, y] - D[y, y] + D[y, z])
        excess = D[x][None, :] - ((D[x] - diag)[:, None] + D)
        hit = np.argwhere(excess > tol)
        if hit.size:
            y, z = hit[0]
            return x, int(y), int(z), float(excess[y, z])
    return -1, -1, -1, 0.0


# --------------------------------------------------------------------------
# dispatch
# --------------------------------------------------------------------------

_IMPLS = {
    "numba": {
        "pairwise": _pairwise_nb,
        "directed": _directed_nb,
        "point_to_set": _point_to_set_nb,
        "diameter": _diameter_nb,
        "ratio_max": _ratio_max_nb,
        "excess": _excess_nb,
        "triangle": _triangle_nb,
    },
    "numpy": {
        "pairwise": _pairwise_np,
        "directed": _directed_np,
        "point_to_set": _point_to_set_np,
        "diameter": _diameter_np,
        "ratio_max": _ratio_max_np,
        "excess": _excess_np,
        "triangle": _triangle_np,
    },
}

_active = _IMPLS[DEFAULT_BACKEND]
backend = DEFAULT_BACKEND


def set_backend(name):
    """Switch the kernels used by every module (``"numba"`` or ``"numpy"``)."""
    global _active, backend
    if name not in _IMPLS:
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba" and not NUMBA_AVAILABLE:
        raise RuntimeError("numba is not importable")
    _active = _IMPLS[name]
    backend = name


def get_backend():
    return backend


def _prep(X):
    return np.ascontiguousarray(X, dtype=np.float64)


def _w(w):
    return _EMPTY_W if w is None else np.ascontiguousarray(w, dtype=np.float64)


def pairwise(code, c, w, X, Y):
    """Full distance matrix between the rows of X and the rows of Y."""
    return _active["pairwise"](code, float(c), _w(w), _prep(X), _prep(Y))


def directed(code, c, w, X, Y):
    """``max_i min_j p(X_i, Y_j)``."""
    return float(_active["directed"](code, float(c), _w(w), _prep(X), _prep(Y)))


def point_to_set(code, c, w, X, Y):
    """Vector of ``min_j p(X_i, Y_j)``, one entry per row of X."""
    return _active["point_to_set"](code, float(c), _w(w), _prep(X), _prep(Y))


def diameter(code, c, w, X):
    """``max_{i<=j} p(X_i, X_j)``, self pairs included."""
    return float(_active["diameter"](code, float(c), _w(w), _prep(X)))


def ratio_max(code, c, w, X, FX):
    """Largest ``p(FX_i, FX_j) / p(X_i, X_j)`` over i<j with a positive denominator.

    Returns ``(ratio, i, j)``; ratio is -1 and the indices -1 when no pair
    qualifies.
    """
    r, i, j = _active["ratio_max"](code, float(c), _w(w), _prep(X), _prep(FX))
    return float(r), int(i), int(j)


def contraction_excess(code, c, w, X, FX, t):
    """``max_{i<=j} p(FX_i, FX_j) - t * p(X_i, X_j)``; non-positive means t-contractive."""
    return float(_active["excess"](code, float(c), _w(w), _prep(X), _prep(FX), float(t)))


def first_triangle_violation(D, tol):
    """Scan every (x, y, z) of a distance matrix for ``D[x,z] > D[x,y] + D[y,z] - D[y,y] + tol``.

    Returns ``(x, y, z, excess)`` for the first violation in lexicographic
    order, or ``(-1, -1, -1, 0.0)``.
    """
    x, y, z, e = _active["triangle"](_prep(D), float(tol))
    return int(x), int(y), int(z), float(e)
