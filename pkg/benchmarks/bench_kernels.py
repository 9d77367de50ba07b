"""Time the numba kernels against the pure-numpy fallback.

Usage::

    python3 benchmarks/bench_kernels.py [--sizes 500 2000 8000] [--repeat 3]

Each kernel runs once untimed to trigger compilation, then ``--repeat``
times; the best wall time is reported.  Results of both backends are
compared so a speedup never hides a wrong answer.
"""

import argparse
import time

import numpy as np

from pifs import kernels
from pifs.ifs import IFSp, attractor
from pifs.maps import affine2d


def best_of(fn, repeat):
    fn()
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def bench_kernels(sizes, repeat):
    rng = np.random.default_rng(0)
    rows = []
    for n in sizes:
        X = rng.random((n, 2))
        Y = X + rng.normal(scale=1e-3, size=X.shape)
        FX = 0.5 * X
        cases = {
            "directed": lambda: kernels.directed(kernels.EUCLID, 0.0, None, X, Y),
            "point_to_set": lambda: kernels.point_to_set(kernels.EUCLID, 0.0, None, X, Y),
            "ratio_max": lambda: kernels.ratio_max(kernels.EUCLID, 0.0, None, X, FX),
        }
        for name, fn in cases.items():
            res = {}
            for backend in ("numba", "numpy"):
                kernels.set_backend(backend)
                res[backend] = best_of(fn, repeat)
            agree = np.allclose(np.asarray(res["numba"][1], dtype=float),
                                np.asarray(res["numpy"][1], dtype=float), rtol=0, atol=1e-12)
            rows.append((name, n, res["numba"][0], res["numpy"][0], agree))
    return rows


def bench_sierpinski(snap, repeat):
    from pifs.pmetric import PartialMetric

    space = PartialMetric.from_key("euclid", box=((0.0, 0.0), (1.0, 1.0)))
    h = 0.5 * np.sin(np.pi / 3)
    maps = [affine2d(np.eye(2) * 0.5, v, lip=0.5) for v in [(0, 0), (0.5, 0), (0.25, h)]]
    ifs = IFSp(space, maps)
    out = {}
    for backend in ("numba", "numpy"):
        kernels.set_backend(backend)
        out[backend] = best_of(lambda: len(attractor(ifs, tol=1e-6, snap=snap)[0]), repeat)
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[500, 2000, 8000])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--snap", type=float, default=2.0**-7)
    args = ap.parse_args()

    print(f"{'kernel':<14}{'n':>7}{'numba s':>12}{'numpy s':>12}{'speedup':>10}  agree")
    for name, n, t_nb, t_np, agree in bench_kernels(args.sizes, args.repeat):
        print(f"{name:<14}{n:>7}{t_nb:>12.4f}{t_np:>12.4f}{t_np / t_nb:>10.1f}  {agree}")

    res = bench_sierpinski(args.snap, args.repeat)
    (t_nb, n_nb), (t_np, n_np) = res["numba"], res["numpy"]
    print(f"sierpinski attractor at snap {args.snap:g}: {n_nb} points")
    print(f"  numba {t_nb:.3f} s, numpy {t_np:.3f} s, speedup {t_np / t_nb:.1f}, same size {n_nb == n_np}")
    kernels.set_backend(kernels.DEFAULT_BACKEND)


if __name__ == "__main__":
    main()
