"""Wall-clock comparison of the numba kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 5] [--quick]

Both backends are imported side by side (the ``NCK_JIT`` switch only picks
the default one), so a single run times both. The first numba call of each
kernel is made before timing to keep compilation out of the numbers.
"""

import argparse
import time

import numpy as np

from ncklab import kernels
from ncklab._jit import thread_count
from ncklab.schurhorn import family1_pair

TOL = 1e-15
SWEEPS = 80


def _herm(rng, n):
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return np.ascontiguousarray(a + a.conj().T)


def _gen(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def cases(quick):
    rng = np.random.default_rng(0)
    sizes = (8, 32) if quick else (8, 32, 96)
    for n in sizes:
        a = _herm(rng, n)
        yield f"herm_jacobi n={n}", "herm_jacobi", (a, TOL, SWEEPS)
    for n in sizes:
        w = np.ascontiguousarray(_gen(rng, n, n).T)
        yield f"onesided_jacobi n={n}", "onesided_jacobi", (w, TOL, SWEEPS)
    for p, n in ((256, 4), (64, 16)) if quick else ((1024, 4), (256, 16), (64, 32)):
        st = _gen(rng, p, n, n)
        yield f"batch_singular_values {p}x{n}x{n}", "batch_singular_values", (st, TOL, SWEEPS)
    for N in (64, 256) if quick else (64, 256, 1024):
        pair = family1_pair(N)
        lam = np.ascontiguousarray(pair.lam)
        tgt = np.ascontiguousarray(pair.diag)
        yield f"givens_chain n={lam.size}", "givens_chain", (lam, tgt, 1e-12)


def _time(fn, args, repeat):
    best = np.inf
    for _ in range(repeat):
        fresh = tuple(a.copy() if isinstance(a, np.ndarray) else a for a in args)
        t0 = time.perf_counter()
        fn(*fresh)
        best = min(best, time.perf_counter() - t0)
    return best


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--quick", action="store_true", help="smaller sizes")
    args = ap.parse_args(argv)

    nb = kernels.numba_backend
    npb = kernels.numpy_backend
    if nb is None:
        print("numba backend disabled (NCK_JIT=0); timing numpy only")
    else:
        print(f"numba threads: {thread_count()}")
    print(f"{'kernel':40s} {'numpy [s]':>12s} {'numba [s]':>12s} {'speed-up':>9s}")
    for label, name, kargs in cases(args.quick):
        t_np = _time(getattr(npb, name), kargs, max(1, args.repeat // 2))
        if nb is None:
            print(f"{label:40s} {t_np:12.4g}")
            continue
        fn = getattr(nb, name)
        fn(*(a.copy() if isinstance(a, np.ndarray) else a for a in kargs))  # compile
        t_nb = _time(fn, kargs, args.repeat)
        print(f"{label:40s} {t_np:12.4g} {t_nb:12.4g} {t_np / t_nb:8.1f}x")


if __name__ == "__main__":
    main()
