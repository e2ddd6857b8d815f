"""Time the one-sided Jacobi SVD with the numba kernel and the numpy fallback.

    python3 benchmarks/bench_jacobi.py [--sizes 32 64 128 256] [--repeats 3]

Both backends run in this process (the numba kernel is compiled once, before
timing).  Singular values from the two backends are compared as a sanity check.
"""
import argparse
import time

import numpy as np

from spectra._accel import USE_NUMBA, thread_count
from spectra.linalg import singular_values


def best_of(fn, repeats):
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[32, 64, 128, 256])
    ap.add_argument("--repeats", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    if not USE_NUMBA:
        raise SystemExit("SPECTRA_NUMBA is off; unset it to compare both backends")

    rng = np.random.default_rng(args.seed)
    singular_values(rng.normal(size=(4, 4)), backend="numba")  # compile outside the timed region
    print(f"threads={thread_count()}")
    print(f"{'n':>6} {'numba s':>10} {'numpy s':>10} {'speedup':>8} {'max rel diff':>13}")
    for n in args.sizes:
        a = rng.normal(size=(n, n))
        t_nb, s_nb = best_of(lambda: singular_values(a, backend="numba"), args.repeats)
        t_np, s_np = best_of(lambda: singular_values(a, backend="numpy"), args.repeats)
        diff = np.max(np.abs(s_nb - s_np)) / s_nb[0]
        print(f"{n:>6} {t_nb:>10.4f} {t_np:>10.4f} {t_np / t_nb:>8.1f} {diff:>13.2e}")


if __name__ == "__main__":
    main()
