"""Time the numba kernels against their pure-numpy fallbacks.

    python benchmarks/bench_backends.py [--frames 20] [--bins 863] [--cols 1724]

Prints one ``key=value`` line per kernel and backend.  The first numba call
of each kernel is made before timing so compilation is excluded.
"""
import argparse
import statistics
import time

import numpy as np

from adfa import _kernels
from adfa.io import LCG_INCREMENT, LCG_MULTIPLIER, LCG_SEED


def timeit(fn, repeats):
    out = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        out.append(time.perf_counter() - t0)
    return statistics.median(out)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--frames", type=int, default=20)
    ap.add_argument("--bins", type=int, default=863)
    ap.add_argument("--cols", type=int, default=1724)
    ap.add_argument("--samples", type=int, default=960_000, help="LCG draws")
    ap.add_argument("--repeats", type=int, default=3)
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()

    if not _kernels.HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")

    rng = np.random.default_rng(0)
    frames = rng.uniform(-1, 1, (args.frames, args.cols))
    rates = 2.0 ** (-np.arange(args.bins - 1, -1, -1) / 96)
    phases = np.mod(np.multiply.outer(rates, np.arange(args.cols)), 2.0)

    cases = {
        "cispi_neg": lambda b: lambda: getattr(_kernels, f"cispi_neg_{b}")(phases),
        "direct_sum": lambda b: lambda: getattr(_kernels, f"direct_sum_{b}")(frames, rates),
        "lcg_uniform": lambda b: lambda: getattr(_kernels, f"lcg_uniform_{b}")(
            args.samples, LCG_SEED, LCG_MULTIPLIER, LCG_INCREMENT),
    }
    with _kernels.thread_limit(args.threads):
        for name, make in cases.items():
            make("nb")()  # compile
            t_nb = timeit(make("nb"), args.repeats)
            t_np = timeit(make("np"), args.repeats)
            print(f"kernel={name} numba_seconds={t_nb:.4f} numpy_seconds={t_np:.4f} "
                  f"speedup={t_np / t_nb:.2f} threads={args.threads}")


if __name__ == "__main__":
    main()
