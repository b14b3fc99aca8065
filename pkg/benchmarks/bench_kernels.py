"""Compare the numba and pure-numpy kernel backends.

    python benchmarks/bench_kernels.py            # kernel micro-benchmarks
    python benchmarks/bench_kernels.py --e2e      # plus one macroreplication per backend

The end-to-end mode runs each backend in a subprocess with SKMORS_NUMBA set,
which is how the backend is chosen in normal use.
"""

import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from skmors._kernels import numpy_impl

try:
    from skmors._kernels import numba_impl
except ImportError:
    numba_impl = None


def _cases(rng, n):
    F = rng.random((n, 2))
    front_idx = np.flatnonzero(numpy_impl.pareto_mask(F))
    front = F[front_idx]
    preds = F + 0.05 * rng.normal(size=F.shape)
    on_front = np.full(n, -1, dtype=np.int64)
    on_front[front_idx] = np.arange(front_idx.size)
    ref = np.maximum(F.max(axis=0), preds.max(axis=0)) + 0.1
    A = rng.random((n, 2))
    return {
        "pareto_mask": lambda impl: impl.pareto_mask(F),
        "hv2d": lambda impl: impl.hv2d(front, ref),
        "ehvd_many": lambda impl: impl.ehvd_many(front, F, preds, on_front, ref),
        "nearest_rows": lambda impl: impl.nearest_rows(A, front),
    }


def _best_of(fn, repeat=5):
    number, _ = timeit.Timer(fn).autorange()
    return min(timeit.repeat(fn, number=number, repeat=repeat)) / number


def kernels(sizes):
    rng = np.random.default_rng(0)
    print(f"{'kernel':<14}{'n':>6}{'numpy [us]':>14}{'numba [us]':>14}{'speedup':>10}")
    for n in sizes:
        for name, call in _cases(rng, n).items():
            t_np = _best_of(lambda: call(numpy_impl)) * 1e6
            if numba_impl is None:
                print(f"{name:<14}{n:>6}{t_np:>14.1f}{'n/a':>14}{'':>10}")
                continue
            call(numba_impl)  # compile outside the timing
            t_nb = _best_of(lambda: call(numba_impl)) * 1e6
            print(f"{name:<14}{n:>6}{t_np:>14.1f}{t_nb:>14.1f}{t_np / t_nb:>9.1f}x")


_E2E = """
import time
from skmors.harness import ExperimentConfig, run_experiment
cfg = ExperimentConfig(problem="WFG4", size=50, n_pareto=10, noise="medium", budget=250,
                       iterations=10, macroreps=1, allocator="SKMORS_band")
run_experiment(ExperimentConfig(**{**cfg.to_dict(), "iterations": 1}))  # warm-up and JIT
t = time.perf_counter()
run_experiment(cfg)
print(f"{time.perf_counter() - t:.2f}")
"""


def end_to_end():
    print("\nend to end (SKMORS_band, |S|=50, 10 iterations, one macroreplication)")
    for flag, label in (("0", "numpy"), ("1", "numba")):
        env = {**os.environ, "SKMORS_NUMBA": flag}
        out = subprocess.run([sys.executable, "-c", _E2E], env=env, capture_output=True, text=True, check=True)
        print(f"  {label:<6}{float(out.stdout.strip()):8.2f} s")


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--sizes", type=int, nargs="+", default=[20, 100, 500])
    ap.add_argument("--e2e", action="store_true", help="also time a full macroreplication per backend")
    args = ap.parse_args()
    kernels(args.sizes)
    if args.e2e:
        end_to_end()


if __name__ == "__main__":
    main()
