"""Compare the compiled urn kernel against the pure-Python fallback.

The urn recursion is the one hot loop that cannot be vectorized over time
steps (each draw feeds the next predictive probability), so it is the part
worth compiling. Run:

    python3 benchmarks/bench_kernels.py [replicas] [steps]
"""

from __future__ import annotations

import sys
import time

import numpy as np

from cidlab import kernels
from cidlab._kernels_py import polya_paths as polya_paths_py


def bench(fn, w, r, d, u, repeats=3):
    best = float("inf")
    out = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn(w, r, d, u)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main() -> int:
    replicas = int(sys.argv[1]) if len(sys.argv) > 1 else 2000
    steps = int(sys.argv[2]) if len(sys.argv) > 2 else 10_000
    rng = np.random.default_rng(12345)
    d = rng.integers(1, 3, size=(replicas, steps)).astype(np.int64)
    u = rng.random((replicas, steps))

    t_py, out_py = bench(polya_paths_py, 1, 1, d, u)
    print(f"python : {t_py:8.3f}s  ({replicas} x {steps} paths)")

    if kernels.BACKEND == "cython":
        t_cy, out_cy = bench(kernels.polya_paths, 1, 1, d, u)
        print(f"cython : {t_cy:8.3f}s  (speedup x{t_py / t_cy:.1f})")
        same = all(np.array_equal(a, b) for a, b in zip(out_py, out_cy))
        print(f"outputs bit-identical: {same}")
        return 0 if same else 1
    print("compiled kernel unavailable; only the fallback was timed")
    return 0


if __name__ == "__main__":
    sys.exit(main())
