"""Pure-numpy fallback for the compiled kernels.

Same signatures and bit-identical outputs as cidlab._kernels: both backends
do the identical sequence of IEEE-754 ops (int64 -> float64 division,
comparison, integer accumulation) on the same pre-drawn inputs.
"""

from __future__ import annotations

import numpy as np


def polya_paths(w: int, r: int, d: np.ndarray, u: np.ndarray):
    """Run the urn recursion for a batch of paths.

    d: (R, n) int64 reinforcement values, u: (R, n) float64 uniforms.
    Returns (x, num, den): x is the 0/1 color path as float64 (R, n); num/den
    are the exact integer predictive fractions a_k = num_k/den_k for
    k = 0..n, shape (R, n+1).
    """
    R, n = u.shape
    x = np.empty((R, n), dtype=np.float64)
    num = np.empty((R, n + 1), dtype=np.int64)
    den = np.empty((R, n + 1), dtype=np.int64)
    cnum = np.full(R, w, dtype=np.int64)
    cden = np.full(R, w + r, dtype=np.int64)
    num[:, 0] = cnum
    den[:, 0] = cden
    for k in range(n):
        p = cnum / cden
        hit = u[:, k] < p
        x[:, k] = hit
        dk = d[:, k]
        cnum += dk * hit
        cden += dk
        num[:, k + 1] = cnum
        den[:, k + 1] = cden
    return x, num, den
