"""Goodness-of-fit statistics and the thresholds the suites gate on.

Thresholds are the 1% asymptotic Kolmogorov critical value (1.63) scaled by
a 1.25 allowance for finite-n bias in the simulated statistics.
"""

from __future__ import annotations

import numpy as np

from cidlab.errors import SizeError

MIN_SAMPLES = 100
CRITICAL_1PCT = 1.63
FINITE_N_ALLOWANCE = 1.25


def ks_one_sample(samples, cdf) -> float:
    """Two-sided sup distance between the empirical cdf and `cdf`.

    D = max_i max(i/R - F(x_(i)), F(x_(i)) - (i-1)/R) over sorted samples.
    """
    xs = np.sort(np.asarray(samples, dtype=float))
    r = xs.size
    if r < MIN_SAMPLES:
        raise SizeError(f"need >= {MIN_SAMPLES} samples, got {r}")
    f = np.asarray(cdf(xs), dtype=float)
    i = np.arange(1, r + 1)
    d_plus = i / r - f
    d_minus = f - (i - 1) / r
    return float(max(d_plus.max(), d_minus.max()))


def ks_two_sample(a, b) -> float:
    """Classical two-sample sup difference of empirical cdfs."""
    xa = np.sort(np.asarray(a, dtype=float))
    xb = np.sort(np.asarray(b, dtype=float))
    if xa.size < MIN_SAMPLES or xb.size < MIN_SAMPLES:
        raise SizeError(f"need >= {MIN_SAMPLES} samples in each batch: {xa.size}, {xb.size}")
    joint = np.concatenate([xa, xb])
    fa = np.searchsorted(xa, joint, side="right") / xa.size
    fb = np.searchsorted(xb, joint, side="right") / xb.size
    return float(np.abs(fa - fb).max())


def ks_threshold_one(r: int) -> float:
    """Suite gate for a one-sample KS on r replicas."""
    return FINITE_N_ALLOWANCE * CRITICAL_1PCT / np.sqrt(r)


def ks_threshold_two(r1: int, r2: int) -> float:
    """Suite gate for a two-sample KS on batches of r1 and r2."""
    return FINITE_N_ALLOWANCE * CRITICAL_1PCT * np.sqrt((r1 + r2) / (r1 * r2))
