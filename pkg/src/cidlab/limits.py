"""Samplers for the random limit laws the statistics converge to.

* mixture normals N(0, L) with random variance L,
* the bridge-type Gaussian field G_t = G0_{F(t)} for a (possibly random)
  distribution function F, with covariance F(s∧t)(1 - F(s∨t)) on a grid,
* the Kolmogorov sup-norm cdf as an alternating series.

Where F(t) hits 0 or 1 the field is pinned to exactly zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from cidlab.errors import LawError, SizeError
from cidlab.streams import draw_gaussian_vector


@dataclass(frozen=True)
class MixtureNormalLaw:
    """N(0, L) with L drawn fresh per sample; L = 0 gives exact zeros."""

    variance_sampler: Callable[[np.random.Generator], float]


def sample_mixture_normal(law: MixtureNormalLaw, stream: np.random.Generator, size=None):
    if size is None:
        lam = float(law.variance_sampler(stream))
        if lam < 0.0:
            raise LawError(f"variance sampler returned {lam}")
        z = stream.standard_normal()
        return 0.0 if lam == 0.0 else math.sqrt(lam) * z
    out = np.empty(size)
    for i in range(size):
        out[i] = sample_mixture_normal(law, stream)
    return out


@dataclass(frozen=True)
class TabulatedCdf:
    """Right-continuous step cdf with atoms at `points` of mass `probs`."""

    points: tuple[float, ...]
    probs: tuple[float, ...]

    def __post_init__(self) -> None:
        pts = tuple(float(p) for p in self.points)
        pr = np.asarray(self.probs, dtype=float)
        if len(pts) != pr.size or pr.size == 0:
            raise LawError("points and probs must be nonempty and same length")
        if any(b <= a for a, b in zip(pts, pts[1:])):
            raise LawError("points must be strictly increasing")
        if np.any(pr < 0) or not np.isclose(pr.sum(), 1.0):
            raise LawError("probs must be a probability vector")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "probs", tuple(float(v) for v in pr))

    def cdf(self, t):
        t = np.asarray(t, dtype=float)
        cum = np.cumsum(self.probs)
        idx = np.searchsorted(np.asarray(self.points), t, side="right")
        return np.where(idx == 0, 0.0, cum[np.maximum(idx - 1, 0)])


@dataclass(frozen=True)
class RandomDistributionFunction:
    """Law of a random cdf; sampler returns an object with a .cdf(t) method."""

    sampler: Callable[[np.random.Generator], object]


def fixed_distribution(dist) -> RandomDistributionFunction:
    return RandomDistributionFunction(lambda _rng, _d=dist: _d)


def sample_gf_path(F, grid, stream: np.random.Generator, size=None):
    """The bridge field at the grid points for one realized cdf F.

    Covariance between grid points s <= t is F(s)(1 - F(t)). Points where
    F is 0 or 1 get exactly zero. Returns (m,) or (size, m).
    """
    ts = np.asarray(grid, dtype=float)
    if ts.ndim != 1 or ts.size == 0:
        raise SizeError("grid must be a nonempty 1-d array")
    levels = np.asarray(F.cdf(ts), dtype=float)
    if np.any(np.diff(levels) < 0.0) or np.any(levels < 0.0) or np.any(levels > 1.0):
        raise LawError("F values on the grid are not a nondecreasing cdf")
    interior = (levels > 0.0) & (levels < 1.0)
    m = ts.size
    shape = (m,) if size is None else (size, m)
    out = np.zeros(shape)
    if np.any(interior):
        u = levels[interior]
        cov = np.minimum.outer(u, u) * (1.0 - np.maximum.outer(u, u))
        drawn = draw_gaussian_vector(stream, cov, size)
        out[..., interior] = drawn
    else:
        # keep stream layout independent of the realized F
        stream.standard_normal(0 if size is None else (size, 0))
    return out


def sample_gf_supnorm(
    law: RandomDistributionFunction,
    grid,
    stream: np.random.Generator,
    size=None,
):
    """Sup over the grid of |bridge field|, with F redrawn per sample."""
    if size is None:
        F = law.sampler(stream)
        return float(np.max(np.abs(sample_gf_path(F, grid, stream))))
    out = np.empty(size)
    for i in range(size):
        out[i] = sample_gf_supnorm(law, grid, stream)
    return out


def kolmogorov_cdf(x):
    """P(sup |bridge| <= x) = 1 - 2 sum_k (-1)^{k-1} exp(-2 k^2 x^2).

    Series truncated when terms drop below 1e-12; vectorized. Values below
    1e-4 of x return exactly 0 (the true mass there is astronomically small
    and the series converges too slowly to bother).
    """
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    x = np.atleast_1d(x).astype(float)
    out = np.zeros(x.shape)
    live = x >= 1e-4
    if np.any(live):
        xs = x[live]
        total = np.zeros(xs.shape)
        sign = 1.0
        k = 1
        while True:
            term = np.exp(-2.0 * (k * xs) ** 2)
            total += sign * term
            if float(term.max()) < 1e-12:
                break
            sign = -sign
            k += 1
        out[live] = np.clip(1.0 - 2.0 * total, 0.0, 1.0)
    return float(out[0]) if scalar else out
