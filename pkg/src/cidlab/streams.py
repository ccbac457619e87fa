"""Reproducible random streams and scalar distributions.

Streams are keyed by (seed, replica, lane). Each key owns an independent
counter-based generator (Philox keyed through SeedSequence), so opening a
stream never fast-forwards through another stream's draws:

    seed ──┬── replica 0 ──┬── lane 0   path draws
           │               └── lane 1   auxiliary draws
           └── replica 1 ──┬── lane 0
                           └── ...

Distribution objects validate their parameters on construction and draw
through an explicit generator handle, which keeps every sampling call
attributable to one StreamKey.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import betainc

from cidlab.errors import MatrixError, ParameterError

_U64 = 2**64
_U32 = 2**32

# relative tolerance for symmetry/PSD checks in draw_gaussian_vector
PSD_RTOL = 1e-10


@dataclass(frozen=True)
class StreamKey:
    """Address of one random stream: 64-bit seed and replica, 32-bit lane."""

    seed: int
    replica: int = 0
    lane: int = 0

    def __post_init__(self) -> None:
        if not (0 <= self.seed < _U64):
            raise ParameterError(f"seed out of range: {self.seed}")
        if not (0 <= self.replica < _U64):
            raise ParameterError(f"replica out of range: {self.replica}")
        if not (0 <= self.lane < _U32):
            raise ParameterError(f"lane out of range: {self.lane}")


def open_stream(key: StreamKey) -> np.random.Generator:
    """Return the generator owned by `key`. Same key, same stream, always."""
    ss = np.random.SeedSequence(entropy=(key.seed, key.replica, key.lane))
    return np.random.Generator(np.random.Philox(ss))


def draw_u64(stream: np.random.Generator, count: int) -> np.ndarray:
    """Raw 64-bit outputs of the underlying counter-based generator."""
    return stream.bit_generator.random_raw(count)


# ---------------------------------------------------------------------------
# scalar distributions


@dataclass(frozen=True)
class Normal:
    mean: float
    variance: float

    def __post_init__(self) -> None:
        if not (self.variance >= 0.0) or not math.isfinite(self.mean):
            raise ParameterError(f"bad Normal params: {self}")

    def sample(self, rng: np.random.Generator, size=None):
        z = rng.standard_normal(size)
        if self.variance == 0.0:
            # degenerate point mass; the draw is still consumed for stream
            # layout stability
            return self.mean + 0.0 * z
        return self.mean + math.sqrt(self.variance) * z

    def expectation(self) -> float:
        return self.mean

    def var(self) -> float:
        return self.variance

    def cdf(self, t):
        from scipy.special import ndtr

        t = np.asarray(t, dtype=float)
        if self.variance == 0.0:
            return (t >= self.mean).astype(float)
        return ndtr((t - self.mean) / math.sqrt(self.variance))


@dataclass(frozen=True)
class Bernoulli:
    p: float

    def __post_init__(self) -> None:
        if not (0.0 <= self.p <= 1.0):
            raise ParameterError(f"bad Bernoulli params: {self}")

    def sample(self, rng: np.random.Generator, size=None):
        return (rng.random(size) < self.p).astype(float)

    def expectation(self) -> float:
        return self.p

    def var(self) -> float:
        return self.p * (1.0 - self.p)

    def cdf(self, t):
        t = np.asarray(t, dtype=float)
        return np.where(t < 0.0, 0.0, np.where(t < 1.0, 1.0 - self.p, 1.0))


@dataclass(frozen=True)
class Beta:
    a: float
    b: float

    def __post_init__(self) -> None:
        if not (self.a > 0.0 and self.b > 0.0):
            raise ParameterError(f"bad Beta params: {self}")

    def sample(self, rng: np.random.Generator, size=None):
        return rng.beta(self.a, self.b, size)

    def expectation(self) -> float:
        return self.a / (self.a + self.b)

    def var(self) -> float:
        s = self.a + self.b
        return self.a * self.b / (s * s * (s + 1.0))

    def cdf(self, t):
        t = np.clip(np.asarray(t, dtype=float), 0.0, 1.0)
        return betainc(self.a, self.b, t)


@dataclass(frozen=True)
class Uniform:
    lo: float
    hi: float

    def __post_init__(self) -> None:
        if not (self.lo < self.hi):
            raise ParameterError(f"bad Uniform params: {self}")

    def sample(self, rng: np.random.Generator, size=None):
        return self.lo + (self.hi - self.lo) * rng.random(size)

    def expectation(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def var(self) -> float:
        w = self.hi - self.lo
        return w * w / 12.0

    def cdf(self, t):
        t = np.asarray(t, dtype=float)
        return np.clip((t - self.lo) / (self.hi - self.lo), 0.0, 1.0)


@dataclass(frozen=True)
class Discrete:
    """Distribution on {0, 1, ..., k-1} with the given nonnegative weights."""

    weights: tuple[float, ...]

    def __post_init__(self) -> None:
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 1 or w.size == 0 or np.any(w < 0) or w.sum() <= 0:
            raise ParameterError(f"bad Discrete weights: {self.weights}")
        object.__setattr__(self, "weights", tuple(float(v) for v in w))

    def _cum(self) -> np.ndarray:
        w = np.asarray(self.weights)
        return np.cumsum(w) / w.sum()

    def sample(self, rng: np.random.Generator, size=None):
        # inverse-cdf on uniforms: deterministic given the bit stream
        u = rng.random(size)
        return np.searchsorted(self._cum(), u, side="right").astype(float)

    def expectation(self) -> float:
        w = np.asarray(self.weights)
        return float(np.arange(w.size) @ w / w.sum())

    def var(self) -> float:
        w = np.asarray(self.weights)
        vals = np.arange(w.size)
        m = self.expectation()
        return float((vals - m) ** 2 @ w / w.sum())

    def cdf(self, t):
        t = np.asarray(t, dtype=float)
        cum = self._cum()
        idx = np.clip(np.floor(t).astype(int), -1, cum.size - 1)
        out = np.where(idx < 0, 0.0, cum[np.maximum(idx, 0)])
        return np.where(t < 0.0, 0.0, out)


ScalarDist = Normal | Bernoulli | Beta | Uniform | Discrete


def draw(stream: np.random.Generator, dist: ScalarDist, size=None):
    """Draw from `dist` using `stream`; scalar when size is None."""
    out = dist.sample(stream, size)
    return float(out) if size is None and np.ndim(out) == 0 else out


def point_mass_value(dist: ScalarDist) -> float | None:
    """The single support point of a degenerate dist, else None."""
    if isinstance(dist, Normal) and dist.variance == 0.0:
        return dist.mean
    if isinstance(dist, Bernoulli) and dist.p in (0.0, 1.0):
        return dist.p
    if isinstance(dist, Discrete):
        w = np.asarray(dist.weights)
        nz = np.nonzero(w)[0]
        if nz.size == 1:
            return float(nz[0])
    return None


# ---------------------------------------------------------------------------
# correlated Gaussian vectors


def gaussian_sqrt(cov: np.ndarray, rtol: float = PSD_RTOL) -> np.ndarray:
    """Symmetric PSD square root via eigendecomposition.

    Raises MatrixError if cov is asymmetric or has an eigenvalue below
    -rtol * max(diag). Eigenvalues in [-tol, 0] are clipped to zero, so
    PSD-with-zero-eigenvalue covariances (bridges pinned at 0/1, duplicated
    grid points) factor cleanly.
    """
    cov = np.asarray(cov, dtype=float)
    if cov.ndim != 2 or cov.shape[0] != cov.shape[1]:
        raise MatrixError(f"covariance must be square, got shape {cov.shape}")
    scale = max(float(np.max(np.abs(np.diag(cov)))), 1e-300)
    tol = rtol * scale
    if np.max(np.abs(cov - cov.T)) > tol:
        raise MatrixError("covariance is not symmetric within tolerance")
    lam, vec = np.linalg.eigh(cov)
    if lam.min() < -tol:
        raise MatrixError(f"covariance is not PSD: min eigenvalue {lam.min():g}")
    return vec * np.sqrt(np.clip(lam, 0.0, None))


def draw_gaussian_vector(stream: np.random.Generator, cov: np.ndarray, size=None):
    """Zero-mean Gaussian vector(s) with the given covariance.

    Returns shape (m,) for size=None, else (size, m).
    """
    root = gaussian_sqrt(cov)
    m = root.shape[0]
    if size is None:
        return root @ stream.standard_normal(m)
    return stream.standard_normal((size, m)) @ root.T
