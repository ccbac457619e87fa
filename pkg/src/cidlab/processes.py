"""Process families whose predictions tomorrow look like predictions next year.

Four generators, all adapted to their natural filtration:

* compensated Gaussian: X_k = Z_1 + ... + Z_k + U_k with independent
  Z_k ~ N(0, b_k - b_{k-1}) and U_k ~ N(0, c - b_k); covariance of any prefix
  is c on the diagonal and b_{min(i,j)} off it.
* reinforced urn: two colors, initial weights (w, r); after each draw the
  drawn color's weight grows by d_k, where the d_k are a deterministic
  schedule, i.i.d. positive integers, or a function of the path prefix. The
  predictive probability of white is exactly rational and is recorded as an
  int64 numerator/denominator pair at every step.
* mixture (de Finetti): draw theta from a mixing law, then i.i.d. draws from
  kernel(theta). Closed-form predictive means exist for the conjugate
  Beta/bernoulli pair and for point-mass mixing (plain i.i.d.).
* stopped exchangeable: X_k = Z_{min(T, k)} where Z is a mixture path and T
  an independent stopping time (possibly infinite).

Every generated path records x, the family latent, and the predictive-mean
sequence a_k = E[X_{k+1} | first k steps] for k = 0..n when a closed form
exists. Draw order per family is fixed and documented in the generators, so
a StreamKey pins the path bit-for-bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np
from scipy.special import ndtr

from cidlab import kernels
from cidlab.errors import ParameterError, SizeError, UnsupportedCombinationError
from cidlab.streams import (
    Bernoulli,
    Beta,
    Discrete,
    Normal,
    ScalarDist,
    StreamKey,
    Uniform,
    open_stream,
    point_mass_value,
)

# int64 predictive fractions must also be exact as float64
_EXACT_INT = 2**53


# ---------------------------------------------------------------------------
# specs


@dataclass(frozen=True)
class CompensatedGaussianSpec:
    """Schedule either closed-form (b_k = c - u/k, pass u) or explicit (pass b)."""

    c: float
    u: float | None = None
    b: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        if not (self.c > 0.0 and math.isfinite(self.c)):
            raise ParameterError(f"c must be positive: {self.c}")
        if (self.u is None) == (self.b is None):
            raise ParameterError("give exactly one of u (closed form) or b (explicit)")
        if self.u is not None:
            if not (self.u > 0.0 and self.c - self.u > 0.0):
                raise ParameterError(f"closed form needs 0 < u < c: u={self.u}, c={self.c}")
        else:
            b = tuple(float(v) for v in self.b)
            if len(b) == 0:
                raise ParameterError("explicit schedule must be nonempty")
            if b[0] <= 0.0 or any(y < x for x, y in zip(b, b[1:])) or b[-1] > self.c:
                # b_k = c allowed: all later variances vanish and the path is constant
                raise ParameterError(f"schedule must satisfy 0 < b_1 <= ... <= c: {b}")
            object.__setattr__(self, "b", b)

    def b_values(self, n: int) -> np.ndarray:
        if n < 1:
            raise SizeError(f"n must be >= 1: {n}")
        if self.u is not None:
            return self.c - self.u / np.arange(1, n + 1, dtype=float)
        if n > len(self.b):
            raise ParameterError(f"explicit schedule has {len(self.b)} entries, need {n}")
        return np.asarray(self.b[:n], dtype=float)


@dataclass(frozen=True)
class Deterministic:
    """Reinforcement schedule; extended by repeating the last value or cycling."""

    values: tuple[int, ...]
    extend: str = "repeat_last"

    def __post_init__(self) -> None:
        vals = tuple(int(v) for v in self.values)
        if len(vals) == 0 or any(v < 1 for v in vals):
            raise ParameterError(f"reinforcements must be positive integers: {self.values}")
        if self.extend not in ("repeat_last", "cycle"):
            raise ParameterError(f"unknown extension rule: {self.extend}")
        object.__setattr__(self, "values", vals)

    def sequence(self, n: int) -> np.ndarray:
        vals = np.asarray(self.values, dtype=np.int64)
        if n <= vals.size:
            return vals[:n].copy()
        if self.extend == "repeat_last":
            out = np.full(n, vals[-1], dtype=np.int64)
            out[: vals.size] = vals
            return out
        reps = -(-n // vals.size)
        return np.tile(vals, reps)[:n]


@dataclass(frozen=True)
class IID:
    """Reinforcements drawn i.i.d., independent of everything before them."""

    dist: Discrete

    def __post_init__(self) -> None:
        if not isinstance(self.dist, Discrete):
            raise ParameterError("IID reinforcement must be a Discrete dist")
        if self.dist.weights[0] != 0.0:
            raise ParameterError("reinforcement support must be positive integers")


@dataclass(frozen=True)
class PrefixDependent:
    """d_k = fn(x_1..x_{k-1}); not JSON-serializable, enumeration/generation only."""

    fn: Callable[[tuple[int, ...]], int]


Reinforcement = Deterministic | IID | PrefixDependent


@dataclass(frozen=True)
class PolyaUrnSpec:
    w: int
    r: int
    reinforcement: Reinforcement

    def __post_init__(self) -> None:
        if int(self.w) < 1 or int(self.r) < 1:
            raise ParameterError(f"initial weights must be positive integers: w={self.w} r={self.r}")
        object.__setattr__(self, "w", int(self.w))
        object.__setattr__(self, "r", int(self.r))
        if not isinstance(self.reinforcement, (Deterministic, IID, PrefixDependent)):
            raise ParameterError(f"bad reinforcement: {self.reinforcement!r}")


KERNELS = ("bernoulli", "normal", "uniform")


@dataclass(frozen=True)
class DeFinettiSpec:
    """theta ~ mixing, then X_k i.i.d. kernel(theta) given theta.

    kernel_param is the variance for the normal kernel and the width for the
    uniform kernel (ignored by bernoulli).
    """

    mixing: ScalarDist
    kernel: str = "bernoulli"
    kernel_param: float = 1.0

    def __post_init__(self) -> None:
        if self.kernel not in KERNELS:
            raise ParameterError(f"unknown kernel {self.kernel!r}, expected one of {KERNELS}")
        if self.kernel != "bernoulli" and not (self.kernel_param > 0.0):
            raise ParameterError(f"kernel_param must be positive: {self.kernel_param}")

    def kernel_dist(self, theta: float) -> ScalarDist:
        if self.kernel == "bernoulli":
            return Bernoulli(theta)
        if self.kernel == "normal":
            return Normal(theta, self.kernel_param)
        return Uniform(theta, theta + self.kernel_param)

    def is_conjugate(self) -> bool:
        return self.kernel == "bernoulli" and isinstance(self.mixing, Beta)

    def iid_value(self) -> float | None:
        return point_mass_value(self.mixing)


@dataclass(frozen=True)
class GeometricStop:
    p: float

    def __post_init__(self) -> None:
        if not (0.0 < self.p <= 1.0):
            raise ParameterError(f"bad geometric parameter: {self.p}")

    def sample(self, rng: np.random.Generator) -> float:
        return float(rng.geometric(self.p))


@dataclass(frozen=True)
class FixedStop:
    """Point-mass stopping time; math.inf means never stopped."""

    value: float

    def __post_init__(self) -> None:
        v = self.value
        if not (v == math.inf or (float(v).is_integer() and v >= 1)):
            raise ParameterError(f"stop must be a positive integer or inf: {v}")

    def sample(self, rng: np.random.Generator) -> float:
        return float(self.value)


StopLaw = GeometricStop | FixedStop


@dataclass(frozen=True)
class StoppedExchangeableSpec:
    base: DeFinettiSpec
    stop: StopLaw

    def __post_init__(self) -> None:
        if not isinstance(self.base, DeFinettiSpec):
            raise ParameterError("base must be a DeFinettiSpec")
        if not isinstance(self.stop, (GeometricStop, FixedStop)):
            raise ParameterError(f"bad stop law: {self.stop!r}")


ProcessSpec = CompensatedGaussianSpec | PolyaUrnSpec | DeFinettiSpec | StoppedExchangeableSpec


def family_of(spec: ProcessSpec) -> str:
    if isinstance(spec, CompensatedGaussianSpec):
        return "gaussian"
    if isinstance(spec, PolyaUrnSpec):
        return "polya"
    if isinstance(spec, DeFinettiSpec):
        return "definetti"
    if isinstance(spec, StoppedExchangeableSpec):
        return "stopped"
    raise ParameterError(f"unknown spec type: {type(spec).__name__}")


# ---------------------------------------------------------------------------
# path containers


@dataclass(frozen=True)
class GaussianLatent:
    z: np.ndarray
    u: np.ndarray
    s: np.ndarray
    v_true: float | None  # exact draw of the a.s. limit; None on prefixes


@dataclass(frozen=True)
class UrnLatent:
    d: np.ndarray  # int64 reinforcements
    num: np.ndarray  # int64, predictive numerators, k = 0..n
    den: np.ndarray  # int64, predictive denominators, k = 0..n


@dataclass(frozen=True)
class MixtureLatent:
    theta: float


@dataclass(frozen=True)
class StoppedLatent:
    theta: float
    z: np.ndarray
    t: float  # stopping time, math.inf allowed


@dataclass(frozen=True)
class PathSample:
    spec: ProcessSpec
    family: str
    x: np.ndarray
    latent: object
    predictive_mean: np.ndarray | None  # a_k for k = 0..n, or None
    key: StreamKey | None = None

    @property
    def n(self) -> int:
        return int(self.x.shape[0])

    def prefix(self, m: int) -> "PathSample":
        """View of the first m steps (same arrays, no copies)."""
        if not (1 <= m <= self.n):
            raise SizeError(f"prefix length {m} outside 1..{self.n}")
        if m == self.n:
            return self
        lat = self.latent
        if isinstance(lat, GaussianLatent):
            lat = GaussianLatent(lat.z[:m], lat.u[:m], lat.s[:m], None)
        elif isinstance(lat, UrnLatent):
            lat = UrnLatent(lat.d[:m], lat.num[: m + 1], lat.den[: m + 1])
        elif isinstance(lat, StoppedLatent):
            lat = StoppedLatent(lat.theta, lat.z[:m], lat.t)
        pm = None if self.predictive_mean is None else self.predictive_mean[: m + 1]
        return PathSample(self.spec, self.family, self.x[:m], lat, pm, self.key)


@dataclass(frozen=True)
class PathBatch:
    """Vectorized batch of replica paths; path(i) returns a zero-copy view."""

    spec: ProcessSpec
    family: str
    x: np.ndarray  # (R, n)
    latent: dict
    predictive_mean: np.ndarray | None  # (R, n+1)
    keys: tuple[StreamKey, ...] | None = None

    def __len__(self) -> int:
        return int(self.x.shape[0])

    def path(self, i: int) -> PathSample:
        lat = self.latent
        if self.family == "gaussian":
            latent = GaussianLatent(lat["z"][i], lat["u"][i], lat["s"][i], float(lat["v_true"][i]))
        elif self.family == "polya":
            latent = UrnLatent(lat["d"][i], lat["num"][i], lat["den"][i])
        elif self.family == "definetti":
            latent = MixtureLatent(float(lat["theta"][i]))
        else:
            latent = StoppedLatent(float(lat["theta"][i]), lat["z"][i], float(lat["t"][i]))
        pm = None if self.predictive_mean is None else self.predictive_mean[i]
        key = None if self.keys is None else self.keys[i]
        return PathSample(self.spec, self.family, self.x[i], latent, pm, key)

    def paths(self):
        for i in range(len(self)):
            yield self.path(i)


# ---------------------------------------------------------------------------
# generation


def _gaussian_batch(spec: CompensatedGaussianSpec, n: int, rngs) -> PathBatch:
    # draw order per replica: z_std (n), u_std (n), tail (1)
    R = len(rngs)
    b = spec.b_values(n)
    db = np.empty(n)
    db[0] = b[0]
    db[1:] = b[1:] - b[:-1]
    db = np.clip(db, 0.0, None)  # closed-form diffs can round to -1 ulp
    tail_var = spec.c - b[-1]
    z_std = np.empty((R, n))
    u_std = np.empty((R, n))
    tail_std = np.empty(R)
    for i, rng in enumerate(rngs):
        z_std[i] = rng.standard_normal(n)
        u_std[i] = rng.standard_normal(n)
        tail_std[i] = rng.standard_normal()
    z = z_std * np.sqrt(db)
    s = np.cumsum(z, axis=1)
    u = u_std * np.sqrt(np.clip(spec.c - b, 0.0, None))
    x = s + u
    v_true = s[:, -1] + tail_std * math.sqrt(max(tail_var, 0.0))
    pm = np.concatenate([np.zeros((R, 1)), s], axis=1)
    return PathBatch(spec, "gaussian", x, {"z": z, "u": u, "s": s, "v_true": v_true}, pm)


def _polya_batch(spec: PolyaUrnSpec, n: int, rngs) -> PathBatch:
    # draw order per replica: d (n draws, IID scheme only), then uniforms (n)
    R = len(rngs)
    reinf = spec.reinforcement
    if isinstance(reinf, PrefixDependent):
        return _polya_prefix_batch(spec, n, rngs)
    if isinstance(reinf, Deterministic):
        d_row = reinf.sequence(n)
        d = np.broadcast_to(d_row, (R, n)).copy()
        dmax = int(d_row.max())
    else:
        d = np.empty((R, n), dtype=np.int64)
        dmax = len(reinf.dist.weights) - 1
    u = np.empty((R, n))
    for i, rng in enumerate(rngs):
        if isinstance(reinf, IID):
            d[i] = reinf.dist.sample(rng, n).astype(np.int64)
        u[i] = rng.random(n)
    if spec.w + spec.r + n * dmax >= _EXACT_INT:
        raise ParameterError("urn weights would exceed exact float64 range")
    x, num, den = kernels.polya_paths(spec.w, spec.r, d, u)
    pm = num / den
    return PathBatch(spec, "polya", x, {"d": d, "num": num, "den": den}, pm)


def _polya_prefix_batch(spec: PolyaUrnSpec, n: int, rngs) -> PathBatch:
    # scheme where d_k is a function of the path prefix: per-step loop
    fn = spec.reinforcement.fn
    R = len(rngs)
    x = np.empty((R, n))
    d = np.empty((R, n), dtype=np.int64)
    num = np.empty((R, n + 1), dtype=np.int64)
    den = np.empty((R, n + 1), dtype=np.int64)
    for i, rng in enumerate(rngs):
        u = rng.random(n)
        cnum, cden = spec.w, spec.w + spec.r
        num[i, 0], den[i, 0] = cnum, cden
        prefix: tuple[int, ...] = ()
        for k in range(n):
            dk = int(fn(prefix))
            if dk < 1:
                raise ParameterError(f"prefix reinforcement must be positive: {dk}")
            hit = u[k] < cnum / cden
            x[i, k] = 1.0 if hit else 0.0
            d[i, k] = dk
            if hit:
                cnum += dk
            cden += dk
            if cden >= _EXACT_INT:
                raise ParameterError("urn weights would exceed exact float64 range")
            num[i, k + 1], den[i, k + 1] = cnum, cden
            prefix = prefix + (int(x[i, k]),)
    pm = num / den
    return PathBatch(spec, "polya", x, {"d": d, "num": num, "den": den}, pm)


def _definetti_batch(spec: DeFinettiSpec, n: int, rngs) -> PathBatch:
    # draw order per replica: theta (1), then the kernel's array draw (n)
    R = len(rngs)
    theta = np.empty(R)
    x = np.empty((R, n))
    for i, rng in enumerate(rngs):
        theta[i] = spec.mixing.sample(rng)
        x[i] = spec.kernel_dist(float(theta[i])).sample(rng, n)
    pm = _definetti_predictive(spec, theta, x)
    return PathBatch(spec, "definetti", x, {"theta": theta}, pm)


def _definetti_predictive(spec: DeFinettiSpec, theta: np.ndarray, x: np.ndarray):
    R, n = x.shape
    if spec.is_conjugate():
        a, b = spec.mixing.a, spec.mixing.b
        k = np.arange(n + 1, dtype=float)
        csum = np.concatenate([np.zeros((R, 1)), np.cumsum(x, axis=1)], axis=1)
        return (a + csum) / (a + b + k)
    v = spec.iid_value()
    if v is not None:
        mean = spec.kernel_dist(v).expectation()
        return np.full((R, n + 1), mean)
    return None


def _stopped_batch(spec: StoppedExchangeableSpec, n: int, rngs) -> PathBatch:
    # draw order per replica: theta (1), z (n), stopping time (1)
    R = len(rngs)
    base = spec.base
    theta = np.empty(R)
    z = np.empty((R, n))
    t = np.empty(R)
    x = np.empty((R, n))
    idx = np.arange(1, n + 1, dtype=float)
    for i, rng in enumerate(rngs):
        theta[i] = base.mixing.sample(rng)
        z[i] = base.kernel_dist(float(theta[i])).sample(rng, n)
        t[i] = spec.stop.sample(rng)
        stopped_idx = np.minimum(idx, t[i]).astype(int) - 1
        x[i] = z[i, stopped_idx]
    return PathBatch(spec, "stopped", x, {"theta": theta, "z": z, "t": t}, None)


_BATCHERS = {
    "gaussian": _gaussian_batch,
    "polya": _polya_batch,
    "definetti": _definetti_batch,
    "stopped": _stopped_batch,
}


def generate_batch(
    spec: ProcessSpec,
    n: int,
    seed: int,
    replicas: int,
    lane: int = 0,
    replica_offset: int = 0,
) -> PathBatch:
    """Generate `replicas` paths, replica i from StreamKey(seed, offset+i, lane).

    Results are independent of how callers chunk the replica range.
    """
    if n < 1:
        raise SizeError(f"n must be >= 1: {n}")
    if replicas < 1:
        raise SizeError(f"replicas must be >= 1: {replicas}")
    keys = tuple(StreamKey(seed, replica_offset + i, lane) for i in range(replicas))
    rngs = [open_stream(k) for k in keys]
    batch = _BATCHERS[family_of(spec)](spec, n, rngs)
    return replace(batch, keys=keys)


def gen_path(spec: ProcessSpec, n: int, stream: np.random.Generator) -> PathSample:
    """Generate one path consuming draws from an already-open stream."""
    if n < 1:
        raise SizeError(f"n must be >= 1: {n}")
    return _BATCHERS[family_of(spec)](spec, n, [stream]).path(0)


def gen_compensated_gaussian(spec: CompensatedGaussianSpec, n: int, stream) -> PathSample:
    return gen_path(spec, n, stream)


def gen_polya(spec: PolyaUrnSpec, n: int, stream) -> PathSample:
    return gen_path(spec, n, stream)


def gen_definetti(spec: DeFinettiSpec, n: int, stream) -> PathSample:
    return gen_path(spec, n, stream)


def gen_stopped_exchangeable(spec: StoppedExchangeableSpec, n: int, stream) -> PathSample:
    return gen_path(spec, n, stream)


# ---------------------------------------------------------------------------
# closed forms


def gamma_matrix(spec: CompensatedGaussianSpec, n: int) -> np.ndarray:
    """Prefix covariance: c on the diagonal, b_{min(i,j)} off it."""
    b = spec.b_values(n)
    g = np.minimum.outer(b, b)
    np.fill_diagonal(g, spec.c)
    return g


def _summand_variances(spec: CompensatedGaussianSpec, n: int) -> np.ndarray:
    # Var of the k-th centered-increment term: (c - b_k) + (k-1)^2 (b_k - b_{k-1})
    b = spec.b_values(n)
    db = np.empty(n)
    db[0] = b[0]
    db[1:] = b[1:] - b[:-1]
    k = np.arange(1, n + 1, dtype=float)
    return (spec.c - b) + (k - 1.0) ** 2 * np.clip(db, 0.0, None)


def w_stat_variance(spec: CompensatedGaussianSpec, n: int) -> float:
    """Exact Var of the root-n centered partial sum around the true limit."""
    b = spec.b_values(n)
    return float(_summand_variances(spec, n).mean() + n * (spec.c - b[-1]))


def c_stat_variance(spec: CompensatedGaussianSpec, n: int) -> float:
    """Exact Var of the statistic centered at the step-n prediction."""
    return float(_summand_variances(spec, n).mean())


def b_stat_variance(spec: CompensatedGaussianSpec, n: int) -> float:
    """Exact Var of the one-step-centered statistic."""
    b = spec.b_values(n)
    return float((b[-1] + np.sum(spec.c - b)) / n)


def reinforcement_delta(spec: PolyaUrnSpec) -> float:
    """Var[d]/E[d]^2 for i.i.d. reinforcement (0 for constant schedules)."""
    reinf = spec.reinforcement
    if isinstance(reinf, IID):
        m = reinf.dist.expectation()
        return reinf.dist.var() / (m * m)
    if isinstance(reinf, Deterministic) and len(set(reinf.values)) == 1:
        return 0.0
    raise UnsupportedCombinationError("delta ratio needs i.i.d. or constant reinforcement")


# ---------------------------------------------------------------------------
# predictive laws


def _gaussian_pred_sd(spec: CompensatedGaussianSpec, n: int) -> np.ndarray:
    # sd of X_{k+1} given the first k steps, k = 0..n; b_0 = 0
    b0 = np.concatenate([[0.0], spec.b_values(n)])
    return np.sqrt(np.clip(spec.c - b0, 0.0, None))


def _prepend_zero(s: np.ndarray) -> np.ndarray:
    return np.concatenate([[0.0], s])


def predictive_cdf_sequence(path: PathSample, t: float) -> np.ndarray:
    """P(X_{k+1} <= t | first k steps) for k = 0..n."""
    if path.family == "gaussian":
        sd = _gaussian_pred_sd(path.spec, path.n)
        mu = _prepend_zero(path.latent.s)
        with np.errstate(divide="ignore", invalid="ignore"):
            z = np.where(sd > 0.0, (t - mu) / np.where(sd > 0.0, sd, 1.0), 0.0)
        return np.where(sd > 0.0, ndtr(z), (t >= mu).astype(float))
    if path.family == "polya" or (
        path.family == "definetti" and path.spec.kernel == "bernoulli" and path.predictive_mean is not None
    ):
        p = path.predictive_mean
        if t < 0.0:
            return np.zeros(path.n + 1)
        if t < 1.0:
            return 1.0 - p
        return np.ones(path.n + 1)
    if path.family == "definetti":
        v = path.spec.iid_value()
        if v is not None:
            return np.full(path.n + 1, float(path.spec.kernel_dist(v).cdf(t)))
    raise UnsupportedCombinationError(f"no closed-form predictive cdf for family {path.family!r}")


def predictive_cdf(path: PathSample, k: int, t):
    """Predictive cdf of X_{k+1} given the first k steps, at threshold(s) t."""
    if not (0 <= k <= path.n):
        raise IndexError(f"k={k} outside 0..{path.n}")
    if path.family == "gaussian":
        sd = float(_gaussian_pred_sd(path.spec, path.n)[k])
        mu = float(_prepend_zero(path.latent.s)[k])
        return Normal(mu, sd * sd).cdf(t)
    if path.family == "polya" or (
        path.family == "definetti" and path.spec.kernel == "bernoulli" and path.predictive_mean is not None
    ):
        return Bernoulli(float(path.predictive_mean[k])).cdf(t)
    if path.family == "definetti":
        v = path.spec.iid_value()
        if v is not None:
            return path.spec.kernel_dist(v).cdf(t)
    raise UnsupportedCombinationError(f"no closed-form predictive cdf for family {path.family!r}")


def directing_cdf_fn(path: PathSample) -> Callable | None:
    """Exact cdf of the path's directing (limit) law, when the latent pins it.

    Mixture paths know theta exactly, so the limit empirical law is
    kernel(theta). Other families return None.
    """
    if path.family == "definetti":
        dist = path.spec.kernel_dist(path.latent.theta)
        return dist.cdf
    return None


def predictive_fractions(path: PathSample):
    """Exact rational predictive means for urn paths, as Fractions."""
    from fractions import Fraction

    if path.family != "polya":
        raise UnsupportedCombinationError("exact fractions exist only for urn paths")
    lat = path.latent
    return [Fraction(int(a), int(b)) for a, b in zip(lat.num, lat.den)]


# ---------------------------------------------------------------------------
# JSON round-trip (the external spec schema)


def dist_to_json(dist: ScalarDist) -> dict:
    if isinstance(dist, Normal):
        return {"kind": "normal", "mean": dist.mean, "variance": dist.variance}
    if isinstance(dist, Bernoulli):
        return {"kind": "bernoulli", "p": dist.p}
    if isinstance(dist, Beta):
        return {"kind": "beta", "a": dist.a, "b": dist.b}
    if isinstance(dist, Uniform):
        return {"kind": "uniform", "lo": dist.lo, "hi": dist.hi}
    if isinstance(dist, Discrete):
        return {"kind": "discrete", "weights": list(dist.weights)}
    raise ParameterError(f"unknown dist: {dist!r}")


def dist_from_json(d: dict) -> ScalarDist:
    kind = d.get("kind")
    if kind == "normal":
        return Normal(d["mean"], d["variance"])
    if kind == "bernoulli":
        return Bernoulli(d["p"])
    if kind == "beta":
        return Beta(d["a"], d["b"])
    if kind == "uniform":
        return Uniform(d["lo"], d["hi"])
    if kind == "discrete":
        return Discrete(tuple(d["weights"]))
    raise ParameterError(f"unknown dist kind: {kind!r}")


def spec_to_json(spec: ProcessSpec) -> dict:
    fam = family_of(spec)
    if fam == "gaussian":
        out = {"family": "gaussian", "c": spec.c}
        if spec.u is not None:
            out["u"] = spec.u
        else:
            out["b"] = list(spec.b)
        return out
    if fam == "polya":
        reinf = spec.reinforcement
        if isinstance(reinf, Deterministic):
            rj = {"kind": "deterministic", "values": list(reinf.values), "extend": reinf.extend}
        elif isinstance(reinf, IID):
            rj = {"kind": "iid", "dist": dist_to_json(reinf.dist)}
        else:
            raise ParameterError("prefix-dependent reinforcement is not serializable")
        return {"family": "polya", "w": spec.w, "r": spec.r, "reinforcement": rj}
    if fam == "definetti":
        return {
            "family": "definetti",
            "mixing": dist_to_json(spec.mixing),
            "kernel": spec.kernel,
            "kernel_param": spec.kernel_param,
        }
    stop = spec.stop
    if isinstance(stop, GeometricStop):
        sj = {"kind": "geometric", "p": stop.p}
    else:
        sj = {"kind": "point", "value": "inf" if stop.value == math.inf else int(stop.value)}
    return {"family": "stopped", "base": spec_to_json(spec.base), "stop": sj}


def spec_from_json(d: dict) -> ProcessSpec:
    fam = d.get("family")
    if fam == "gaussian":
        if "u" in d:
            return CompensatedGaussianSpec(c=d["c"], u=d["u"])
        return CompensatedGaussianSpec(c=d["c"], b=tuple(d["b"]))
    if fam == "polya":
        rj = d["reinforcement"]
        if rj["kind"] == "deterministic":
            reinf = Deterministic(tuple(rj["values"]), rj.get("extend", "repeat_last"))
        elif rj["kind"] == "iid":
            reinf = IID(dist_from_json(rj["dist"]))
        else:
            raise ParameterError(f"unknown reinforcement kind: {rj['kind']!r}")
        return PolyaUrnSpec(d["w"], d["r"], reinf)
    if fam == "definetti":
        return DeFinettiSpec(dist_from_json(d["mixing"]), d["kernel"], d.get("kernel_param", 1.0))
    if fam == "stopped":
        sj = d["stop"]
        if sj["kind"] == "geometric":
            stop = GeometricStop(sj["p"])
        elif sj["kind"] == "point":
            v = sj["value"]
            stop = FixedStop(math.inf if v == "inf" else float(v))
        else:
            raise ParameterError(f"unknown stop kind: {sj['kind']!r}")
        return StoppedExchangeableSpec(spec_from_json(d["base"]), stop)
    raise ParameterError(f"unknown family: {fam!r}")
