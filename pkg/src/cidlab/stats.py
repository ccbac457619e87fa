"""Centered statistics and indicator empirical processes along one path.

Three centerings of the same partial sum, all scaled by root n:

* W: against a supplied (or estimated) limit value of f,
* B: each term against its own one-step prediction,
* C: the whole sum against n times the step-n prediction.

plus M, the running mean of squared three-term increments
f(x_k) - k a_k + (k-1) a_{k-1}, whose limit calibrates the C statistic.

Statistics that need predictions only exist where the family has a closed
form (identity/indicator/power/table functions on Gaussian, urn, and
conjugate or i.i.d. mixture paths); anything else raises
UnsupportedCombinationError rather than silently estimating.
"""

from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from cidlab.errors import (
    ParameterError,
    PartitionError,
    SizeError,
    UnsupportedCombinationError,
)
from cidlab.processes import (
    PathSample,
    predictive_cdf,
    predictive_cdf_sequence,
)
from cidlab.streams import Bernoulli, Beta, Discrete, Normal, Uniform

# ---------------------------------------------------------------------------
# function descriptors


@dataclass(frozen=True)
class Identity:
    pass


@dataclass(frozen=True)
class Indicator:
    t: float


@dataclass(frozen=True)
class Power:
    p: int

    def __post_init__(self) -> None:
        if int(self.p) < 1:
            raise ParameterError(f"power must be a positive integer: {self.p}")
        object.__setattr__(self, "p", int(self.p))


@dataclass(frozen=True)
class Custom:
    """Tabulated function on a finite state space: ((state, value), ...)."""

    table: tuple[tuple[float, float], ...]

    def __post_init__(self) -> None:
        tab = tuple((float(k), float(v)) for k, v in self.table)
        if len(tab) == 0:
            raise ParameterError("empty table")
        object.__setattr__(self, "table", tab)

    def lookup(self) -> dict[float, float]:
        return dict(self.table)


FunctionDescriptor = Identity | Indicator | Power | Custom


def evaluate(f: FunctionDescriptor, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if isinstance(f, Identity):
        return x
    if isinstance(f, Indicator):
        return (x <= f.t).astype(float)
    if isinstance(f, Power):
        return x**f.p
    if isinstance(f, Custom):
        out = np.full(x.shape, np.nan)
        for k, v in f.table:
            out[x == k] = v
        if np.any(np.isnan(out)):
            raise ParameterError("path value outside the table's state space")
        return out
    raise ParameterError(f"unknown function descriptor: {f!r}")


def _second_moment(dist) -> float:
    if isinstance(dist, Normal):
        return dist.mean**2 + dist.variance
    if isinstance(dist, Uniform):
        w = dist.hi - dist.lo
        return dist.lo**2 + dist.lo * w + w * w / 3.0
    if isinstance(dist, Bernoulli):
        return dist.p
    if isinstance(dist, Beta):
        return dist.a * (dist.a + 1.0) / ((dist.a + dist.b) * (dist.a + dist.b + 1.0))
    if isinstance(dist, Discrete):
        w = np.asarray(dist.weights)
        return float(np.arange(w.size) ** 2 @ w / w.sum())
    raise UnsupportedCombinationError(f"no second moment for {dist!r}")


def _binary_predictive(path: PathSample) -> np.ndarray | None:
    # two-point paths on {0,1} whose predictive mean sequence is closed-form
    if path.family == "polya":
        return path.predictive_mean
    if path.family == "definetti" and path.spec.kernel == "bernoulli":
        return path.predictive_mean
    return None


def predictive_expectation_sequence(path: PathSample, f: FunctionDescriptor) -> np.ndarray:
    """a_k(f) = E[f(X_{k+1}) | first k steps] for k = 0..n."""
    if isinstance(f, Indicator):
        return np.asarray(predictive_cdf_sequence(path, f.t), dtype=float)

    p = _binary_predictive(path)
    if p is not None:
        # E f = f(0)(1-p) + f(1) p for any tabulated f on {0,1}
        f0 = float(evaluate(f, np.array([0.0]))[0])
        f1 = float(evaluate(f, np.array([1.0]))[0])
        return f0 + (f1 - f0) * p

    if path.family == "gaussian":
        s = np.concatenate([[0.0], path.latent.s])
        if isinstance(f, Identity) or (isinstance(f, Power) and f.p == 1):
            return s
        if isinstance(f, Power) and f.p == 2:
            b0 = np.concatenate([[0.0], path.spec.b_values(path.n)])
            return s * s + np.clip(path.spec.c - b0, 0.0, None)
        raise UnsupportedCombinationError(f"no Gaussian closed form for {f!r}")

    if path.family == "definetti":
        v = path.spec.iid_value()
        if v is not None:
            dist = path.spec.kernel_dist(v)
            if isinstance(f, Identity) or (isinstance(f, Power) and f.p == 1):
                return np.full(path.n + 1, dist.expectation())
            if isinstance(f, Power) and f.p == 2:
                return np.full(path.n + 1, _second_moment(dist))
            raise UnsupportedCombinationError(f"no i.i.d. closed form for {f!r}")

    raise UnsupportedCombinationError(
        f"no closed-form predictions for family {path.family!r} and {f!r}"
    )


def terminal_prediction(path: PathSample, f: FunctionDescriptor) -> tuple[float, float]:
    """(a_n(f), tail sd): the step-n prediction used as the default limit estimate.

    The tail sd is nonzero only for the Gaussian family with identity f,
    where the limit given n steps is exactly N(a_n, c - b_n).
    """
    a_n = float(predictive_expectation_sequence(path, f)[-1])
    tail = 0.0
    if path.family == "gaussian" and (isinstance(f, Identity) or (isinstance(f, Power) and f.p == 1)):
        b = path.spec.b_values(path.n)
        tail = math.sqrt(max(path.spec.c - float(b[-1]), 0.0))
    return a_n, tail


# ---------------------------------------------------------------------------
# scalar statistics


def centered_stat(
    path: PathSample,
    f: FunctionDescriptor,
    kind: str,
    v_f: float | None = None,
) -> float:
    """Root-n centered partial sum of f along the path.

    kind "W" centers at v_f (default: the step-n prediction), "B" at the
    one-step predictions, "C" at n times the step-n prediction.
    """
    n = path.n
    vals = evaluate(f, path.x)
    total = float(vals.sum())
    rn = math.sqrt(n)
    if kind == "W":
        if v_f is None:
            v_f = terminal_prediction(path, f)[0]
        return (total - n * v_f) / rn
    a = predictive_expectation_sequence(path, f)
    if kind == "B":
        return (total - float(a[:n].sum())) / rn
    if kind == "C":
        return (total - n * float(a[n])) / rn
    raise ParameterError(f"unknown statistic kind: {kind!r}")


def _three_term_increments(path: PathSample, f: FunctionDescriptor) -> np.ndarray:
    # f(x_k) - k a_k + (k-1) a_{k-1}, k = 1..n
    a = predictive_expectation_sequence(path, f)
    k = np.arange(1, path.n + 1, dtype=float)
    return evaluate(f, path.x) - k * a[1:] + (k - 1.0) * a[:-1]


def m_stat(path: PathSample, f: FunctionDescriptor) -> float:
    """Running mean of squared three-term increments; calibrates the C limit."""
    q = _three_term_increments(path, f)
    return float((q * q).mean())


def q_k_values(path: PathSample, t: float) -> np.ndarray:
    """Three-term indicator increments at threshold t, k = 1..n."""
    return _three_term_increments(path, Indicator(t))


@dataclass(frozen=True)
class SigmaEstimate:
    mean: float
    std: float
    per_path: np.ndarray


def sigma_estimate(paths, s: float, t: float) -> SigmaEstimate:
    """Cross-moment of indicator increments at thresholds s and t.

    Per path: (1/n) sum_k q_k(s) q_k(t); returns the across-path mean with
    dispersion.
    """
    vals = []
    for path in paths:
        qs = q_k_values(path, s)
        qt = qs if t == s else q_k_values(path, t)
        vals.append(float((qs * qt).mean()))
    if not vals:
        raise SizeError("sigma_estimate needs at least one path")
    arr = np.asarray(vals)
    return SigmaEstimate(float(arr.mean()), float(arr.std()), arr)


def block_product_mean(path: PathSample, fs) -> float:
    """Average over complete windows of prod_j f_j(x_{i+j}).

    With k functions there are n-k+1 complete windows; k=1 with identity is
    the plain sample mean.
    """
    fs = list(fs)
    k = len(fs)
    n = path.n
    if k < 1:
        raise SizeError("need at least one function")
    if k > n:
        raise SizeError(f"window {k} longer than path {n}")
    m = n - k + 1
    prod = np.ones(m)
    for j, f in enumerate(fs):
        prod = prod * evaluate(f, path.x[j : j + m])
    return float(prod.mean())


# ---------------------------------------------------------------------------
# indicator empirical processes


@dataclass(frozen=True)
class EmpiricalProcessPath:
    grid: np.ndarray
    values: np.ndarray
    n: int
    kind: str
    metadata: dict = field(default_factory=dict)


def _centering_cdf_on(path: PathSample, kind: str, v_fn, ts: np.ndarray) -> np.ndarray:
    if kind in ("W", "C"):
        if kind == "W" and v_fn is not None:
            return np.asarray(v_fn(ts), dtype=float)
        return np.asarray(predictive_cdf(path, path.n, ts), dtype=float)
    if kind == "B":
        # average of the n one-step predictive cdfs
        n = path.n
        p = _binary_predictive(path)
        if p is not None:
            lvl = float((1.0 - p[:n]).mean())
            return np.where(ts < 0.0, 0.0, np.where(ts < 1.0, lvl, 1.0))
        if path.family == "gaussian":
            from scipy.special import ndtr

            b0 = np.concatenate([[0.0], path.spec.b_values(n)])[:n]
            sd = np.sqrt(np.clip(path.spec.c - b0, 0.0, None))
            mu = np.concatenate([[0.0], path.latent.s])[:n]
            out = np.empty(ts.size)
            chunk = max(1, int(2_000_000 // max(n, 1)))
            for lo in range(0, ts.size, chunk):
                sub = ts[lo : lo + chunk, None]
                with np.errstate(divide="ignore", invalid="ignore"):
                    z = (sub - mu[None, :]) / np.where(sd > 0.0, sd, 1.0)[None, :]
                cdf = np.where(sd[None, :] > 0.0, ndtr(z), (sub >= mu[None, :]).astype(float))
                out[lo : lo + chunk] = cdf.mean(axis=1)
            return out
        if path.family == "definetti" and path.spec.iid_value() is not None:
            dist = path.spec.kernel_dist(path.spec.iid_value())
            return np.asarray(dist.cdf(ts), dtype=float)
        raise UnsupportedCombinationError(
            f"no closed-form one-step predictions for family {path.family!r}"
        )
    raise ParameterError(f"unknown process kind: {kind!r}")


def empirical_process(
    path: PathSample,
    grid,
    kind: str = "W",
    v_fn=None,
) -> EmpiricalProcessPath:
    """Indicator process on a threshold grid: values_j = centered_stat at t_j.

    One sort of the path serves every grid point. v_fn (a vectorized cdf)
    overrides the W centering; B and C always center at the family's own
    predictions.
    """
    ts = np.asarray(grid, dtype=float)
    if ts.ndim != 1 or ts.size == 0:
        raise SizeError("grid must be a nonempty 1-d array")
    if np.any(np.diff(ts) <= 0.0):
        raise ParameterError("grid must be strictly increasing")
    n = path.n
    xs = np.sort(path.x)
    fhat = np.searchsorted(xs, ts, side="right") / n
    g = _centering_cdf_on(path, kind, v_fn, ts)
    values = math.sqrt(n) * (fhat - g)
    meta = {
        "n": n,
        "kind": kind,
        "family": path.family,
        "seed": None if path.key is None else [path.key.seed, path.key.replica, path.key.lane],
        "v_source": "supplied" if (kind == "W" and v_fn is not None) else "predictive",
    }
    return EmpiricalProcessPath(ts, values, n, kind, meta)


def sup_norm(ep: EmpiricalProcessPath) -> float:
    if ep.values.size == 0:
        raise SizeError("empty process")
    return float(np.max(np.abs(ep.values)))


def oscillation(ep: EmpiricalProcessPath, partition) -> float:
    """Max over right-open partition cells of the value range within the cell."""
    cells = [(float(lo), float(hi)) for lo, hi in partition]
    if not cells:
        raise PartitionError("empty partition")
    for lo, hi in cells:
        if not lo < hi:
            raise PartitionError(f"bad interval [{lo}, {hi})")
    for (_, hi), (lo2, _) in zip(cells, cells[1:]):
        if hi > lo2:
            raise PartitionError("intervals overlap or are out of order")
    covered = np.zeros(ep.grid.size, dtype=bool)
    worst = 0.0
    for lo, hi in cells:
        inside = (ep.grid >= lo) & (ep.grid < hi)
        covered |= inside
        if np.any(inside):
            vals = ep.values[inside]
            worst = max(worst, float(vals.max() - vals.min()))
    if not covered.all():
        raise PartitionError("partition does not cover the grid")
    return worst


def process_sup_norm(path: PathSample, kind: str = "W", v_fn=None) -> float:
    """Exact sup over all thresholds of |indicator process|.

    Two-point paths are evaluated at their atoms. Paths with continuous
    predictive laws use the order-statistic formula (both sides of each
    jump), exact for W and C.
    """
    n = path.n
    if _binary_predictive(path) is not None:
        ep = empirical_process(path, np.array([0.0, 1.0]), kind, v_fn)
        return sup_norm(ep)
    if kind == "B":
        raise UnsupportedCombinationError("exact sup for B needs a two-point family")
    xs = np.sort(path.x)
    if kind == "W" and v_fn is not None:
        g = np.asarray(v_fn(xs), dtype=float)
    else:
        g = np.asarray(predictive_cdf(path, n, xs), dtype=float)
    i = np.arange(1, n + 1, dtype=float)
    d_hi = np.max(i / n - g)
    d_lo = np.max(g - (i - 1.0) / n)
    return math.sqrt(n) * max(d_hi, d_lo, 0.0)


# ---------------------------------------------------------------------------
# process serialization: one JSON metadata header line, then t,value rows


def write_process_csv(ep: EmpiricalProcessPath, fp) -> None:
    own = isinstance(fp, (str, bytes)) or hasattr(fp, "__fspath__")
    fh = open(fp, "w") if own else fp
    try:
        fh.write("# " + json.dumps(ep.metadata, sort_keys=True) + "\n")
        fh.write("t,value\n")
        for t, v in zip(ep.grid, ep.values):
            fh.write(f"{float(t)!r},{float(v)!r}\n")
    finally:
        if own:
            fh.close()


def read_process_csv(fp) -> EmpiricalProcessPath:
    own = isinstance(fp, (str, bytes)) or hasattr(fp, "__fspath__")
    fh = open(fp, "r") if own else fp
    try:
        header = fh.readline()
        if not header.startswith("# "):
            raise ParameterError("missing metadata header")
        meta = json.loads(header[2:])
        body = fh.read()
    finally:
        if own:
            fh.close()
    data = np.loadtxt(io.StringIO(body), delimiter=",", skiprows=1, ndmin=2)
    return EmpiricalProcessPath(
        grid=data[:, 0],
        values=data[:, 1],
        n=int(meta["n"]),
        kind=str(meta["kind"]),
        metadata=meta,
    )
