"""Exact finite-depth checks for two-color urn processes.

Joint laws are enumerated in rational arithmetic (every probability a
Fraction), so the checks below are proofs at their depth, not estimates:

* check_cid_eq5: the defining identity "prefix + skip-one marginal equals
  prefix + next-step marginal" at every depth the law covers,
* check_exchangeable: permutation invariance via orbit grouping,
* check_permuted_cid: the identity again after permuting finitely many
  indices — which characterizes exchangeability when it holds for all
  permutations.

Certificates carry a violating atom with both exact probabilities, or the
orbit witness pair plus the permutation sending one to the other.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from cidlab.errors import ParameterError, SizeError, UnsupportedCombinationError
from cidlab.processes import (
    CompensatedGaussianSpec,
    Deterministic,
    IID,
    PolyaUrnSpec,
    PrefixDependent,
    gamma_matrix,
)

MAX_DEPTH = 14  # full suite stays well under a minute
MAX_MIXED_DEPTH = 10  # i.i.d. reinforcement branches over d too


def frac_json(q: Fraction) -> dict:
    return {"num": q.numerator, "den": q.denominator}


@dataclass(frozen=True)
class ExactJointLaw:
    """Joint law of the first n coordinates; pmf keyed by 0/1 atoms."""

    n: int
    pmf: dict

    def __post_init__(self) -> None:
        if sum(self.pmf.values(), Fraction(0)) != 1:
            raise ParameterError("pmf does not sum to one exactly")
        if any(len(atom) != self.n for atom in self.pmf):
            raise ParameterError("atom length differs from n")

    def prob(self, atom: tuple[int, ...]) -> Fraction:
        return self.pmf.get(tuple(atom), Fraction(0))


@dataclass(frozen=True)
class Certificate:
    """Outcome of an exact check; falsy when violated, with a witness."""

    passed: bool
    check: str
    details: dict = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.passed

    def to_json(self) -> dict:
        def conv(v):
            if isinstance(v, Fraction):
                return frac_json(v)
            if isinstance(v, tuple):
                return [conv(x) for x in v]
            if isinstance(v, dict):
                return {str(k): conv(x) for k, x in v.items()}
            if isinstance(v, list):
                return [conv(x) for x in v]
            return v

        return {"check": self.check, "passed": self.passed, "details": conv(self.details)}


def _exact_weights(dist) -> list[tuple[int, Fraction]]:
    # float weights are dyadic rationals; normalizing by their exact sum keeps
    # the mixture an exact probability vector
    ws = [Fraction(w) for w in dist.weights]
    total = sum(ws, Fraction(0))
    return [(v, w / total) for v, w in enumerate(ws) if w > 0]


def enumerate_polya_joint(spec: PolyaUrnSpec, depth: int) -> ExactJointLaw:
    """Exact joint law of the first `depth` colors.

    Deterministic and prefix-dependent reinforcement recurse over the binary
    tree; i.i.d. reinforcement with finite support additionally mixes over d
    at every step, collapsing d-histories into (num, den) urn states.
    """
    if depth < 1:
        raise SizeError(f"depth must be >= 1: {depth}")
    reinf = spec.reinforcement
    if isinstance(reinf, IID):
        if depth > MAX_MIXED_DEPTH:
            raise SizeError(f"depth {depth} > {MAX_MIXED_DEPTH} for i.i.d. reinforcement")
        return _enumerate_mixed(spec, depth)
    if depth > MAX_DEPTH:
        raise SizeError(f"depth {depth} > {MAX_DEPTH}")

    if isinstance(reinf, Deterministic):
        d_seq = [int(v) for v in reinf.sequence(depth)]
        d_of = lambda prefix: d_seq[len(prefix)]
    else:
        d_of = reinf.fn

    pmf: dict = {}

    def rec(prefix: tuple[int, ...], num: int, den: int, prob: Fraction) -> None:
        if len(prefix) == depth:
            pmf[prefix] = prob
            return
        d = int(d_of(prefix))
        if d < 1:
            raise ParameterError(f"reinforcement must be positive: {d}")
        p = Fraction(num, den)
        rec(prefix + (1,), num + d, den + d, prob * p)
        rec(prefix + (0,), num, den + d, prob * (1 - p))

    rec((), spec.w, spec.w + spec.r, Fraction(1))
    return ExactJointLaw(depth, pmf)


def _enumerate_mixed(spec: PolyaUrnSpec, depth: int) -> ExactJointLaw:
    d_vals = _exact_weights(spec.reinforcement.dist)
    pmf: dict = {}

    def rec(prefix: tuple[int, ...], states: dict) -> None:
        # states: (num, den) -> Fraction mass of this x-prefix with that urn state
        if len(prefix) == depth:
            pmf[prefix] = sum(states.values(), Fraction(0))
            return
        ones: dict = {}
        zeros: dict = {}
        for (num, den), mass in states.items():
            p = Fraction(num, den)
            for v, q in d_vals:
                w1 = mass * q * p
                if w1:
                    key = (num + v, den + v)
                    ones[key] = ones.get(key, Fraction(0)) + w1
                w0 = mass * q * (1 - p)
                if w0:
                    key = (num, den + v)
                    zeros[key] = zeros.get(key, Fraction(0)) + w0
        rec(prefix + (1,), ones)
        rec(prefix + (0,), zeros)

    rec((), {(spec.w, spec.w + spec.r): Fraction(1)})
    return ExactJointLaw(depth, pmf)


def marginal_law(joint: ExactJointLaw, indices) -> ExactJointLaw:
    """Law of (X_{i} for i in indices), coordinates in the given order.

    Indices are 1-based, distinct, within 1..n; any order is allowed (a
    permutation of all indices gives the permuted law).
    """
    idx = [int(i) for i in indices]
    if len(idx) == 0:
        raise IndexError("empty index list")
    if len(set(idx)) != len(idx):
        raise IndexError(f"duplicate indices: {idx}")
    if any(i < 1 or i > joint.n for i in idx):
        raise IndexError(f"indices outside 1..{joint.n}: {idx}")
    pmf: dict = {}
    for atom, prob in joint.pmf.items():
        sub = tuple(atom[i - 1] for i in idx)
        pmf[sub] = pmf.get(sub, Fraction(0)) + prob
    return ExactJointLaw(len(idx), pmf)


def check_cid_eq5_law(joint: ExactJointLaw, check: str = "cid_eq5") -> Certificate:
    """Exact skip-one identity on an already-enumerated law, all n <= depth-2."""
    checked = []
    for n in range(joint.n - 1):
        lhs = marginal_law(joint, list(range(1, n + 1)) + [n + 2])
        rhs = marginal_law(joint, list(range(1, n + 2)))
        atoms = sorted(set(lhs.pmf) | set(rhs.pmf))
        for atom in atoms:
            pl, pr = lhs.prob(atom), rhs.prob(atom)
            if pl != pr:
                return Certificate(
                    False,
                    check,
                    {"n": n, "atom": atom, "lhs": pl, "rhs": pr},
                )
        checked.append(n)
    return Certificate(True, check, {"depth": joint.n, "checked_n": checked})


def check_cid_eq5(spec: PolyaUrnSpec, depth: int) -> Certificate:
    """Enumerate to `depth` and verify the skip-one identity for every n."""
    return check_cid_eq5_law(enumerate_polya_joint(spec, depth))


def _witness_permutation(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
    # 1-based tau with b[j] = a[tau(j) - 1]
    tau = [0] * len(a)
    for v in (0, 1):
        pos_a = [i for i, x in enumerate(a) if x == v]
        pos_b = [i for i, x in enumerate(b) if x == v]
        for pa, pb in zip(pos_a, pos_b):
            tau[pb] = pa + 1
    return tuple(tau)


def check_exchangeable(joint: ExactJointLaw) -> Certificate:
    """Permutation invariance: equal probability within every multiset orbit."""
    orbits: dict = {}
    for atom in sorted(joint.pmf):
        orbits.setdefault(tuple(sorted(atom, reverse=True)), []).append(atom)
    for members in orbits.values():
        ref = members[0]
        p_ref = joint.pmf[ref]
        for atom in members[1:]:
            p = joint.pmf[atom]
            if p != p_ref:
                return Certificate(
                    False,
                    "exchangeable",
                    {
                        "atom_a": ref,
                        "p_a": p_ref,
                        "atom_b": atom,
                        "p_b": p,
                        "permutation": _witness_permutation(ref, atom),
                    },
                )
    return Certificate(True, "exchangeable", {"depth": joint.n, "orbits": len(orbits)})


def check_permuted_cid(spec: PolyaUrnSpec, tau, depth: int) -> Certificate:
    """Skip-one identity for the index-permuted sequence.

    tau is given as the 1-based image list of its moved prefix (identity
    beyond); it must fix every index greater than depth - 2.
    """
    images = [int(v) for v in tau]
    if sorted(images) != list(range(1, len(images) + 1)):
        raise ParameterError(f"tau is not a permutation of 1..{len(images)}: {tau}")
    if len(images) > max(depth - 2, 0):
        for i in range(max(depth - 2, 0), len(images)):
            if images[i] != i + 1:
                raise ParameterError(f"tau must fix indices beyond {depth - 2}")
    full = images + list(range(len(images) + 1, depth + 1))
    joint = enumerate_polya_joint(spec, depth)
    permuted = marginal_law(joint, full)
    cert = check_cid_eq5_law(permuted, check="permuted_cid")
    details = dict(cert.details)
    details["tau"] = tuple(images)
    return Certificate(cert.passed, cert.check, details)


def check_cid_gamma(spec: CompensatedGaussianSpec, depth: int) -> Certificate:
    """Gaussian-family skip-one identity, checked on covariance matrices.

    A centered Gaussian prefix law is determined by its covariance, so the
    identity holds iff dropping coordinate n+1 from the (n+2)-matrix gives
    exactly the (n+1)-matrix. Exact float comparison: entries coincide as
    written, not within tolerance.
    """
    if depth < 2:
        raise SizeError(f"depth must be >= 2: {depth}")
    big = gamma_matrix(spec, depth)
    for n in range(depth - 1):
        keep = list(range(n)) + [n + 1]
        skip = np.asarray(big[np.ix_(keep, keep)])
        direct = gamma_matrix(spec, n + 1)
        if not np.array_equal(skip, direct):
            return Certificate(False, "cid_gamma", {"n": n})
    return Certificate(True, "cid_gamma", {"depth": depth})
