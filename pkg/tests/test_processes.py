"""Path generators: exact recursions, closed forms, and schema round trips."""

from fractions import Fraction

import numpy as np
import pytest
from scipy.special import ndtr

from cidlab.errors import ParameterError, SizeError, UnsupportedCombinationError
from cidlab.processes import (
    CompensatedGaussianSpec,
    DeFinettiSpec,
    Deterministic,
    FixedStop,
    GeometricStop,
    IID,
    PolyaUrnSpec,
    PrefixDependent,
    StoppedExchangeableSpec,
    b_stat_variance,
    c_stat_variance,
    family_of,
    gamma_matrix,
    gen_path,
    generate_batch,
    predictive_cdf,
    predictive_fractions,
    reinforcement_delta,
    spec_from_json,
    spec_to_json,
    w_stat_variance,
)
from cidlab.streams import Beta, Discrete, Normal, StreamKey, open_stream

GAUSS = CompensatedGaussianSpec(c=1.0, u=0.5)
URN = PolyaUrnSpec(w=1, r=1, reinforcement=Deterministic(values=(1,)))
URN12 = PolyaUrnSpec(w=1, r=1, reinforcement=Deterministic(values=(1, 2)))


def test_gaussian_spec_validation():
    with pytest.raises(ParameterError):
        CompensatedGaussianSpec(c=0.0, u=0.5)
    with pytest.raises(ParameterError):
        CompensatedGaussianSpec(c=1.0, u=1.0)  # u must stay below c
    with pytest.raises(ParameterError):
        CompensatedGaussianSpec(c=1.0, u=0.5, b=(0.4, 0.7))  # u and b together
    with pytest.raises(ParameterError):
        CompensatedGaussianSpec(c=1.0, b=(0.7, 0.4))  # not nondecreasing
    with pytest.raises(ParameterError):
        CompensatedGaussianSpec(c=1.0, b=(0.5, 1.5))  # exceeds c
    with pytest.raises(ParameterError):
        CompensatedGaussianSpec(c=1.0)  # neither u nor b


def test_urn_spec_validation():
    with pytest.raises(ParameterError):
        PolyaUrnSpec(w=0, r=1, reinforcement=Deterministic(values=(1,)))
    with pytest.raises(ParameterError):
        PolyaUrnSpec(w=1, r=1, reinforcement="twice")
    with pytest.raises(ParameterError):
        Deterministic(values=())
    with pytest.raises(ParameterError):
        Deterministic(values=(0,))
    with pytest.raises(ParameterError):
        Deterministic(values=(1, 2), extend="mirror")
    with pytest.raises(ParameterError):
        IID(dist=Discrete((1.0,)))  # mass at 0 means no reinforcement


def test_deterministic_extension_rules():
    assert Deterministic(values=(1, 2)).sequence(5).tolist() == [1, 2, 2, 2, 2]
    assert Deterministic(values=(1, 2), extend="cycle").sequence(5).tolist() == [1, 2, 1, 2, 1]
    assert Deterministic(values=(3, 4)).sequence(1).tolist() == [3]


def test_b_values_closed_form():
    b = GAUSS.b_values(10)
    assert np.allclose(b, 1.0 - 0.5 / np.arange(1, 11))
    explicit = CompensatedGaussianSpec(c=1.0, b=(0.4, 0.7, 0.9))
    assert explicit.b_values(3).tolist() == [0.4, 0.7, 0.9]
    with pytest.raises(ParameterError):
        explicit.b_values(4)


def test_gamma_matrix_exact_small():
    g = gamma_matrix(GAUSS, 3)
    want = np.array([[1.0, 0.5, 0.5], [0.5, 1.0, 0.75], [0.5, 0.75, 1.0]])
    assert np.array_equal(g, want)


def test_gamma_matrix_psd():
    g = gamma_matrix(GAUSS, 40)
    assert np.linalg.eigvalsh(g).min() > -1e-12


def test_variance_closed_forms():
    # identity-f W and C variances do not depend on n for the 1/k schedule
    for n in (1, 7, 100):
        assert w_stat_variance(GAUSS, n) == pytest.approx(1.0, abs=1e-12)
        assert c_stat_variance(GAUSS, n) == pytest.approx(0.5, abs=1e-12)
    # Var[B_n] = (c + u * H_{n-1}) / n
    h4 = sum(1.0 / k for k in range(1, 5))
    assert b_stat_variance(GAUSS, 5) == pytest.approx((1.0 + 0.5 * h4) / 5.0, rel=1e-12)


def test_gaussian_path_structure():
    p = gen_path(GAUSS, 50, open_stream(StreamKey(9, 0, 0)))
    lat = p.latent
    assert np.allclose(p.x, lat.s + lat.u)
    assert np.allclose(np.cumsum(lat.z), lat.s)
    # predictive mean of the identity is the compensator path s
    assert p.predictive_mean.shape == (51,)
    assert p.predictive_mean[0] == 0.0
    assert np.allclose(p.predictive_mean[1:], lat.s)


def test_gaussian_marginals_share_one_law():
    # every coordinate is N(0, c); compare first and last empirically
    b = generate_batch(GAUSS, 6, 17, 4000)
    assert abs(b.x[:, 0].var() - 1.0) < 0.08
    assert abs(b.x[:, 5].var() - 1.0) < 0.08
    lo, hi = np.sort(b.x[:, 0]), np.sort(b.x[:, 5])
    grid = np.concatenate([lo, hi])
    d = np.max(
        np.abs(
            np.searchsorted(lo, grid, side="right") / lo.size
            - np.searchsorted(hi, grid, side="right") / hi.size
        )
    )
    assert d < 0.05


def test_urn_predictive_is_exact_martingale():
    rng = np.random.default_rng(3)
    for _ in range(200):
        num = Fraction(int(rng.integers(1, 50)))
        den = num + int(rng.integers(1, 50))
        d = int(rng.integers(1, 9))
        p = num / den
        step_up = Fraction(num + d, den + d)
        step_dn = Fraction(num, den + d)
        assert step_up * p + step_dn * (1 - p) == p


def test_urn_fractions_match_path():
    b = generate_batch(URN12, 30, 21, 8)
    for path in b.paths():
        fr = predictive_fractions(path)
        num, den = Fraction(1), Fraction(2)
        assert fr[0] == Fraction(1, 2)
        for k, xk in enumerate(path.x):
            d = int(path.latent.d[k])
            if xk == 1.0:
                num += d
            den += d
            assert fr[k + 1] == num / den
        assert np.allclose(path.predictive_mean, [float(f) for f in fr])


def test_reinforcement_delta():
    def urn(reinf):
        return PolyaUrnSpec(w=1, r=1, reinforcement=reinf)

    assert reinforcement_delta(urn(Deterministic(values=(2,)))) == 0.0
    # uniform on {1, 2}: Var/mean^2 = 0.25 / 2.25
    iid = IID(dist=Discrete((0.0, 0.5, 0.5)))
    assert reinforcement_delta(urn(iid)) == pytest.approx(1.0 / 9.0)
    with pytest.raises(UnsupportedCombinationError):
        reinforcement_delta(urn(PrefixDependent(fn=lambda prefix: 1)))
    with pytest.raises(UnsupportedCombinationError):
        reinforcement_delta(urn(Deterministic(values=(1, 2))))  # not constant-in-law


def test_predictive_cdf_urn_and_gaussian():
    p = gen_path(URN, 10, open_stream(StreamKey(2, 0, 0)))
    pm = p.predictive_mean[-1]
    assert predictive_cdf(p, 10, -0.5) == 0.0
    assert predictive_cdf(p, 10, 0.0) == pytest.approx(1.0 - pm)
    assert predictive_cdf(p, 10, 0.7) == pytest.approx(1.0 - pm)
    assert predictive_cdf(p, 10, 1.0) == 1.0
    with pytest.raises(IndexError):
        predictive_cdf(p, 11, 0.5)

    g = gen_path(GAUSS, 10, open_stream(StreamKey(2, 0, 1)))
    s = g.latent.s[-1]
    sd = np.sqrt(1.0 - GAUSS.b_values(10)[-1])
    ts = np.linspace(-2.0, 2.0, 7)
    assert np.allclose(predictive_cdf(g, 10, ts), ndtr((ts - s) / sd))
    # step 0 prediction is the unconditional N(0, c) law
    assert predictive_cdf(g, 0, 0.0) == pytest.approx(0.5)


def test_definetti_conjugate_predictive():
    spec = DeFinettiSpec(mixing=Beta(2.0, 3.0), kernel="bernoulli")
    p = gen_path(spec, 25, open_stream(StreamKey(4, 0, 0)))
    run = np.concatenate([[0.0], np.cumsum(p.x)])
    want = (2.0 + run) / (5.0 + np.arange(26))
    assert np.allclose(p.predictive_mean, want)
    assert 0.0 <= p.latent.theta <= 1.0


def test_definetti_point_mass_is_iid():
    spec = DeFinettiSpec(mixing=Normal(mean=0.25, variance=0.0), kernel="bernoulli")
    b = generate_batch(spec, 2000, 5, 3)
    assert np.all(b.latent["theta"] == 0.25)
    assert abs(b.x.mean() - 0.25) < 0.02
    assert np.all(b.predictive_mean == 0.25)


def test_stopped_paths_freeze_at_stop():
    spec = StoppedExchangeableSpec(
        base=DeFinettiSpec(mixing=Beta(2.0, 2.0), kernel="bernoulli"),
        stop=FixedStop(3.0),
    )
    b = generate_batch(spec, 9, 6, 12)
    assert np.all(b.latent["t"] == 3.0)
    assert np.all(b.x[:, 3:] == b.x[:, 2:3])
    with pytest.raises(ParameterError):
        GeometricStop(0.0)
    with pytest.raises(ParameterError):
        FixedStop(0.0)


def test_prefix_views():
    p = gen_path(URN12, 20, open_stream(StreamKey(8, 0, 0)))
    q = p.prefix(7)
    assert q.n == 7
    assert np.array_equal(q.x, p.x[:7])
    assert np.array_equal(q.predictive_mean, p.predictive_mean[:8])
    assert np.array_equal(q.latent.num, p.latent.num[:8])
    with pytest.raises(SizeError):
        p.prefix(0)
    with pytest.raises(SizeError):
        p.prefix(21)


def test_generate_batch_chunk_independence():
    whole = generate_batch(URN12, 15, 33, 6, lane=2)
    tail = generate_batch(URN12, 15, 33, 4, lane=2, replica_offset=2)
    assert np.array_equal(whole.x[2:], tail.x)
    assert np.array_equal(whole.predictive_mean[2:], tail.predictive_mean)
    one = gen_path(URN12, 15, open_stream(StreamKey(33, 4, 2)))
    assert np.array_equal(one.x, whole.x[4])


def test_generate_batch_validation():
    with pytest.raises(SizeError):
        generate_batch(URN, 0, 1, 1)
    with pytest.raises(SizeError):
        generate_batch(URN, 5, 1, 0)


def test_family_of():
    assert family_of(GAUSS) == "gaussian"
    assert family_of(URN) == "polya"
    assert family_of(DeFinettiSpec(mixing=Beta(1.0, 1.0))) == "definetti"
    spec = StoppedExchangeableSpec(
        base=DeFinettiSpec(mixing=Beta(1.0, 1.0)), stop=GeometricStop(0.5)
    )
    assert family_of(spec) == "stopped"


@pytest.mark.parametrize(
    "spec",
    [
        GAUSS,
        CompensatedGaussianSpec(c=2.0, b=(0.5, 1.0, 1.5)),
        URN,
        PolyaUrnSpec(w=2, r=3, reinforcement=IID(dist=Discrete((0.0, 0.5, 0.5)))),
        DeFinettiSpec(mixing=Beta(1.0, 1.0), kernel="bernoulli"),
        DeFinettiSpec(mixing=Normal(mean=0.0, variance=0.0), kernel="normal", kernel_param=1.0),
        StoppedExchangeableSpec(
            base=DeFinettiSpec(mixing=Beta(2.0, 2.0)), stop=GeometricStop(0.25)
        ),
        StoppedExchangeableSpec(
            base=DeFinettiSpec(mixing=Beta(2.0, 2.0)), stop=FixedStop(4.0)
        ),
    ],
)
def test_spec_json_round_trip(spec):
    payload = spec_to_json(spec)
    assert spec_from_json(payload) == spec
    # payload survives an actual serializer pass
    import json

    assert spec_from_json(json.loads(json.dumps(payload))) == spec


def test_spec_json_rejects_unknown():
    with pytest.raises(ParameterError):
        spec_from_json({"family": "nope"})
    with pytest.raises(ParameterError):
        spec_from_json(
            {"family": "polya", "w": 1, "r": 1, "reinforcement": {"kind": "psychic"}}
        )
    with pytest.raises(ParameterError):
        spec_to_json(PolyaUrnSpec(w=1, r=1, reinforcement=PrefixDependent(fn=len)))
