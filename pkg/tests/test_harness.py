"""Goodness-of-fit machinery, experiment configs, and the replica runner."""

import json
import math

import numpy as np
import pytest
from scipy import stats as spstats
from scipy.special import ndtr, ndtri

from cidlab.errors import ParameterError, SizeError
from cidlab.harness import (
    Check,
    ExperimentConfig,
    VerificationReport,
    ks_one_sample,
    ks_threshold_one,
    ks_threshold_two,
    ks_two_sample,
)
from cidlab.harness.config import dump_json, jsonable, summarize
from cidlab.harness.experiments import (
    asymptotic_exchangeability_test,
    block_product_experiment,
    clt_experiment,
    covariance_experiment,
    polya_clt_experiment,
    run_replicas,
    slln_experiment,
    stable_conditional_test,
    uniform_convergence_test,
    variance_calibration_experiment,
)
from cidlab.processes import (
    CompensatedGaussianSpec,
    DeFinettiSpec,
    Deterministic,
    IID,
    PolyaUrnSpec,
    gamma_matrix,
    gen_path,
)
from cidlab.stats import Identity, Indicator, Power, centered_stat
from cidlab.streams import Discrete, Normal, StreamKey, open_stream

GAUSS = CompensatedGaussianSpec(c=1.0, u=0.5)
URN = PolyaUrnSpec(w=1, r=1, reinforcement=Deterministic(values=(1,)))
UNIFORM_D = PolyaUrnSpec(w=1, r=1, reinforcement=IID(dist=Discrete((0.0, 0.5, 0.5))))
IID_NORMAL = DeFinettiSpec(mixing=Normal(mean=0.0, variance=0.0), kernel="normal", kernel_param=1.0)


# ---------------------------------------------------------------------------
# goodness of fit


def test_ks_one_sample_exact_quantile_grid():
    r = 400
    samples = ndtri((np.arange(1, r + 1) - 0.5) / r)
    assert ks_one_sample(samples, ndtr) == pytest.approx(0.5 / r, abs=1e-12)


def test_ks_one_sample_matches_scipy():
    x = np.random.default_rng(1).normal(size=500)
    ours = ks_one_sample(x, ndtr)
    ref = spstats.kstest(x, "norm").statistic
    assert ours == pytest.approx(ref, rel=1e-12)


def test_ks_one_sample_minimum_size():
    with pytest.raises(SizeError):
        ks_one_sample(np.zeros(99), ndtr)


def test_ks_two_sample_extremes():
    rng = np.random.default_rng(2)
    a = rng.normal(size=300)
    assert ks_two_sample(a, a.copy()) == 0.0
    b = rng.normal(size=200) + 100.0
    assert ks_two_sample(a, b) == 1.0
    with pytest.raises(SizeError):
        ks_two_sample(a, np.zeros(10))


def test_ks_two_sample_matches_scipy():
    rng = np.random.default_rng(3)
    a, b = rng.normal(size=350), rng.normal(0.2, 1.1, size=250)
    assert ks_two_sample(a, b) == pytest.approx(spstats.ks_2samp(a, b).statistic, rel=1e-12)


def test_ks_thresholds():
    assert ks_threshold_one(2000) == pytest.approx(1.25 * 1.63 / math.sqrt(2000))
    assert ks_threshold_two(1000, 1000) == pytest.approx(
        1.25 * 1.63 * math.sqrt(2.0 / 1000.0)
    )
    assert ks_threshold_one(2000) == pytest.approx(0.04556, abs=2e-5)
    assert ks_threshold_two(1000, 1000) == pytest.approx(0.09113, abs=2e-5)


# ---------------------------------------------------------------------------
# configuration and reports


def test_experiment_config_validation():
    ok = dict(name="x", process=URN, kind="C", n=10, replicas=200, seed=1)
    ExperimentConfig(**ok)
    with pytest.raises(ParameterError):
        ExperimentConfig(**{**ok, "test": "eyeball"})
    with pytest.raises(ParameterError):
        ExperimentConfig(**{**ok, "tolerance": 0.0})
    with pytest.raises(ParameterError):
        ExperimentConfig(**{**ok, "replicas": 50})  # distributional needs 100
    with pytest.raises(ParameterError):
        ExperimentConfig(**{**ok, "n": 0})
    # non-distributional tests accept small replica counts
    ExperimentConfig(**{**ok, "replicas": 50, "test": "variance_bound"})


@pytest.mark.parametrize(
    "statistic", [None, Identity(), Indicator(0.5), Power(2)]
)
def test_experiment_config_round_trip(statistic):
    config = ExperimentConfig(
        name="demo",
        process=UNIFORM_D,
        kind="C",
        n=100,
        replicas=150,
        seed=9,
        statistic=statistic,
        tolerance=0.1,
        lane=7,
        options={"negative_control": True},
    )
    payload = config.to_json()
    assert payload["version"] == 1
    back = ExperimentConfig.from_json(json.loads(json.dumps(payload)))
    assert back == config
    with pytest.raises(ParameterError):
        ExperimentConfig.from_json({**payload, "version": 2})


def test_summarize_and_jsonable():
    s = summarize([1.0, 2.0, 3.0, 4.0])
    assert s["count"] == 4 and s["mean"] == pytest.approx(2.5)
    assert s["variance"] == pytest.approx(np.var([1, 2, 3, 4], ddof=1))
    assert s["quantiles"]["0.5"] == pytest.approx(2.5)
    from fractions import Fraction

    out = jsonable(
        {"a": np.float64(1.5), "b": np.arange(3), "c": Fraction(1, 3), "d": np.bool_(True)}
    )
    assert out == {"a": 1.5, "b": [0, 1, 2], "c": {"num": 1, "den": 3}, "d": True}


def test_report_passed_and_serialization(tmp_path):
    fail_soft = Check("soft", "advisory", 1.0, 0.5, False, gating=False)
    ok = Check("hard", "gate", 0.1, 0.5, True)
    rep = VerificationReport(
        experiment="demo", seed=3, checks=[ok, fail_soft], summary={}, diagnostics={}
    )
    rep.wall_time = 1.23
    assert rep.passed  # non-gating failures do not block
    d = rep.to_dict()
    assert "wall_time" not in json.dumps(d)
    assert "wall_time" in json.dumps(rep.to_dict(include_timing=True))
    rep2 = VerificationReport(
        experiment="demo", seed=3, checks=[Check("hard", "gate", 1.0, 0.5, False)],
        summary={}, diagnostics={},
    )
    assert not rep2.passed
    target = tmp_path / "r.json"
    with open(target, "w") as fp:
        dump_json(d, fp)
    text = target.read_text()
    assert text.endswith("\n")
    assert json.loads(text) == d


# ---------------------------------------------------------------------------
# the replica runner and experiments


def test_run_replicas_matches_single_paths():
    config = ExperimentConfig(
        name="x", process=URN, kind="C", n=50, replicas=3, seed=77, lane=4,
        test="variance_bound",
    )
    values = run_replicas(config)
    for i in range(3):
        path = gen_path(URN, 50, open_stream(StreamKey(77, i, 4)))
        assert values[i] == centered_stat(path, Identity(), "C")


def test_run_replicas_deterministic():
    config = ExperimentConfig(
        name="x", process=GAUSS, kind="W", n=30, replicas=120, seed=5, lane=1
    )
    assert np.array_equal(run_replicas(config), run_replicas(config))


def test_iid_b_statistic_is_standard_normal():
    # for i.i.d. draws the one-step centering is the true mean, so B is an
    # exact standardized sum
    config = ExperimentConfig(
        name="iid-b", process=IID_NORMAL, kind="B", n=100, replicas=2000, seed=11, lane=2
    )
    values = run_replicas(config)
    assert abs(values.var(ddof=1) - 1.0) < 0.1
    assert abs(values.mean()) < 0.05
    assert ks_one_sample(values, ndtr) < ks_threshold_one(2000)


def test_clt_experiment_report():
    # the negative control (variance off by 2x) sits a fixed KS distance of
    # about 0.10 from the standard normal, so the gate must be below that
    config = ExperimentConfig(
        name="gauss-w", process=GAUSS, kind="W", n=300, replicas=1000, seed=21, lane=3,
        tolerance=ks_threshold_one(1000),
        options={"negative_control": True, "scale": 1.0},
    )
    rep = clt_experiment(config)
    ids = [c.check_id for c in rep.checks]
    assert ids == ["ks_normal", "negative_control"]
    assert rep.passed
    assert rep.checks[1].comparison == ">"
    assert rep.summary["count"] == 1000
    assert rep.samples is not None and rep.samples.shape == (1000,)
    assert rep.diagnostics["scale"] == 1.0


def test_clt_experiment_variance_bound_branch():
    # exact Var[B] = (c + u H_{n-1}) / n, about 2.5e-3 at n = 2000
    config = ExperimentConfig(
        name="gauss-b", process=GAUSS, kind="B", n=2000, replicas=200, seed=22, lane=5,
        test="variance_bound", tolerance=4e-3,
    )
    rep = clt_experiment(config)
    assert [c.check_id for c in rep.checks] == ["variance_bound"]
    assert rep.passed
    assert rep.checks[0].value == pytest.approx(2.54e-3, abs=6e-4)


def test_variance_calibration_experiment():
    config = ExperimentConfig(
        name="var-n10", process=GAUSS, kind="W", n=10, replicas=4000, seed=23, lane=6,
        test="variance_bound",
    )
    rep = variance_calibration_experiment(config)
    check = rep.checks[0]
    assert check.check_id == "variance_matches_closed_form"
    assert rep.diagnostics["exact_variance"] == pytest.approx(1.0)
    assert abs(rep.diagnostics["sample_variance"] - 1.0) < 0.1
    assert rep.passed


def test_covariance_experiment():
    config = ExperimentConfig(
        name="cov", process=GAUSS, kind="W", n=3, replicas=20000, seed=24, lane=7,
        test="variance_bound", tolerance=0.05,
    )
    rep = covariance_experiment(config)
    assert rep.passed
    emp = np.asarray(rep.diagnostics["empirical"])
    assert np.max(np.abs(emp - gamma_matrix(GAUSS, 3))) < 0.05


def test_polya_clt_experiment_standardized():
    config = ExperimentConfig(
        name="urn-clt", process=UNIFORM_D, kind="C", n=2000, replicas=300, seed=25, lane=8,
        tolerance=ks_threshold_one(300), options={"negative_control": True},
    )
    rep = polya_clt_experiment(config)
    ids = [c.check_id for c in rep.checks]
    assert "ks_standardized" in ids and "negative_control" in ids
    assert rep.passed
    assert rep.diagnostics["delta"] == pytest.approx(1.0 / 9.0)
    assert rep.excluded == 0 and not rep.inconclusive


def test_polya_clt_constant_reinforcement_degenerates():
    config = ExperimentConfig(
        name="urn-const", process=URN, kind="C", n=2000, replicas=200, seed=26, lane=9,
        test="variance_bound", tolerance=2e-3,
    )
    rep = polya_clt_experiment(config)
    assert [c.check_id for c in rep.checks] == ["variance_bound"]
    assert rep.passed
    assert rep.diagnostics["delta"] == 0.0


def test_stable_conditional_whole_space_event():
    config = ExperimentConfig(
        name="stable", process=GAUSS, kind="W", n=400, replicas=300, seed=27, lane=10,
        tolerance=ks_threshold_one(300), options={"scale": 1.0},
    )
    rep = stable_conditional_test(config, event={"coord": 1, "op": "gt", "value": -1e9})
    by_id = {c.check_id: c for c in rep.checks}
    # conditioning on everything reproduces the unconditional test exactly
    assert by_id["ks_unconditional"].value == by_id["ks_conditional"].value
    assert by_id["outcome_unchanged"].passed
    assert rep.diagnostics["event_fraction"] == 1.0
    assert rep.diagnostics["conditioned_count"] == 300


def test_stable_conditional_real_event():
    config = ExperimentConfig(
        name="stable-urn", process=UNIFORM_D, kind="C", n=1000, replicas=400, seed=28, lane=11,
        tolerance=ks_threshold_one(400),
    )
    rep = stable_conditional_test(config, event={"coord": 1, "op": "eq", "value": 1.0})
    by_id = {c.check_id: c for c in rep.checks}
    assert by_id["outcome_unchanged"].passed
    assert 0.3 < rep.diagnostics["event_fraction"] < 0.7
    with pytest.raises(ParameterError):
        stable_conditional_test(config, event=None)
    with pytest.raises(ParameterError):
        stable_conditional_test(config, event={"coord": 0, "op": "eq", "value": 1.0})


def test_stable_conditional_small_subsample_rejected():
    config = ExperimentConfig(
        name="stable-small", process=GAUSS, kind="W", n=200, replicas=120, seed=29, lane=12,
        tolerance=0.2, options={"scale": 1.0},
    )
    with pytest.raises(SizeError):
        # nothing satisfies an impossible event
        stable_conditional_test(config, event={"coord": 1, "op": "gt", "value": 1e9})


def test_uniform_convergence_experiment():
    config = ExperimentConfig(
        name="uconv", process=URN, kind="C-process", n=1600, replicas=200, seed=30, lane=13,
        test="band_check", tolerance=0.2, options={"ns": (100, 1600)},
    )
    rep = uniform_convergence_test(config)
    by_id = {c.check_id: c for c in rep.checks}
    assert set(by_id) == {"band_decreasing", "band_final"}
    pct = rep.diagnostics["pct95"]
    assert set(pct) == {"100", "1600"}
    assert by_id["band_final"].value == pct["1600"]
    assert rep.passed
    with pytest.raises(ParameterError):
        uniform_convergence_test(
            ExperimentConfig(
                name="bad", process=URN, kind="C-process", n=100, replicas=200, seed=1,
                test="band_check", options={"ns": (100, 50)},
            )
        )


def test_asymptotic_exchangeability_standard_urn():
    config = ExperimentConfig(
        name="asym", process=URN, kind="C", n=23, replicas=8000, seed=31, lane=14,
        test="band_check", tolerance=1.0,
        options={"ns": (5, 20), "expect_zero": True},
    )
    rep = asymptotic_exchangeability_test(config)
    by_id = {c.check_id: c for c in rep.checks}
    assert by_id["gap_final"].passed  # exchangeable: gap within noise of zero
    assert rep.passed
    assert set(rep.diagnostics["gap"]) == {"5", "20"}


def test_empirical_process_kolmogorov():
    from cidlab.harness.experiments import empirical_process_experiment

    spec = DeFinettiSpec(mixing=Normal(mean=0.0, variance=0.0), kernel="uniform", kernel_param=1.0)
    config = ExperimentConfig(
        name="kolmo", process=spec, kind="W-process", n=1000, replicas=150, seed=34, lane=17,
        limit="kolmogorov", tolerance=ks_threshold_one(150),
    )
    rep = empirical_process_experiment(config)
    assert rep.checks[0].check_id == "ks_kolmogorov"
    assert rep.passed
    assert rep.samples.shape == (150,)
    assert float(rep.samples.min()) > 0.0


def test_slln_experiment():
    config = ExperimentConfig(
        name="slln", process=URN, kind="C", n=2000, replicas=200, seed=32, lane=15,
        test="band_check", tolerance=0.1,
    )
    rep = slln_experiment(config)
    assert rep.checks[0].check_id == "slln_band"
    assert rep.passed


def test_block_product_experiment():
    spec = DeFinettiSpec(mixing=Normal(mean=0.5, variance=0.0), kernel="bernoulli")
    config = ExperimentConfig(
        name="block", process=spec, kind="C", n=800, replicas=150, seed=33, lane=16,
        test="band_check", tolerance=0.05,
        options={"window": 2, "target": 0.25},
    )
    rep = block_product_experiment(config)
    assert rep.checks[0].check_id == "block_product"
    assert rep.passed
