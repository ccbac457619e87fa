"""Named verification suites with pinned gates.

Each experiment owns a disjoint stream lane (auxiliary draws use lane+1,
lane+2), so no two experiments ever share randomness under one seed and
every suite is reproducible in isolation.
"""

from __future__ import annotations

import math
from fractions import Fraction
from itertools import permutations

from cidlab.harness.config import Check, ExperimentConfig, VerificationReport, summarize
from cidlab.harness.experiments import (
    asymptotic_exchangeability_test,
    block_product_experiment,
    clt_experiment,
    covariance_experiment,
    empirical_process_experiment,
    polya_clt_experiment,
    slln_experiment,
    stable_conditional_test,
    uniform_convergence_test,
    variance_calibration_experiment,
)
from cidlab.oracle import (
    check_cid_eq5,
    check_cid_gamma,
    check_exchangeable,
    check_permuted_cid,
    enumerate_polya_joint,
)
from cidlab.processes import (
    CompensatedGaussianSpec,
    DeFinettiSpec,
    Deterministic,
    IID,
    PolyaUrnSpec,
    b_stat_variance,
)
from cidlab.streams import Beta, Discrete, Normal

GAUSS = CompensatedGaussianSpec(c=1.0, u=0.5)
STANDARD_URN = PolyaUrnSpec(w=1, r=1, reinforcement=Deterministic(values=(1,)))
# reinforcement 1, 2, 2, 2, ...: c.i.d. but not exchangeable
MODIFIED_URN = PolyaUrnSpec(w=1, r=1, reinforcement=Deterministic(values=(1, 2)))
# alternating 1, 2, 1, 2, ...: late windows keep a nonzero pattern gap,
# unlike the repeat-last schedule whose gap vanishes after the first step
ALTERNATING_URN = PolyaUrnSpec(
    w=1, r=1, reinforcement=Deterministic(values=(1, 2), extend="cycle")
)
UNIFORM_D_URN = PolyaUrnSpec(
    w=1, r=1, reinforcement=IID(dist=Discrete(weights=(0.0, 0.5, 0.5)))
)
CONSTANT2_URN = PolyaUrnSpec(w=1, r=1, reinforcement=Deterministic(values=(2,)))


def iid_bernoulli(p: float) -> DeFinettiSpec:
    return DeFinettiSpec(mixing=Normal(mean=p, variance=0.0), kernel="bernoulli")


IID_NORMAL = DeFinettiSpec(
    mixing=Normal(mean=0.0, variance=0.0), kernel="normal", kernel_param=1.0
)
IID_UNIFORM = DeFinettiSpec(
    mixing=Normal(mean=0.0, variance=0.0), kernel="uniform", kernel_param=1.0
)
BETA_BERNOULLI = DeFinettiSpec(mixing=Beta(a=1.0, b=1.0), kernel="bernoulli")

KS_GATE_2000 = 0.045
KS_GATE_1000 = 0.065
KS_GATE_TWO_1000 = 0.091


def _cert_check(check_id: str, description: str, passed: bool, count: float = None) -> Check:
    value = (0.0 if passed else 1.0) if count is None else float(count)
    return Check(check_id, description, value, 0.5, passed, comparison="exact")


def suite_oracle(seed: int) -> list[VerificationReport]:
    """Exact rational certificates; no Monte Carlo, no tolerances."""
    checks = []
    diagnostics = {}

    checks.append(
        _cert_check(
            "cid_standard_depth4",
            "skip-one marginal identity, standard urn, depth 4",
            bool(check_cid_eq5(STANDARD_URN, 4)),
        )
    )
    checks.append(
        _cert_check(
            "cid_modified_depth4",
            "skip-one marginal identity, reinforcement (1,2,2,...), depth 4",
            bool(check_cid_eq5(MODIFIED_URN, 4)),
        )
    )
    checks.append(
        _cert_check(
            "exchangeable_standard_depth4",
            "orbit equality, standard urn, depth 4",
            bool(check_exchangeable(enumerate_polya_joint(STANDARD_URN, 4))),
        )
    )

    ex = check_exchangeable(enumerate_polya_joint(MODIFIED_URN, 3))
    checks.append(
        _cert_check(
            "exchangeability_fails_modified",
            "reinforcement (1,2,...) breaks orbit equality at depth 3",
            not ex.passed,
        )
    )
    witness_ok = (not ex.passed) and {ex.details["p_a"], ex.details["p_b"]} == {
        Fraction(1, 10),
        Fraction(1, 15),
    }
    checks.append(
        _cert_check(
            "witness_probabilities",
            "violating orbit carries exact probabilities 1/10 and 1/15",
            witness_ok,
        )
    )
    if not ex.passed:
        diagnostics["exchangeability_witness"] = ex.to_json()["details"]

    taus = list(permutations(range(1, 5)))
    fails_std = [tau for tau in taus if not check_permuted_cid(STANDARD_URN, tau, 6)]
    fails_mod = [tau for tau in taus if not check_permuted_cid(MODIFIED_URN, tau, 6)]
    checks.append(
        _cert_check(
            "permuted_cid_standard_all24",
            "all 24 permutations of the first 4 indices keep the identity (standard urn)",
            len(fails_std) == 0,
            count=len(fails_std),
        )
    )
    checks.append(
        _cert_check(
            "permuted_cid_modified_fails",
            "at least one permutation breaks the identity (modified urn)",
            len(fails_mod) >= 1,
            count=len(fails_mod),
        )
    )
    diagnostics["permutations_failing_modified"] = [list(t) for t in fails_mod]

    checks.append(
        _cert_check(
            "gaussian_cov_extension",
            "dropping the next-to-last coordinate reproduces the covariance, depth 8",
            bool(check_cid_gamma(GAUSS, 8)),
        )
    )

    return [
        VerificationReport(
            experiment="oracle-certificates",
            seed=seed,
            checks=checks,
            summary=summarize([]),
            diagnostics=diagnostics,
        )
    ]


def suite_gaussian(seed: int) -> list[VerificationReport]:
    reports = []
    reports.append(
        covariance_experiment(
            ExperimentConfig(
                name="gaussian-covariance",
                process=GAUSS,
                kind="C",
                n=3,
                replicas=100_000,
                seed=seed,
                test="band_check",
                tolerance=0.02,
                lane=100,
            )
        )
    )
    for n, lane in ((10, 110), (100, 120)):
        reports.append(
            variance_calibration_experiment(
                ExperimentConfig(
                    name=f"gaussian-variance-n{n}",
                    process=GAUSS,
                    kind="W",
                    n=n,
                    replicas=100_000,
                    seed=seed,
                    test="band_check",
                    tolerance=1.0,
                    lane=lane,
                    options={"se_multiplier": 5.0},
                )
            )
        )
    reports.append(
        clt_experiment(
            ExperimentConfig(
                name="gaussian-clt-w",
                process=GAUSS,
                kind="W",
                n=10_000,
                replicas=2000,
                seed=seed,
                tolerance=KS_GATE_2000,
                lane=130,
                options={
                    "scale": math.sqrt(2 * 0.5),
                    "negative_control": True,
                    "side_conditions": True,
                },
            )
        )
    )
    reports.append(
        clt_experiment(
            ExperimentConfig(
                name="gaussian-clt-c",
                process=GAUSS,
                kind="C",
                n=10_000,
                replicas=2000,
                seed=seed,
                tolerance=KS_GATE_2000,
                lane=140,
                options={"scale": math.sqrt(0.5)},
            )
        )
    )
    b_report = clt_experiment(
        ExperimentConfig(
            name="gaussian-clt-b",
            process=GAUSS,
            kind="B",
            n=10_000,
            replicas=2000,
            seed=seed,
            test="variance_bound",
            tolerance=2e-3,
            lane=150,
        )
    )
    b_report.diagnostics["exact_variance"] = b_stat_variance(GAUSS, 10_000)
    reports.append(b_report)
    return reports


def suite_urn(seed: int) -> list[VerificationReport]:
    return [
        polya_clt_experiment(
            ExperimentConfig(
                name="urn-clt-uniform-d",
                process=UNIFORM_D_URN,
                kind="C",
                n=10_000,
                replicas=2000,
                seed=seed,
                tolerance=KS_GATE_2000,
                lane=200,
                options={"negative_control": True, "side_conditions": True},
            )
        ),
        polya_clt_experiment(
            ExperimentConfig(
                name="urn-clt-constant-d",
                process=CONSTANT2_URN,
                kind="C",
                n=10_000,
                replicas=2000,
                seed=seed,
                test="variance_bound",
                tolerance=2e-3,
                lane=210,
                options={"m_trajectory": True},
            )
        ),
        uniform_convergence_test(
            ExperimentConfig(
                name="urn-uniform-convergence",
                process=UNIFORM_D_URN,
                kind="C-process",
                n=10_000,
                replicas=500,
                seed=seed,
                test="band_check",
                tolerance=0.05,
                lane=220,
                options={"ns": (100, 1000, 10_000)},
            )
        ),
    ]


def suite_slln(seed: int) -> list[VerificationReport]:
    return [
        slln_experiment(
            ExperimentConfig(
                name="slln-gaussian",
                process=GAUSS,
                kind="C",
                n=10_000,
                replicas=500,
                seed=seed,
                test="band_check",
                tolerance=0.025,
                lane=300,
            )
        ),
        slln_experiment(
            ExperimentConfig(
                name="slln-urn",
                process=UNIFORM_D_URN,
                kind="C",
                n=10_000,
                replicas=500,
                seed=seed,
                test="band_check",
                tolerance=0.05,
                lane=310,
            )
        ),
        block_product_experiment(
            ExperimentConfig(
                name="slln-block-product",
                process=iid_bernoulli(0.5),
                kind="C",
                n=1000,
                replicas=200,
                seed=seed,
                test="band_check",
                tolerance=0.02,
                lane=320,
                options={"target": 0.25, "window": 2},
            )
        ),
    ]


def suite_empirical(seed: int) -> list[VerificationReport]:
    return [
        empirical_process_experiment(
            ExperimentConfig(
                name="empirical-kolmogorov",
                process=IID_UNIFORM,
                kind="W-process",
                n=10_000,
                replicas=1000,
                seed=seed,
                limit="kolmogorov",
                tolerance=KS_GATE_1000,
                lane=400,
                options={"oscillation": True},
            )
        ),
        empirical_process_experiment(
            ExperimentConfig(
                name="empirical-mixture-bridge",
                process=BETA_BERNOULLI,
                kind="W-process",
                n=10_000,
                replicas=1000,
                seed=seed,
                limit="gf",
                test="ks_two_sample",
                tolerance=KS_GATE_TWO_1000,
                lane=410,
                options={"grid": (0.5,), "limit_replicas": 1000},
            )
        ),
        empirical_process_experiment(
            ExperimentConfig(
                name="empirical-urn-calibrated",
                process=UNIFORM_D_URN,
                kind="C-process",
                n=10_000,
                replicas=1000,
                seed=seed,
                limit="sigma",
                test="ks_two_sample",
                tolerance=KS_GATE_TWO_1000,
                lane=420,
                options={"midpoint": 0.5, "limit_replicas": 1000},
            )
        ),
    ]


def suite_stable(seed: int) -> list[VerificationReport]:
    return [
        stable_conditional_test(
            ExperimentConfig(
                name="stable-gaussian-w",
                process=GAUSS,
                kind="W",
                n=10_000,
                replicas=2000,
                seed=seed,
                tolerance=KS_GATE_2000,
                lane=500,
                options={
                    "scale": math.sqrt(2 * 0.5),
                    "event": {"coord": 1, "op": "gt", "value": 0.0},
                },
            )
        ),
        stable_conditional_test(
            ExperimentConfig(
                name="stable-urn-c",
                process=UNIFORM_D_URN,
                kind="C",
                n=10_000,
                replicas=2000,
                seed=seed,
                tolerance=KS_GATE_2000,
                lane=510,
                options={"event": {"coord": 1, "op": "eq", "value": 1.0}},
            )
        ),
        stable_conditional_test(
            ExperimentConfig(
                name="stable-iid-b",
                process=IID_NORMAL,
                kind="B",
                n=10_000,
                replicas=2000,
                seed=seed,
                tolerance=KS_GATE_2000,
                lane=520,
                options={
                    "scale": 1.0,
                    "event": {"coord": 1, "op": "le", "value": 0.0},
                },
            )
        ),
    ]


def suite_asymptotic(seed: int) -> list[VerificationReport]:
    ladder = (10, 100, 1000)
    return [
        asymptotic_exchangeability_test(
            ExperimentConfig(
                name="asymptotic-standard-urn",
                process=STANDARD_URN,
                kind="C",
                n=max(ladder) + 3,
                replicas=30_000,
                seed=seed,
                test="band_check",
                tolerance=1.0,
                lane=600,
                options={"ns": ladder, "expect_zero": True},
            )
        ),
        asymptotic_exchangeability_test(
            ExperimentConfig(
                name="asymptotic-alternating-urn",
                process=ALTERNATING_URN,
                kind="C",
                n=max(ladder) + 3,
                replicas=100_000,
                seed=seed,
                test="band_check",
                tolerance=1.0,
                lane=610,
                options={"ns": ladder, "expect_decay": True},
            )
        ),
        asymptotic_exchangeability_test(
            ExperimentConfig(
                name="asymptotic-iid",
                process=iid_bernoulli(0.5),
                kind="C",
                n=max(ladder) + 3,
                replicas=30_000,
                seed=seed,
                test="band_check",
                tolerance=1.0,
                lane=620,
                options={"ns": ladder, "expect_zero": True},
            )
        ),
    ]


SUITES = {
    "oracle": suite_oracle,
    "gaussian": suite_gaussian,
    "urn": suite_urn,
    "slln": suite_slln,
    "empirical": suite_empirical,
    "stable": suite_stable,
    "asymptotic": suite_asymptotic,
}

SUITE_ORDER = tuple(SUITES)


def run_suites(names, seed: int) -> dict:
    """Run the named suites in canonical order; returns name -> reports."""
    chosen = [n for n in SUITE_ORDER if n in set(names)]
    unknown = set(names) - set(SUITE_ORDER)
    if unknown:
        raise KeyError(f"unknown suites: {sorted(unknown)}")
    return {name: SUITES[name](seed) for name in chosen}
