"""Monte Carlo experiment runner, goodness-of-fit gates, and the CLI."""

from cidlab.harness.config import Check, ExperimentConfig, VerificationReport
from cidlab.harness.gof import (
    ks_one_sample,
    ks_threshold_one,
    ks_threshold_two,
    ks_two_sample,
)

__all__ = [
    "Check",
    "ExperimentConfig",
    "VerificationReport",
    "ks_one_sample",
    "ks_threshold_one",
    "ks_threshold_two",
    "ks_two_sample",
]
