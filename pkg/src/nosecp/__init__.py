"""Non-segmental Bayesian multiple change-point detection.

The detector treats the piecewise-constant signal as a global parameter
built from atoms with spike-and-slab jump heights, samples its posterior by
MCMC, and discriminates change-points by comparing per-state jump estimates
against three trimmed standard deviations.
"""

from .benchmark import run_benchmark
from .core import (AtomConfiguration, Hyperparameters, McmcSettings, Slab,
                   TimeSeries, evaluate_step, evaluate_step_on_states,
                   sample_prior_configuration, stick_weights,
                   truncation_tail_bound)
from .detect import (DetectionResult, adaptive_lambda, detect,
                     enforce_min_distance, jump_estimates, marginal_map,
                     three_sigma_discriminate, trimmed_sigma)
from .diagnostics import gelman_rubin, split_rhat
from .metrics import hausdorff_scaled, khat_table, precision_recall
from .sampler import (ChainSampler, PosteriorDraws, gibbs_alpha,
                      mh_update_locations, rj_update_heights, run_chain,
                      run_chains, update_sticks)
from .scenarios import ScenarioKind, ScenarioSpec, loglik, update_nuisance
from .simulate import SETTINGS, GroundTruth, generate

__version__ = "0.1.0"

__all__ = [
    "AtomConfiguration", "Hyperparameters", "McmcSettings", "Slab",
    "TimeSeries", "evaluate_step", "evaluate_step_on_states", "stick_weights",
    "truncation_tail_bound", "sample_prior_configuration",
    "ScenarioKind", "ScenarioSpec", "loglik", "update_nuisance",
    "ChainSampler", "PosteriorDraws", "gibbs_alpha", "mh_update_locations",
    "rj_update_heights", "run_chain", "run_chains", "update_sticks",
    "DetectionResult", "adaptive_lambda", "detect", "enforce_min_distance",
    "jump_estimates", "marginal_map", "three_sigma_discriminate",
    "trimmed_sigma",
    "gelman_rubin", "split_rhat",
    "precision_recall", "hausdorff_scaled", "khat_table",
    "GroundTruth", "SETTINGS", "generate",
    "run_benchmark",
]
