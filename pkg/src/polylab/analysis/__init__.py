"""Monte Carlo estimators and verification checks for random polytopes."""

from .checks import (CheckReport, check_affine_invariance, check_deviation_tail,
                     check_efron, check_extended_efron, check_margin_transfer,
                     check_nykodim_domination, check_projection_density, check_rate,
                     check_worst_case_uniform, default_roster, margin_transfer_bound,
                     rate_study, rate_target)
from .estimators import (MomentEstimate, RateFit, TailFit, combined_stderr, estimate_moment,
                         exponential_tail_fit, falling_factorial_mean, fit_power_law)
from .replicates import HullReplicate, replicate_arrays, run_replicates

__all__ = [
    "CheckReport", "HullReplicate", "MomentEstimate", "RateFit", "TailFit",
    "check_affine_invariance", "check_deviation_tail", "check_efron", "check_extended_efron",
    "check_margin_transfer", "check_nykodim_domination", "check_projection_density",
    "check_rate", "check_worst_case_uniform", "combined_stderr", "default_roster",
    "estimate_moment", "exponential_tail_fit", "falling_factorial_mean", "fit_power_law",
    "margin_transfer_bound", "rate_study", "rate_target", "replicate_arrays", "run_replicates",
]
