"""Channel-impulse-response authentication for diffusion-based molecular
communication links."""

__version__ = "0.1.0"

from .channel import ChannelParams, Cir, concentration, peak_time, sample_cir
from .detect import (AuthTest, Decision, MeasurementModel, Verdict, authenticate,
                     compute_threshold, test_statistic)
from .estimation import (LsEstimate, ReceivedFrame, TrainingFrame, build_training_matrix,
                         check_identifiability, ls_estimate, synthesize_received)
from .montecarlo import (DfMode, Occupant, RocCurve, RocPoint, Scenario,
                         estimate_error_probs, run_roc, simulate_slot)
from .special import chi2_cdf, chi2_quantile

__all__ = [
    "ChannelParams", "Cir", "concentration", "peak_time", "sample_cir",
    "AuthTest", "Decision", "MeasurementModel", "Verdict", "authenticate",
    "compute_threshold", "test_statistic",
    "LsEstimate", "ReceivedFrame", "TrainingFrame", "build_training_matrix",
    "check_identifiability", "ls_estimate", "synthesize_received",
    "DfMode", "Occupant", "RocCurve", "RocPoint", "Scenario",
    "estimate_error_probs", "run_roc", "simulate_slot",
    "chi2_cdf", "chi2_quantile",
]
