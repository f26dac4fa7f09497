"""Quickest change-point detection for drifting Brownian motion:
analytics and Monte Carlo for the randomized Shiryaev-Roberts procedure.

The hot numeric kernels live in a compiled extension with a pure-Python
fallback; ``backend_name()`` reports which one is active.
"""

from ._backend import backend_name
from .mc import (QSD_HEADSTART, SimConfig, SimEstimate, SrpResult,
                 estimate_qsd_empirical, simulate_gsr_passage, simulate_srp)
from .numerics import Tolerance
from .qsd import (EigenPair, Model, QsdEval, lambda_bracket, qsd_cdf,
                  qsd_mean, qsd_pdf, qsd_sample, qsd_var, solve_lambda)
from .risk import (RiskReport, add0_gsr, arl_gsr, calibrate_threshold,
                   lower_bound_B, optimality_gap, srp_delay, srp_delay_direct)
from .specfun import WhittakerIndex, exp_int_e1, f_func, whittaker_w

__version__ = "0.1.0"

__all__ = [
    "EigenPair", "Model", "QsdEval", "QSD_HEADSTART", "RiskReport",
    "SimConfig", "SimEstimate", "SrpResult", "Tolerance", "WhittakerIndex",
    "add0_gsr", "arl_gsr", "backend_name", "calibrate_threshold",
    "estimate_qsd_empirical", "exp_int_e1", "f_func", "lambda_bracket",
    "lower_bound_B", "optimality_gap", "qsd_cdf", "qsd_mean", "qsd_pdf",
    "qsd_sample", "qsd_var", "simulate_gsr_passage", "simulate_srp",
    "solve_lambda", "srp_delay", "srp_delay_direct", "whittaker_w",
    "__version__",
]
