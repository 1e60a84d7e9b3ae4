"""Rate-energy analysis and simulation of multi-user SWIPT schedulers."""

from . import closed_form, combinatorics, fading, feasibility, oracle, sched_sim, specfun
from .closed_form import (
    ETResult,
    MixedFamilies,
    SeriesDivergence,
    conv_et,
    fulltime_rate,
    order_et,
    order_nsnr_energy,
    order_nsnr_rate,
    order_snr_energy,
    order_snr_rate,
    order_statistic_mean,
    rr_metrics,
)
from .combinatorics import BudgetExceeded
from .fading import FadingSpec, nakagami, rayleigh, ricean, weibull
from .feasibility import FeasibilityReport, check
from .sched_sim import Policy, SimResult, SimState, run, step
from .system import SystemParams, UserMetrics, dbm_to_watt, omega_from_distance, watt_to_dbm

__all__ = [
    "closed_form", "combinatorics", "fading", "feasibility", "oracle", "sched_sim", "specfun",
    "ETResult", "MixedFamilies", "SeriesDivergence", "BudgetExceeded",
    "conv_et", "fulltime_rate", "order_et", "order_nsnr_energy", "order_nsnr_rate",
    "order_snr_energy", "order_snr_rate", "order_statistic_mean", "rr_metrics",
    "FadingSpec", "rayleigh", "nakagami", "weibull", "ricean",
    "FeasibilityReport", "check", "Policy", "SimResult", "SimState", "run", "step",
    "SystemParams", "UserMetrics", "dbm_to_watt", "watt_to_dbm", "omega_from_distance",
]  # fmt: skip
