"""Estimation of the von Mises concentration parameter and a Monte Carlo
benchmark harness comparing twelve estimators."""

from .bessel import KAPPA_CAP, ScaledBessel, UnboundedError, a_inverse, a_prime, bessel_scaled
from .descriptive import CircularSummary, circular_median, rotated_deviations, summarize
from .estimators import (
    ESTIMATOR_IDS,
    FAILURE_TAGS,
    PRIOR_IDS,
    EstimateOutcome,
    run_estimator,
)
from .harness import (
    DEFAULT_KAPPAS,
    BenchmarkConfig,
    ErrorRecord,
    ErrorSummary,
    generate_maximal_dataset,
    planned_record_count,
    run_benchmark,
    summarize_errors,
)
from .sampling import TrueParams, make_rng, prefix, sample_von_mises
from .trendfit import DecayFit, LinearFit, fit_decay, fit_linear, predict

__version__ = "0.1.0"

__all__ = [
    "KAPPA_CAP",
    "ScaledBessel",
    "UnboundedError",
    "a_inverse",
    "a_prime",
    "bessel_scaled",
    "CircularSummary",
    "circular_median",
    "rotated_deviations",
    "summarize",
    "ESTIMATOR_IDS",
    "FAILURE_TAGS",
    "PRIOR_IDS",
    "EstimateOutcome",
    "run_estimator",
    "DEFAULT_KAPPAS",
    "BenchmarkConfig",
    "ErrorRecord",
    "ErrorSummary",
    "generate_maximal_dataset",
    "planned_record_count",
    "run_benchmark",
    "summarize_errors",
    "TrueParams",
    "make_rng",
    "prefix",
    "sample_von_mises",
    "DecayFit",
    "LinearFit",
    "fit_decay",
    "fit_linear",
    "predict",
    "__version__",
]
