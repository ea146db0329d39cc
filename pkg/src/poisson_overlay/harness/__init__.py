"""Statistics, experiments and the command-line interface."""

from .experiments import (
    ExperimentResult,
    run_filled_experiment,
    run_pierced_experiment,
    run_t00_experiment,
)
from .report import Target, VerificationReport, recheck, target_passes
from .stats import (
    GofResult,
    Histogram,
    build_histogram,
    clustered_mean,
    gof_compare,
    histogram_from_csv,
    histogram_to_csv,
)

__all__ = [name for name in dir() if not name.startswith("_")]
