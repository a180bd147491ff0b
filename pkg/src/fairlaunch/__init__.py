"""Agent-based simulator of governance-token concentration after a fair launch."""

from .engine import EnsembleResult, RunConfig, RunResult, SyntheticMarket, run, run_ensemble
from .errors import DataLoadError, FairLaunchError, InvariantViolation, ParameterError, UndefinedMetricError
from .metrics import gini, one_minus_nse, whale_count, whale_share

__all__ = [
    "DataLoadError", "EnsembleResult", "FairLaunchError", "InvariantViolation", "ParameterError",
    "RunConfig", "RunResult", "SyntheticMarket", "UndefinedMetricError",
    "gini", "one_minus_nse", "run", "run_ensemble", "whale_count", "whale_share",
]
__version__ = "0.1.0"
