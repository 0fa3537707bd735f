"""Monte-Carlo experiment presets, metrics and the command-line interface."""

from .config import ExperimentConfig, load_config, preset_config
from .experiments import calibrate, run_preset
from .metrics import ResultTable, aggregate, correlation_coefficient
from .trials import TrialRecord, run_trials

__all__ = [
    "ExperimentConfig",
    "ResultTable",
    "TrialRecord",
    "aggregate",
    "calibrate",
    "correlation_coefficient",
    "load_config",
    "preset_config",
    "run_preset",
    "run_trials",
]
