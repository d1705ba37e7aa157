"""EMG-driven knee-angle forecasting."""

from ._core import (
    Error,
    butterworth_gain,
    checkpoint_tensors,
    evaluate_metrics,
    parameter_count,
    preprocess_window,
    run_cli,
    run_config_schema,
    schema_violations,
    synthesize,
)

__all__ = [
    "Error",
    "butterworth_gain",
    "checkpoint_tensors",
    "evaluate_metrics",
    "parameter_count",
    "preprocess_window",
    "run_cli",
    "run_config_schema",
    "schema_violations",
    "synthesize",
]
