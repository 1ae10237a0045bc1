"""Experiment drivers, config ingestion, and report emission."""

from .config import RunConfig, build_problem, load_config, parse_config
from .report import Report, emit_report
from .runners import (run_bv, run_continuous_dependence, run_fractional_bv,
                      run_oracles, run_validate, run_viscosity_rate)

__all__ = [
    "RunConfig", "build_problem", "load_config", "parse_config",
    "Report", "emit_report",
    "run_validate", "run_oracles", "run_bv", "run_viscosity_rate",
    "run_continuous_dependence", "run_fractional_bv",
]
