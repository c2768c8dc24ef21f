"""Scenario configuration, sweeps, output files and the verification checklist."""
from .config import SCHEMA, ConfigError, ScenarioConfig, default_config, load, validate
from .runner import RunOutput, run
from .verify import Report, verify_numbers

__all__ = [
    "SCHEMA", "ConfigError", "ScenarioConfig", "default_config", "load", "validate",
    "RunOutput", "run", "Report", "verify_numbers",
]
