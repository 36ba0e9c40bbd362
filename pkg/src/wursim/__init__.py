"""Discrete-event simulator and WUR frame codec for comparing TWT and wake-up radio uplink methods."""

from .config import ScenarioConfig, load_config
from .kernel import ConfigurationError
from .methods import MethodKind, RunResult, run_once

__all__ = ["ConfigurationError", "MethodKind", "RunResult", "ScenarioConfig", "load_config", "run_once"]
