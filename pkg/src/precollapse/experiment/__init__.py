from .analysis import NullTestResult, SweepTable, Verdict, null_test, scenario_sweep
from .config import ConfigError, ExperimentConfig
from .engine import AtomOutcome, ExperimentStats, RunResult, decode, run, simulate_atom

__all__ = [
    "AtomOutcome",
    "ConfigError",
    "ExperimentConfig",
    "ExperimentStats",
    "NullTestResult",
    "RunResult",
    "SweepTable",
    "Verdict",
    "decode",
    "null_test",
    "run",
    "scenario_sweep",
    "simulate_atom",
]
