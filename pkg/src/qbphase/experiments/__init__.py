"""Scenario configs, the figure registry, batch runs, result tables and the CLI."""

from .config import ScenarioConfig, build_params, build_scenario, format_config, load_config, parse_config
from .io import read_table, write_table
from .registry import FIGURES, figure_registry
from .runner import RunResult, run_scenario, run_sweep
