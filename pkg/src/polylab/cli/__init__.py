"""Command-line front end: config parsing, check execution and reporting."""

from .config import (CHECKS, ExperimentConfig, build_body, build_density, config_from_density,
                     density_items, parse_config, parse_grid, parse_text, serialize)
from .main import main
from .runner import ExperimentReport, results_csv, run, summary_table

__all__ = ["CHECKS", "ExperimentConfig", "ExperimentReport", "build_body", "build_density",
           "config_from_density", "density_items", "main", "parse_config", "parse_grid",
           "parse_text", "results_csv", "run", "serialize", "summary_table"]
