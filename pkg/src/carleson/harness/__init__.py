"""Experiment registry, reports and the ``cm`` command line."""

from .experiments import REGISTRY, config_hash, default_config, resolve_config, run, vanishing_verdict
from .report import Report, render_report

__all__ = ["REGISTRY", "Report", "config_hash", "default_config", "render_report", "resolve_config", "run",
           "vanishing_verdict"]
