"""Experiment configuration, drivers, and report emission."""

from .config import ExperimentConfig, load_config
from . import runner

__all__ = ["ExperimentConfig", "load_config", "runner"]
