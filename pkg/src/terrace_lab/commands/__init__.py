"""Command modules for the terrace-lab CLI."""

from .predict_cmd import predict
from .simulate_cmd import simulate
from .sweep_cmd import sweep
from .verify_cmd import verify_barriers
from .version_cmd import version
from .wave_cmd import wave

__all__ = ["predict", "simulate", "wave", "verify_barriers", "sweep", "version"]
