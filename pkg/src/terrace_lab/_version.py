"""Version information for terrace-lab."""

__version__ = "0.1.0"
