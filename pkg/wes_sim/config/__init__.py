"""
Configuration Module

Provides centralized configuration defaults for the simulator.
"""

from . import settings

__all__ = ["settings"]
