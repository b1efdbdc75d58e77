"""
Core Configuration Package
==========================

System-wide constants and per-run configuration.
"""

from .system_config import SystemConfig
from .run_config import RunConfig, METHODS

__all__ = [
    'SystemConfig',
    'RunConfig',
    'METHODS',
]
