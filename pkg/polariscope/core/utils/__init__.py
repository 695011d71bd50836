"""
Utility functions and helpers
"""

from .display import DisplayManager
from .log import configure_logging

__all__ = ["DisplayManager", "configure_logging"]
