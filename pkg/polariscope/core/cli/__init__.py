"""
CLI interface components
"""

from .commands import CommandHandler
from .interface import CLIInterface, Command

__all__ = ["CLIInterface", "Command", "CommandHandler"]
