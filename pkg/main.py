"""
polariscope CLI - Entry Point
Simulation and analysis of dye-microcavity polariton spectra
"""

import asyncio
import sys
from typing import Optional, Sequence

from polariscope import __version__
from polariscope.core.cli import CLIInterface, CommandHandler
from polariscope.core.utils import DisplayManager


class PolariscopeApp:
    """Main application class"""

    def __init__(self, argv: Optional[Sequence[str]] = None):
        self.cli = CLIInterface()
        self.command = self.cli.parse(argv)
        self.display = DisplayManager(quiet=self.command.quiet)
        self.commands = CommandHandler(self.display)

    async def run(self) -> int:
        """Main application entry point"""
        self.display.show_welcome(__version__)
        return await self.commands.execute(self.command)


async def main(argv: Optional[Sequence[str]] = None) -> int:
    """Application entry point"""
    app = PolariscopeApp(argv)
    return await app.run()


if __name__ == "__main__":
    sys.exit(asyncio.run(main()))
