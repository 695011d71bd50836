"""
Command-line parsing and up-front path checks
"""

import argparse
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence

from ..errors import ConfigSchemaError, SpectrumIOError
from ..services.simulation_service import FIXTURES

SUBCOMMANDS = {
    "simulate": "R/T/A spectra of the configured stack",
    "synth-scatter": "synthesize scattering spectra (or a reference fixture)",
    "fit-spectrum": "two-peak fit of a scattering spectrum CSV",
    "fit-dispersion": "fit the coupling V to a detuning series CSV",
    "hopfield": "regress scattering strengths on photon weights",
    "sweep": "detuning, thickness or concentration sweep",
    "report": "full reproduction pipeline, or --history",
}
NEEDS_INPUT = {"fit-spectrum", "fit-dispersion", "hopfield"}


@dataclass
class Command:
    """One parsed invocation"""

    subcommand: str
    config_path: Optional[Path] = None
    input_path: Optional[Path] = None
    out_dir: Path = Path("out")
    overrides: List[str] = field(default_factory=list)
    seed: Optional[int] = None
    quiet: bool = False
    coupling: Optional[float] = None
    fixture: Optional[str] = None
    history: bool = False


class CLIInterface:
    """Builds the argument parser and turns argv into a validated Command"""

    def __init__(self):
        self.parser = self._build_parser()

    def _build_parser(self) -> argparse.ArgumentParser:
        parser = argparse.ArgumentParser(
            prog="polariscope",
            description="Simulate and analyze dye-microcavity polariton spectra.",
        )
        subparsers = parser.add_subparsers(dest="subcommand", required=True)
        for name, help_text in SUBCOMMANDS.items():
            sub = subparsers.add_parser(name, help=help_text, description=help_text)
            sub.add_argument("--config", type=Path, help="JSON run configuration")
            sub.add_argument(
                "--out-dir", type=Path, default=Path("out"), help="output directory"
            )
            sub.add_argument("--seed", type=int, help="overrides the config seed")
            sub.add_argument(
                "--set",
                dest="overrides",
                action="append",
                default=[],
                metavar="KEY=VALUE",
                help="config override, e.g. grid.step_ev=0.002",
            )
            sub.add_argument("--quiet", action="store_true", help="warnings only")
            if name in NEEDS_INPUT:
                sub.add_argument("--input", type=Path, required=True, help="input CSV")
            if name == "hopfield":
                sub.add_argument(
                    "--coupling", type=float, help="V in eV (default: config value)"
                )
            if name == "synth-scatter":
                sub.add_argument("--fixture", choices=FIXTURES)
                sub.add_argument(
                    "--coupling", type=float, help="V in eV (default: config value)"
                )
            if name == "report":
                sub.add_argument(
                    "--history", action="store_true", help="list recorded runs"
                )
        return parser

    def parse(self, argv: Optional[Sequence[str]] = None) -> Command:
        """
        Parse arguments. Usage errors exit with status 2 through argparse.
        """
        args = self.parser.parse_args(argv)
        return Command(
            subcommand=args.subcommand,
            config_path=args.config,
            input_path=getattr(args, "input", None),
            out_dir=args.out_dir,
            overrides=list(args.overrides),
            seed=args.seed,
            quiet=args.quiet,
            coupling=getattr(args, "coupling", None),
            fixture=getattr(args, "fixture", None),
            history=getattr(args, "history", False),
        )

    @staticmethod
    def validate(command: Command) -> None:
        """
        Check paths before any work starts.

        Raises:
            SpectrumIOError: missing input or config file, or an output path
                that is not a directory
            ConfigSchemaError: a non-positive coupling or negative seed
        """
        for label, path in (("config", command.config_path), ("input", command.input_path)):
            if path is not None and not path.is_file():
                raise SpectrumIOError(f"{label} file not found: {path}")
        if command.out_dir.exists() and not command.out_dir.is_dir():
            raise SpectrumIOError(f"output path is not a directory: {command.out_dir}")
        if command.coupling is not None and command.coupling <= 0:
            raise ConfigSchemaError("--coupling must be > 0")
        if command.seed is not None and command.seed < 0:
            raise ConfigSchemaError("--seed must be >= 0")
