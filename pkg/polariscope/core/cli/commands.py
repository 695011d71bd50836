"""
Command handlers for the CLI application
"""

import hashlib
import logging
from typing import Awaitable, Callable, Dict, Optional

from ... import __version__
from ..analysis.dispersion import DetuningSeries, fit_sqrt_concentration
from ..config.base import SweepKind
from ..config.config import RunConfig, config_digest_source, load_config, parse_config
from ..config.registry import StackRegistry
from ..errors import PolariscopeError, SpectrumIOError
from ..optics.dielectric import describe
from ..persistence.bundle import OutputBundle
from ..persistence.models import RunRecordModel, json_text
from ..persistence.series_io import format_concentration_csv, format_series_csv
from ..persistence.service import RunStorageService
from ..persistence.spectrum_io import format_spectrum_csv
from ..polaritons.oscillator import polariton_pair
from ..polaritons.scattering import scattering_strengths
from ..services import analysis_service, reproduction_service, simulation_service
from ..utils import DisplayManager, configure_logging
from .interface import Command, CLIInterface

logger = logging.getLogger(__name__)

DEFAULT_CONFIG = '{"version": 1}'
INVALID_INPUT_EXIT = 2

Handler = Callable[[Command, RunConfig, int, OutputBundle], Awaitable[None]]


class CommandHandler:
    """Runs one subcommand and maps its outcome to an exit status"""

    def __init__(self, display: Optional[DisplayManager] = None):
        self.display = display or DisplayManager()
        self._handlers: Dict[str, Handler] = {
            "simulate": self.handle_simulate,
            "synth-scatter": self.handle_synth_scatter,
            "fit-spectrum": self.handle_fit_spectrum,
            "fit-dispersion": self.handle_fit_dispersion,
            "hopfield": self.handle_hopfield,
            "sweep": self.handle_sweep,
            "report": self.handle_report,
        }

    async def execute(self, command: Command) -> int:
        """
        Run a command end to end.

        Outputs are staged in memory and written together with the manifest
        only after the subcommand succeeded; every run is recorded in the
        registry of the output directory.

        Returns:
            0 on success, otherwise the exit code of the error raised
        """
        configure_logging(command.quiet)
        if command.history:
            return self.show_history(command)

        storage: Optional[RunStorageService] = None
        record: Optional[RunRecordModel] = None
        try:
            CLIInterface.validate(command)
            config = self._load_config(command)
            seed = config.seed if command.seed is None else command.seed
            inputs_hash = self._inputs_hash(command, config)

            storage = RunStorageService(command.out_dir)
            record = RunRecordModel.from_invocation(
                command.subcommand, inputs_hash, seed, str(command.out_dir)
            )
            storage.save_run(record)

            bundle = OutputBundle(command.subcommand, inputs_hash, seed)
            await self._handlers[command.subcommand](command, config, seed, bundle)
            written = bundle.commit(command.out_dir, __version__)
        except PolariscopeError as e:
            return self._fail(str(e), e.exit_code, storage, record)
        except ValueError as e:
            return self._fail(f"invalid input: {e}", INVALID_INPUT_EXIT, storage, record)

        names = [path.name for path in written]
        record.mark_completed(names)
        self._update_registry(storage, record)
        self.display.show_outputs(str(command.out_dir), names)
        return 0

    def _fail(
        self,
        message: str,
        exit_code: int,
        storage: Optional[RunStorageService],
        record: Optional[RunRecordModel],
    ) -> int:
        self.display.show_error(message, exit_code)
        if storage is not None and record is not None:
            record.mark_failed(message, exit_code)
            self._update_registry(storage, record)
        return exit_code

    @staticmethod
    def _update_registry(storage: RunStorageService, record: RunRecordModel) -> None:
        try:
            storage.update_run(record)
        except SpectrumIOError as e:
            logger.warning("run registry not updated: %s", e)

    @staticmethod
    def _load_config(command: Command) -> RunConfig:
        if command.config_path is None:
            return parse_config(DEFAULT_CONFIG, command.overrides)
        return load_config(command.config_path, command.overrides)

    @staticmethod
    def _inputs_hash(command: Command, config: RunConfig) -> str:
        """sha256 over the validated config, the input file and the flags"""
        digest = hashlib.sha256()
        digest.update(config_digest_source(config).encode("utf-8"))
        digest.update(
            f"|{command.subcommand}|{command.coupling}|{command.fixture}|".encode("utf-8")
        )
        if command.input_path is not None:
            try:
                digest.update(command.input_path.read_bytes())
            except OSError as e:
                raise SpectrumIOError(f"cannot read {command.input_path}: {e}")
        return digest.hexdigest()

    def show_history(self, command: Command) -> int:
        try:
            storage = RunStorageService(command.out_dir)
            self.display.show_history(storage.list_runs(), storage.count_runs())
        except PolariscopeError as e:
            self.display.show_error(str(e), e.exit_code)
            return e.exit_code
        return 0

    async def handle_simulate(
        self, command: Command, config: RunConfig, seed: int, bundle: OutputBundle
    ):
        """Resonant (or configured) stack spectra"""
        calibration = simulation_service.calibrate(config)
        result = simulation_service.simulate(config, calibration)
        bundle.add("reflectance.csv", format_spectrum_csv(result.reflectance))
        bundle.add("transmittance.csv", format_spectrum_csv(result.transmittance))
        bundle.add("absorbance.csv", format_spectrum_csv(result.absorbance))
        self.display.show_summary(
            "Simulation",
            {
                "Cavity layer": describe(
                    result.stack.layers[
                        StackRegistry.cavity_index(config, config.stack.preset)
                    ].model
                ),
                "Cavity thickness": f"{calibration.cavity_thickness_nm:.2f} nm",
                "Strength per mM": f"{calibration.strength_per_mm:.4e} eV²/mM",
                "Reflectance dips": ", ".join(f"{e:.4f} eV" for e in result.dips)
                or "none",
                "max |R+T+A-1|": f"{result.energy_residual():.2e}",
            },
        )

    async def handle_synth_scatter(
        self, command: Command, config: RunConfig, seed: int, bundle: OutputBundle
    ):
        """A reference fixture, or one spectrum per configured detuning"""
        if command.fixture:
            spectrum = simulation_service.scattering_fixture(
                config, command.fixture, seed, command.coupling
            )
            bundle.add("scattering.csv", format_spectrum_csv(spectrum))
            self.display.show_summary(
                f"Fixture {command.fixture}",
                {"max S": f"{spectrum.values.max():.4f}"},
            )
            return

        law = StackRegistry.scattering_law(config)
        detunings = config.sweep.detunings_ev
        pairs = [
            StackRegistry.oscillator_params(config, d, command.coupling)
            for d in detunings
        ]
        spectra = await simulation_service.synthesize_series(
            pairs, law, simulation_service.config_grid(config), seed
        )
        polaritons = [polariton_pair(p) for p in pairs]
        strengths = [scattering_strengths(p, law) for p in pairs]
        truth = DetuningSeries.from_arrays(
            detunings,
            [p.e_plus.real for p in polaritons],
            [p.e_minus.real for p in polaritons],
            [s[0] for s in strengths],
            [s[1] for s in strengths],
        )
        for index, spectrum in enumerate(spectra):
            bundle.add(f"scattering_point_{index:02d}.csv", format_spectrum_csv(spectrum))
        bundle.add("scattering_series.csv", format_series_csv(truth))
        self.display.show_table(
            "Synthesized scattering",
            ["Δ (eV)", "E+ (eV)", "E- (eV)", "σU", "σL"],
            [
                [f"{r.detuning:+.3f}", f"{r.e_upper:.4f}", f"{r.e_lower:.4f}",
                 f"{r.sigma_u:.3f}", f"{r.sigma_l:.3f}"]
                for r in truth
            ],
        )

    async def handle_fit_spectrum(
        self, command: Command, config: RunConfig, seed: int, bundle: OutputBundle
    ):
        report = await analysis_service.fit_spectrum_file(command.input_path, config)
        bundle.add("spectrum_fit.json", json_text(report.to_dict()))
        bundle.add("spectrum_fit_model.csv", format_spectrum_csv(report.model))
        fit = report.fit
        self.display.show_table(
            "Two-peak fit",
            ["Branch", "Center (eV)", "Width (eV)", "Skew", "σ"],
            [
                ["upper", f"{fit.upper.center:.4f}", f"{fit.upper.width:.4f}",
                 f"{fit.upper.skew:+.3f}", f"{report.sigma_upper:.3f}"],
                ["lower", f"{fit.lower.center:.4f}", f"{fit.lower.width:.4f}",
                 f"{fit.lower.skew:+.3f}", f"{report.sigma_lower:.3f}"],
            ],
        )

    async def handle_fit_dispersion(
        self, command: Command, config: RunConfig, seed: int, bundle: OutputBundle
    ):
        report = await analysis_service.fit_dispersion_file(command.input_path, config)
        text = json_text(report.to_dict())
        bundle.add("dispersion_fit.json", text)
        self.display.print_json(text)
        self.display.show_summary(
            "Coupling fit",
            {
                "V": f"{1e3 * report.fit.coupling:.2f} meV",
                "Rabi splitting 2V": f"{2e3 * report.fit.coupling:.2f} meV",
                "Residual RMS": f"{1e3 * report.fit.residual_rms:.3f} meV",
            },
        )

    async def handle_hopfield(
        self, command: Command, config: RunConfig, seed: int, bundle: OutputBundle
    ):
        coupling = command.coupling or config.oscillator.coupling
        report = await analysis_service.hopfield_file(command.input_path, coupling)
        bundle.add("hopfield.json", json_text(report.to_dict()))
        bundle.add("hopfield_points.csv", report.plot_csv())
        crossing = report.crossing_detuning
        self.display.show_table(
            "Strength against photon weight",
            ["Branch", "Slope", "Intercept", "R²"],
            [
                [name, f"{r.slope:.4f}", f"{r.intercept:+.4f}", f"{r.r_squared:.4f}"]
                for name, r in report.regressions.items()
            ],
        )
        self.display.print(
            "Crossing detuning: "
            + (f"{1e3 * crossing:+.2f} meV" if crossing is not None else "none")
        )

    async def handle_sweep(
        self, command: Command, config: RunConfig, seed: int, bundle: OutputBundle
    ):
        """Per-point spectra plus a series CSV; unresolved points are flagged"""
        calibration = simulation_service.calibrate(config)
        points = await simulation_service.run_sweep(config, calibration)
        resolved = [p for p in points if p.resolved]
        summary = {
            "kind": config.sweep.kind.value,
            "calibration": calibration.to_dict(),
            "points": [p.to_dict() for p in points],
        }
        if config.sweep.kind is SweepKind.CONCENTRATION:
            bundle.add(
                "concentration.csv",
                format_concentration_csv(
                    [p.concentration_mm for p in resolved],
                    [p.e_upper for p in resolved],
                    [p.e_lower for p in resolved],
                ),
            )
            if len(resolved) >= 2:
                summary["sqrt_law"] = fit_sqrt_concentration(
                    [p.concentration_mm for p in resolved],
                    [p.splitting for p in resolved],
                ).to_dict()
        else:
            bundle.add("series.csv", format_series_csv(simulation_service.sweep_series(resolved)))
        for point in points:
            bundle.add(f"reflectance_{point.label}.csv", format_spectrum_csv(point.reflectance))
        bundle.add("sweep.json", json_text(summary))
        self.display.show_table(
            f"{config.sweep.kind.value.capitalize()} sweep",
            ["Point", "Value", "Δ (eV)", "E+ (eV)", "E- (eV)", "Flag"],
            [
                [
                    p.label,
                    f"{p.value:g}",
                    f"{p.detuning:+.4f}",
                    "-" if p.e_upper is None else f"{p.e_upper:.4f}",
                    "-" if p.e_lower is None else f"{p.e_lower:.4f}",
                    p.flag or "",
                ]
                for p in points
            ],
        )

    async def handle_report(
        self, command: Command, config: RunConfig, seed: int, bundle: OutputBundle
    ):
        report, outputs = await reproduction_service.run_reproduction(config, seed)
        for name in sorted(outputs):
            bundle.add(name, outputs[name])
        hopfield = report.scattering.hopfield["pooled"]
        self.display.show_summary(
            "Reproduction report",
            {
                "Calibrated k": f"{report.calibration['strength_per_mm_ev2']:.4e} eV²/mM",
                "Resonant dips": f"{report.resonant.e_upper_ev:.4f} / "
                f"{report.resonant.e_lower_ev:.4f} eV",
                "Coupling V": f"{1e3 * report.dispersion.coupling['coupling_ev']:.2f} meV",
                "Hopfield slope": f"{hopfield['slope']:.3f}",
                "Hopfield intercept": f"{hopfield['intercept']:+.3f}",
                "Anchors (coupled / bare / empty)": f"{report.anchors.coupled_max:.3f} / "
                f"{report.anchors.bare_film_max:.3f} / {report.anchors.empty_cavity_max:.3f}",
                "Absorption overestimate": f"{report.balance.max_absorption_overestimate:.3f}",
            },
        )
