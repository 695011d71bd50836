"""
End-to-end reproduction pipeline behind the `report` subcommand.

Calibrates the dye strength, simulates the resonant cavity, sweeps the
detuning, synthesizes and refits scattering, fits the coupling, regresses
the scattering strengths on the Hopfield weights, sweeps the concentration
and checks the amplitude anchors and the energy balance.
"""

import logging
import math
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, Field

from ..analysis.dispersion import (
    DetuningSeries,
    fit_coupling,
    find_crossing_detuning,
    fit_sqrt_concentration,
    peak_dip_shift,
)
from ..config.base import SweepKind
from ..config.config import RunConfig
from ..config.registry import StackRegistry
from ..errors import InsufficientDataError, NoCrossingError
from ..optics.spectrum import Spectrum
from ..persistence.models import json_text
from ..persistence.series_io import format_series_csv
from ..persistence.spectrum_io import format_spectrum_csv
from ..polaritons.oscillator import CoupledOscillatorParams
from ..polaritons.scattering import absorption_overestimate, clip_to_budget, energy_balance
from .analysis_service import (
    analyze_hopfield,
    fit_spectra,
    peak_series,
    strengths_series,
)
from .simulation_service import (
    Calibration,
    SweepPoint,
    calibrate,
    config_grid,
    read_branches,
    run_sweep,
    scattering_fixture,
    simulate,
    sweep_series,
    synthesize_series,
)

logger = logging.getLogger(__name__)


class ResonantSection(BaseModel):
    cavity_thickness_nm: float = Field(description="Cavity thickness tuned to E_x")
    e_upper_ev: float = Field(description="Upper branch, from fit.extraction")
    e_lower_ev: float = Field(description="Lower branch, from fit.extraction")
    splitting_ev: float = Field(description="Branch separation at resonance")
    energy_residual: float = Field(description="max |R + T + A - 1| over the grid")


class DispersionSection(BaseModel):
    points: List[Dict[str, Any]] = Field(description="One entry per sweep point")
    flagged: List[str] = Field(
        default_factory=list, description="Points whose splitting was unresolved"
    )
    coupling: Dict[str, Any] = Field(description="Coupling fit to the extracted branches")


class ScatteringSection(BaseModel):
    fits: List[Dict[str, Any]] = Field(description="Two-peak fit per detuning")
    hopfield: Dict[str, Any] = Field(description="Strength against photon weight")
    peak_dip_shift: Dict[str, Any] = Field(
        description="Scattering apex minus extracted branch energy"
    )


class ConcentrationSection(BaseModel):
    points: List[Dict[str, Any]] = Field(description="Reflectance splitting per concentration")
    reflectance_sqrt_law: Optional[Dict[str, Any]] = Field(
        default=None, description="Dip splitting against sqrt(c)"
    )
    scattering_splittings_ev: List[Optional[float]] = Field(
        description="Scattering-peak splitting per concentration"
    )
    scattering_sqrt_law: Optional[Dict[str, Any]] = Field(
        default=None, description="Scattering-peak splitting against sqrt(c)"
    )
    crossing_detunings_ev: List[Optional[float]] = Field(
        description="Detuning of equal branch strengths per concentration"
    )
    crossing_trend: str = Field(
        description="Direction of the crossing shift as the coupling grows"
    )


class AnchorSection(BaseModel):
    coupled_max: float = Field(description="Peak scattering of the resonant pair")
    bare_film_max: float = Field(description="Peak scattering of the bare dye film")
    bare_film_peak_ev: float = Field(description="Energy of the bare film maximum")
    empty_cavity_max: float = Field(description="Peak scattering without dye")


class BalanceSection(BaseModel):
    detuning_ev: float = Field(description="Sweep point used for the balance")
    residual: float = Field(description="max |R + T + S + A - 1|")
    max_absorption_overestimate: float = Field(
        description="Largest (1 - T - R) - (1 - T - R - S)"
    )
    at_energy_ev: float = Field(description="Energy of the largest overestimate")


class ReproductionReport(BaseModel):
    """Everything `report` writes to report.json"""

    seed: int
    calibration: Dict[str, Any]
    resonant: ResonantSection
    dispersion: DispersionSection
    scattering: ScatteringSection
    concentration: ConcentrationSection
    anchors: AnchorSection
    balance: BalanceSection

    def to_json(self) -> str:
        return json_text(self.model_dump(mode="json"))


def _resonant_section(config: RunConfig, calibration: Calibration) -> ResonantSection:
    result = simulate(config, calibration)
    upper, lower = read_branches(config, result.reflectance, result.absorbance)
    return ResonantSection(
        cavity_thickness_nm=calibration.cavity_thickness_nm,
        e_upper_ev=upper,
        e_lower_ev=lower,
        splitting_ev=upper - lower,
        energy_residual=result.energy_residual(),
    )


def _pair(config: RunConfig, e_cavity: float, coupling: float) -> CoupledOscillatorParams:
    osc = config.oscillator
    return CoupledOscillatorParams(
        e_c=e_cavity,
        e_x=osc.e_x,
        coupling=coupling,
        gamma_c=osc.gamma_c,
        gamma_x=osc.gamma_x,
    )


def _scaled_coupling(coupling: float, concentration: float, reference: float) -> float:
    """V grows with the square root of the dye concentration"""
    return coupling * math.sqrt(concentration / reference)


async def _scattering_for_points(
    config: RunConfig, points: List[SweepPoint], coupling: float, seed: int
) -> List[Spectrum]:
    """Synthesized scattering of the polariton pair at every sweep point"""
    law = StackRegistry.scattering_law(config)
    pairs = [_pair(config, p.e_cavity, coupling) for p in points]
    return await synthesize_series(pairs, law, config_grid(config), seed)


async def _crossing_at(
    config: RunConfig, coupling: float, seed: int
) -> Optional[float]:
    """Crossing detuning of a synthesized series at the given coupling"""
    law = StackRegistry.scattering_law(config)
    detunings = config.sweep.detunings_ev
    pairs = [_pair(config, config.oscillator.e_x + d, coupling) for d in detunings]
    spectra = await synthesize_series(pairs, law, config_grid(config), seed)
    fits = await fit_spectra(spectra, config.fit.max_iterations, skip_failures=True)
    kept = [(d, f) for d, f in zip(detunings, fits) if f is not None]
    if len(kept) < 2:
        return None
    series = DetuningSeries.from_arrays(
        [d for d, _ in kept],
        [f.fit.upper.center for _, f in kept],
        [f.fit.lower.center for _, f in kept],
        [f.sigma_upper for _, f in kept],
        [f.sigma_lower for _, f in kept],
    )
    try:
        return find_crossing_detuning(series)
    except NoCrossingError:
        return None


def _trend(crossings: List[Optional[float]]) -> str:
    found = [c for c in crossings if c is not None]
    if len(found) < 2:
        return "undetermined"
    change = found[-1] - found[0]
    if abs(change) < 1e-3:
        return "flat"
    return "increasing" if change > 0 else "decreasing"


async def _concentration_section(
    config: RunConfig, calibration: Calibration, coupling: float, seed: int
) -> ConcentrationSection:
    concentrations = list(config.sweep.concentrations_mm)
    points = await run_sweep(config, calibration, SweepKind.CONCENTRATION, concentrations)
    resolved = [p for p in points if p.resolved]
    reflectance_law = None
    if len(resolved) >= 2:
        reflectance_law = fit_sqrt_concentration(
            [p.concentration_mm for p in resolved], [p.splitting for p in resolved]
        ).to_dict()

    reference = config.calibration.concentration_mm
    couplings = [_scaled_coupling(coupling, c, reference) for c in concentrations]
    law = StackRegistry.scattering_law(config)
    pairs = [_pair(config, config.oscillator.e_x, v) for v in couplings]
    spectra = await synthesize_series(pairs, law, config_grid(config), seed)
    fits = await fit_spectra(spectra, config.fit.max_iterations, skip_failures=True)
    splittings = [
        None if f is None else f.apex_splitting for f in fits
    ]
    measured = [(c, s) for c, s in zip(concentrations, splittings) if s is not None]
    scattering_law = None
    if len(measured) >= 2:
        scattering_law = fit_sqrt_concentration(
            [c for c, _ in measured], [s for _, s in measured]
        ).to_dict()

    crossings = []
    for index, v in enumerate(couplings):
        crossings.append(await _crossing_at(config, v, seed + index + 1))
    return ConcentrationSection(
        points=[p.to_dict() for p in points],
        reflectance_sqrt_law=reflectance_law,
        scattering_splittings_ev=splittings,
        scattering_sqrt_law=scattering_law,
        crossing_detunings_ev=crossings,
        crossing_trend=_trend(crossings),
    )


def _anchor_section(config: RunConfig, seed: int, coupling: float) -> AnchorSection:
    coupled = scattering_fixture(config, "coupled", seed, coupling)
    bare_peak_ev, bare_max = scattering_fixture(config, "bare-film", seed).peak()
    empty = scattering_fixture(config, "empty-cavity", seed)
    return AnchorSection(
        coupled_max=coupled.peak()[1],
        bare_film_max=bare_max,
        bare_film_peak_ev=bare_peak_ev,
        empty_cavity_max=empty.peak()[1],
    )


def _balance_section(point: SweepPoint, scattering: Spectrum) -> BalanceSection:
    scattering = clip_to_budget(scattering, point.reflectance, point.transmittance)
    absorbance = energy_balance(point.reflectance, point.transmittance, scattering)
    total = (
        point.reflectance.values
        + point.transmittance.values
        + scattering.values
        + absorbance.values
    )
    estimate = absorption_overestimate(point.reflectance, point.transmittance, scattering)
    return BalanceSection(
        detuning_ev=point.detuning,
        residual=float(np.max(np.abs(total - 1.0))),
        max_absorption_overestimate=estimate.max_overestimate,
        at_energy_ev=estimate.at_energy,
    )


async def run_reproduction(
    config: RunConfig, seed: int
) -> Tuple[ReproductionReport, Dict[str, str]]:
    """
    Run the whole pipeline.

    Args:
        config: validated run configuration
        seed: seed of every noise stream in the run

    Returns:
        The report and the output file names mapped to their text,
        report.json included

    Raises:
        InsufficientDataError: fewer than three resolved detuning points
    """
    outputs: Dict[str, str] = {}
    calibration = calibrate(config)
    resonant = _resonant_section(config, calibration)
    logger.info("resonant splitting %.1f meV", 1e3 * resonant.splitting_ev)

    points = await run_sweep(config, calibration, SweepKind.DETUNING)
    resolved = [p for p in points if p.resolved]
    if len(resolved) < 3:
        raise InsufficientDataError(
            f"only {len(resolved)} detuning points resolved a splitting"
        )
    dips = sweep_series(resolved)
    osc = config.oscillator
    coupling_fit = fit_coupling(
        dips,
        e_x=osc.e_x,
        gamma_c=osc.gamma_c,
        gamma_x=osc.gamma_x,
        free_cavity=config.fit.free_cavity,
        max_iterations=config.fit.max_iterations,
    )
    coupling = coupling_fit.coupling

    scattering = await _scattering_for_points(config, resolved, coupling, seed)
    fits = await fit_spectra(scattering, config.fit.max_iterations)
    with_strengths = strengths_series(dips, fits)
    hopfield = analyze_hopfield(with_strengths, coupling)
    shift = peak_dip_shift(dips, peak_series(dips, fits))

    concentration = await _concentration_section(config, calibration, coupling, seed)
    nearest = int(np.argmin([abs(p.detuning) for p in resolved]))

    report = ReproductionReport(
        seed=seed,
        calibration=calibration.to_dict(),
        resonant=resonant,
        dispersion=DispersionSection(
            points=[p.to_dict() for p in points],
            flagged=[p.label for p in points if not p.resolved],
            coupling=coupling_fit.to_dict(),
        ),
        scattering=ScatteringSection(
            fits=[{"label": p.label, **f.to_dict()} for p, f in zip(resolved, fits)],
            hopfield=hopfield.to_dict(),
            peak_dip_shift=shift.to_dict(),
        ),
        concentration=concentration,
        anchors=_anchor_section(config, seed, coupling),
        balance=_balance_section(resolved[nearest], scattering[nearest]),
    )

    outputs["report.json"] = report.to_json()
    outputs["dispersion_dips.csv"] = format_series_csv(dips)
    outputs["dispersion_strengths.csv"] = format_series_csv(with_strengths)
    outputs["hopfield_points.csv"] = hopfield.plot_csv()
    for point, spectrum in zip(resolved, scattering):
        outputs[f"scattering_{point.label}.csv"] = format_spectrum_csv(spectrum)
        outputs[f"reflectance_{point.label}.csv"] = format_spectrum_csv(point.reflectance)
    logger.info(
        "report: V = %.1f meV, Hopfield slope %.3f",
        1e3 * coupling,
        hopfield.regressions["pooled"].slope,
    )
    return report, outputs
