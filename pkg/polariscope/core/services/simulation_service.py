"""
Forward simulations: concentration calibration, single-stack spectra,
concurrent sweeps and scattering synthesis
"""

import asyncio
import logging
import math
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..analysis.dispersion import (
    DetuningRecord,
    DetuningSeries,
    ExtractionMode,
    extract_branch_energies,
)
from ..config.base import StackPreset, SweepKind
from ..config.config import LorentzMaterial, RunConfig
from ..config.registry import StackRegistry
from ..errors import NotTunableError, UnresolvedSplittingError
from ..optics.spectrum import Spectrum, energy_grid
from ..optics.stack import Stack
from ..optics.tmm import cavity_resonance, find_cavity_thickness, find_dips, spectrum_sweep
from ..polaritons.oscillator import CoupledOscillatorParams
from ..polaritons.scattering import (
    ScatteringLaw,
    empty_cavity_scattering,
    synthesize_scattering,
    uncoupled_film_scattering,
)

logger = logging.getLogger(__name__)

CALIBRATION_REL_TOLERANCE = 1e-6
MAX_BRACKET_STEPS = 30
FIXTURES = ("coupled", "bare-film", "empty-cavity")


@dataclass(frozen=True)
class Calibration:
    """Oscillator strength per mM and the resonant cavity thickness"""

    strength_per_mm: float
    cavity_thickness_nm: float
    splitting_ev: Optional[float] = None
    concentration_mm: Optional[float] = None
    calibrated: bool = False

    def to_dict(self) -> Dict:
        return {
            "strength_per_mm_ev2": self.strength_per_mm,
            "cavity_thickness_nm": self.cavity_thickness_nm,
            "splitting_ev": self.splitting_ev,
            "concentration_mm": self.concentration_mm,
            "calibrated": self.calibrated,
        }


@dataclass(frozen=True, eq=False)
class SimulationResult:
    """R, T and A spectra of one stack plus the reflectance dips found"""

    stack: Stack
    reflectance: Spectrum
    transmittance: Spectrum
    absorbance: Spectrum
    dips: List[float] = field(default_factory=list)

    def energy_residual(self) -> float:
        """max |R + T + A - 1| over the grid"""
        total = self.reflectance.values + self.transmittance.values + self.absorbance.values
        return float(np.max(np.abs(total - 1.0))) if total.size else 0.0


@dataclass(frozen=True, eq=False)
class SweepPoint:
    """One simulated sample of a sweep"""

    index: int
    value: float
    thickness_nm: float
    concentration_mm: Optional[float]
    e_cavity: float
    detuning: float
    reflectance: Spectrum
    transmittance: Spectrum
    absorbance: Spectrum
    e_upper: Optional[float] = None
    e_lower: Optional[float] = None
    flag: str = ""

    @property
    def resolved(self) -> bool:
        return self.e_upper is not None

    @property
    def label(self) -> str:
        return f"point_{self.index:02d}"

    @property
    def splitting(self) -> Optional[float]:
        return self.e_upper - self.e_lower if self.resolved else None

    def to_dict(self) -> Dict:
        return {
            "label": self.label,
            "value": self.value,
            "thickness_nm": self.thickness_nm,
            "concentration_mm": self.concentration_mm,
            "e_cavity_ev": self.e_cavity,
            "detuning_ev": self.detuning,
            "e_upper_ev": self.e_upper,
            "e_lower_ev": self.e_lower,
            "flag": self.flag,
        }


def config_grid(config: RunConfig) -> np.ndarray:
    return energy_grid(config.grid.min_ev, config.grid.max_ev, config.grid.step_ev)


def _cavity_material(config: RunConfig):
    layer = config.stack.layers[StackRegistry.cavity_layer(config)]
    return config.material(layer.material)


def _dip_splitting(stack: Stack, grid: np.ndarray) -> float:
    reflectance, _, _ = spectrum_sweep(stack, grid)
    try:
        upper, lower = extract_branch_energies(reflectance, ExtractionMode.DIPS)
    except UnresolvedSplittingError:
        return 0.0
    return upper - lower


def read_branches(
    config: RunConfig, reflectance: Spectrum, absorbance: Spectrum
) -> Tuple[float, float]:
    """
    (e_upper, e_lower) from reflectance dips or absorbance peaks, as
    fit.extraction selects.

    Raises:
        UnresolvedSplittingError: fewer than two extrema
    """
    mode = ExtractionMode(config.fit.extraction)
    spectrum = reflectance if mode is ExtractionMode.DIPS else absorbance
    return extract_branch_energies(spectrum, mode)


def resonant_thickness(config: RunConfig, strength_per_mm: Optional[float] = None) -> float:
    """Cavity thickness whose undoped fundamental dip sits at E_x"""
    stack = StackRegistry.build_stack(
        config, strength_per_mm=strength_per_mm, preset=StackPreset.CAVITY
    )
    return find_cavity_thickness(
        stack, config.oscillator.e_x, StackRegistry.cavity_index(config)
    )


def _configured_thickness(config: RunConfig) -> float:
    return config.stack.layers[StackRegistry.cavity_layer(config)].thickness_nm


def calibrate(config: RunConfig) -> Calibration:
    """
    Fix the oscillator strength per mM so the resonant cavity at the
    reference concentration shows the target reflectance splitting.

    The cavity thickness is first tuned to put the undoped mode on E_x
    (unless tuning is disabled). Calibration is skipped when disabled or
    when the cavity layer carries no concentration-based dye.

    Raises:
        NotTunableError: the target splitting cannot be bracketed
    """
    material = _cavity_material(config)
    thickness = (
        resonant_thickness(config)
        if config.stack.tune_thickness
        else _configured_thickness(config)
    )
    if not (
        config.calibration.enabled
        and isinstance(material, LorentzMaterial)
        and material.uses_concentration
    ):
        k = material.strength_per_mm if isinstance(material, LorentzMaterial) else 0.0
        return Calibration(strength_per_mm=k, cavity_thickness_nm=thickness)

    grid = config_grid(config)
    concentration = config.calibration.concentration_mm
    target = config.calibration.target_splitting_ev

    def splitting(k: float) -> float:
        stack = StackRegistry.build_stack(
            config,
            strength_per_mm=k,
            concentration_mm=concentration,
            cavity_thickness_nm=thickness,
            preset=StackPreset.CAVITY,
        )
        return _dip_splitting(stack, grid)

    high = material.strength_per_mm
    for _ in range(MAX_BRACKET_STEPS):
        if splitting(high) >= target:
            break
        high *= 2
    else:
        raise NotTunableError(f"splitting of {target:.4f} eV not reached by any strength")
    low = high / 2
    for _ in range(MAX_BRACKET_STEPS):
        if splitting(low) < target:
            break
        low /= 2
    else:
        raise NotTunableError(f"splitting of {target:.4f} eV not bracketed from below")

    while (high - low) > CALIBRATION_REL_TOLERANCE * high:
        middle = math.sqrt(low * high)
        if splitting(middle) < target:
            low = middle
        else:
            high = middle
    k = 0.5 * (low + high)
    achieved = splitting(k)
    logger.info(
        "calibrated k = %.4e eV^2/mM (%.1f meV splitting at %.0f mM, d = %.2f nm)",
        k,
        1e3 * achieved,
        concentration,
        thickness,
    )
    return Calibration(
        strength_per_mm=k,
        cavity_thickness_nm=thickness,
        splitting_ev=achieved,
        concentration_mm=concentration,
        calibrated=True,
    )


def simulate(config: RunConfig, calibration: Calibration) -> SimulationResult:
    """R/T/A spectra of the configured sample"""
    stack = StackRegistry.build_stack(
        config,
        strength_per_mm=calibration.strength_per_mm,
        cavity_thickness_nm=calibration.cavity_thickness_nm,
    )
    reflectance, transmittance, absorbance = spectrum_sweep(stack, config_grid(config))
    dips = [d.energy for d in find_dips(reflectance)]
    return SimulationResult(stack, reflectance, transmittance, absorbance, dips)


def simulate_point(
    config: RunConfig,
    calibration: Calibration,
    kind: SweepKind,
    value: float,
    index: int,
) -> SweepPoint:
    """
    Simulate one sweep point. An unresolved splitting is recorded on the
    point instead of raised.
    """
    k = calibration.strength_per_mm
    concentration = StackRegistry.dye_concentration(config)
    cavity_index = StackRegistry.cavity_index(config)
    if kind is SweepKind.DETUNING:
        template = StackRegistry.build_stack(
            config, strength_per_mm=k, preset=StackPreset.CAVITY
        )
        thickness = find_cavity_thickness(
            template, config.oscillator.e_x + value, cavity_index
        )
    elif kind is SweepKind.THICKNESS:
        thickness = value
    else:
        thickness = calibration.cavity_thickness_nm
        concentration = value

    stack = StackRegistry.build_stack(
        config,
        strength_per_mm=k,
        concentration_mm=concentration,
        cavity_thickness_nm=thickness,
        preset=StackPreset.CAVITY,
    )
    e_cavity = cavity_resonance(stack)
    reflectance, transmittance, absorbance = spectrum_sweep(stack, config_grid(config))
    point = dict(
        index=index,
        value=value,
        thickness_nm=thickness,
        concentration_mm=concentration,
        e_cavity=e_cavity,
        detuning=e_cavity - config.oscillator.e_x,
        reflectance=reflectance,
        transmittance=transmittance,
        absorbance=absorbance,
    )
    try:
        upper, lower = read_branches(config, reflectance, absorbance)
    except UnresolvedSplittingError as e:
        logger.warning("sweep point %d (%g): %s", index, value, e)
        return SweepPoint(**point, flag="unresolved")
    return SweepPoint(**point, e_upper=upper, e_lower=lower)


async def run_sweep(
    config: RunConfig,
    calibration: Calibration,
    kind: Optional[SweepKind] = None,
    values: Optional[Sequence[float]] = None,
) -> List[SweepPoint]:
    """
    Simulate every sweep point concurrently; results keep the input order.
    """
    kind = kind or config.sweep.kind
    values = list(config.sweep.points() if values is None else values)
    logger.info("running %d-point %s sweep", len(values), kind.value)
    tasks = [
        asyncio.to_thread(simulate_point, config, calibration, kind, value, index)
        for index, value in enumerate(values)
    ]
    return list(await asyncio.gather(*tasks))


def sweep_series(points: Sequence[SweepPoint]) -> DetuningSeries:
    """Resolved points of a detuning or thickness sweep as a series"""
    records = [
        DetuningRecord(
            detuning=p.detuning,
            e_upper=p.e_upper,
            e_lower=p.e_lower,
            e_cavity=p.e_cavity,
            label=p.label,
        )
        for p in points
        if p.resolved
    ]
    return DetuningSeries(tuple(records))


def _synthesize_one(
    params: CoupledOscillatorParams,
    law: ScatteringLaw,
    grid: np.ndarray,
    seed: np.random.SeedSequence,
) -> Spectrum:
    return synthesize_scattering(params, law, grid, np.random.default_rng(seed))


async def synthesize_series(
    params: Sequence[CoupledOscillatorParams],
    law: ScatteringLaw,
    grid: np.ndarray,
    seed: int,
) -> List[Spectrum]:
    """
    Scattering spectra for several polariton pairs. Each pair draws its
    noise from its own child of SeedSequence(seed).
    """
    seeds = np.random.SeedSequence(seed).spawn(len(params))
    tasks = [
        asyncio.to_thread(_synthesize_one, p, law, grid, s)
        for p, s in zip(params, seeds)
    ]
    return list(await asyncio.gather(*tasks))


def scattering_fixture(
    config: RunConfig, name: str, seed: int, coupling: Optional[float] = None
) -> Spectrum:
    """
    Reference scattering spectra: a noiseless resonant polariton pair, the
    bare dye film and the noise-only empty cavity.
    """
    grid = config_grid(config)
    osc = config.oscillator
    if name == "coupled":
        law = StackRegistry.scattering_law(config)
        params = StackRegistry.oscillator_params(config, 0.0, coupling)
        return synthesize_scattering(params, replace(law, noise_floor=0.0), grid)
    if name == "bare-film":
        return uncoupled_film_scattering(
            osc.e_x, osc.gamma_x, config.scattering.bare_film_efficiency, grid
        )
    if name == "empty-cavity":
        return empty_cavity_scattering(
            grid, config.scattering.noise_floor, np.random.default_rng(seed)
        )
    raise ValueError(f"unknown fixture {name!r} (known: {', '.join(FIXTURES)})")
