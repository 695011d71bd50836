"""
Phenomenological polariton scattering synthesis and the four-channel energy
balance A = 1 - T - R - S
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from ..errors import AlignmentError, InvalidLawError, UnphysicalBalanceError
from ..fitting.lineshape import FWHM_PER_WIDTH, SkewedGaussianPeak, eval_peak
from ..optics.spectrum import BALANCE_SLACK, Channel, Spectrum
from .oscillator import CoupledOscillatorParams, hopfield_photon_weights, polariton_energies

logger = logging.getLogger(__name__)

MAX_NOISE_FLOOR = 0.05


@dataclass(frozen=True)
class ScatteringLaw:
    """
    Generative law for the scattering spectrum of a polariton pair.

    Branch areas follow slope * photon_weight + offset and are renormalized
    to sum to one; the summed spectrum is scaled so its maximum equals
    total, then uniform noise in [0, noise_floor) is added.
    """

    total: float = 0.25
    slope: float = 1.0
    offset_upper: float = 0.0
    offset_lower: float = 0.0
    width: float = 0.040
    skew_upper: float = 0.0
    skew_lower: float = 0.0
    noise_floor: float = 0.03

    def __post_init__(self):
        if not 0.0 <= self.total <= 1.0:
            raise InvalidLawError(f"total scattering {self.total} outside [0, 1]")
        if not 0.0 <= self.noise_floor <= MAX_NOISE_FLOOR:
            raise InvalidLawError(
                f"noise floor {self.noise_floor} outside [0, {MAX_NOISE_FLOOR}]"
            )
        if not self.width > 0:
            raise InvalidLawError("peak width must be > 0")

    def strengths(self, photon_upper: float, photon_lower: float) -> Tuple[float, float]:
        """Renormalized branch areas for the given photon weights"""
        upper = self.slope * photon_upper + self.offset_upper
        lower = self.slope * photon_lower + self.offset_lower
        if upper < 0 or lower < 0:
            raise InvalidLawError(
                f"law gives negative branch area ({upper:.4g}, {lower:.4g})"
            )
        total = upper + lower
        if total == 0:
            raise InvalidLawError("law gives zero total area")
        return upper / total, lower / total


@dataclass(frozen=True)
class AbsorptionEstimate:
    """Absorbance with and without the scattering channel"""

    naive: np.ndarray
    corrected: np.ndarray
    max_overestimate: float
    at_energy: float


def scattering_strengths(
    p: CoupledOscillatorParams, law: ScatteringLaw
) -> Tuple[float, float]:
    """Relative strengths (upper, lower) the law assigns to a polariton pair"""
    return law.strengths(*hopfield_photon_weights(p.detuning, p.coupling))


def scattering_peaks(
    p: CoupledOscillatorParams, law: ScatteringLaw
) -> Tuple[SkewedGaussianPeak, SkewedGaussianPeak]:
    """Unscaled (upper, lower) peaks whose areas equal the law's strengths"""
    share_u, share_l = scattering_strengths(p, law)
    e_plus, e_minus = polariton_energies(p)
    norm = law.width * math.sqrt(math.pi)
    return (
        SkewedGaussianPeak(share_u / norm, e_plus.real, law.width, law.skew_upper),
        SkewedGaussianPeak(share_l / norm, e_minus.real, law.width, law.skew_lower),
    )


def _add_noise(
    values: np.ndarray, floor: float, rng: Optional[np.random.Generator]
) -> np.ndarray:
    if floor == 0 or rng is None:
        return values
    return values + rng.uniform(0.0, floor, size=values.shape)


def synthesize_scattering(
    p: CoupledOscillatorParams,
    law: ScatteringLaw,
    grid,
    rng: Optional[np.random.Generator] = None,
) -> Spectrum:
    """
    Scattering spectrum of a polariton pair.

    Args:
        p: coupled-oscillator parameters (peaks sit at Re E+/-)
        law: scattering law
        grid: strictly increasing energies (eV)
        rng: seeded generator for the noise floor; no noise when omitted

    Returns:
        Spectrum on channel S

    Raises:
        InvalidLawError: the law yields a negative or zero total area
    """
    energies = np.asarray(grid, dtype=float)
    upper, lower = scattering_peaks(p, law)
    clean = eval_peak(upper, energies) + eval_peak(lower, energies)
    peak = float(clean.max()) if clean.size else 0.0
    if peak > 0:
        clean = clean * (law.total / peak)
    values = np.clip(_add_noise(clean, law.noise_floor, rng), 0.0, 1.0)
    return Spectrum(energies, values, Channel.SCATTERING)


def uncoupled_film_scattering(
    e_x: float,
    gamma_x: float,
    efficiency: float,
    grid,
    skew: float = 0.0,
) -> Spectrum:
    """
    Single scattering peak of a bare dye film at the exciton energy, with
    FWHM gamma_x and the given peak efficiency.
    """
    if not 0.0 <= efficiency <= 1.0:
        raise InvalidLawError(f"peak efficiency {efficiency} outside [0, 1]")
    energies = np.asarray(grid, dtype=float)
    if efficiency == 0:
        return Spectrum(energies, np.zeros_like(energies), Channel.SCATTERING)
    peak = SkewedGaussianPeak(1.0, e_x, gamma_x / FWHM_PER_WIDTH, skew)
    values = eval_peak(peak, energies)
    values = values * (efficiency / values.max())
    return Spectrum(energies, values, Channel.SCATTERING)


def empty_cavity_scattering(
    grid, noise_floor: float, rng: np.random.Generator
) -> Spectrum:
    """Noise-only scattering of a cavity without dye"""
    if not 0.0 <= noise_floor <= MAX_NOISE_FLOOR:
        raise InvalidLawError(f"noise floor {noise_floor} outside [0, {MAX_NOISE_FLOOR}]")
    energies = np.asarray(grid, dtype=float)
    values = _add_noise(np.zeros_like(energies), noise_floor, rng)
    return Spectrum(energies, values, Channel.SCATTERING)


def _check_aligned(*spectra: Spectrum) -> None:
    first = spectra[0]
    for other in spectra[1:]:
        if not first.same_grid(other):
            raise AlignmentError(
                f"{first.channel.value} and {other.channel.value} spectra "
                "are on different grids"
            )


def energy_balance(
    reflectance: Spectrum, transmittance: Spectrum, scattering: Spectrum
) -> Spectrum:
    """
    Absorbance A = 1 - T - R - S on a shared grid.

    A is returned unclipped so that R + T + S + A = 1 holds exactly; values
    in [-1e-6, 0) are rounding noise and are kept as computed.

    Raises:
        AlignmentError: grids differ
        UnphysicalBalanceError: A < -1e-6 anywhere
    """
    _check_aligned(reflectance, transmittance, scattering)
    absorbance = 1.0 - transmittance.values - reflectance.values - scattering.values
    if absorbance.size and absorbance.min() < -BALANCE_SLACK:
        worst = int(np.argmin(absorbance))
        raise UnphysicalBalanceError(
            f"R + T + S = {1 - absorbance[worst]:.6f} at "
            f"{reflectance.energies[worst]:.4f} eV"
        )
    return Spectrum(reflectance.energies, absorbance, Channel.ABSORBANCE)


def clip_to_budget(
    scattering: Spectrum, reflectance: Spectrum, transmittance: Spectrum
) -> Spectrum:
    """Limit S to the power left over by R and T at every energy"""
    _check_aligned(scattering, reflectance, transmittance)
    budget = np.clip(1.0 - reflectance.values - transmittance.values, 0.0, 1.0)
    clipped = np.minimum(scattering.values, budget)
    changed = int(np.count_nonzero(clipped < scattering.values))
    if changed:
        logger.debug("clipped scattering at %d of %d points", changed, len(scattering))
    return scattering.with_values(clipped)


def absorption_overestimate(
    reflectance: Spectrum, transmittance: Spectrum, scattering: Spectrum
) -> AbsorptionEstimate:
    """
    Compare A = 1 - T - R with the balance that includes scattering; the
    difference is the absorption wrongly inferred when S is ignored.
    """
    corrected = energy_balance(reflectance, transmittance, scattering).values
    naive = 1.0 - transmittance.values - reflectance.values
    difference = naive - corrected
    worst = int(np.argmax(difference)) if difference.size else 0
    return AbsorptionEstimate(
        naive=naive,
        corrected=corrected,
        max_overestimate=float(difference[worst]) if difference.size else 0.0,
        at_energy=float(reflectance.energies[worst]) if difference.size else math.nan,
    )
