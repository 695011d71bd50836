"""
Coupled-oscillator polariton model: complex eigenenergies, Hopfield photon
weights and the collective vacuum Rabi frequency
"""

import cmath
import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from scipy import constants

from ..errors import UndefinedMixtureError

# |sqrt term| below this is treated as the exceptional point
EXCEPTIONAL_TOLERANCE_EV = 1e-12


@dataclass(frozen=True)
class CoupledOscillatorParams:
    """
    Cavity mode coupled to an exciton line (all energies in eV).

    Attributes:
        e_c: cavity mode energy
        e_x: bare exciton energy
        coupling: coupling strength V (half the resonant Rabi splitting)
        gamma_c: cavity FWHM linewidth
        gamma_x: exciton FWHM linewidth
    """

    e_c: float
    e_x: float = 2.11
    coupling: float = 0.075
    gamma_c: float = 0.060
    gamma_x: float = 0.040

    def __post_init__(self):
        if self.e_c <= 0 or self.e_x <= 0:
            raise ValueError("e_c and e_x must be > 0")
        if self.coupling < 0:
            raise ValueError("coupling must be >= 0")
        if self.gamma_c < 0 or self.gamma_x < 0:
            raise ValueError("linewidths must be >= 0")

    @property
    def detuning(self) -> float:
        return self.e_c - self.e_x

    @classmethod
    def from_detuning(cls, detuning: float, **kwargs) -> "CoupledOscillatorParams":
        e_x = kwargs.pop("e_x", 2.11)
        return cls(e_c=e_x + detuning, e_x=e_x, **kwargs)


@dataclass(frozen=True)
class PolaritonPair:
    """Upper/lower polariton energies with their photon weights"""

    e_plus: complex
    e_minus: complex
    photon_weight_upper: float
    photon_weight_lower: float
    exceptional: bool = False

    @property
    def splitting(self) -> float:
        return self.e_plus.real - self.e_minus.real


@dataclass(frozen=True)
class RabiParams:
    """
    Inputs of the collective Rabi formula (SI units).

    Attributes:
        dipole: transition dipole moment (C m)
        omega_c: cavity angular frequency (rad/s)
        eps_background: background relative permittivity inside the cavity
        mode_volume: cavity mode volume (m^3)
        molecules: number of coupled molecules
    """

    dipole: float
    omega_c: float
    eps_background: float
    mode_volume: float
    molecules: float

    def __post_init__(self):
        for name in ("dipole", "omega_c", "eps_background", "mode_volume", "molecules"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0")


def _sqrt_term(p: CoupledOscillatorParams) -> complex:
    half_width_diff = 0.5j * (p.gamma_c - p.gamma_x)
    return cmath.sqrt(p.coupling**2 + 0.25 * (p.detuning - half_width_diff) ** 2)


def polariton_energies(p: CoupledOscillatorParams) -> Tuple[complex, complex]:
    """
    Complex eigenenergies (E_plus, E_minus) of the coupled system, with the
    upper branch defined as the one with the larger real part.
    """
    mean = 0.5 * (p.e_c + p.e_x) + 0.5j * (p.gamma_c + p.gamma_x)
    root = _sqrt_term(p)
    first, second = mean + root, mean - root
    if first.real >= second.real:
        return first, second
    return second, first


def branch_energies(
    e_c, e_x: float, coupling: float, gamma_c: float, gamma_x: float
) -> Tuple[np.ndarray, np.ndarray]:
    """Real parts (upper, lower) of the eigenenergies for an array of E_c"""
    e_c = np.asarray(e_c, dtype=float)
    mean = 0.5 * (e_c + e_x)
    detuning = e_c - e_x - 0.5j * (gamma_c - gamma_x)
    root = np.sqrt(coupling**2 + 0.25 * detuning**2 + 0j)
    first, second = (mean + root).real, (mean - root).real
    return np.maximum(first, second), np.minimum(first, second)


def splitting(p: CoupledOscillatorParams) -> float:
    """Real-part splitting Re E_plus - Re E_minus (eV)"""
    e_plus, e_minus = polariton_energies(p)
    return e_plus.real - e_minus.real


def hopfield_photon_weights(delta: float, coupling: float) -> Tuple[float, float]:
    """
    Photonic fractions of the upper and lower polaritons for detuning delta
    (E_c - E_x) and coupling V, from the lossless two-level mixing.

    Raises:
        UndefinedMixtureError: V = 0 at zero detuning
    """
    if coupling < 0:
        raise ValueError("coupling must be >= 0")
    norm = math.sqrt(delta**2 + 4 * coupling**2)
    if norm == 0:
        raise UndefinedMixtureError("photon weight undefined for V = 0 at zero detuning")
    ratio = delta / norm
    return 0.5 * (1 + ratio), 0.5 * (1 - ratio)


def polariton_pair(p: CoupledOscillatorParams) -> PolaritonPair:
    e_plus, e_minus = polariton_energies(p)
    upper, lower = hopfield_photon_weights(p.detuning, p.coupling)
    return PolaritonPair(
        e_plus=e_plus,
        e_minus=e_minus,
        photon_weight_upper=upper,
        photon_weight_lower=lower,
        exceptional=abs(_sqrt_term(p)) < EXCEPTIONAL_TOLERANCE_EV,
    )


def collective_rabi(r: RabiParams) -> float:
    """
    Vacuum Rabi frequency (rad/s) of N molecules in a mode of volume V_c:

        Omega_R = (2 d / hbar) sqrt(hbar omega_c N / (2 eps eps0 V_c))
    """
    field = math.sqrt(
        constants.hbar
        * r.omega_c
        * r.molecules
        / (2 * r.eps_background * constants.epsilon_0 * r.mode_volume)
    )
    return 2 * r.dipole * field / constants.hbar


def rabi_energy_ev(omega: float) -> float:
    """hbar * Omega expressed in eV"""
    return constants.hbar * omega / constants.e
