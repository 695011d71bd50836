"""
Normal-incidence transfer-matrix model for multilayer stacks.

Characteristic-matrix convention with n = n' + i n'' (n'' >= 0 absorbs):

    M_j = [[cos phi, -i sin phi / n], [-i n sin phi, cos phi]],
    phi = (E / hbar c) n d
"""

import logging
from typing import Optional, Tuple

import numpy as np

from ..errors import NotTunableError
from .dielectric import LorentzModel, refractive_index
from .spectrum import Channel, Spectrum, energy_grid, locate_extrema
from .stack import Stack

logger = logging.getLogger(__name__)

HBAR_C_EV_NM = 197.3269804

# Thickness bracket and search window for the fundamental cavity mode
THICKNESS_BRACKET_NM = (40.0, 250.0)
TUNABLE_RANGE_EV = (1.8, 2.6)
SEARCH_WINDOW_EV = (1.0, 4.0)
DIP_REL_PROMINENCE = 0.02


def _phase(n, thickness_nm: float, energy):
    return (np.asarray(energy) / HBAR_C_EV_NM) * n * thickness_nm


def layer_matrix(n: complex, thickness_nm: float, energy: float) -> np.ndarray:
    """
    Characteristic matrix of one homogeneous layer.

    Args:
        n: complex refractive index
        thickness_nm: layer thickness (nm, >= 0)
        energy: photon energy (eV, > 0)

    Returns:
        2x2 complex matrix; identity for zero thickness
    """
    if thickness_nm < 0:
        raise ValueError("thickness must be >= 0")
    if energy <= 0:
        raise ValueError("energy must be > 0 eV")
    if not (np.isfinite(n) and np.isfinite(thickness_nm) and np.isfinite(energy)):
        raise ValueError("layer_matrix inputs must be finite")
    return _layer_matrices(np.asarray([n]), thickness_nm, np.asarray([energy]))[0]


def _layer_matrices(n: np.ndarray, thickness_nm: float, energies: np.ndarray):
    phi = _phase(n, thickness_nm, energies)
    cos, sin = np.cos(phi), np.sin(phi)
    m = np.empty(energies.shape + (2, 2), dtype=complex)
    m[..., 0, 0] = cos
    m[..., 0, 1] = -1j * sin / n
    m[..., 1, 0] = -1j * n * sin
    m[..., 1, 1] = cos
    return m


def _amplitudes(stack: Stack, energies: np.ndarray):
    n_ambient = refractive_index(stack.layers[0].model, energies)
    n_substrate = refractive_index(stack.layers[-1].model, energies)
    total = np.broadcast_to(np.eye(2, dtype=complex), energies.shape + (2, 2))
    for layer in stack.interior:
        if layer.thickness_nm == 0:
            continue
        n = refractive_index(layer.model, energies)
        total = total @ _layer_matrices(n, layer.thickness_nm, energies)
    b = total[..., 0, 0] + total[..., 0, 1] * n_substrate
    c = total[..., 1, 0] + total[..., 1, 1] * n_substrate
    denominator = n_ambient * b + c
    r = (n_ambient * b - c) / denominator
    t = 2 * n_ambient / denominator
    return r, t, n_ambient, n_substrate


def reflectance_transmittance(stack: Stack, energy) -> Tuple:
    """
    Power reflectance and transmittance of a stack.

    Args:
        stack: validated Stack (ambient first)
        energy: photon energy in eV, scalar or array

    Returns:
        (R, T) as floats for scalar input, arrays otherwise
    """
    energies = np.atleast_1d(np.asarray(energy, dtype=float))
    if energies.size == 0:
        return np.empty(0), np.empty(0)
    r, t, n_ambient, n_substrate = _amplitudes(stack, energies)
    reflectance = np.abs(r) ** 2
    transmittance = n_substrate.real / n_ambient.real * np.abs(t) ** 2
    if np.ndim(energy) == 0:
        return float(reflectance[0]), float(transmittance[0])
    return reflectance, transmittance


def spectrum_sweep(stack: Stack, grid) -> Tuple[Spectrum, Spectrum, Spectrum]:
    """R, T and A = 1 - R - T spectra on a strictly increasing grid"""
    energies = np.asarray(grid, dtype=float)
    reflectance, transmittance = reflectance_transmittance(stack, energies)
    absorbance = 1.0 - reflectance - transmittance
    return (
        Spectrum(energies, reflectance, Channel.REFLECTANCE),
        Spectrum(energies, transmittance, Channel.TRANSMITTANCE),
        Spectrum(energies, absorbance, Channel.ABSORBANCE),
    )


def find_dips(reflectance: Spectrum, rel_prominence: float = DIP_REL_PROMINENCE):
    """Refined reflectance minima ordered by energy"""
    return locate_extrema(reflectance, minima=True, rel_prominence=rel_prominence)


def default_cavity_index(stack: Stack) -> int:
    """First dye layer, else the middle interior layer"""
    for index, layer in enumerate(stack.layers):
        if isinstance(layer.model, LorentzModel):
            return index
    return len(stack.layers) // 2


def fundamental_dip(
    stack: Stack, window: Tuple[float, float] = SEARCH_WINDOW_EV, step: float = 1e-3
) -> Optional[float]:
    """Lowest-energy reflectance dip of a stack inside the window, if any"""
    reflectance, _, _ = spectrum_sweep(stack, energy_grid(window[0], window[1], step))
    dips = find_dips(reflectance)
    if not dips:
        return None
    return dips[0].energy


def find_cavity_thickness(
    stack: Stack,
    target_ev: float,
    cavity_index: Optional[int] = None,
    tolerance_nm: float = 1e-3,
) -> float:
    """
    Thickness of the cavity layer that puts the undoped fundamental
    reflectance dip at target_ev, by bisection on the dip position.

    Raises:
        NotTunableError: target outside the tunable range or not bracketed
    """
    low_ev, high_ev = TUNABLE_RANGE_EV
    if not low_ev <= target_ev <= high_ev:
        raise NotTunableError(
            f"target {target_ev:.4f} eV outside [{low_ev}, {high_ev}] eV"
        )
    if cavity_index is None:
        cavity_index = default_cavity_index(stack)
    template = stack.undoped()

    def offset(thickness: float) -> float:
        dip = fundamental_dip(template.with_thickness(cavity_index, thickness))
        # no dip in the window means the mode sits above it at this thickness
        return np.inf if dip is None else dip - target_ev

    thin, thick = THICKNESS_BRACKET_NM
    if not (offset(thin) > 0 > offset(thick)):
        raise NotTunableError(
            f"cavity resonance {target_ev:.4f} eV not bracketed by "
            f"{thin}-{thick} nm"
        )
    iterations = 0
    while thick - thin > tolerance_nm:
        middle = 0.5 * (thin + thick)
        if offset(middle) > 0:
            thin = middle
        else:
            thick = middle
        iterations += 1
    thickness = 0.5 * (thin + thick)
    logger.debug(
        "cavity thickness %.3f nm for %.4f eV after %d bisections",
        thickness,
        target_ev,
        iterations,
    )
    return thickness


def cavity_resonance(stack: Stack) -> float:
    """Undoped cavity resonance energy E_c of a stack"""
    dip = fundamental_dip(stack.undoped())
    if dip is None:
        raise NotTunableError("undoped stack shows no reflectance dip")
    return dip
