"""
Coupled-oscillator polaritons and their scattering spectra
"""

from .oscillator import (
    CoupledOscillatorParams,
    PolaritonPair,
    RabiParams,
    branch_energies,
    collective_rabi,
    hopfield_photon_weights,
    polariton_energies,
    polariton_pair,
    rabi_energy_ev,
    splitting,
)
from .scattering import (
    ScatteringLaw,
    absorption_overestimate,
    clip_to_budget,
    empty_cavity_scattering,
    energy_balance,
    scattering_strengths,
    synthesize_scattering,
    uncoupled_film_scattering,
)

__all__ = [
    "CoupledOscillatorParams",
    "PolaritonPair",
    "RabiParams",
    "ScatteringLaw",
    "absorption_overestimate",
    "branch_energies",
    "clip_to_budget",
    "collective_rabi",
    "empty_cavity_scattering",
    "energy_balance",
    "hopfield_photon_weights",
    "polariton_energies",
    "polariton_pair",
    "rabi_energy_ev",
    "scattering_strengths",
    "splitting",
    "synthesize_scattering",
    "uncoupled_film_scattering",
]
