"""
Optical forward model: dielectric functions, layer stacks and transfer matrices
"""

from .dielectric import (
    SILVER,
    ConstantModel,
    DielectricModel,
    DrudeModel,
    LorentzModel,
    ModelKind,
    eval_epsilon,
    refractive_index,
)
from .spectrum import Channel, Spectrum, energy_grid, locate_extrema
from .stack import Layer, Stack
from .tmm import (
    HBAR_C_EV_NM,
    cavity_resonance,
    find_cavity_thickness,
    find_dips,
    layer_matrix,
    reflectance_transmittance,
    spectrum_sweep,
)

__all__ = [
    "HBAR_C_EV_NM",
    "SILVER",
    "Channel",
    "ConstantModel",
    "DielectricModel",
    "DrudeModel",
    "Layer",
    "LorentzModel",
    "ModelKind",
    "Spectrum",
    "Stack",
    "cavity_resonance",
    "energy_grid",
    "eval_epsilon",
    "find_cavity_thickness",
    "find_dips",
    "layer_matrix",
    "locate_extrema",
    "reflectance_transmittance",
    "refractive_index",
    "spectrum_sweep",
]
