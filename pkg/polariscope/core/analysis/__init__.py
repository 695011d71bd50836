"""
Analysis across detuning and concentration series
"""

from .dispersion import (
    CouplingFit,
    DetuningRecord,
    DetuningSeries,
    ExtractionMode,
    HopfieldRegression,
    PeakDipShift,
    SqrtLawFit,
    extract_branch_energies,
    find_crossing_detuning,
    fit_coupling,
    fit_sqrt_concentration,
    hopfield_regression,
    peak_dip_shift,
)

__all__ = [
    "CouplingFit",
    "DetuningRecord",
    "DetuningSeries",
    "ExtractionMode",
    "HopfieldRegression",
    "PeakDipShift",
    "SqrtLawFit",
    "extract_branch_energies",
    "find_crossing_detuning",
    "fit_coupling",
    "fit_sqrt_concentration",
    "hopfield_regression",
    "peak_dip_shift",
]
