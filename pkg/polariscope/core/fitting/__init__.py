"""
Least-squares engine and spectral line shapes
"""

from .least_squares import (
    FitProblem,
    FitResult,
    FitStatus,
    finite_difference_jacobian,
    least_squares,
)
from .lineshape import (
    SkewedGaussianPeak,
    TwoPeakFit,
    erf,
    eval_peak,
    fit_two_peaks,
    initial_two_peak_guess,
    peak_area,
    peak_maximum,
    relative_strengths,
)

__all__ = [
    "FitProblem",
    "FitResult",
    "FitStatus",
    "SkewedGaussianPeak",
    "TwoPeakFit",
    "erf",
    "eval_peak",
    "finite_difference_jacobian",
    "fit_two_peaks",
    "initial_two_peak_guess",
    "least_squares",
    "peak_area",
    "peak_maximum",
    "relative_strengths",
]
