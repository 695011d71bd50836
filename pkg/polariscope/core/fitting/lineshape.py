"""
Skewed-Gaussian peak model and two-peak spectral decomposition
"""

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import List, Optional, Tuple

import numpy as np
from scipy import integrate, optimize
from scipy.ndimage import uniform_filter1d
from scipy.signal import find_peaks, peak_widths

from ..errors import (
    DegenerateFitError,
    FitFailedError,
    InsufficientDataError,
    UndefinedRatioError,
)
from ..optics.spectrum import Spectrum, refine_vertex
from .least_squares import FitProblem, FitResult, least_squares

logger = logging.getLogger(__name__)

# Abramowitz & Stegun 7.1.26
_ERF_P = 0.3275911
_ERF_A = (0.254829592, -0.284496736, 1.421413741, -1.453152027, 1.061405429)

FWHM_PER_WIDTH = 2 * math.sqrt(math.log(2))
SMOOTHING_POINTS = 5
SEED_REL_PROMINENCE = 0.1
MAX_SKEW = 10.0
AREA_HALF_SPAN = 12.0


def erf(x):
    """
    Error function to absolute accuracy 1.5e-7.

    Odd symmetry is exact and erf(0) is exactly 0. Accepts scalars or
    arrays.
    """
    values = np.asarray(x, dtype=float)
    ax = np.abs(values)
    t = 1.0 / (1.0 + _ERF_P * ax)
    poly = np.zeros_like(t)
    for coefficient in reversed(_ERF_A):
        poly = (poly + coefficient) * t
    result = np.sign(values) * (1.0 - poly * np.exp(-ax * ax))
    if np.ndim(x) == 0:
        return float(result)
    return result


@dataclass(frozen=True)
class SkewedGaussianPeak:
    """
    A * exp(-t^2) * (1 + erf(skew * t / sqrt(2))) with t = (E - center) / width
    """

    amplitude: float
    center: float
    width: float
    skew: float = 0.0

    def __post_init__(self):
        if not all(
            math.isfinite(v) for v in (self.amplitude, self.center, self.width, self.skew)
        ):
            raise ValueError("peak parameters must be finite")
        if self.amplitude < 0:
            raise ValueError("amplitude must be >= 0")
        if self.width <= 0:
            raise ValueError("width must be > 0")

    def as_tuple(self) -> Tuple[float, float, float, float]:
        return (self.amplitude, self.center, self.width, self.skew)

    def to_dict(self) -> dict:
        return {
            "amplitude": self.amplitude,
            "center_ev": self.center,
            "width_ev": self.width,
            "skew": self.skew,
        }


@dataclass(frozen=True)
class TwoPeakFit:
    """Upper and lower polariton peaks on a constant baseline"""

    upper: SkewedGaussianPeak
    lower: SkewedGaussianPeak
    baseline: float = 0.0
    result: Optional[FitResult] = None

    def __post_init__(self):
        if not self.upper.center > self.lower.center:
            raise ValueError("upper peak must lie above the lower peak")

    def evaluate(self, energy) -> np.ndarray:
        return (
            eval_peak(self.upper, energy) + eval_peak(self.lower, energy) + self.baseline
        )

    def to_dict(self) -> dict:
        data = {
            "upper": self.upper.to_dict(),
            "lower": self.lower.to_dict(),
            "baseline": self.baseline,
        }
        if self.result is not None:
            data["fit"] = self.result.to_dict()
        return data


def eval_peak(p: SkewedGaussianPeak, energy):
    values = _raw_peak(np.asarray(energy, dtype=float), *p.as_tuple())
    if np.ndim(energy) == 0:
        return float(values)
    return values


def peak_area(p: SkewedGaussianPeak) -> float:
    """
    Integrated peak strength by adaptive quadrature over center +/- 12 width.

    The skew term is odd about the center, so the exact value is
    A * width * sqrt(pi) for any skew.
    """
    if p.amplitude == 0:
        return 0.0
    half = AREA_HALF_SPAN * p.width
    area, _ = integrate.quad(
        lambda e: eval_peak(p, e),
        p.center - half,
        p.center + half,
        points=[p.center],
        epsabs=1e-10 * p.amplitude * p.width,
        epsrel=1e-12,
        limit=200,
    )
    return float(area)


def peak_maximum(p: SkewedGaussianPeak) -> float:
    """Energy of the peak apex, which moves off the center for nonzero skew"""
    if p.skew == 0:
        return p.center
    result = optimize.minimize_scalar(
        lambda e: -eval_peak(p, e),
        bounds=(p.center - 2 * p.width, p.center + 2 * p.width),
        method="bounded",
        options={"xatol": 1e-9},
    )
    return float(result.x)


@lru_cache(maxsize=1)
def _unit_shape_table() -> Tuple[np.ndarray, ...]:
    """
    Shape of the unit-amplitude, unit-width peak against skew >= 0: apex
    position, FWHM, apex height and half-maximum asymmetry.
    """
    t = np.linspace(-8.0, 8.0, 16001)
    skews = np.linspace(0.0, MAX_SKEW, 201)
    apex_t, fwhm_t, height, asymmetry = [], [], [], []
    for skew in skews:
        profile = _raw_peak(t, 1.0, 0.0, 1.0, skew)
        index = int(np.argmax(profile))
        apex, top = refine_vertex(t, profile, index)
        _, _, left, right = peak_widths(profile, [index], rel_height=0.5)
        left_t, right_t = np.interp([left[0], right[0]], np.arange(t.size), t)
        apex_t.append(apex)
        fwhm_t.append(right_t - left_t)
        height.append(top)
        asymmetry.append(((right_t - apex) - (apex - left_t)) / (right_t - left_t))
    return (
        skews,
        np.array(apex_t),
        np.array(fwhm_t),
        np.array(height),
        np.maximum.accumulate(np.array(asymmetry)),
    )


def _seed_peak(
    apex: float, top: float, left: float, right: float, skewed: bool
) -> SkewedGaussianPeak:
    """Invert apex, height above baseline and half-maximum edges into a peak"""
    skews, apex_t, fwhm_t, height, asymmetry = _unit_shape_table()
    fwhm = right - left
    skew = 0.0
    if skewed:
        measured = ((right - apex) - (apex - left)) / fwhm
        skew = math.copysign(float(np.interp(abs(measured), asymmetry, skews)), measured)
    magnitude = abs(skew)
    width = fwhm / float(np.interp(magnitude, skews, fwhm_t))
    offset = math.copysign(float(np.interp(magnitude, skews, apex_t)), skew)
    return SkewedGaussianPeak(
        amplitude=max(top, 0.0) / float(np.interp(magnitude, skews, height)),
        center=apex - width * offset,
        width=width,
        skew=skew,
    )


def initial_two_peak_guess(spectrum: Spectrum, skewed: bool = True) -> TwoPeakFit:
    """
    Seed a two-peak fit from the two most prominent maxima of a 5-point
    smoothed copy of the spectrum.

    Each skew is read from the asymmetry of the half-maximum edges about the
    refined apex; center, width and amplitude then follow from the unit
    peak shape. With skewed=False the skews are 0 and the widths are
    FWHM / 1.665. Of two equal maxima the lower-energy one becomes the lower
    peak.

    Raises:
        DegenerateFitError: fewer than two maxima
    """
    energies = np.asarray(spectrum.energies, dtype=float)
    smoothed = uniform_filter1d(
        np.asarray(spectrum.values, dtype=float), SMOOTHING_POINTS, mode="nearest"
    )
    span = float(smoothed.max() - smoothed.min())
    if span <= 0:
        raise DegenerateFitError("flat spectrum has no peaks")
    indices, props = find_peaks(smoothed, prominence=SEED_REL_PROMINENCE * span)
    if len(indices) < 2:
        raise DegenerateFitError(f"found {len(indices)} peak(s), need two")

    order = np.argsort(props["prominences"], kind="stable")[::-1][:2]
    chosen = np.sort(indices[order])
    _, _, left_ips, right_ips = peak_widths(smoothed, chosen, rel_height=0.5)
    samples = np.arange(energies.size)
    min_half = spectrum.step
    baseline = float(smoothed.min())

    peaks = []
    for index, left_ip, right_ip in zip(chosen, left_ips, right_ips):
        apex, top = refine_vertex(energies, smoothed, int(index))
        left, right = np.interp([left_ip, right_ip], samples, energies)
        left, right = min(float(left), apex - min_half), max(float(right), apex + min_half)
        peaks.append(_seed_peak(apex, top - baseline, left, right, skewed))
    lower, upper = peaks
    if not upper.center > lower.center:
        if skewed:
            return initial_two_peak_guess(spectrum, skewed=False)
        raise DegenerateFitError(f"peaks coincide at {upper.center:.4f} eV")
    return TwoPeakFit(upper=upper, lower=lower, baseline=baseline)


def _pack(fit: TwoPeakFit) -> np.ndarray:
    return np.array(fit.upper.as_tuple() + fit.lower.as_tuple() + (fit.baseline,))


def _two_peak_model(params: np.ndarray, energies: np.ndarray) -> np.ndarray:
    a_u, e_u, w_u, b_u, a_l, e_l, w_l, b_l, base = params
    return (
        _raw_peak(energies, a_u, e_u, w_u, b_u)
        + _raw_peak(energies, a_l, e_l, w_l, b_l)
        + base
    )


def _raw_peak(energies, amplitude, center, width, skew):
    t = (energies - center) / width
    return amplitude * np.exp(-t * t) * (1.0 + erf(skew * t / math.sqrt(2.0)))


def _on_grid(fit: TwoPeakFit, e_min: float, e_max: float) -> bool:
    return all(e_min <= p.center <= e_max for p in (fit.upper, fit.lower))


def _default_seeds(spectrum: Spectrum) -> List[TwoPeakFit]:
    skewed = initial_two_peak_guess(spectrum)
    symmetric = initial_two_peak_guess(spectrum, skewed=False)
    if skewed == symmetric:
        return [symmetric]
    return [skewed, symmetric]


def fit_two_peaks(
    spectrum: Spectrum,
    init: Optional[TwoPeakFit] = None,
    max_iterations: int = 500,
) -> TwoPeakFit:
    """
    Fit two skewed Gaussians plus a constant baseline (9 parameters).

    Without init the fit starts from the asymmetry-seeded guess and from the
    zero-skew guess, and keeps the converged result with the lower cost.

    Args:
        spectrum: measured or synthesized scattering spectrum
        init: starting point; seeded from the data when omitted
        max_iterations: least-squares iteration cap

    Returns:
        TwoPeakFit with upper.center > lower.center

    Raises:
        InsufficientDataError: fewer than 9 points or centers outside the grid
        DegenerateFitError: single peak, or centers within width / 10
        FitFailedError: least squares did not converge
    """
    if len(spectrum) < 9:
        raise InsufficientDataError(f"two-peak fit needs >= 9 points, got {len(spectrum)}")

    energies = np.asarray(spectrum.energies, dtype=float)
    values = np.asarray(spectrum.values, dtype=float)
    e_min, e_max = float(energies[0]), float(energies[-1])
    if init is not None:
        if not _on_grid(init, e_min, e_max):
            raise InsufficientDataError(
                f"initial centers {init.upper.center:.4f} / {init.lower.center:.4f} eV"
                f" outside [{e_min}, {e_max}] eV"
            )
        seeds = [init]
    else:
        seeds = [s for s in _default_seeds(spectrum) if _on_grid(s, e_min, e_max)]

    span = e_max - e_min
    min_width = 1e-6 * max(span, 1e-6)
    peak_lower = [0.0, e_min, min_width, -MAX_SKEW]
    peak_upper = [np.inf, e_max, span, MAX_SKEW]
    lower = np.array(peak_lower + peak_lower + [-np.inf])
    upper = np.array(peak_upper + peak_upper + [np.inf])

    results = []
    for seed in seeds:
        problem = FitProblem(
            residual=lambda p: _two_peak_model(p, energies) - values,
            initial=np.clip(_pack(seed), lower, upper),
            lower=lower,
            upper=upper,
            max_iterations=max_iterations,
        )
        results.append(least_squares(problem))
    converged = [r for r in results if r.converged]
    if not converged:
        result = results[0]
        raise FitFailedError(
            f"two-peak fit {result.status.value} after {result.iterations} iterations",
            diagnostics=result.to_dict(),
        )
    result = min(converged, key=lambda r: r.cost)

    a_u, e_u, w_u, b_u, a_l, e_l, w_l, b_l, base = (float(v) for v in result.params)
    first = SkewedGaussianPeak(a_u, e_u, w_u, b_u)
    second = SkewedGaussianPeak(a_l, e_l, w_l, b_l)
    if abs(first.center - second.center) < min(first.width, second.width) / 10:
        raise DegenerateFitError(
            f"peaks collapsed at {first.center:.4f} / {second.center:.4f} eV"
        )
    if first.center < second.center:
        first, second = second, first
    fit = TwoPeakFit(upper=first, lower=second, baseline=base, result=result)
    logger.debug(
        "two-peak fit: upper %.4f eV, lower %.4f eV, cost %.3e",
        first.center,
        second.center,
        result.cost,
    )
    return fit


def relative_strengths(fit: TwoPeakFit) -> Tuple[float, float]:
    """
    Normalized integrated strengths (upper, lower); they sum to exactly 1.

    Raises:
        UndefinedRatioError: both areas are zero
    """
    area_u, area_l = peak_area(fit.upper), peak_area(fit.lower)
    total = area_u + area_l
    if total <= 0:
        raise UndefinedRatioError("both peak areas are zero")
    # the complement of the larger share is exact in floating point
    if area_u >= area_l:
        upper = area_u / total
        return upper, 1.0 - upper
    lower = area_l / total
    return 1.0 - lower, lower
