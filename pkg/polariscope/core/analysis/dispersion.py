"""
Multi-sample dispersion analysis: branch extraction, coupling fits, Hopfield
regressions of scattering strengths and the square-root concentration law
"""

import logging
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy import stats

from ..errors import (
    AlignmentError,
    FitFailedError,
    InsufficientDataError,
    NoCrossingError,
    UnresolvedSplittingError,
)
from ..fitting.least_squares import FitProblem, FitResult, least_squares
from ..optics.spectrum import Spectrum, locate_extrema
from ..polaritons.oscillator import branch_energies, hopfield_photon_weights

logger = logging.getLogger(__name__)

DIP_REL_PROMINENCE = 0.02
PEAK_REL_PROMINENCE = 0.15

DEFAULT_E_X = 2.11
DEFAULT_GAMMA_C = 0.060
DEFAULT_GAMMA_X = 0.040


class ExtractionMode(Enum):
    """Which extrema mark the polariton branches"""

    DIPS = "dips"
    PEAKS = "peaks"


@dataclass(frozen=True)
class DetuningRecord:
    """
    Branch energies measured at one detuning.

    Attributes:
        detuning: E_c - E_x (eV)
        e_upper: upper polariton energy (eV)
        e_lower: lower polariton energy (eV)
        sigma_u: relative scattering strength of the upper branch
        sigma_l: relative scattering strength of the lower branch
        e_cavity: known cavity energy, when it comes from a simulation
        label: free-form tag (thickness, concentration, file name)
    """

    detuning: float
    e_upper: float
    e_lower: float
    sigma_u: Optional[float] = None
    sigma_l: Optional[float] = None
    e_cavity: Optional[float] = None
    label: str = ""

    def __post_init__(self):
        if not self.e_upper > self.e_lower:
            raise ValueError(
                f"record {self.label or self.detuning}: e_upper must exceed e_lower"
            )
        if (self.sigma_u is None) != (self.sigma_l is None):
            raise ValueError("sigma_u and sigma_l must be given together")

    @property
    def has_strengths(self) -> bool:
        return self.sigma_u is not None

    @property
    def splitting(self) -> float:
        return self.e_upper - self.e_lower

    def to_dict(self) -> Dict:
        return {
            "detuning_ev": self.detuning,
            "e_upper_ev": self.e_upper,
            "e_lower_ev": self.e_lower,
            "sigma_u": self.sigma_u,
            "sigma_l": self.sigma_l,
            "e_cavity_ev": self.e_cavity,
            "label": self.label,
        }


@dataclass(frozen=True)
class DetuningSeries:
    """Records ordered as measured; detunings must be distinct"""

    records: Tuple[DetuningRecord, ...]

    def __post_init__(self):
        records = tuple(self.records)
        object.__setattr__(self, "records", records)
        detunings = [r.detuning for r in records]
        if len(set(detunings)) != len(detunings):
            raise ValueError("detuning values must be distinct")

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    @classmethod
    def from_arrays(
        cls,
        detunings: Sequence[float],
        e_upper: Sequence[float],
        e_lower: Sequence[float],
        sigma_u: Optional[Sequence[float]] = None,
        sigma_l: Optional[Sequence[float]] = None,
    ) -> "DetuningSeries":
        count = len(detunings)
        su = list(sigma_u) if sigma_u is not None else [None] * count
        sl = list(sigma_l) if sigma_l is not None else [None] * count
        return cls(
            tuple(
                DetuningRecord(float(d), float(u), float(lo), s_u, s_l)
                for d, u, lo, s_u, s_l in zip(detunings, e_upper, e_lower, su, sl)
            )
        )

    @property
    def detunings(self) -> np.ndarray:
        return np.array([r.detuning for r in self.records], dtype=float)

    @property
    def uppers(self) -> np.ndarray:
        return np.array([r.e_upper for r in self.records], dtype=float)

    @property
    def lowers(self) -> np.ndarray:
        return np.array([r.e_lower for r in self.records], dtype=float)

    @property
    def has_strengths(self) -> bool:
        return bool(self.records) and all(r.has_strengths for r in self.records)

    def sorted(self) -> "DetuningSeries":
        return DetuningSeries(tuple(sorted(self.records, key=lambda r: r.detuning)))

    def with_strengths(
        self, strengths: Iterable[Tuple[float, float]]
    ) -> "DetuningSeries":
        records = [
            replace(r, sigma_u=float(u), sigma_l=float(lo))
            for r, (u, lo) in zip(self.records, strengths)
        ]
        return DetuningSeries(tuple(records))


@dataclass(frozen=True)
class HopfieldRegression:
    """Ordinary least-squares line sigma = slope * photon_weight + intercept"""

    slope: float
    intercept: float
    residual_rms: float
    r_squared: float
    photon_weights: np.ndarray = field(repr=False)
    strengths: np.ndarray = field(repr=False)

    def to_dict(self) -> Dict:
        return {
            "slope": self.slope,
            "intercept": self.intercept,
            "residual_rms": self.residual_rms,
            "r_squared": self.r_squared,
            "points": [
                {"photon_weight": float(w), "sigma": float(s)}
                for w, s in zip(self.photon_weights, self.strengths)
            ],
        }


@dataclass(frozen=True)
class CouplingFit:
    """Coupling strength V fitted to both branches of a detuning series"""

    coupling: float
    cavity_energies: np.ndarray
    residual_rms: float
    result: FitResult
    free_cavity: bool = False

    def to_dict(self) -> Dict:
        return {
            "coupling_ev": self.coupling,
            "coupling_uncertainty_ev": float(self.result.uncertainty[0]),
            "cavity_energies_ev": [float(e) for e in self.cavity_energies],
            "residual_rms_ev": self.residual_rms,
            "free_cavity": self.free_cavity,
            "fit": self.result.to_dict(),
        }


@dataclass(frozen=True)
class SqrtLawFit:
    """Linear fit of a splitting against the square root of concentration"""

    slope: float
    intercept: float
    r_squared: float
    concentrations: np.ndarray = field(repr=False)
    splittings: np.ndarray = field(repr=False)

    def to_dict(self) -> Dict:
        return {
            "slope_ev_per_sqrt_mm": self.slope,
            "intercept_ev": self.intercept,
            "r_squared": self.r_squared,
        }


@dataclass(frozen=True)
class PeakDipShift:
    """Scattering-peak minus reflectance-dip energies per branch (eV)"""

    upper: np.ndarray
    lower: np.ndarray

    @property
    def mean_upper(self) -> float:
        return float(np.mean(self.upper))

    @property
    def mean_lower(self) -> float:
        return float(np.mean(self.lower))

    def to_dict(self) -> Dict:
        return {
            "mean_upper_ev": self.mean_upper,
            "mean_lower_ev": self.mean_lower,
            "upper_ev": [float(v) for v in self.upper],
            "lower_ev": [float(v) for v in self.lower],
        }


def extract_branch_energies(
    spectrum: Spectrum,
    mode: ExtractionMode = ExtractionMode.DIPS,
    rel_prominence: Optional[float] = None,
) -> Tuple[float, float]:
    """
    Polariton energies read off a spectrum.

    Dips mode takes the two deepest minima (reflectance), peaks mode the
    two highest maxima (scattering), both refined below the grid step.

    Returns:
        (e_upper, e_lower)

    Raises:
        UnresolvedSplittingError: fewer than two extrema
    """
    mode = ExtractionMode(mode)
    minima = mode is ExtractionMode.DIPS
    if rel_prominence is None:
        rel_prominence = DIP_REL_PROMINENCE if minima else PEAK_REL_PROMINENCE
    extrema = locate_extrema(spectrum, minima=minima, rel_prominence=rel_prominence)
    if len(extrema) < 2:
        raise UnresolvedSplittingError(
            f"found {len(extrema)} {mode.value}, need two to resolve the splitting"
        )
    ranked = sorted(extrema, key=lambda x: x.value, reverse=not minima)[:2]
    energies = sorted(x.energy for x in ranked)
    return energies[1], energies[0]


def _known_cavity_energies(series: DetuningSeries, e_x: float) -> np.ndarray:
    return np.array(
        [r.e_cavity if r.e_cavity is not None else e_x + r.detuning for r in series],
        dtype=float,
    )


def fit_coupling(
    series: DetuningSeries,
    e_x: float = DEFAULT_E_X,
    gamma_c: float = DEFAULT_GAMMA_C,
    gamma_x: float = DEFAULT_GAMMA_X,
    free_cavity: Optional[bool] = None,
    max_iterations: int = 500,
) -> CouplingFit:
    """
    Fit the coupled-oscillator real parts to both measured branches.

    With free_cavity the cavity energy of every record is fitted along with
    V; otherwise it is taken from the record (e_cavity, else E_x + detuning).
    The default frees the cavity energies when any record lacks e_cavity.

    Raises:
        InsufficientDataError: fewer than 3 records
        FitFailedError: least squares did not converge
    """
    if len(series) < 3:
        raise InsufficientDataError(
            f"coupling fit needs >= 3 detunings, got {len(series)}"
        )
    if free_cavity is None:
        free_cavity = any(r.e_cavity is None for r in series)

    uppers, lowers = series.uppers, series.lowers
    measured = np.concatenate([uppers, lowers])
    known = _known_cavity_energies(series, e_x)
    v_start = max(0.5 * float(np.min(uppers - lowers)), 1e-4)

    def model(params: np.ndarray) -> np.ndarray:
        cavity = params[1:] if free_cavity else known
        upper, lower = branch_energies(cavity, e_x, params[0], gamma_c, gamma_x)
        return np.concatenate([upper, lower])

    if free_cavity:
        start = np.concatenate([[v_start], known])
        lower_bounds = np.concatenate([[0.0], np.full(len(series), 1e-3)])
        upper_bounds = np.concatenate([[1.0], np.full(len(series), 10.0)])
    else:
        start = np.array([v_start])
        lower_bounds, upper_bounds = np.array([0.0]), np.array([1.0])

    problem = FitProblem(
        residual=lambda p: model(p) - measured,
        initial=np.clip(start, lower_bounds, upper_bounds),
        lower=lower_bounds,
        upper=upper_bounds,
        max_iterations=max_iterations,
    )
    result = least_squares(problem)
    if not result.converged:
        raise FitFailedError(
            f"coupling fit {result.status.value} after {result.iterations} iterations",
            diagnostics=result.to_dict(),
        )
    residual_rms = math.sqrt(2 * result.cost / measured.size)
    cavity = result.params[1:].copy() if free_cavity else known
    logger.info(
        "coupling V = %.2f meV over %d detunings (rms %.2f meV)",
        1e3 * result.params[0],
        len(series),
        1e3 * residual_rms,
    )
    return CouplingFit(
        coupling=float(result.params[0]),
        cavity_energies=cavity,
        residual_rms=residual_rms,
        result=result,
        free_cavity=bool(free_cavity),
    )


def _regress(weights: np.ndarray, strengths: np.ndarray) -> HopfieldRegression:
    line = stats.linregress(weights, strengths)
    predicted = line.slope * weights + line.intercept
    rms = float(np.sqrt(np.mean((strengths - predicted) ** 2)))
    return HopfieldRegression(
        slope=float(line.slope),
        intercept=float(line.intercept),
        residual_rms=rms,
        r_squared=float(line.rvalue**2),
        photon_weights=weights,
        strengths=strengths,
    )


def hopfield_regression(
    series: DetuningSeries, coupling: float
) -> Dict[str, HopfieldRegression]:
    """
    Regress relative scattering strength on photon weight.

    Returns:
        regressions keyed "upper", "lower" and "pooled" (both branches)

    Raises:
        InsufficientDataError: fewer than 2 records, or records without
            strengths
    """
    if coupling <= 0:
        raise ValueError("coupling must be > 0")
    if len(series) < 2:
        raise InsufficientDataError(
            f"regression needs >= 2 records, got {len(series)}"
        )
    if not series.has_strengths:
        raise InsufficientDataError("series has no scattering strengths")

    weights = np.array(
        [hopfield_photon_weights(r.detuning, coupling) for r in series], dtype=float
    )
    sigma_u = np.array([r.sigma_u for r in series], dtype=float)
    sigma_l = np.array([r.sigma_l for r in series], dtype=float)
    return {
        "upper": _regress(weights[:, 0], sigma_u),
        "lower": _regress(weights[:, 1], sigma_l),
        "pooled": _regress(
            np.concatenate([weights[:, 0], weights[:, 1]]),
            np.concatenate([sigma_u, sigma_l]),
        ),
    }


def find_crossing_detuning(series: DetuningSeries) -> float:
    """
    Detuning at which the two relative strengths are equal, by linear
    interpolation of sigma_u - sigma_l between the bracketing records.

    Raises:
        InsufficientDataError: records without strengths
        NoCrossingError: the difference never changes sign
    """
    if not series.has_strengths:
        raise InsufficientDataError("series has no scattering strengths")
    ordered = series.sorted().records
    detunings = np.array([r.detuning for r in ordered])
    difference = np.array([r.sigma_u - r.sigma_l for r in ordered])
    for i, value in enumerate(difference):
        if value == 0:
            return float(detunings[i])
        if i + 1 < len(difference) and value * difference[i + 1] < 0:
            d0, d1 = detunings[i], detunings[i + 1]
            v0, v1 = value, difference[i + 1]
            return float(d0 - v0 * (d1 - d0) / (v1 - v0))
    raise NoCrossingError("sigma_u - sigma_l keeps one sign over the series")


def fit_sqrt_concentration(
    concentrations: Sequence[float], splittings: Sequence[float]
) -> SqrtLawFit:
    """
    Straight-line fit of the splitting against sqrt(concentration).

    Raises:
        InsufficientDataError: fewer than 2 points
    """
    conc = np.asarray(concentrations, dtype=float)
    split = np.asarray(splittings, dtype=float)
    if conc.size != split.size:
        raise ValueError("concentrations and splittings differ in length")
    if conc.size < 2:
        raise InsufficientDataError("square-root law fit needs >= 2 points")
    if np.any(conc < 0):
        raise ValueError("concentrations must be >= 0")
    line = stats.linregress(np.sqrt(conc), split)
    return SqrtLawFit(
        slope=float(line.slope),
        intercept=float(line.intercept),
        r_squared=float(line.rvalue**2),
        concentrations=conc,
        splittings=split,
    )


def peak_dip_shift(dips: DetuningSeries, peaks: DetuningSeries) -> PeakDipShift:
    """
    Scattering-peak minus reflectance-dip energy for every detuning
    present in both series.

    Raises:
        AlignmentError: the series share no detuning
    """
    by_detuning = {round(r.detuning, 9): r for r in dips}
    upper: List[float] = []
    lower: List[float] = []
    for record in peaks:
        match = by_detuning.get(round(record.detuning, 9))
        if match is None:
            continue
        upper.append(record.e_upper - match.e_upper)
        lower.append(record.e_lower - match.e_lower)
    if not upper:
        raise AlignmentError("dip and peak series share no detuning")
    return PeakDipShift(upper=np.array(upper), lower=np.array(lower))
