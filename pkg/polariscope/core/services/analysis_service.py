"""
Inverse analyses on measured or synthesized files: two-peak scattering
fits, coupling fits to a detuning series and the Hopfield regression
"""

import asyncio
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np

from ..analysis.dispersion import (
    CouplingFit,
    DetuningSeries,
    HopfieldRegression,
    find_crossing_detuning,
    fit_coupling,
    hopfield_regression,
)
from ..config.config import RunConfig
from ..errors import AnalysisError, NoCrossingError
from ..fitting.lineshape import TwoPeakFit, fit_two_peaks, peak_maximum, relative_strengths
from ..optics.spectrum import Channel, Spectrum
from ..persistence.series_io import read_series_csv
from ..persistence.spectrum_io import read_spectrum_csv
from ..polaritons.oscillator import branch_energies, hopfield_photon_weights

logger = logging.getLogger(__name__)


@dataclass
class SpectrumFitReport:
    fit: TwoPeakFit
    sigma_upper: float
    sigma_lower: float
    model: Spectrum

    def to_dict(self) -> Dict:
        return {
            **self.fit.to_dict(),
            "peak_maxima_ev": {
                "upper": peak_maximum(self.fit.upper),
                "lower": peak_maximum(self.fit.lower),
            },
            "relative_strengths": {"upper": self.sigma_upper, "lower": self.sigma_lower},
        }

    @property
    def apex_splitting(self) -> float:
        """Separation of the two peak maxima"""
        return peak_maximum(self.fit.upper) - peak_maximum(self.fit.lower)


@dataclass
class DispersionReport:
    fit: CouplingFit
    points: List[Dict] = field(default_factory=list)

    def to_dict(self) -> Dict:
        return {**self.fit.to_dict(), "points": self.points}


@dataclass
class HopfieldReport:
    coupling: float
    regressions: Dict[str, HopfieldRegression]
    crossing_detuning: Optional[float] = None

    def to_dict(self) -> Dict:
        return {
            "coupling_ev": self.coupling,
            "crossing_detuning_ev": self.crossing_detuning,
            "crossing_found": self.crossing_detuning is not None,
            **{name: r.to_dict() for name, r in self.regressions.items()},
        }

    def plot_csv(self) -> str:
        """photon weight against relative strength, one row per branch point"""
        lines = ["branch,photon_weight,sigma"]
        for branch in ("upper", "lower"):
            r = self.regressions[branch]
            lines += [
                f"{branch},{w:.17g},{s:.17g}"
                for w, s in zip(r.photon_weights, r.strengths)
            ]
        return "\n".join(lines) + "\n"


def fit_spectrum(spectrum: Spectrum, max_iterations: int = 500) -> SpectrumFitReport:
    """Two-peak fit of one scattering spectrum plus the branch strengths"""
    fit = fit_two_peaks(spectrum, max_iterations=max_iterations)
    sigma_u, sigma_l = relative_strengths(fit)
    model = Spectrum(spectrum.energies, fit.evaluate(spectrum.energies), Channel.RAW)
    return SpectrumFitReport(fit, sigma_u, sigma_l, model)


async def fit_spectrum_file(path: Path, config: RunConfig) -> SpectrumFitReport:
    spectrum = read_spectrum_csv(path).to_spectrum()
    report = await asyncio.to_thread(fit_spectrum, spectrum, config.fit.max_iterations)
    logger.info(
        "peaks at %.4f / %.4f eV, strengths %.3f / %.3f",
        report.fit.upper.center,
        report.fit.lower.center,
        report.sigma_upper,
        report.sigma_lower,
    )
    return report


def analyze_dispersion(series: DetuningSeries, config: RunConfig) -> DispersionReport:
    """
    Coupling fit plus, per record, the fitted branches and the photon
    weights implied by the fitted cavity energy.
    """
    osc = config.oscillator
    fit = fit_coupling(
        series,
        e_x=osc.e_x,
        gamma_c=osc.gamma_c,
        gamma_x=osc.gamma_x,
        free_cavity=config.fit.free_cavity,
        max_iterations=config.fit.max_iterations,
    )
    fitted_upper, fitted_lower = branch_energies(
        fit.cavity_energies, osc.e_x, fit.coupling, osc.gamma_c, osc.gamma_x
    )
    points = []
    for i, record in enumerate(series):
        delta = float(fit.cavity_energies[i]) - osc.e_x
        if fit.coupling > 0 or delta != 0:
            w_u, w_l = hopfield_photon_weights(delta, fit.coupling)
        else:
            w_u = w_l = None
        points.append(
            {
                **record.to_dict(),
                "fitted_upper_ev": float(fitted_upper[i]),
                "fitted_lower_ev": float(fitted_lower[i]),
                "photon_weight_upper": w_u,
                "photon_weight_lower": w_l,
            }
        )
    return DispersionReport(fit, points)


async def fit_dispersion_file(path: Path, config: RunConfig) -> DispersionReport:
    series = read_series_csv(path)
    return await asyncio.to_thread(analyze_dispersion, series, config)


def analyze_hopfield(series: DetuningSeries, coupling: float) -> HopfieldReport:
    """
    Regression of strengths on photon weights. A missing crossing is
    recorded as None.
    """
    regressions = hopfield_regression(series, coupling)
    try:
        crossing = find_crossing_detuning(series)
    except NoCrossingError as e:
        logger.info("no crossing detuning: %s", e)
        crossing = None
    return HopfieldReport(coupling, regressions, crossing)


async def hopfield_file(path: Path, coupling: float) -> HopfieldReport:
    series = read_series_csv(path)
    return await asyncio.to_thread(analyze_hopfield, series, coupling)


def strengths_series(series: DetuningSeries, fits: List[SpectrumFitReport]) -> DetuningSeries:
    """Attach fitted relative strengths to a series, record by record"""
    return series.with_strengths((f.sigma_upper, f.sigma_lower) for f in fits)


def peak_series(series: DetuningSeries, fits: List[SpectrumFitReport]) -> DetuningSeries:
    """Branch energies read from the apex of each fitted scattering peak"""
    return DetuningSeries.from_arrays(
        series.detunings,
        np.array([peak_maximum(f.fit.upper) for f in fits]),
        np.array([peak_maximum(f.fit.lower) for f in fits]),
    )


async def fit_spectra(
    spectra: List[Spectrum], max_iterations: int = 500, skip_failures: bool = False
) -> List[Optional[SpectrumFitReport]]:
    """
    Fit several scattering spectra concurrently, keeping their order.

    With skip_failures a spectrum whose fit fails yields None instead of
    raising.
    """

    def attempt(spectrum: Spectrum) -> Optional[SpectrumFitReport]:
        try:
            return fit_spectrum(spectrum, max_iterations)
        except AnalysisError as e:
            if not skip_failures:
                raise
            logger.warning("two-peak fit skipped: %s", e)
            return None

    tasks = [asyncio.to_thread(attempt, s) for s in spectra]
    return list(await asyncio.gather(*tasks))
