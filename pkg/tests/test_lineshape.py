import math

import numpy as np
import pytest

from polariscope.core.errors import (
    DegenerateFitError,
    InsufficientDataError,
    UndefinedRatioError,
)
from polariscope.core.fitting import (
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
from polariscope.core.optics import Spectrum

TRUTH = TwoPeakFit(
    upper=SkewedGaussianPeak(0.8, 2.18, 0.04, 0.6),
    lower=SkewedGaussianPeak(1.0, 2.04, 0.045, -0.4),
    baseline=0.01,
)


def truth_spectrum(grid):
    return Spectrum(grid, TRUTH.evaluate(grid))


def parameters(fit):
    return np.array(fit.upper.as_tuple() + fit.lower.as_tuple() + (fit.baseline,))


def test_erf_reference_values():
    assert erf(0.0) == 0.0
    assert erf(1.0) == pytest.approx(0.8427007929, abs=1.5e-7)
    assert erf(6.0) == pytest.approx(1.0, abs=1.5e-7)
    x = np.linspace(-4.0, 4.0, 81)
    np.testing.assert_array_equal(erf(-x), -erf(x))


def test_eval_peak_reference_value():
    value = eval_peak(SkewedGaussianPeak(1.0, 0.0, 1.0, 1.0), 1.0)
    expected = math.exp(-1.0) * (1.0 + math.erf(1.0 / math.sqrt(2.0)))
    assert value == pytest.approx(expected, abs=1e-6)
    assert value == pytest.approx(0.61903, abs=1e-5)


@pytest.mark.parametrize("skew", [-2.0, -1.0, 0.0, 0.5, 2.0])
def test_peak_area_is_independent_of_skew(skew):
    peak = SkewedGaussianPeak(0.7, 2.1, 0.04, skew)
    assert peak_area(peak) == pytest.approx(0.7 * 0.04 * math.sqrt(math.pi), rel=1e-8)


def test_peak_maximum_moves_with_skew():
    assert peak_maximum(SkewedGaussianPeak(1.0, 2.1, 0.04, 0.0)) == 2.1
    assert peak_maximum(SkewedGaussianPeak(1.0, 2.1, 0.04, 1.5)) > 2.1
    assert peak_maximum(SkewedGaussianPeak(1.0, 2.1, 0.04, -1.5)) < 2.1


def test_invalid_peaks_are_rejected():
    with pytest.raises(ValueError):
        SkewedGaussianPeak(1.0, 2.1, 0.0)
    with pytest.raises(ValueError):
        SkewedGaussianPeak(-1.0, 2.1, 0.04)
    with pytest.raises(ValueError):
        TwoPeakFit(
            upper=SkewedGaussianPeak(1.0, 2.0, 0.04),
            lower=SkewedGaussianPeak(1.0, 2.1, 0.04),
        )


def test_initial_guess_finds_both_peaks(grid):
    guess = initial_two_peak_guess(truth_spectrum(grid))
    assert guess.upper.center == pytest.approx(2.18, abs=0.02)
    assert guess.lower.center == pytest.approx(2.04, abs=0.02)
    symmetric = initial_two_peak_guess(truth_spectrum(grid), skewed=False)
    assert symmetric.upper.skew == symmetric.lower.skew == 0.0


def test_initial_guess_reads_the_skew_from_the_data(grid):
    lopsided = TwoPeakFit(
        upper=SkewedGaussianPeak(1.0, 2.25, 0.03, 2.5),
        lower=SkewedGaussianPeak(1.0, 1.95, 0.03, -2.5),
    )
    guess = initial_two_peak_guess(Spectrum(grid, lopsided.evaluate(grid)))
    assert guess.upper.skew > 0.5
    assert guess.lower.skew < -0.5
    assert guess.upper.center == pytest.approx(2.25, abs=5e-3)
    assert guess.lower.center == pytest.approx(1.95, abs=5e-3)


def test_noiseless_fit_recovers_every_parameter(grid):
    spectrum = truth_spectrum(grid)
    fit = fit_two_peaks(spectrum)
    assert fit.result.converged
    np.testing.assert_allclose(parameters(fit), parameters(TRUTH), rtol=1e-6)
    np.testing.assert_allclose(
        relative_strengths(fit), relative_strengths(TRUTH), atol=1e-6
    )


def test_fit_from_a_nearby_start_recovers_every_parameter(grid):
    init = TwoPeakFit(
        upper=SkewedGaussianPeak(0.88, 2.17, 0.044, 0.54),
        lower=SkewedGaussianPeak(0.92, 2.05, 0.041, -0.44),
        baseline=0.011,
    )
    fit = fit_two_peaks(truth_spectrum(grid), init=init)
    np.testing.assert_allclose(parameters(fit), parameters(TRUTH), rtol=1e-6)


def test_noisy_fits_keep_the_centers_within_3_mev(grid):
    clean = TwoPeakFit(
        upper=SkewedGaussianPeak(1.0, 2.18, 0.04),
        lower=SkewedGaussianPeak(1.0, 2.04, 0.04),
    ).evaluate(grid)
    errors = []
    for stream in np.random.SeedSequence(5).spawn(50):
        noise = np.random.default_rng(stream).uniform(-0.02, 0.02, grid.size)
        fit = fit_two_peaks(Spectrum(grid, clean + noise))
        errors += [abs(fit.upper.center - 2.18), abs(fit.lower.center - 2.04)]
    assert np.percentile(errors, 90) <= 3e-3


def test_single_peak_is_degenerate(grid):
    single = eval_peak(SkewedGaussianPeak(1.0, 2.1, 0.04), grid)
    with pytest.raises(DegenerateFitError):
        fit_two_peaks(Spectrum(grid, single))


def test_too_few_points(grid):
    with pytest.raises(InsufficientDataError):
        fit_two_peaks(truth_spectrum(grid[:8]))


def test_initial_centers_must_lie_on_the_grid(grid):
    init = TwoPeakFit(
        upper=SkewedGaussianPeak(1.0, 2.6, 0.04),
        lower=SkewedGaussianPeak(1.0, 2.04, 0.04),
    )
    with pytest.raises(InsufficientDataError):
        fit_two_peaks(truth_spectrum(grid), init=init)


def test_relative_strengths():
    equal = TwoPeakFit(
        upper=SkewedGaussianPeak(1.0, 2.2, 0.04, 1.0),
        lower=SkewedGaussianPeak(1.0, 2.0, 0.04, -1.0),
    )
    assert relative_strengths(equal) == pytest.approx((0.5, 0.5), abs=1e-9)
    weighted = TwoPeakFit(
        upper=SkewedGaussianPeak(3.0, 2.2, 0.04),
        lower=SkewedGaussianPeak(1.0, 2.0, 0.04),
    )
    upper, lower = relative_strengths(weighted)
    assert (upper, lower) == pytest.approx((0.75, 0.25), abs=1e-9)
    assert upper + lower == 1.0


def test_relative_strengths_of_empty_peaks():
    empty = TwoPeakFit(
        upper=SkewedGaussianPeak(0.0, 2.2, 0.04),
        lower=SkewedGaussianPeak(0.0, 2.0, 0.04),
    )
    with pytest.raises(UndefinedRatioError):
        relative_strengths(empty)
