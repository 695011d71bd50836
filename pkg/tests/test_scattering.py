import numpy as np
import pytest

from polariscope.core.analysis import DetuningRecord, DetuningSeries, hopfield_regression
from polariscope.core.errors import AlignmentError, InvalidLawError, UnphysicalBalanceError
from polariscope.core.fitting import fit_two_peaks, relative_strengths
from polariscope.core.optics import Channel, Spectrum, energy_grid
from polariscope.core.polaritons import (
    CoupledOscillatorParams,
    ScatteringLaw,
    absorption_overestimate,
    clip_to_budget,
    empty_cavity_scattering,
    energy_balance,
    hopfield_photon_weights,
    polariton_energies,
    scattering_strengths,
    synthesize_scattering,
    uncoupled_film_scattering,
)

NOISELESS = ScatteringLaw(noise_floor=0.0)


def flat(grid, value, channel):
    return Spectrum(grid, np.full(grid.size, value), channel)


def test_resonant_branches_scatter_equally():
    p = CoupledOscillatorParams(e_c=2.11)
    assert scattering_strengths(p, NOISELESS) == pytest.approx((0.5, 0.5))


def test_strengths_follow_photon_weight():
    p = CoupledOscillatorParams.from_detuning(0.1)
    assert scattering_strengths(p, NOISELESS) == pytest.approx(
        hopfield_photon_weights(0.1, 0.075)
    )


def test_flat_law_ignores_detuning():
    law = ScatteringLaw(slope=0.0, offset_upper=0.3, offset_lower=0.3)
    for detuning in (-0.2, 0.0, 0.15):
        p = CoupledOscillatorParams.from_detuning(detuning)
        assert scattering_strengths(p, law) == pytest.approx((0.5, 0.5))


def test_noiseless_spectrum_peaks_at_total(grid):
    spectrum = synthesize_scattering(CoupledOscillatorParams(e_c=2.11), NOISELESS, grid)
    assert spectrum.channel is Channel.SCATTERING
    assert spectrum.values.max() == pytest.approx(0.25, abs=1e-12)
    assert spectrum.values.min() >= 0.0


def test_noise_stays_within_the_floor(grid, rng):
    law = ScatteringLaw(noise_floor=0.03)
    p = CoupledOscillatorParams.from_detuning(-0.1)
    clean = synthesize_scattering(p, NOISELESS, grid)
    noisy = synthesize_scattering(p, law, grid, rng)
    difference = noisy.values - clean.values
    assert difference.min() >= 0.0
    assert difference.max() < 0.03


def test_same_seed_same_spectrum(grid):
    law = ScatteringLaw()
    p = CoupledOscillatorParams.from_detuning(0.05)
    first = synthesize_scattering(p, law, grid, np.random.default_rng(7))
    second = synthesize_scattering(p, law, grid, np.random.default_rng(7))
    np.testing.assert_array_equal(first.values, second.values)


@pytest.mark.parametrize(
    "kwargs",
    [
        {"total": 1.5},
        {"noise_floor": 0.1},
        {"width": 0.0},
    ],
)
def test_invalid_laws_are_rejected(kwargs):
    with pytest.raises(InvalidLawError):
        ScatteringLaw(**kwargs)


def test_negative_branch_area_is_rejected():
    law = ScatteringLaw(offset_upper=-1.0)
    with pytest.raises(InvalidLawError):
        scattering_strengths(CoupledOscillatorParams(e_c=2.11), law)
    with pytest.raises(InvalidLawError):
        scattering_strengths(CoupledOscillatorParams(e_c=2.11), ScatteringLaw(slope=0.0))


def test_balance_without_scattering(grid):
    absorbance = energy_balance(
        flat(grid, 0.5, Channel.REFLECTANCE),
        flat(grid, 0.28, Channel.TRANSMITTANCE),
        flat(grid, 0.0, Channel.SCATTERING),
    )
    np.testing.assert_allclose(absorbance.values, 0.22, atol=1e-12)


def test_balance_with_no_absorption_left(grid):
    absorbance = energy_balance(
        flat(grid, 0.5, Channel.REFLECTANCE),
        flat(grid, 0.2, Channel.TRANSMITTANCE),
        flat(grid, 0.3, Channel.SCATTERING),
    )
    np.testing.assert_allclose(absorbance.values, 0.0, atol=1e-12)


def test_balance_keeps_rounding_noise_in_the_absorbance(grid):
    reflectance = flat(grid, 0.6, Channel.REFLECTANCE)
    transmittance = flat(grid, 0.0, Channel.TRANSMITTANCE)
    scattering = flat(grid, 0.4 + 5e-7, Channel.SCATTERING)
    absorbance = energy_balance(reflectance, transmittance, scattering)
    assert absorbance.values.min() < 0.0
    total = reflectance.values + transmittance.values + scattering.values + absorbance.values
    np.testing.assert_allclose(total, 1.0, rtol=0, atol=1e-15)


def test_balance_rejects_excess_power(grid):
    with pytest.raises(UnphysicalBalanceError):
        energy_balance(
            flat(grid, 0.6, Channel.REFLECTANCE),
            flat(grid, 0.2, Channel.TRANSMITTANCE),
            flat(grid, 0.3, Channel.SCATTERING),
        )


def test_balance_needs_a_shared_grid(grid):
    shifted = grid + 0.0005
    with pytest.raises(AlignmentError):
        energy_balance(
            flat(grid, 0.5, Channel.REFLECTANCE),
            flat(grid, 0.2, Channel.TRANSMITTANCE),
            flat(shifted, 0.1, Channel.SCATTERING),
        )


def test_clip_keeps_scattering_within_budget(grid):
    reflectance = flat(grid, 0.7, Channel.REFLECTANCE)
    transmittance = flat(grid, 0.1, Channel.TRANSMITTANCE)
    scattering = synthesize_scattering(CoupledOscillatorParams(e_c=2.11), NOISELESS, grid)
    clipped = clip_to_budget(scattering, reflectance, transmittance)
    assert clipped.values.max() == pytest.approx(0.2)
    energy_balance(reflectance, transmittance, clipped)


def test_ignoring_scattering_overestimates_absorption(grid):
    scattering = synthesize_scattering(CoupledOscillatorParams(e_c=2.11), NOISELESS, grid)
    estimate = absorption_overestimate(
        flat(grid, 0.5, Channel.REFLECTANCE),
        flat(grid, 0.1, Channel.TRANSMITTANCE),
        scattering,
    )
    assert estimate.max_overestimate == pytest.approx(0.25, abs=1e-12)
    np.testing.assert_allclose(
        estimate.naive - estimate.corrected, scattering.values, atol=1e-12
    )


def test_bare_film_peaks_at_the_exciton(grid):
    film = uncoupled_film_scattering(2.11, 0.04, 0.18, grid)
    energy, value = film.peak()
    assert energy == pytest.approx(2.11, abs=1e-9)
    assert value == pytest.approx(0.18, abs=1e-12)


def test_bare_film_without_scattering(grid):
    film = uncoupled_film_scattering(2.11, 0.04, 0.0, grid)
    assert np.all(film.values == 0.0)
    with pytest.raises(InvalidLawError):
        uncoupled_film_scattering(2.11, 0.04, 1.2, grid)


def test_empty_cavity_is_noise_only(grid, rng):
    spectrum = empty_cavity_scattering(grid, 0.03, rng)
    assert spectrum.values.min() >= 0.0
    assert spectrum.values.max() < 0.03


def test_fitted_strengths_track_photon_weight():
    grid = energy_grid(1.7, 2.5, 0.001)
    rng = np.random.default_rng(2024)
    law = ScatteringLaw(noise_floor=0.03, skew_upper=0.3, skew_lower=-0.3)
    records, strengths = [], []
    for detuning in np.linspace(-0.15, 0.15, 9):
        p = CoupledOscillatorParams.from_detuning(float(detuning))
        fit = fit_two_peaks(synthesize_scattering(p, law, grid, rng))
        fitted = relative_strengths(fit)
        np.testing.assert_allclose(fitted, scattering_strengths(p, law), atol=0.02)
        e_plus, e_minus = polariton_energies(p)
        records.append(DetuningRecord(float(detuning), e_plus.real, e_minus.real))
        strengths.append(fitted)
    series = DetuningSeries(tuple(records)).with_strengths(strengths)
    pooled = hopfield_regression(series, 0.075)["pooled"]
    assert pooled.slope == pytest.approx(1.0, abs=0.05)
    assert pooled.intercept == pytest.approx(0.0, abs=0.03)


def test_lower_branch_dominates_at_negative_detuning(grid):
    p = CoupledOscillatorParams.from_detuning(-0.1)
    fit = fit_two_peaks(synthesize_scattering(p, NOISELESS, grid))
    _, lower = relative_strengths(fit)
    assert lower > 0.5
