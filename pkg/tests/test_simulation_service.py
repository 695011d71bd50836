import asyncio
from pathlib import Path

import numpy as np
import pytest

from polariscope.core.analysis.dispersion import (
    DetuningSeries,
    ExtractionMode,
    extract_branch_energies,
    fit_sqrt_concentration,
)
from polariscope.core.config import StackRegistry, SweepKind, load_config, parse_config
from polariscope.core.errors import DegenerateFitError
from polariscope.core.optics import Spectrum
from polariscope.core.services import analysis_service, simulation_service

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def test_calibration_hits_the_target_splitting(calibration):
    assert calibration.calibrated
    assert calibration.splitting_ev == pytest.approx(0.140, abs=1e-3)
    assert calibration.concentration_mm == 56.0
    assert calibration.strength_per_mm > 0
    assert 100.0 < calibration.cavity_thickness_nm < 200.0
    assert calibration.to_dict()["calibrated"] is True


def test_disabled_calibration_keeps_the_configured_stack():
    config = load_config(CONFIGS / "lossless_toy.json")
    calibration = simulation_service.calibrate(config)
    assert not calibration.calibrated
    assert calibration.strength_per_mm == 0.0
    assert calibration.cavity_thickness_nm == 100.0


def test_lossless_stack_conserves_energy():
    config = load_config(CONFIGS / "lossless_toy.json")
    result = simulation_service.simulate(config, simulation_service.calibrate(config))
    np.testing.assert_allclose(
        result.reflectance.values + result.transmittance.values, 1.0, atol=1e-10
    )


def test_simulation_balances_every_channel(resonant):
    assert resonant.energy_residual() <= 1e-12
    assert resonant.absorbance.values.min() >= 0.0


def test_thickness_point_keeps_the_thickness(default_config, calibration):
    point = simulation_service.simulate_point(
        default_config, calibration, SweepKind.THICKNESS, 140.0, 3
    )
    assert point.thickness_nm == 140.0
    assert point.label == "point_03"
    assert point.detuning == pytest.approx(point.e_cavity - 2.11)


def test_peak_extraction_reads_the_absorbance(default_config, calibration):
    peaks_config = parse_config('{"version": 1, "fit": {"extraction": "peaks"}}')
    from_peaks = simulation_service.simulate_point(
        peaks_config, calibration, SweepKind.THICKNESS, 140.0, 0
    )
    from_dips = simulation_service.simulate_point(
        default_config, calibration, SweepKind.THICKNESS, 140.0, 0
    )
    expected = extract_branch_energies(from_peaks.absorbance, ExtractionMode.PEAKS)
    assert (from_peaks.e_upper, from_peaks.e_lower) == expected
    assert (from_dips.e_upper, from_dips.e_lower) == extract_branch_energies(
        from_dips.reflectance
    )
    assert from_peaks.e_upper != from_dips.e_upper
    assert from_peaks.e_upper == pytest.approx(from_dips.e_upper, abs=0.02)
    assert from_peaks.e_lower == pytest.approx(from_dips.e_lower, abs=0.02)


def test_undoped_point_is_flagged(default_config, calibration):
    point = simulation_service.simulate_point(
        default_config, calibration, SweepKind.CONCENTRATION, 0.0, 0
    )
    assert not point.resolved
    assert point.flag == "unresolved"
    assert point.splitting is None


def test_detuning_sweep_keeps_the_input_order(default_config, calibration):
    values = [0.05, -0.05, 0.0]
    points = asyncio.run(
        simulation_service.run_sweep(default_config, calibration, SweepKind.DETUNING, values)
    )
    assert [p.index for p in points] == [0, 1, 2]
    assert [p.value for p in points] == values
    for point, value in zip(points, values):
        assert point.detuning == pytest.approx(value, abs=2e-3)
    assert points[1].e_lower < points[2].e_lower < points[0].e_lower


def test_concentration_sweep_follows_the_square_root_law(default_config, calibration):
    concentrations = default_config.sweep.concentrations_mm
    points = asyncio.run(
        simulation_service.run_sweep(
            default_config, calibration, SweepKind.CONCENTRATION, concentrations
        )
    )
    assert all(p.resolved for p in points)
    splittings = [p.splitting for p in points]
    assert splittings == sorted(splittings)
    assert fit_sqrt_concentration(concentrations, splittings).r_squared >= 0.99


def test_thickness_sweep_anticrosses():
    config = load_config(CONFIGS / "thickness_sweep.json")
    calibration = simulation_service.calibrate(config)
    points = asyncio.run(simulation_service.run_sweep(config, calibration))
    series = simulation_service.sweep_series(points)
    assert len(series) >= 3
    detunings = [p.detuning for p in points]
    assert detunings == sorted(detunings, reverse=True)
    assert all(r.label.startswith("point_") for r in series)


def test_series_synthesis_is_seeded(default_config, grid):
    law = StackRegistry.scattering_law(default_config)
    params = [StackRegistry.oscillator_params(default_config, d) for d in (-0.05, 0.05)]
    first = asyncio.run(simulation_service.synthesize_series(params, law, grid, 42))
    second = asyncio.run(simulation_service.synthesize_series(params, law, grid, 42))
    other = asyncio.run(simulation_service.synthesize_series(params, law, grid, 43))
    for a, b in zip(first, second):
        np.testing.assert_array_equal(a.values, b.values)
    assert not np.array_equal(first[0].values, other[0].values)
    assert not np.array_equal(first[0].values, first[1].values)


def test_fixtures(default_config):
    coupled = simulation_service.scattering_fixture(default_config, "coupled", 0)
    assert coupled.values.max() == pytest.approx(0.25)
    film = simulation_service.scattering_fixture(default_config, "bare-film", 0)
    assert film.peak()[0] == pytest.approx(2.11, abs=1e-9)
    empty = simulation_service.scattering_fixture(default_config, "empty-cavity", 5)
    assert empty.values.max() < 0.03
    with pytest.raises(ValueError):
        simulation_service.scattering_fixture(default_config, "galaxy", 0)


def test_resonant_fixture_scatters_equally(default_config):
    spectrum = simulation_service.scattering_fixture(default_config, "coupled", 0)
    report = analysis_service.fit_spectrum(spectrum)
    assert report.sigma_upper == pytest.approx(0.5, abs=1e-3)
    assert report.apex_splitting == pytest.approx(0.149666, abs=1e-3)
    assert report.to_dict()["relative_strengths"]["upper"] == report.sigma_upper


def test_failed_fits_can_be_skipped(default_config):
    film = simulation_service.scattering_fixture(default_config, "bare-film", 0)
    coupled = simulation_service.scattering_fixture(default_config, "coupled", 0)
    reports = asyncio.run(
        analysis_service.fit_spectra([film, coupled], skip_failures=True)
    )
    assert reports[0] is None
    assert reports[1] is not None
    with pytest.raises(DegenerateFitError):
        asyncio.run(analysis_service.fit_spectra([film]))


def test_hopfield_report_without_crossing(default_config):
    series = DetuningSeries.from_arrays(
        [-0.1, 0.0, 0.1], [2.16, 2.185, 2.23], [1.99, 2.035, 2.06],
        [0.6, 0.7, 0.8], [0.4, 0.3, 0.2],
    )
    report = analysis_service.analyze_hopfield(series, 0.075)
    assert report.crossing_detuning is None
    assert report.to_dict()["crossing_found"] is False
    lines = report.plot_csv().splitlines()
    assert lines[0] == "branch,photon_weight,sigma"
    assert len(lines) == 7


def test_dispersion_report_points(default_config, calibration):
    points = asyncio.run(simulation_service.run_sweep(default_config, calibration))
    series = simulation_service.sweep_series(points)
    report = analysis_service.analyze_dispersion(series, default_config)
    assert len(report.points) == len(series)
    for point in report.points:
        assert point["photon_weight_upper"] + point["photon_weight_lower"] == pytest.approx(1.0)
    assert not report.fit.free_cavity


def test_flat_spectrum_cannot_be_fitted(grid):
    with pytest.raises(DegenerateFitError):
        analysis_service.fit_spectrum(Spectrum(grid, np.zeros(grid.size)))
