import numpy as np
import pytest

from polariscope.core.errors import NotTunableError
from polariscope.core.optics import (
    HBAR_C_EV_NM,
    SILVER,
    ConstantModel,
    LorentzModel,
    Stack,
    cavity_resonance,
    energy_grid,
    find_cavity_thickness,
    find_dips,
    layer_matrix,
    reflectance_transmittance,
    spectrum_sweep,
)

AIR = ConstantModel(1.0)
GLASS = ConstantModel(2.25)
PVA = ConstantModel(2.2)


def cavity(spacer_nm: float = 135.0, dye=PVA) -> Stack:
    return Stack.build(AIR, [(SILVER, 35.0), (dye, spacer_nm), (SILVER, 120.0)], GLASS)


def test_zero_thickness_layer_is_identity():
    np.testing.assert_array_equal(layer_matrix(1.7 + 0.2j, 0.0, 2.0), np.eye(2))


@pytest.mark.parametrize("n", [1.0, 1.5, 2.4])
@pytest.mark.parametrize("d", [10.0, 135.0, 480.0])
def test_lossless_layer_matrix_is_unimodular(n, d):
    assert np.linalg.det(layer_matrix(n, d, 2.1)) == pytest.approx(1.0, abs=1e-12)


def test_half_wave_layer_is_minus_identity():
    n, energy = 1.5, 2.0
    d = np.pi * HBAR_C_EV_NM / (energy * n)
    np.testing.assert_allclose(layer_matrix(n, d, energy), -np.eye(2), atol=1e-12)


def test_layer_matrix_rejects_bad_input():
    with pytest.raises(ValueError):
        layer_matrix(1.5, -1.0, 2.0)
    with pytest.raises(ValueError):
        layer_matrix(1.5, 10.0, 0.0)


def test_single_interface_fresnel():
    stack = Stack.build(AIR, [(GLASS, 0.0)], GLASS)
    reflectance, transmittance = reflectance_transmittance(stack, 2.0)
    assert reflectance == pytest.approx(0.04, abs=1e-12)
    assert transmittance == pytest.approx(0.96, abs=1e-12)


@pytest.mark.parametrize("d", [0.0, 57.0, 135.0, 1000.0])
def test_lossless_slab_conserves_energy(d):
    stack = Stack.build(AIR, [(ConstantModel(5.76), d), (PVA, 2 * d)], GLASS)
    reflectance, transmittance = reflectance_transmittance(stack, energy_grid(1.8, 2.4, 0.001))
    assert np.max(np.abs(reflectance + transmittance - 1.0)) <= 1e-10


def test_empty_grid_gives_empty_spectra():
    reflectance, transmittance, absorbance = spectrum_sweep(cavity(), [])
    assert len(reflectance) == len(transmittance) == len(absorbance) == 0


def test_absorbing_stack_is_reciprocal_in_transmission():
    stack = cavity(dye=LorentzModel(2.2, 2.11, 0.04, 0.05))
    energies = energy_grid(1.9, 2.3, 0.01)
    _, forward = reflectance_transmittance(stack, energies)
    _, backward = reflectance_transmittance(stack.reversed(), energies)
    np.testing.assert_allclose(forward, backward, rtol=1e-9, atol=1e-15)


def test_thick_bottom_mirror_blocks_transmission(resonant):
    assert resonant.transmittance.values.max() < 0.01


def test_undoped_cavity_has_one_dip():
    tuned = cavity(find_cavity_thickness(cavity(), 2.11, cavity_index=2))
    reflectance, _, _ = spectrum_sweep(tuned, energy_grid(1.8, 2.4, 0.001))
    assert len(find_dips(reflectance)) == 1


def test_resonant_dye_cavity_shows_two_dips(resonant):
    dips = sorted(d for d in resonant.dips if 1.95 < d < 2.3)
    assert len(dips) == 2
    assert dips[0] == pytest.approx(2.04, abs=0.01)
    assert dips[1] == pytest.approx(2.18, abs=0.01)


def test_thicker_cavity_resonates_lower():
    energies = [cavity_resonance(cavity(d)) for d in (110.0, 130.0, 150.0, 170.0)]
    assert all(a > b for a, b in zip(energies, energies[1:]))


def test_thickness_search_round_trip():
    thickness = find_cavity_thickness(cavity(), 2.11, cavity_index=2)
    assert 100.0 < thickness < 200.0
    assert cavity_resonance(cavity(thickness)) == pytest.approx(2.11, abs=1e-3)


def test_thickness_search_uses_the_undoped_host():
    dyed = cavity(dye=LorentzModel(2.2, 2.11, 0.04, 0.1))
    assert find_cavity_thickness(dyed, 2.11) == pytest.approx(
        find_cavity_thickness(cavity(), 2.11, cavity_index=2), abs=1e-6
    )


def test_out_of_range_target_is_not_tunable():
    with pytest.raises(NotTunableError):
        find_cavity_thickness(cavity(), 3.0)


def test_swapping_the_dye_for_its_host_undopes_the_stack():
    dyed = cavity(dye=LorentzModel(2.2, 2.11, 0.04, 0.1))
    assert dyed.with_model(2, PVA) == cavity()
    assert dyed.undoped() == cavity()
    assert dyed.with_model(2, PVA).layers[2].thickness_nm == 135.0
