import math

import numpy as np
import pytest

from polariscope.core.errors import InvalidModelError, InvalidStackError
from polariscope.core.optics import (
    SILVER,
    ConstantModel,
    DrudeModel,
    Layer,
    LorentzModel,
    Stack,
    eval_epsilon,
    refractive_index,
)
from polariscope.core.optics.dielectric import describe, refractive_index_from_epsilon


def test_constant_model_is_flat():
    assert eval_epsilon(ConstantModel(2.2), 1.9) == complex(2.2, 0)
    values = eval_epsilon(ConstantModel(2.2), np.array([1.8, 2.1, 2.4]))
    np.testing.assert_array_equal(values, np.full(3, 2.2 + 0j))


def test_lorentz_without_dye_returns_background():
    assert eval_epsilon(LorentzModel(2.2, 2.11, 0.040, 0.0), 2.11) == complex(2.2, 0)


def test_lorentz_on_resonance():
    eps = eval_epsilon(LorentzModel(2.2, 2.11, 0.040, 0.10), 2.11)
    expected = 2.2 + 0.10 / (-1j * 0.040 * 2.11)
    assert eps == pytest.approx(expected, abs=1e-12)
    assert eps.imag == pytest.approx(1.184834, abs=1e-6)


def test_lorentz_from_concentration_scales_linearly():
    model = LorentzModel.from_concentration(2.2, 2.11, 0.04, 56.0, 1e-3)
    assert model.strength == pytest.approx(0.056)
    assert model.undoped() == ConstantModel(2.2)


@pytest.mark.parametrize(
    "model",
    [
        LorentzModel(2.2, 2.11, 0.040, 0.2),
        DrudeModel(4.0, 9.0, 0.07),
        ConstantModel(complex(2.0, 0.1)),
    ],
)
def test_passive_media_have_non_negative_loss(model):
    energies = np.linspace(0.5, 4.0, 500)
    assert np.all(eval_epsilon(model, energies).imag >= 0)


def test_refractive_index_branch():
    assert refractive_index_from_epsilon(4.0 + 0j) == 2.0 + 0j
    n = refractive_index_from_epsilon(-1.0 + 0j)
    assert n.real == pytest.approx(0.0, abs=1e-15)
    assert n.imag == pytest.approx(1.0)


def test_silver_is_mostly_reflective_in_the_visible():
    n = refractive_index(SILVER, 2.1)
    assert n.imag > 0
    assert abs(n.real) < 0.1 * abs(n.imag)


@pytest.mark.parametrize(
    "factory",
    [
        lambda: LorentzModel(2.2, 2.11, 0.0, 0.1),
        lambda: LorentzModel(2.2, -1.0, 0.04, 0.1),
        lambda: LorentzModel(2.2, 2.11, 0.04, -0.1),
        lambda: LorentzModel(2.2, 2.11, 0.04, math.nan),
        lambda: DrudeModel(4.0, 9.0, 0.0),
        lambda: DrudeModel(4.0, 0.0, 0.07),
        lambda: ConstantModel(complex(2.0, -0.1)),
    ],
)
def test_invalid_models_are_rejected(factory):
    with pytest.raises(InvalidModelError):
        factory()


def test_non_positive_energy_is_rejected():
    with pytest.raises(ValueError):
        eval_epsilon(SILVER, 0.0)


def test_describe_names_the_model():
    assert describe(ConstantModel(2.25)) == "constant(eps=2.25)"
    assert describe(LorentzModel(2.2, 2.11, 0.04, 0.05)).startswith("lorentz(")
    assert describe(SILVER).startswith("drude(")


def test_stack_layout_is_validated():
    air, glass = ConstantModel(1.0), ConstantModel(2.25)
    with pytest.raises(InvalidStackError):
        Stack((Layer.bounding(air), Layer.bounding(glass)))
    with pytest.raises(InvalidStackError):
        Stack((Layer.bounding(air), Layer(glass, 100.0), Layer(glass, 10.0)))
    with pytest.raises(InvalidStackError):
        Stack.build(air, [(glass, -1.0)], glass)


def test_stack_edits():
    dye = LorentzModel(2.2, 2.11, 0.04, 0.1)
    stack = Stack.build(
        ConstantModel(1.0), [(SILVER, 35), (dye, 135), (SILVER, 120)], ConstantModel(2.25)
    )
    thinner = stack.with_thickness(2, 120.0)
    assert thinner.layers[2].thickness_nm == 120.0
    assert stack.layers[2].thickness_nm == 135.0
    assert stack.undoped().layers[2].model == ConstantModel(2.2)
    assert stack.reversed().layers[0].model == ConstantModel(2.25)
    with pytest.raises(InvalidStackError):
        stack.with_thickness(0, 10.0)
