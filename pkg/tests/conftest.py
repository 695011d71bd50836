"""
Shared fixtures: the default dye cavity configuration and its calibration
"""

import numpy as np
import pytest

from polariscope.core.config import parse_config
from polariscope.core.optics import energy_grid
from polariscope.core.services import simulation_service


@pytest.fixture(scope="session")
def default_config():
    return parse_config('{"version": 1}')


@pytest.fixture(scope="session")
def calibration(default_config):
    return simulation_service.calibrate(default_config)


@pytest.fixture(scope="session")
def resonant(default_config, calibration):
    return simulation_service.simulate(default_config, calibration)


@pytest.fixture
def grid():
    return energy_grid(1.8, 2.4, 0.001)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
