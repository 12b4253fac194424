# tests/conftest.py

import os
import sys

import numpy as np
import pytest

# Add the repository root to Python path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from bresse.fem import build_system  # noqa: E402
from bresse.model import BresseParams  # noqa: E402


@pytest.fixture
def default_params():
    return BresseParams()


@pytest.fixture
def conservative_params():
    return BresseParams(gamma1=0.0, gamma2=0.0, gamma3=0.0)


@pytest.fixture
def wave_params():
    """Timoshenko limit with only the longitudinal damper, below its impedance."""
    return BresseParams(ell=0.0, gamma1=0.0, gamma2=0.0, gamma3=0.5)


@pytest.fixture
def small_system(default_params):
    return build_system(default_params, 16)


@pytest.fixture
def conservative_system(conservative_params):
    return build_system(conservative_params, 16)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
