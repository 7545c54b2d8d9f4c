import numpy as np
import pytest

from lgbec.species import rubidium87
from lgbec.trap import build_configuration

N_ATOMS = 1e6
VC = 5.3e3 * 1e-18
POWER = 5.0
DETUNING = 2 * np.pi * 10e12


@pytest.fixture(scope="session")
def rb87():
    return rubidium87()


@pytest.fixture(scope="session")
def working_point(rb87):
    """Factory for the named configurations at N = 1e6, V_c = 5.3e3 um^3."""
    cache = {}

    def get(kind, ell):
        key = (kind, ell)
        if key not in cache:
            cache[key] = build_configuration(kind, ell, rb87, N_ATOMS, VC)
        return cache[key]

    return get
