import math

import pytest
from hypothesis import HealthCheck, settings

from cavity_squeeze.cavity import AtomParams, CavityParams

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

TWO_PI = 2.0 * math.pi
GAMMA = TWO_PI * 184e3
KAPPA = TWO_PI * 520e3


@pytest.fixture
def table_cavity():
    """Lossy cavity of the Yb experiment."""
    return CavityParams(T1=30e-6, L1=30e-6, T2=196e-6, L2=227.3e-6, finesse=13.0e3, kappa=KAPPA)


@pytest.fixture
def resonant():
    """Lossless cavity with kappa/Gamma = 2.8 and eta = 1.8 (N_up eta = 900 at N = 1000)."""
    cav = CavityParams(T1=30e-6, T2=453.3e-6, kappa=2.8 * GAMMA)
    return cav, AtomParams(gamma=GAMMA, eta=1.8)


@pytest.fixture
def yb():
    """Lossless core of the Yb cavity with the four-level atom (b = 230, eta_down = eta/3)."""
    cav = CavityParams(T1=30.0009e-6, T2=453.287e-6, kappa=KAPPA)
    return cav, AtomParams(gamma=GAMMA, eta=1.8, b=230.0)
