import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from stokesmem.eigen2d import compute_modes_2d
from stokesmem.eigen3d import BallGeometry, compute_modes_3d
from stokesmem.memory_modes import MemoryParams
from stokesmem.modetable import table_from_modes_2d, table_from_modes_3d

settings.register_profile(
    "suite", max_examples=40, deadline=None,
    suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("suite")

FULL_N_MAX = 8 * 56 + 8


@pytest.fixture(scope="session")
def geom():
    return BallGeometry(1.0)


@pytest.fixture(scope="session")
def params():
    return MemoryParams(a=1.0, b=1.0, T=2.0)


@pytest.fixture(scope="session")
def modes3d(geom):
    """Full 3D mode list up to the largest default packet."""
    return compute_modes_3d(geom, FULL_N_MAX)


@pytest.fixture(scope="session")
def table3d(geom, modes3d):
    return table_from_modes_3d(geom, modes3d)


@pytest.fixture(scope="session")
def modes2d():
    return compute_modes_2d(1.0, 200)


@pytest.fixture(scope="session")
def table2d(modes2d):
    return table_from_modes_2d(1.0, modes2d)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240817)
