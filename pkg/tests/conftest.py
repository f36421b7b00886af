import time

import pytest

from matfp.grids import unsupervised_grid
from matfp.supervised import generate_database as generate_supervised
from matfp.unsupervised import PlateProtocol, generate_database as generate_unsupervised


@pytest.fixture(scope="session")
def supervised_db():
    return generate_supervised()


@pytest.fixture(scope="session")
def desk_build():
    """Reduced unsupervised database (10 points per axis, coarse mesh) and its build time."""
    t0 = time.perf_counter()
    db = generate_unsupervised(unsupervised_grid(10), PlateProtocol.desk())
    return db, time.perf_counter() - t0


@pytest.fixture(scope="session")
def desk_db(desk_build):
    return desk_build[0]
