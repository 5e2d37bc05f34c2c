import pytest

from sol_lab.lattice import SL2ZMatrix, build_lattice


@pytest.fixture(scope="session")
def cat_map():
    return build_lattice(SL2ZMatrix(2, 1, 1, 1))


@pytest.fixture(scope="session")
def skew_map():
    return build_lattice(SL2ZMatrix(3, 1, 2, 1))
