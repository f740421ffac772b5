import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from app.services.graph_service import make_cycle, make_graph  # noqa: E402
from app.services.lattice_service import LatticeVector  # noqa: E402


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: desk-scale acceptance runs on C9")


@pytest.fixture
def c5():
    return make_cycle(5)


@pytest.fixture
def c7():
    return make_cycle(7)


@pytest.fixture
def c9():
    return make_cycle(9)


@pytest.fixture
def single_vertex():
    return make_graph(["a"], [])


@pytest.fixture
def eta1_c7():
    return LatticeVector.constant(7, 1, 3)


@pytest.fixture
def mu0_c7():
    return LatticeVector.of([1, 0, 1, 0, 1, 0, 0], 1)
