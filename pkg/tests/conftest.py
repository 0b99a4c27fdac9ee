import pytest

from outlierlab.equilibrium import build_measure, solve_endpoints
from outlierlab.landscape import classify
from outlierlab.potential import Potential


@pytest.fixture(scope="session")
def gaussian_V():
    return Potential((0.0, 0.0, 0.5))


@pytest.fixture(scope="session")
def quartic_V():
    return Potential((0.0, 0.0, 0.0, 0.0, 0.25))


@pytest.fixture(scope="session")
def gaussian_em(gaussian_V):
    return build_measure(gaussian_V, solve_endpoints(gaussian_V))


@pytest.fixture(scope="session")
def quartic_em(quartic_V):
    return build_measure(quartic_V, solve_endpoints(quartic_V))


@pytest.fixture(scope="session")
def super_L(gaussian_em, gaussian_V):
    return classify(gaussian_em, gaussian_V, 2.0)


@pytest.fixture(scope="session")
def sub_L(gaussian_em, gaussian_V):
    return classify(gaussian_em, gaussian_V, 0.5)
