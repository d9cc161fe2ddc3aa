import math

import pytest

from nlkg1d import ModelParams, tau_star

# Canonical triples: tau = 8 (monotone charge curve), tau = 1.5 and
# tau = 1.05 (S-shaped curve); a = sqrt(2 m^2 b / tau) inverts tau.


@pytest.fixture(scope="session")
def tau8():
    return ModelParams(1.0, 1.0, 2.0)


@pytest.fixture(scope="session")
def tau15():
    return ModelParams(math.sqrt(2.0 / 1.5), 1.0, 1.0)


@pytest.fixture(scope="session")
def tau105():
    return ModelParams(math.sqrt(2.0 / 1.05), 1.0, 1.0)


@pytest.fixture(scope="session")
def critical_triple():
    """Parameters sitting exactly on the universal threshold (m = 2, b = 1)."""
    return ModelParams(math.sqrt(8.0 / tau_star()), 1.0, 2.0)
