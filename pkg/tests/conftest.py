import math

import pytest

from remenu import (
    CostFunctional,
    DegenerateAlpha,
    DiscreteTypes,
    Distortion,
    ProductUniform,
)

ALPHA_LO = math.exp(-3)
ALPHA_HI = math.exp(-2)
LN11 = math.log(1.1)


@pytest.fixture(scope="session")
def cost():
    """theta = 0.1 with the identity distortion; H[(X_k-d)_+] = 1.1 k e^{-d/k}."""
    return CostFunctional(0.1, Distortion.identity())


@pytest.fixture(scope="session")
def product_dist():
    """k ~ U(5000, 25000) independent of alpha ~ U(e^-3, e^-2)."""
    return ProductUniform(5000.0, 25000.0, ALPHA_LO, ALPHA_HI)


@pytest.fixture(scope="session")
def degenerate_dist():
    """k ~ U(5000, 25000) with alpha fixed at e^-3, so a = 3k."""
    return DegenerateAlpha(5000.0, 25000.0, ALPHA_LO)


@pytest.fixture(scope="session")
def discrete_dist():
    """Two atoms at (alpha, k) = (e^-3, 10000) and (e^-2, 20000)."""
    return DiscreteTypes([(ALPHA_LO, 10000.0, 0.4), (ALPHA_HI, 20000.0, 0.6)])
