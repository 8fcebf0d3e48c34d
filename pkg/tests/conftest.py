"""Shared fixtures: mid-size grids keep unit tests fast; the acceptance
module pins the full desk-scale configuration itself."""

import pytest

from tensorray import CartesianGrid


@pytest.fixture(scope="session")
def grid64():
    return CartesianGrid(n=64, radius=8.0)


@pytest.fixture(scope="session")
def grid128():
    return CartesianGrid(n=128, radius=8.0)


@pytest.fixture(scope="session")
def grid256():
    return CartesianGrid(n=256, radius=8.0)
