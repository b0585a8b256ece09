import numpy as np
import pytest

from dpnls.params import Params, PeriodicGrid, RadialGrid, RadialProfile
from dpnls.groundstate import solve_ground_state

BASE = dict(N=1, a=1.0, b=1.0, p=3.0, q=7.0)


@pytest.fixture(scope="session")
def params1():
    return Params(omega=1.0, **BASE)


@pytest.fixture(scope="session")
def params_half():
    return Params(omega=0.5, **BASE)


@pytest.fixture(scope="session")
def gs1(params1):
    return solve_ground_state(params1)


@pytest.fixture(scope="session")
def gs_half(params_half):
    return solve_ground_state(params_half)


@pytest.fixture(scope="session")
def gs10():
    return solve_ground_state(Params(omega=10.0, **BASE))


def gaussian_profile(rmax=20.0, n=4001, width=1.0):
    """exp(-r^2 / (2 width^2)) with exact derivative samples."""
    grid = RadialGrid(rmax, n)
    r = grid.r
    vals = np.exp(-r ** 2 / (2.0 * width ** 2))
    der = -r / width ** 2 * vals
    return RadialProfile(grid, vals, der)


def gaussian_field(length=40.0, m=4096, width=1.0):
    from dpnls.params import ComplexField
    grid = PeriodicGrid(length, m)
    x = grid.x
    return ComplexField(grid, np.exp(-x ** 2 / (2.0 * width ** 2)).astype(complex))
