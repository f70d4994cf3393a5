import numpy as np
import pytest

from levy_squarefn.jumps import build_torus_scheme
from levy_squarefn.models import LevyMeasureModel
from levy_squarefn.spectral import (Grid, GridFunction, auto_t_max,
                                    build_symbol_grid,
                                    build_time_quadrature)


def unit_bump(grid, width=1.0, center=0.0):
    """Unit-mass Gaussian bump sampled on the grid."""
    pts = grid.points()
    c = np.zeros(grid.d)
    c[0] = center
    vals = np.exp(-np.sum((pts - c) ** 2, axis=-1) / (2.0 * width * width))
    vals /= vals.sum() * grid.h ** grid.d
    return GridFunction(grid, vals)


def make_setup(alpha, N=512, L=16.0, eps=1e-6, npd=24):
    model = LevyMeasureModel("isotropic-stable", d=1, alpha=alpha)
    grid = Grid(d=1, N=N, L=L)
    symbol = build_symbol_grid(model, grid)
    scheme = build_torus_scheme(model, grid, eps=eps)
    tq = build_time_quadrature(1e-4, min(auto_t_max(symbol), 1e4), npd)
    return model, grid, symbol, scheme, tq


@pytest.fixture(scope="session")
def cauchy():
    return make_setup(1.0)


@pytest.fixture(scope="session")
def stable15():
    return make_setup(1.5)


@pytest.fixture(scope="session")
def cauchy_small():
    return make_setup(1.0, N=256)
