"""Shared fixtures: default grids and one session-wide manufactured solve.

The manufactured solve is the most expensive shared artifact (about ten
seconds); every test that needs a converged solution reuses it instead of
solving again.
"""

import numpy as np
import pytest

from kdv5half import (
    GridFunction,
    SolverConfig,
    UniformGrid,
    manufactured_data,
    picard_solve,
)

DEFAULT_X = dict(origin=-40.0, step=80.0 / 1024, count=1024)
DEFAULT_T = dict(origin=-2.0, step=4.0 / 1024, count=1024)


@pytest.fixture(scope="session")
def xgrid():
    return UniformGrid(**DEFAULT_X)


@pytest.fixture(scope="session")
def tgrid():
    return UniformGrid(**DEFAULT_T)


@pytest.fixture(scope="session")
def solver_config(xgrid, tgrid):
    return SolverConfig(
        xgrid=xgrid, tgrid=tgrid, s=1.0, b=0.42, bstar=0.46, alpha=0.52, T=0.25
    )


@pytest.fixture(scope="session")
def manufactured_case(solver_config):
    """(data, oracle, stride, result) for a small-amplitude Gaussian datum."""
    xg = solver_config.xgrid
    vals = 0.01 * np.exp(-(((xg.nodes - 2.0) / 3.0) ** 2)).astype(np.complex128)
    g_l = GridFunction(xg, vals)
    data, oracle, stride = manufactured_data(g_l, solver_config)
    result = picard_solve(data, solver_config)
    return data, oracle, stride, result
