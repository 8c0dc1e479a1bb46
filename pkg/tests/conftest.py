import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from chns1d.mesh import Grid
from chns1d.potential import PotentialParams
from chns1d.solver import FluidParams, ProblemSpec, SolveControls


@pytest.fixture
def pot() -> PotentialParams:
    return PotentialParams(theta0=1.0, thetac=1.5, delta=0.1)


@pytest.fixture
def fluid() -> FluidParams:
    return FluidParams(gamma=2.0, lambda1=1.0, lambda2=0.0, H=1.0)


def make_forced_spec(n: int, pot: PotentialParams, fluid: FluidParams,
                     g1_amp: float = 0.1, g2_amp: float = 0.05) -> ProblemSpec:
    grid = Grid(n, 1.0)
    x = grid.cell_centers()
    return ProblemSpec(
        grid,
        pot,
        fluid,
        m1=1.0,
        m2=0.3,
        g1=grid.field(g1_amp * np.sin(np.pi * x)),
        g2=grid.field(g2_amp * np.cos(np.pi * x)),
    )


@pytest.fixture
def forced_spec(pot, fluid) -> ProblemSpec:
    return make_forced_spec(128, pot, fluid)


@pytest.fixture
def controls() -> SolveControls:
    return SolveControls()
