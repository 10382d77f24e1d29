"""Shared fixtures: the first zeta zeros and production grids."""

import pytest

from rzspec.lfunctions import ZetaZero
from rzspec.wavefield import evaluate_grid

# Reference ordinates (Odlyzko tables) used to build ZetaZero records
# without running the zero search in every test module.
GAMMAS = (
    14.134725141734693,
    21.022039638771555,
    25.010857580145688,
    30.424876125859513,
    32.935061587739189,
)

NODAL_WINDOW = (-2.0, 3.0, -2.0, 2.0)


@pytest.fixture(scope="session")
def zeros():
    return [ZetaZero.on_critical_line(i + 1, g) for i, g in enumerate(GAMMAS)]


@pytest.fixture(scope="session")
def nodal_grids(zeros):
    """psi_1 and psi_2 on the double-well window, h = 1/60."""
    return {z.index: evaluate_grid(z, NODAL_WINDOW, 301, 241) for z in zeros[:2]}
