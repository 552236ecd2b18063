"""Weak-measurement traversal times for 1D piecewise-constant barriers."""

from .scattering import (
    PotentialProfile,
    Segment,
    UnitSystem,
    rectangular_coefficients,
    solve_stationary,
    wavefunction_at,
)

__version__ = "0.1.0"
