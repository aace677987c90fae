"""Initial states used by the CLI, the self-check and the tests."""
from __future__ import annotations

import numpy as np

from .grid import Field, Grid, Sector, ValidationError


def gaussian(grid: Grid, sector: Sector = Sector.XT, center: float = 0.0,
             sigma: float = 1.0, wavenumber: float = 0.0, label: str = "gaussian") -> Field:
    """Unit-norm Gaussian packet on a 1-D grid.

    ``sigma`` is the standard deviation of ``|f|^2``; the carrier is
    ``exp(i * wavenumber * (q - center))``.
    """
    if sigma <= 0:
        raise ValidationError("sigma", "must be positive")
    q = grid.coords(0)
    f = (2 * np.pi * sigma**2) ** -0.25 * np.exp(
        -((q - center) ** 2) / (4 * sigma**2) + 1j * wavenumber * (q - center))
    return Field(sector, grid, f, label)


def plane_wave(grid: Grid, wavenumber: float, sector: Sector = Sector.XT,
               label: str = "plane-wave") -> Field:
    return Field(sector, grid, np.exp(1j * wavenumber * grid.coords(0)), label)


def coherent_state(grid: Grid, displacement: float, omega: float = 1.0, mass: float = 1.0,
                   hbar: float = 1.0) -> Field:
    """Displaced harmonic-oscillator ground state at rest."""
    sigma = np.sqrt(hbar / (2 * mass * omega))
    return gaussian(grid, Sector.XT, center=displacement, sigma=sigma, label="coherent")


def harmonic_potential(grid: Grid, omega: float = 1.0, mass: float = 1.0) -> np.ndarray:
    x = grid.coords(0)
    return 0.5 * mass * omega**2 * x**2
