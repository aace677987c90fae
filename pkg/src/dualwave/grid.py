"""Uniform sampling lattices and complex fields.

Every integral in the package is a Riemann sum weighted by the product of
the grid spacings; boundaries are periodic.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

MIN_POINTS = 8


class ValidationError(ValueError):
    """Invalid input; ``field`` names the offending parameter."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


class Sector(enum.IntEnum):
    XT = 0
    KE = 1


@dataclass(frozen=True)
class PhysParams:
    hbar: float = 1.0

    def __post_init__(self):
        if not (np.isfinite(self.hbar) and self.hbar > 0):
            raise ValidationError("hbar", f"must be positive, got {self.hbar}")


def _is_pow2(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class Grid:
    """Uniform lattice with one or two axes.

    Sample ``j`` on axis ``a`` sits at ``origin[a] + j * spacing[a]``.
    """

    n_points: tuple[int, ...]
    origin: tuple[float, ...]
    spacing: tuple[float, ...]

    def __post_init__(self):
        n, o, s = self.n_points, self.origin, self.spacing
        if not (len(n) == len(o) == len(s)):
            raise ValidationError("n_points", "n_points, origin and spacing need equal length")
        if len(n) not in (1, 2):
            raise ValidationError("n_points", f"1 or 2 axes supported, got {len(n)}")
        for m in n:
            if not isinstance(m, (int, np.integer)) or m < MIN_POINTS or not _is_pow2(int(m)):
                raise ValidationError("n_points", f"need a power of two >= {MIN_POINTS}, got {m}")
        for h in s:
            if not (np.isfinite(h) and h > 0):
                raise ValidationError("spacing", f"must be positive and finite, got {h}")
        for x in o:
            if not np.isfinite(x):
                raise ValidationError("origin", f"must be finite, got {x}")
        object.__setattr__(self, "n_points", tuple(int(m) for m in n))
        object.__setattr__(self, "origin", tuple(float(x) for x in o))
        object.__setattr__(self, "spacing", tuple(float(h) for h in s))

    @property
    def ndim(self) -> int:
        return len(self.n_points)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.n_points

    @property
    def size(self) -> int:
        return int(np.prod(self.n_points))

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.spacing))

    @property
    def volume(self) -> float:
        return float(np.prod([n * h for n, h in zip(self.n_points, self.spacing)]))

    def coords(self, axis: int = 0) -> np.ndarray:
        n = self.n_points[axis]
        return self.origin[axis] + self.spacing[axis] * np.arange(n)

    def extent(self, axis: int = 0) -> tuple[float, float]:
        n = self.n_points[axis]
        return self.origin[axis], self.origin[axis] + (n - 1) * self.spacing[axis]

    def dual_spacing(self, axis: int = 0, scale: float = 1.0) -> float:
        """Spacing of the conjugate axis, ``2*pi*scale / (n * spacing)``."""
        return 2.0 * np.pi * scale / (self.n_points[axis] * self.spacing[axis])

    def dual_frequencies(self, axis: int = 0, scale: float = 1.0) -> np.ndarray:
        """Conjugate coordinates in FFT order (signed index in [-n/2, n/2))."""
        n = self.n_points[axis]
        return self.dual_spacing(axis, scale) * np.fft.fftfreq(n, 1.0 / n)

    def dual(self, scales: Sequence[float] | None = None) -> "Grid":
        """Centered conjugate grid: same sizes, origin ``-n/2`` dual cells."""
        if scales is None:
            scales = (1.0,) * self.ndim
        sp = tuple(self.dual_spacing(a, scales[a]) for a in range(self.ndim))
        org = tuple(-(n // 2) * h for n, h in zip(self.n_points, sp))
        return Grid(self.n_points, org, sp)

    def axis_grid(self, axis: int) -> "Grid":
        return Grid((self.n_points[axis],), (self.origin[axis],), (self.spacing[axis],))


def make_grid(n_points, origin, spacing) -> Grid:
    """Build a validated :class:`Grid`; scalars give a 1-D grid."""
    if np.isscalar(n_points):
        n_points, origin, spacing = (n_points,), (origin,), (spacing,)
    return Grid(tuple(n_points), tuple(origin), tuple(spacing))


def centered_grid(n_points: int, spacing: float) -> Grid:
    """1-D grid symmetric about zero with sample ``n/2`` at the origin."""
    return make_grid(n_points, -(n_points // 2) * spacing, spacing)


@dataclass(frozen=True)
class Field:
    """Complex samples on a grid, tagged with the sector they belong to."""

    sector: Sector
    grid: Grid
    samples: np.ndarray = field(repr=False)
    label: str = ""

    def __post_init__(self):
        a = np.array(self.samples, dtype=np.complex128, order="C", copy=True)
        if a.size != self.grid.size:
            raise ValidationError(
                "samples", f"expected {self.grid.size} samples, got {a.size}")
        a = a.reshape(self.grid.shape)
        if not np.all(np.isfinite(a)):
            raise ValidationError("samples", "non-finite entries")
        a.flags.writeable = False
        object.__setattr__(self, "sector", Sector(self.sector))
        object.__setattr__(self, "samples", a)

    def with_samples(self, samples, grid: Grid | None = None, sector: Sector | None = None,
                     label: str | None = None) -> "Field":
        return Field(self.sector if sector is None else sector,
                     self.grid if grid is None else grid,
                     samples,
                     self.label if label is None else label)

    def relabel(self, label: str) -> "Field":
        return replace(self, label=label)

    def retag(self, sector: Sector) -> "Field":
        return replace(self, sector=Sector(sector))


def norm2(f: Field) -> float:
    """Squared discrete L2 norm, ``sum |f|^2 * prod(spacing)``."""
    a = f.samples
    return float(np.sum(a.real**2 + a.imag**2) * f.grid.cell_volume)


def inner(f: Field, g: Field) -> complex:
    """``<f|g>``, conjugate-linear in ``f``."""
    if f.grid != g.grid:
        raise ValidationError("grid", "fields live on different grids")
    if f.sector != g.sector:
        raise ValidationError("sector", f"{f.sector.name} vs {g.sector.name}")
    return complex(np.vdot(f.samples, g.samples) * f.grid.cell_volume)
