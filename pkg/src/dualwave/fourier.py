"""Representation map between the (k, E) and (x, t) sectors.

The forward map to (x, t) uses the plane-wave kernel ``exp(i(kx - Et/hbar))``
with symmetric normalization, realized on the lattice so that the round trip
is the identity and Parseval holds to round-off.  Grids with arbitrary
origins are handled with explicit pre/post phase factors, not by assuming
the samples sit at FFT indices.

Also here: spectral realizations of the canonical operators ``X = -i d/dk``
and ``T = i hbar d/dE``, and a dense-matrix Hermiticity probe.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .grid import Field, Grid, PhysParams, Sector, ValidationError

MAX_DENSE = 64


@dataclass(frozen=True)
class MapConvention:
    """Kernel signs used when mapping (k, E) -> (x, t).

    ``forward_sign_space = +1`` means ``exp(+ikx)``; ``forward_sign_time = -1``
    means ``exp(-iEt/hbar)``.  The map back to (k, E) uses the opposite signs.
    """

    forward_sign_space: int = +1
    forward_sign_time: int = -1
    normalization: str = "symmetric"

    def __post_init__(self):
        for name in ("forward_sign_space", "forward_sign_time"):
            if getattr(self, name) not in (-1, 1):
                raise ValidationError(name, "must be +1 or -1")
        if self.normalization != "symmetric":
            raise ValidationError("normalization", "only 'symmetric' is supported")


DEFAULT_CONVENTION = MapConvention()


def _axis_transform(a: np.ndarray, axis: int, src: Grid, dst: Grid, sign: int,
                    scale: float) -> np.ndarray:
    # out_m = h_s / sqrt(2 pi scale) * sum_j a_j exp(i sign y_j z_m / scale)
    n = src.n_points[axis]
    o_s, h_s = src.origin[axis], src.spacing[axis]
    o_d, h_d = dst.origin[axis], dst.spacing[axis]
    shape = [1] * a.ndim
    shape[axis] = n
    j = np.arange(n)
    pre = np.exp(1j * sign * (j * h_s) * o_d / scale).reshape(shape)
    post = np.exp(1j * sign * o_s * (o_d + j * h_d) / scale).reshape(shape)
    b = a * pre
    if sign > 0:
        b = np.fft.ifft(b, axis=axis) * n
    else:
        b = np.fft.fft(b, axis=axis)
    return b * post * (h_s / np.sqrt(2.0 * np.pi * scale))


def _scales(ndim: int, hbar: float) -> tuple[float, ...]:
    return (1.0,) if ndim == 1 else (1.0, hbar)


def _check_target(src: Grid, dst: Grid, scales) -> None:
    if dst.n_points != src.n_points:
        raise ValidationError("grid", "target grid must have the same shape")
    for a, sc in enumerate(scales):
        want = src.dual_spacing(a, sc)
        if abs(dst.spacing[a] - want) > 1e-12 * want:
            raise ValidationError(
                "grid", f"target spacing {dst.spacing[a]!r} on axis {a} is not dual ({want!r})")


def _map(f: Field, signs, scales, target: Grid | None) -> np.ndarray:
    src = f.grid
    dst = src.dual(scales) if target is None else target
    _check_target(src, dst, scales)
    out = f.samples
    for axis in range(src.ndim):
        out = _axis_transform(out, axis, src, dst, signs[axis], scales[axis])
    return out, dst


def to_xt(phi: Field, conv: MapConvention = DEFAULT_CONVENTION,
          p: PhysParams = PhysParams(), target: Grid | None = None) -> Field:
    """Map a (k, E) field, or a 1-D k field, to the (x, t) sector.

    Without ``target`` the result lives on the centered dual grid.
    """
    if phi.sector != Sector.KE:
        raise ValidationError("sector", "to_xt expects a KE field")
    scales = _scales(phi.grid.ndim, p.hbar)
    signs = (conv.forward_sign_space, conv.forward_sign_time)
    out, dst = _map(phi, signs, scales, target)
    return Field(Sector.XT, dst, out, phi.label)


def to_ke(psi: Field, conv: MapConvention = DEFAULT_CONVENTION,
          p: PhysParams = PhysParams(), target: Grid | None = None) -> Field:
    """Inverse of :func:`to_xt`; pass the original grid as ``target`` to round-trip."""
    if psi.sector != Sector.XT:
        raise ValidationError("sector", "to_ke expects an XT field")
    scales = _scales(psi.grid.ndim, p.hbar)
    signs = (-conv.forward_sign_space, -conv.forward_sign_time)
    out, dst = _map(psi, signs, scales, target)
    return Field(Sector.KE, dst, out, psi.label)


def position_multipliers(grid: Grid) -> np.ndarray:
    """Eigenvalues of ``-i d/dk`` per FFT bin (the dual x coordinates)."""
    return grid.dual_frequencies(0)


def time_multipliers(grid: Grid, hbar: float) -> np.ndarray:
    """Eigenvalues of ``i hbar d/dE`` per FFT bin.

    The bin ``exp(+i w E)`` is ``exp(-i E t / hbar)`` with ``t = -hbar w``.  The
    Nyquist bin is assigned ``t = -n/2 * dt`` so the spectrum is the dual grid.
    """
    t = -grid.dual_frequencies(0, scale=hbar)
    n = grid.n_points[0]
    t[n // 2] = -abs(t[n // 2])
    return t


def _require_1d(f: Field, what: str) -> None:
    if f.grid.ndim != 1:
        raise ValidationError("grid", f"{what} needs a 1-D field")


def apply_X(phi: Field) -> Field:
    """Spectral ``-i d/dk`` on a 1-D field sampled along k."""
    _require_1d(phi, "apply_X")
    x = position_multipliers(phi.grid)
    return phi.with_samples(np.fft.ifft(x * np.fft.fft(phi.samples)))


def apply_Tgen(phi: Field, p: PhysParams = PhysParams()) -> Field:
    """Spectral ``i hbar d/dE`` on a 1-D field sampled along E."""
    _require_1d(phi, "apply_Tgen")
    t = time_multipliers(phi.grid, p.hbar)
    return phi.with_samples(np.fft.ifft(t * np.fft.fft(phi.samples)))


def dense_matrix(op: Callable[[Field], Field], grid: Grid,
                 sector: Sector = Sector.KE) -> np.ndarray:
    """Column-by-column matrix of a linear operator acting on ``grid``."""
    if grid.ndim != 1:
        raise ValidationError("grid", "dense builds are 1-D only")
    n = grid.n_points[0]
    if n > MAX_DENSE:
        raise ValidationError("n_points", f"dense build limited to n <= {MAX_DENSE}, got {n}")
    m = np.empty((n, n), dtype=np.complex128)
    for j in range(n):
        e = np.zeros(n, dtype=np.complex128)
        e[j] = 1.0
        m[:, j] = op(Field(sector, grid, e)).samples
    return m


@dataclass(frozen=True)
class HermiticityReport:
    max_asymmetry: float
    eigenvalues: np.ndarray
    max_imag: float

    @property
    def min_eigenvalue(self) -> float:
        return float(self.eigenvalues.real.min())


def hermiticity_check(op: Callable[[Field], Field], grid: Grid,
                      sector: Sector = Sector.KE) -> HermiticityReport:
    """Build the dense matrix ``M`` of ``op`` and report ``max|M - M^H|`` and its spectrum."""
    m = dense_matrix(op, grid, sector)
    asym = float(np.abs(m - m.conj().T).max())
    ev = np.linalg.eigvals(m)
    ev = ev[np.argsort(ev.real)]
    return HermiticityReport(asym, ev, float(np.abs(ev.imag).max()))
