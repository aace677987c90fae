"""Random-phase ensembles on the (k, E) grid projected to (x, t).

A realization is ``phi = A exp(i theta)`` with i.i.d. uniform phases, one per
grid mode, mapped through :func:`dualwave.fourier.to_xt`.  Independent phases
per mode are the lattice version of delta-correlated phases, which fixes the
per-mode weight: each mode carries amplitude ``A sqrt(dk dE)`` so that the
ensemble-mean density equals the Riemann sum ``sum |A|^2 dk dE``.

Sample ``i`` draws its phases from a Philox stream keyed by
``(master_seed, i)``, so realizations do not depend on execution order.
Ensemble sums are reduced in fixed-size chunks, combined in index order;
the thread count therefore never changes a single bit of the result.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _backend
from .fourier import to_xt
from .grid import Field, Grid, PhysParams, Sector, ValidationError

CHUNK = 16
U64 = 2**64


@dataclass(frozen=True)
class SpectralWeight:
    grid: Grid
    amplitude: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.grid.ndim != 2:
            raise ValidationError("grid", "spectral weight needs a 2-D (k, E) grid")
        a = np.array(self.amplitude, dtype=np.float64, copy=True).reshape(self.grid.shape)
        if not np.all(np.isfinite(a)):
            raise ValidationError("amplitude", "non-finite entries")
        if np.any(a < 0):
            raise ValidationError("amplitude", "must be nonnegative")
        a.flags.writeable = False
        object.__setattr__(self, "amplitude", a)
        if not np.isfinite(self.riemann_sum()):
            raise ValidationError("amplitude", "sum |A|^2 dk dE is not finite")

    def riemann_sum(self) -> float:
        return float(np.sum(self.amplitude**2) * self.grid.cell_volume)


@dataclass(frozen=True)
class EnsembleSpec:
    weight: SpectralWeight
    n_samples: int
    master_seed: int = 0

    def __post_init__(self):
        if int(self.n_samples) < 1:
            raise ValidationError("n_samples", "must be >= 1")
        if not 0 <= int(self.master_seed) < U64:
            raise ValidationError("master_seed", "must fit in 64 unsigned bits")


@dataclass(frozen=True)
class DensityReport:
    rho_estimate: float
    rho_exact_sum: float
    spatial_cv: float
    n_samples: int
    cv_x: float
    cv_t: float
    mean_field_max: float


@dataclass(frozen=True)
class CoherenceTable:
    axis: str
    lags: np.ndarray
    values: np.ndarray
    reference: np.ndarray


def gaussian_weight(grid: Grid, sigma_k: float, sigma_e: float, rho: float = 1.0,
                    k_center: float = 0.0, e_center: float = 0.0) -> SpectralWeight:
    """``|A|^2`` Gaussian with standard deviations ``sigma_k``, ``sigma_e``.

    The peak is scaled so the Riemann sum of ``|A|^2`` equals ``rho``.
    """
    if sigma_k <= 0 or sigma_e <= 0:
        raise ValidationError("sigma", "widths must be positive")
    k = grid.coords(0)[:, None]
    e = grid.coords(1)[None, :]
    a2 = np.exp(-((k - k_center) ** 2) / (2 * sigma_k**2)
                - ((e - e_center) ** 2) / (2 * sigma_e**2))
    s = a2.sum() * grid.cell_volume
    if s == 0:
        raise ValidationError("sigma", "Gaussian does not overlap the grid")
    return SpectralWeight(grid, np.sqrt(a2 * rho / s))


def single_mode_weight(grid: Grid, k_index: int, e_index: int, amplitude: float = 1.0) -> SpectralWeight:
    a = np.zeros(grid.shape)
    a[k_index, e_index] = amplitude
    return SpectralWeight(grid, a)


def phase_stream(master_seed: int, index: int) -> np.random.Generator:
    """Counter-based generator for sample ``index``."""
    ss = np.random.SeedSequence(int(master_seed), spawn_key=(int(index),))
    return np.random.Generator(np.random.Philox(ss))


def sample_realization(spec: EnsembleSpec, index: int, p: PhysParams = PhysParams()) -> Field:
    """Projected field of realization ``index``."""
    if not 0 <= int(index) < spec.n_samples:
        raise ValidationError("index", f"{index} outside [0, {spec.n_samples})")
    w = spec.weight
    theta = 2 * np.pi * phase_stream(spec.master_seed, index).random(w.grid.shape)
    # to_xt carries a factor dk dE / (2 pi sqrt(hbar)) per mode; rescale to sqrt(dk dE)
    xt_volume = w.grid.dual((1.0, p.hbar)).volume
    phi = Field(Sector.KE, w.grid, np.sqrt(xt_volume) * w.amplitude * np.exp(1j * theta),
                f"realization {index}")
    return to_xt(phi, p=p)


def worker_count(threads: int | None = None) -> int:
    if threads is None:
        env = os.environ.get("DUALWAVE_THREADS")
        threads = int(env) if env else (os.cpu_count() or 1)
    return max(1, int(threads))


def _chunk_pass(spec: EnsembleSpec, p: PhysParams, start: int, stop: int, axis: int | None,
                line: int = 0):
    shape = spec.weight.grid.shape
    dens = np.zeros(shape[0] * shape[1])
    mean = np.zeros(shape, dtype=np.complex128)
    coh = np.zeros(shape[axis], dtype=np.complex128) if axis is not None else None
    for i in range(start, stop):
        psi = sample_realization(spec, i, p).samples
        _backend.accumulate_abs2(dens, psi.ravel())
        mean += psi
        if axis is not None:
            f = np.fft.fft(psi[:, line] if axis == 0 else psi[line, :])
            coh += np.fft.ifft(f.real**2 + f.imag**2)
    return dens.reshape(shape), mean, coh


def _ensemble_pass(spec: EnsembleSpec, p: PhysParams, threads: int | None, axis: int | None,
                   line: int = 0):
    bounds = [(s, min(s + CHUNK, spec.n_samples)) for s in range(0, spec.n_samples, CHUNK)]
    nw = min(worker_count(threads), len(bounds))
    if nw == 1:
        parts = [_chunk_pass(spec, p, a, b, axis, line) for a, b in bounds]
    else:
        with ThreadPoolExecutor(max_workers=nw) as pool:
            parts = list(pool.map(lambda ab: _chunk_pass(spec, p, ab[0], ab[1], axis, line), bounds))
    dens, mean, coh = parts[0]
    dens, mean = dens.copy(), mean.copy()
    coh = None if coh is None else coh.copy()
    for d, m, c in parts[1:]:
        dens += d
        mean += m
        if coh is not None:
            coh += c
    n = spec.n_samples
    return dens / n, mean / n, None if coh is None else coh / n


def _cv(a: np.ndarray) -> float:
    m = a.mean()
    return float(a.std() / m) if m > 0 else 0.0


def ensemble_density(spec: EnsembleSpec, p: PhysParams = PhysParams(),
                     threads: int | None = None) -> DensityReport:
    """Pointwise ensemble mean of ``|psi|^2`` over the (x, t) grid, summarized.

    ``spatial_cv`` is taken over the whole grid; ``cv_x`` and ``cv_t`` over the
    profiles along x (averaged over t) and along t (averaged over x).
    """
    exact = spec.weight.riemann_sum()
    if exact == 0:
        return DensityReport(0.0, 0.0, 0.0, spec.n_samples, 0.0, 0.0, 0.0)
    dens, mean, _ = _ensemble_pass(spec, p, threads, None)
    return DensityReport(
        rho_estimate=float(dens.mean()),
        rho_exact_sum=exact,
        spatial_cv=_cv(dens),
        n_samples=spec.n_samples,
        cv_x=_cv(dens.mean(axis=1)),
        cv_t=_cv(dens.mean(axis=0)),
        mean_field_max=float(np.abs(mean).max()),
    )


_AXES = {"x": 0, "t": 1}


def wiener_khinchin(weight: SpectralWeight, axis: str, lags: np.ndarray,
                    p: PhysParams = PhysParams()) -> np.ndarray:
    """Coherence predicted from the weight by direct summation.

    ``sum |A|^2 dk dE exp(i k lag)`` for ``x``; ``exp(-i E lag / hbar)`` for ``t``.
    """
    a = _AXES[axis]
    marg = (weight.amplitude**2).sum(axis=1 - a) * weight.grid.cell_volume
    q = weight.grid.coords(a)
    sign = 1.0 if a == 0 else -1.0 / p.hbar
    return np.exp(1j * sign * np.outer(lags, q)) @ marg


def coherence_function(spec: EnsembleSpec, axis: str = "x", p: PhysParams = PhysParams(),
                       threads: int | None = None, line: int | None = None) -> CoherenceTable:
    """``<psi*(q) psi(q + lag)>`` over samples and all periodic base points ``q`` along ``axis``.

    The other coordinate is held at sample ``line``, by default the one at 0.
    Averaging over the whole plane instead would reproduce the reference
    exactly for every realization (lattice Wiener-Khinchin), leaving nothing
    to estimate.  Lags run over ``[-n/2, n/2)`` cells of the (x, t) grid.
    """
    if axis not in _AXES:
        raise ValidationError("axis", f"expected 'x' or 't', got {axis!r}")
    a = _AXES[axis]
    g = spec.weight.grid
    n = g.shape[a]
    m = g.shape[1 - a]
    line = m // 2 if line is None else int(line)
    if not 0 <= line < m:
        raise ValidationError("line", f"{line} outside [0, {m})")
    step = g.dual((1.0, p.hbar)).spacing[a]
    lags = step * np.arange(-(n // 2), n - n // 2)
    ref = wiener_khinchin(spec.weight, axis, lags, p)
    if spec.weight.riemann_sum() == 0:
        return CoherenceTable(axis, lags, np.zeros(n, dtype=np.complex128), ref)
    _, _, coh = _ensemble_pass(spec, p, threads, a, line)
    values = np.fft.fftshift(coh) / n
    return CoherenceTable(axis, lags, values, ref)
