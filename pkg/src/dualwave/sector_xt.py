"""Time evolution of psi(x) under H = p^2/2m + V(x) by Strang splitting.

One step is ``exp(-iV dt/2hbar) exp(-iK dt/hbar) exp(-iV dt/2hbar)`` with the
kinetic factor applied in the dual (wavenumber) representation.  Adjacent
potential half-steps are merged, which changes nothing but round-off.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .grid import Field, Sector, ValidationError


@dataclass(frozen=True)
class XtParams:
    mass: float
    potential: np.ndarray = field(repr=False)
    dt: float
    hbar: float = 1.0

    def __post_init__(self):
        v = np.array(self.potential, dtype=np.float64, copy=True)
        if v.ndim != 1:
            raise ValidationError("potential", "must be a 1-D array of samples")
        if not np.all(np.isfinite(v)):
            raise ValidationError("potential", "contains NaN or Inf")
        v.flags.writeable = False
        object.__setattr__(self, "potential", v)
        if not (np.isfinite(self.mass) and self.mass > 0):
            raise ValidationError("mass", "must be positive")
        if not (np.isfinite(self.dt) and self.dt > 0):
            raise ValidationError("dt", "must be positive")
        if not (np.isfinite(self.hbar) and self.hbar > 0):
            raise ValidationError("hbar", "must be positive")


def _check(psi: Field, params: XtParams) -> None:
    if psi.grid.ndim != 1:
        raise ValidationError("grid", "time evolution needs a 1-D field along x")
    if params.potential.shape != psi.grid.shape:
        raise ValidationError("potential", "sample count does not match the grid")


def _kinetic_energy(psi: Field, params: XtParams) -> np.ndarray:
    k = psi.grid.dual_frequencies(0)
    return params.hbar**2 * k**2 / (2 * params.mass)


def xt_trajectory(psi0: Field, params: XtParams, n_steps: int,
                  every: int = 1) -> Iterator[tuple[int, Field]]:
    """Yield ``(step, field)`` at step 0, every ``every`` steps, and at the end.

    Negative ``n_steps`` runs backwards in time (``dt -> -dt``).
    """
    _check(psi0, params)
    if every < 1:
        raise ValidationError("every", "must be >= 1")
    yield 0, psi0
    total = abs(int(n_steps))
    if total == 0:
        return
    dt = params.dt if n_steps > 0 else -params.dt
    hb = params.hbar
    half_v = np.exp(-0.5j * params.potential * dt / hb)
    full_v = half_v * half_v
    kin = np.exp(-1j * _kinetic_energy(psi0, params) * dt / hb)

    a = psi0.samples * half_v
    for s in range(1, total + 1):
        a = np.fft.ifft(kin * np.fft.fft(a))
        if s == total or s % every == 0:
            out = a * half_v
            yield s, psi0.with_samples(out)
            if s == total:
                return
            a = out * half_v
        else:
            a = a * full_v


def evolve_xt(psi0: Field, params: XtParams, n_steps: int) -> Field:
    """Propagate ``psi0`` by ``n_steps`` Strang steps of size ``params.dt``."""
    if psi0.sector != Sector.XT:
        raise ValidationError("sector", "evolve_xt expects an XT field")
    last = psi0
    for _, last in xt_trajectory(psi0, params, n_steps, every=max(abs(int(n_steps)), 1)):
        pass
    return last


def energy_expectation(psi: Field, params: XtParams) -> float:
    """``<psi|H|psi> / <psi|psi>`` with the kinetic term evaluated spectrally."""
    _check(psi, params)
    a = psi.samples
    dens = a.real**2 + a.imag**2
    total = dens.sum()
    if total == 0:
        raise ValidationError("samples", "zero field has no energy expectation")
    ak = np.fft.fft(a)
    kin = np.sum(_kinetic_energy(psi, params) * (ak.real**2 + ak.imag**2)) / a.size
    pot = np.sum(params.potential * dens)
    return float((kin + pot) / total)
