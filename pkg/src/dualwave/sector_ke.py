"""Evolution of phi(k) in the energy parameter E.

The generator is ``T = alpha X^2 + beta X^4 + V0`` with ``X = -i d/dk``, i.e.

    i hbar d(phi)/dE = (-alpha d^2/dk^2 + beta d^4/dk^4 + V0) phi.

T is a function of X alone, so it is diagonal on the dual (x) axis and each
step ``exp(-i T dE / hbar)`` is applied exactly there.  Steps exist only so
trajectories can be recorded.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .fourier import apply_X, position_multipliers
from .grid import Field, Sector, ValidationError


@dataclass(frozen=True)
class KeParams:
    alpha: float
    v0: float = 0.0
    beta: float = 0.0
    dE: float = 1e-2
    hbar: float = 1.0

    def __post_init__(self):
        for name in ("alpha", "v0", "beta", "dE", "hbar"):
            if not np.isfinite(getattr(self, name)):
                raise ValidationError(name, "must be finite")
        # alpha = 0 is admitted only as the degenerate constant-generator limit
        if self.alpha < 0:
            raise ValidationError("alpha", "must be positive")
        if self.beta < 0:
            raise ValidationError("beta", "must be nonnegative")
        if self.dE <= 0:
            raise ValidationError("dE", "must be positive")
        if self.hbar <= 0:
            raise ValidationError("hbar", "must be positive")


def generator_symbol(x: np.ndarray, params: KeParams) -> np.ndarray:
    """Eigenvalue of the generator at dual position ``x``."""
    x2 = x * x
    return params.alpha * x2 + params.beta * x2 * x2 + params.v0


def _check(phi: Field) -> None:
    if phi.sector != Sector.KE:
        raise ValidationError("sector", "energy evolution expects a KE field")
    if phi.grid.ndim != 1:
        raise ValidationError("grid", "energy evolution needs a 1-D field along k")


def ke_trajectory(phi0: Field, params: KeParams, n_steps: int,
                  every: int = 1) -> Iterator[tuple[int, Field]]:
    """Yield ``(step, field)`` at step 0, every ``every`` steps, and at the end.

    Negative ``n_steps`` evolves towards lower E.
    """
    _check(phi0)
    if every < 1:
        raise ValidationError("every", "must be >= 1")
    yield 0, phi0
    total = abs(int(n_steps))
    if total == 0:
        return
    dE = params.dE if n_steps > 0 else -params.dE
    step = np.exp(-1j * generator_symbol(position_multipliers(phi0.grid), params)
                  * dE / params.hbar)
    a = np.fft.fft(phi0.samples)
    for s in range(1, total + 1):
        a = a * step
        if s % every == 0 or s == total:
            yield s, phi0.with_samples(np.fft.ifft(a))


def evolve_ke(phi0: Field, params: KeParams, n_steps: int) -> Field:
    """Propagate ``phi0`` by ``n_steps`` steps of size ``params.dE``."""
    last = phi0
    for _, last in ke_trajectory(phi0, params, n_steps, every=max(abs(int(n_steps)), 1)):
        pass
    return last


def apply_generator(phi: Field, params: KeParams) -> Field:
    """``T phi`` built from repeated :func:`apply_X`, independent of the propagator."""
    x1 = apply_X(phi)
    x2 = apply_X(x1)
    out = params.alpha * x2.samples + params.v0 * phi.samples
    if params.beta:
        out = out + params.beta * apply_X(apply_X(x2)).samples
    return phi.with_samples(out)


def group_law_check(phi0: Field, params: KeParams, n1: int, n2: int) -> float:
    """``max|U(n1+n2) phi0 - U(n2) U(n1) phi0|``."""
    joint = evolve_ke(phi0, params, n1 + n2)
    split = evolve_ke(evolve_ke(phi0, params, n1), params, n2)
    return float(np.abs(joint.samples - split.samples).max())


def generator_consistency(phi0: Field, params: KeParams) -> float:
    """Relative L2 residual between the central E-difference at E = 0 and ``-(i/hbar) T phi0``.

    Second order in ``params.dE``.
    """
    _check(phi0)
    fwd = evolve_ke(phi0, params, 1).samples
    bwd = evolve_ke(phi0, params, -1).samples
    deriv = (fwd - bwd) / (2 * params.dE)
    want = -1j / params.hbar * apply_generator(phi0, params).samples
    scale = np.linalg.norm(want)
    if scale == 0:
        return float(np.linalg.norm(deriv))
    return float(np.linalg.norm(deriv - want) / scale)


def generator_convergence(phi0: Field, params: KeParams) -> tuple[float, float, float]:
    """Residuals at ``dE`` and ``dE/2`` and their ratio (about 4 when second order).

    Raises ValidationError if halving ``dE`` does not reduce the residual.
    """
    r1 = generator_consistency(phi0, params)
    half = KeParams(params.alpha, params.v0, params.beta, params.dE / 2, params.hbar)
    r2 = generator_consistency(phi0, half)
    if r1 < 1e-14:
        return r1, r2, float("nan")
    if not r2 < r1:
        raise ValidationError("dE", f"too large to see convergence (residuals {r1:.3g}, {r2:.3g})")
    return r1, r2, r1 / r2

