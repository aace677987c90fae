"""Exponential boundary map, chirped horizon wave and its thermal spectrum.

Near the boundary the local wavenumber obeys ``d ln k / dx = -kappa``, so
``k(x) = k0 exp(-kappa x)`` and the integrated phase gives the chirp
``psi(x) = exp(-i A exp(-kappa x))`` with ``A = k0 / kappa``.

The regulated transform ``F(w) = sum psi(x) exp(-i w x) W(x) dx`` splits the
chirp into positive and negative frequencies.  For the ideal integral the
ratio ``|F(-w)|^2 / |F(w)|^2`` equals ``exp(-2 pi w / kappa)``; the fitted
slope of its logarithm therefore returns kappa.

The weight ``W`` is ``exp(-eps |x - x_ref|)`` times an optional raised-cosine
edge taper.  ``x_ref`` defaults to the grid origin, the high-wavenumber end:
a one-sided exponential regulator leaves the ratio exactly thermal, while a
kink in the slowly varying tail would not.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from . import _backend
from .dark_energy import worker_count
from .grid import Field, Grid, Sector, ValidationError, make_grid

WINDOWS = ("none", "raised_cosine")
MAX_ODE_STEP = 0.5


class DegenerateFitError(ValueError):
    """The spectrum does not support a thermal fit."""


class ScanError(ValueError):
    def __init__(self, kappa: float, cause: Exception):
        super().__init__(f"kappa={kappa}: {cause}")
        self.kappa = kappa
        self.cause = cause


@dataclass(frozen=True)
class HorizonParams:
    """Boundary-map parameters plus the frequency-analysis settings.

    ``None`` for an analysis setting selects the kappa-relative default:
    regulator ``0.05 kappa``, taper ``1 / kappa``, fit window
    ``(0.5 kappa, 3 kappa)``, frequency step ``0.1 kappa`` up to ``5 kappa``.
    """

    k0: float
    kappa: float
    x_grid: Grid
    regulator: float | None = None
    window: str = "raised_cosine"
    x_ref: float | None = None
    taper_width: float | None = None
    fit_window: tuple[float, float] | None = None
    omega_step: float | None = None
    omega_max: float | None = None
    max_fit_residual: float = 0.1

    def __post_init__(self):
        for name in ("k0", "kappa"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v > 0):
                raise ValidationError(name, "must be positive")
        if self.x_grid.ndim != 1:
            raise ValidationError("x_grid", "must be 1-D")
        k = self.kappa
        defaults = dict(regulator=0.05 * k, taper_width=1.0 / k,
                        fit_window=(0.5 * k, 3.0 * k), omega_step=0.1 * k,
                        omega_max=5.0 * k, x_ref=self.x_grid.origin[0])
        for name, v in defaults.items():
            if getattr(self, name) is None:
                object.__setattr__(self, name, v)
        object.__setattr__(self, "fit_window", tuple(float(w) for w in self.fit_window))
        if not (np.isfinite(self.regulator) and self.regulator > 0):
            raise ValidationError("regulator", "must be positive")
        if self.window not in WINDOWS:
            raise ValidationError("window", f"expected one of {WINDOWS}, got {self.window!r}")
        lo, hi = self.fit_window
        if not 0 < lo < hi:
            raise ValidationError("fit_window", "need 0 < low < high")
        if not (self.omega_step > 0 and self.omega_max > 0):
            raise ValidationError("omega_step", "frequency sampling must be positive")
        kdx = self.max_wavenumber * self.x_grid.spacing[0]
        if not kdx < np.pi:
            raise ValidationError(
                "x_grid", f"largest local wavenumber is aliased (k*dx = {kdx:.4g} >= pi)")

    @property
    def amplitude(self) -> float:
        return self.k0 / self.kappa

    @property
    def max_wavenumber(self) -> float:
        return self.k0 * math.exp(-self.kappa * self.x_grid.origin[0])

    def with_kappa(self, kappa: float) -> "HorizonParams":
        """Same setup at another kappa.

        ``k0`` and the point count are kept; lengths scale as ``1/kappa`` and
        rates as ``kappa``, with the left edge placed at the same ``k / kappa``.
        """
        lam = kappa / self.kappa
        g = self.x_grid
        k_edge = self.max_wavenumber * lam
        origin = math.log(self.k0 / k_edge) / kappa
        grid = make_grid(g.n_points[0], origin, g.spacing[0] / lam)
        return replace(self, kappa=kappa, x_grid=grid,
                       regulator=self.regulator * lam,
                       x_ref=origin + (self.x_ref - g.origin[0]) / lam,
                       taper_width=self.taper_width / lam,
                       fit_window=(self.fit_window[0] * lam, self.fit_window[1] * lam),
                       omega_step=self.omega_step * lam,
                       omega_max=self.omega_max * lam)


def horizon_params(kappa: float, k0: float = 10.0, n_points: int = 2**16,
                   edge_ratio: float = 400.0, span: float = 403.0, **kw) -> HorizonParams:
    """Grid that starts where ``k = edge_ratio * kappa`` and spans ``span / kappa``.

    The defaults keep ``k * dx`` near 2.5 at the left edge and leave the
    regulated tail at ``exp(-0.05 * 400) ~ 2e-9``.
    """
    origin = math.log(k0 / (edge_ratio * kappa)) / kappa
    grid = make_grid(n_points, origin, span / (kappa * n_points))
    return HorizonParams(k0, kappa, grid, **kw)


def _rk4_step(f: Callable[[float, float], float], x: float, y: float, h: float) -> float:
    k1 = f(x, y)
    k2 = f(x + h / 2, y + h * k1 / 2)
    k3 = f(x + h / 2, y + h * k2 / 2)
    k4 = f(x + h, y + h * k3)
    return y + h * (k1 + 2 * k2 + 2 * k3 + k4) / 6


def solve_boundary_ode(params: HorizonParams) -> tuple[np.ndarray, np.ndarray]:
    """Tabulate ``k(x)`` on the grid by RK4 on ``d ln k / dx = -kappa`` from ``k(0) = k0``."""
    g = params.x_grid
    h = g.spacing[0]
    if params.kappa * h > MAX_ODE_STEP:
        raise ValidationError("x_grid", f"step too coarse: kappa*dx = {params.kappa * h:.3g} > {MAX_ODE_STEP}")
    rate = params.kappa

    def rhs(x, y):
        return -rate

    x = g.coords(0)
    # bring ln k from x = 0 to the first grid point, then march the grid
    y = math.log(params.k0)
    n_lead = max(1, math.ceil(abs(x[0]) / h))
    h_lead = x[0] / n_lead
    for i in range(n_lead):
        y = _rk4_step(rhs, i * h_lead, y, h_lead)
    logk = np.empty_like(x)
    logk[0] = y
    for j in range(1, x.size):
        y = _rk4_step(rhs, x[j - 1], y, x[j] - x[j - 1])
        logk[j] = y
    return x, np.exp(logk)


def chirped_wave(params: HorizonParams) -> Field:
    """``exp(-i (k0/kappa) exp(-kappa x))`` on the parameter grid."""
    x = params.x_grid.coords(0)
    phase = -params.amplitude * np.exp(-params.kappa * x)
    return Field(Sector.XT, params.x_grid, np.exp(1j * phase), "chirp")


def local_wavenumber(psi: Field) -> np.ndarray:
    """Central-difference derivative of the unwrapped phase (one-sided at the ends)."""
    if psi.grid.ndim != 1:
        raise ValidationError("grid", "local wavenumber needs a 1-D field")
    a = psi.samples
    if np.any(a == 0):
        raise ValidationError("samples", "phase undefined where the field vanishes")
    inc = _backend.phase_increments(a)
    # an aliased chirp shows up as a ~2 pi jump between neighbouring increments
    if inc.size > 1 and np.abs(np.diff(inc)).max() > np.pi / 2:
        raise ValidationError("samples", "phase jumps by more than pi per cell (undersampled chirp)")
    dx = psi.grid.spacing[0]
    k = np.empty(a.size)
    k[1:-1] = (inc[:-1] + inc[1:]) / (2 * dx)
    k[0] = inc[0] / dx
    k[-1] = inc[-1] / dx
    return k


def analysis_weight(params: HorizonParams) -> np.ndarray:
    x = params.x_grid.coords(0)
    w = np.exp(-params.regulator * np.abs(x - params.x_ref))
    if params.window == "raised_cosine":
        dx = params.x_grid.spacing[0]
        nt = min(int(round(params.taper_width / dx)), x.size // 2)
        if nt > 0:
            ramp = 0.5 - 0.5 * np.cos(np.pi * np.arange(nt) / nt)
            w[:nt] *= ramp
            w[x.size - nt:] *= ramp[::-1]
    return w


@dataclass(frozen=True)
class SpectrumReport:
    omega: np.ndarray = field(repr=False)
    power_pos: np.ndarray = field(repr=False)
    power_neg: np.ndarray = field(repr=False)
    log_ratio: np.ndarray = field(repr=False)
    kappa_fit: float
    fit_window: tuple[float, float]
    fit_residual: float
    regulator: float


def thermal_spectrum(psi: Field, params: HorizonParams) -> SpectrumReport:
    """Positive/negative-frequency powers and the surface gravity from their ratio.

    Fits ``log_ratio = -(2 pi / kappa_fit) * omega`` by least squares over
    ``params.fit_window``.  ``fit_residual`` is the largest deviation from the
    line relative to the line's span across the window; above
    ``params.max_fit_residual`` the spectrum is rejected as non-thermal.
    """
    if psi.grid != params.x_grid:
        raise ValidationError("grid", "field and parameters use different grids")
    n_om = int(math.floor(params.omega_max / params.omega_step + 1e-9))
    omega = params.omega_step * np.arange(1, n_om + 1)
    lo, hi = params.fit_window
    tol = 1e-9 * params.omega_step
    sel = (omega >= lo - tol) & (omega <= hi + tol)
    if sel.sum() < 4:
        raise DegenerateFitError(f"only {int(sel.sum())} frequencies inside the fit window")
    g = params.x_grid
    w = analysis_weight(params)
    f = _backend.regulated_dft(psi.samples, g.origin[0], g.spacing[0], w,
                               np.concatenate([omega, -omega]))
    power = f.real**2 + f.imag**2
    pos, neg = power[:n_om], power[n_om:]
    tiny = np.finfo(float).tiny
    if np.any(pos[sel] <= tiny):
        raise DegenerateFitError("positive-frequency power underflows inside the fit window")
    if np.any(neg[sel] <= tiny):
        raise DegenerateFitError("negative-frequency power underflows inside the fit window")
    with np.errstate(divide="ignore", invalid="ignore"):
        log_ratio = np.log(neg / pos)
    om, lr = omega[sel], log_ratio[sel]
    slope = float(om @ lr / (om @ om))
    if not slope < 0:
        raise DegenerateFitError(f"log ratio does not decrease with frequency (slope {slope:.3g})")
    span = abs(slope) * (om[-1] - om[0])
    resid = float(np.abs(lr - slope * om).max() / span)
    if resid > params.max_fit_residual:
        raise DegenerateFitError(f"spectrum is not thermal: residual {resid:.3g} of the fitted span")
    return SpectrumReport(omega, pos, neg, log_ratio, -2 * np.pi / slope,
                          (lo, hi), resid, params.regulator)


@dataclass(frozen=True)
class ScanRow:
    kappa: float
    kappa_fit: float
    rel_err: float
    fit_residual: float


def _scan_row(kappa: float, template: HorizonParams) -> ScanRow:
    try:
        p = template.with_kappa(kappa)
        rep = thermal_spectrum(chirped_wave(p), p)
    except (ValueError, ArithmeticError) as exc:
        raise ScanError(kappa, exc) from exc
    return ScanRow(kappa, rep.kappa_fit, abs(rep.kappa_fit - kappa) / kappa, rep.fit_residual)


def surface_gravity_scan(kappas: Sequence[float], template: HorizonParams,
                         threads: int | None = None) -> list[ScanRow]:
    """Chirp and fit for each kappa; rows come back in input order."""
    kappas = [float(k) for k in kappas]
    if not kappas:
        return []
    nw = min(worker_count(threads), len(kappas))
    if nw == 1:
        return [_scan_row(k, template) for k in kappas]
    with ThreadPoolExecutor(max_workers=nw) as pool:
        return list(pool.map(lambda k: _scan_row(k, template), kappas))
