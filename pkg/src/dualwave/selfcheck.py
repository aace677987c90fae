"""Fast invariant suite behind ``dualwave selfcheck``."""
from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import fourier
from .dark_energy import EnsembleSpec, ensemble_density, single_mode_weight
from .grid import Field, Sector, make_grid, norm2
from .horizon import chirped_wave, horizon_params, local_wavenumber, solve_boundary_ode
from .sector_ke import KeParams, apply_generator, evolve_ke
from .sector_xt import XtParams, evolve_xt
from .states import coherent_state, harmonic_potential


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float


def _random_field(grid, sector, seed):
    rng = np.random.default_rng(seed)
    return Field(sector, grid, rng.normal(size=grid.shape) + 1j * rng.normal(size=grid.shape))


def _round_trip(corrupt_sign: bool):
    g = make_grid((128, 128), (-8.0, -4.0), (0.125, 0.0625))
    phi = _random_field(g, Sector.KE, 1)
    back_conv = fourier.MapConvention(forward_sign_time=+1) if corrupt_sign else fourier.DEFAULT_CONVENTION
    psi = fourier.to_xt(phi)
    back = fourier.to_ke(psi, back_conv, target=g)
    err = float(np.abs(back.samples - phi.samples).max() / np.abs(phi.samples).max())
    parseval = abs(norm2(psi) - norm2(phi)) / norm2(phi)
    return err < 1e-12 and parseval < 1e-12, f"max error {err:.2e}, Parseval {parseval:.2e}"


def _unitarity_xt():
    g = make_grid(512, -32.0, 0.125)
    psi = coherent_state(g, 2.0)
    p = XtParams(1.0, harmonic_potential(g), 1e-3)
    out = evolve_xt(psi, p, 1000)
    drift = abs(norm2(out) - norm2(psi)) / norm2(psi)
    return drift < 1e-10, f"norm drift {drift:.2e} over 1000 steps"


def _unitarity_ke():
    g = make_grid(256, -16.0, 0.125)
    phi = _random_field(g, Sector.KE, 2)
    out = evolve_ke(phi, KeParams(0.5, 0.3, 0.01, 1e-3), 10_000)
    drift = abs(norm2(out) - norm2(phi)) / norm2(phi)
    return drift < 1e-12, f"norm drift {drift:.2e} over 10000 steps"


def _hermiticity():
    g = make_grid(32, -4.0, 0.25)
    p = KeParams(0.5, 0.7)
    rx = fourier.hermiticity_check(fourier.apply_X, g)
    rg = fourier.hermiticity_check(lambda f: apply_generator(f, p), g)
    ok = (rx.max_asymmetry < 1e-12 and rg.max_asymmetry < 1e-10
          and rg.max_imag < 1e-10 and rg.min_eigenvalue >= p.v0 - 1e-10)
    return ok, f"asymmetry {rx.max_asymmetry:.1e}/{rg.max_asymmetry:.1e}, min eig {rg.min_eigenvalue:.6f}"


def _flatness():
    g = make_grid((32, 32), (-2.0, -2.0), (0.125, 0.125))
    spec = EnsembleSpec(single_mode_weight(g, 20, 9, 1.5), 16, 7)
    rep = ensemble_density(spec, threads=1)
    rel = abs(rep.rho_estimate - rep.rho_exact_sum) / rep.rho_exact_sum
    return rep.spatial_cv < 1e-12 and rel < 1e-12, f"cv {rep.spatial_cv:.1e}, rho error {rel:.1e}"


def _chirp_loop():
    p = horizon_params(1.0, k0=10.0, n_points=2**14, edge_ratio=50.0, span=60.0)
    k_num = local_wavenumber(chirped_wave(p))
    _, k_ode = solve_boundary_ode(p)
    err = float(np.abs(k_num[1:-1] / k_ode[1:-1] - 1).max())
    return err < 1e-4, f"max relative wavenumber error {err:.2e}"


def checks(corrupt_sign: bool = False) -> list[tuple[str, Callable[[], tuple[bool, str]]]]:
    return [
        ("round-trip", lambda: _round_trip(corrupt_sign)),
        ("unitarity-xt", _unitarity_xt),
        ("unitarity-ke", _unitarity_ke),
        ("hermiticity", _hermiticity),
        ("dark-energy-flatness", _flatness),
        ("chirp-consistency", _chirp_loop),
    ]


def run_selfcheck(corrupt_sign: bool = False) -> list[CheckResult]:
    results = []
    for name, fn in checks(corrupt_sign):
        t0 = time.perf_counter()
        try:
            ok, detail = fn()
        except Exception as exc:  # a crashing check is a failing check
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        results.append(CheckResult(name, bool(ok), detail, time.perf_counter() - t0))
    return results
