import math

import numpy as np
import pytest

from dualwave import _backend
from dualwave.grid import Field, Sector, ValidationError, make_grid
from dualwave.horizon import (DegenerateFitError, HorizonParams, ScanError, analysis_weight,
                              chirped_wave, horizon_params, local_wavenumber, solve_boundary_ode,
                              surface_gravity_scan, thermal_spectrum)
from dualwave.states import plane_wave
from oracles import chirp_transform_closed_form, thermal_ratio_quadrature

# x = 0 sits on sample 512
ZERO_GRID = make_grid(1024, -2.0, 1 / 256)


def test_ode_matches_exponential():
    for kappa in (0.5, 1.0, 2.0):
        p = horizon_params(kappa)
        x, k = solve_boundary_ode(p)
        assert np.abs(k / (p.k0 * np.exp(-kappa * x)) - 1).max() < 1e-8


def test_ode_boundary_value_and_half_point():
    p = HorizonParams(10.0, 1.0, ZERO_GRID)
    x, k = solve_boundary_ode(p)
    assert x[512] == 0.0
    assert k[512] == pytest.approx(10.0, rel=1e-12)
    g = make_grid(256, math.log(2) - 64 * 0.01, 0.01)
    x, k = solve_boundary_ode(HorizonParams(1.0, 1.0, g))
    assert abs(x[64] - math.log(2)) < 1e-15
    assert abs(k[64] - 0.5) < 1e-8


def test_ode_vanishing_rate():
    _, k = solve_boundary_ode(HorizonParams(3.0, 1e-12, ZERO_GRID))
    assert np.abs(k - 3.0).max() < 1e-10


def test_ode_rejects_coarse_step():
    with pytest.raises(ValidationError) as info:
        solve_boundary_ode(HorizonParams(1e-3, 1.0, make_grid(64, 0.0, 1.0)))
    assert info.value.field == "x_grid"


def test_chirp_is_pure_phase():
    psi = chirped_wave(horizon_params(1.0))
    assert np.abs(np.abs(psi.samples) - 1).max() <= 4 * np.finfo(float).eps


def test_chirp_phase_at_origin_and_far_end():
    p = HorizonParams(10.0, 1.0, ZERO_GRID)
    psi = chirped_wave(p)
    want = -p.amplitude
    got = np.angle(psi.samples[512])
    assert abs(np.angle(np.exp(1j * (got - want)))) < 1e-12
    far = horizon_params(1.0)
    end = chirped_wave(far).samples[-1]
    x_max = far.x_grid.extent(0)[1]
    assert abs(np.angle(end)) <= far.amplitude * math.exp(-far.kappa * x_max) * (1 + 1e-9)


def test_local_wavenumber_of_plane_wave_and_constant():
    g = make_grid(512, -3.0, 0.02)
    k = local_wavenumber(plane_wave(g, 7.3))
    assert np.abs(k - 7.3).max() < 1e-10
    k = local_wavenumber(Field(Sector.XT, g, np.full(512, 2.0 - 1.0j)))
    assert np.abs(k).max() < 1e-12


def test_local_wavenumber_errors():
    g = make_grid(64, 0.0, 0.1)
    a = np.ones(64, dtype=complex)
    a[10] = 0
    with pytest.raises(ValidationError):
        local_wavenumber(Field(Sector.XT, g, a))
    # a chirp whose cell phase passes pi folds back: the increments jump by ~2 pi
    x = g.coords(0)
    with pytest.raises(ValidationError):
        local_wavenumber(Field(Sector.XT, g, np.exp(1j * 30 * x**2)))


def test_chirp_wavenumber_matches_ode():
    p = horizon_params(1.0, k0=10.0, n_points=2**14, edge_ratio=50.0, span=60.0)
    k_num = local_wavenumber(chirped_wave(p))
    _, k_ode = solve_boundary_ode(p)
    assert np.abs(k_num[1:-1] / k_ode[1:-1] - 1).max() < 1e-4
    assert np.all(np.diff(k_num) < 0)


def test_consistency_loop_random_pairs():
    rng = np.random.default_rng(77)
    for _ in range(10):
        k0, kappa = rng.uniform(0.5, 50.0), rng.uniform(0.2, 5.0)
        p = horizon_params(kappa, k0=k0, n_points=2**14, edge_ratio=50.0, span=60.0)
        assert p.max_wavenumber * p.x_grid.spacing[0] < np.pi
        k_num = local_wavenumber(chirped_wave(p))
        _, k_ode = solve_boundary_ode(p)
        assert np.abs(k_num[1:-1] / k_ode[1:-1] - 1).max() < 1e-4
        assert np.all(np.diff(k_num) < 0)


@pytest.mark.parametrize("lam", [2.0, 4.0, 0.5, 0.125])
def test_scaling_covariance_is_bit_exact(lam):
    base = horizon_params(1.0, k0=10.0, n_points=2**12, edge_ratio=50.0, span=60.0)
    g = base.x_grid
    scaled = HorizonParams(base.k0 * lam, base.kappa * lam,
                           make_grid(g.n_points[0], g.origin[0] / lam, g.spacing[0] / lam))
    assert chirped_wave(scaled).samples.tobytes() == chirped_wave(base).samples.tobytes()


def test_quadrature_oracle_is_thermal():
    for omega, kappa, eps in ((1.0, 1.0, 0.05), (2.5, 2.0, 0.1)):
        a = 10.0 / kappa
        ratio, pos, neg = thermal_ratio_quadrature(omega, kappa, a, eps)
        assert abs(pos / chirp_transform_closed_form(omega, kappa, a, eps) - 1) < 1e-10
        assert abs(neg / chirp_transform_closed_form(-omega, kappa, a, eps) - 1) < 1e-10
        assert ratio == pytest.approx(math.exp(-2 * math.pi * omega / kappa), rel=1e-10)


def test_spectrum_matches_quadrature_oracle():
    p = horizon_params(1.0)
    rep = thermal_spectrum(chirped_wave(p), p)
    for omega in (1.0, 2.0):
        i = int(np.argmin(np.abs(rep.omega - omega)))
        ratio, _, _ = thermal_ratio_quadrature(omega, 1.0, p.amplitude, p.regulator)
        assert rep.log_ratio[i] == pytest.approx(math.log(ratio), rel=1e-3)


@pytest.mark.parametrize("kappa", [0.5, 1.0, 2.0])
def test_kappa_recovered(kappa):
    p = horizon_params(kappa)
    rep = thermal_spectrum(chirped_wave(p), p)
    assert rep.fit_window == (0.5 * kappa, 3.0 * kappa)
    assert abs(rep.kappa_fit - kappa) / kappa < 0.05
    half = horizon_params(kappa, regulator=p.regulator / 2)
    rep_half = thermal_spectrum(chirped_wave(half), half)
    assert abs(rep_half.kappa_fit - rep.kappa_fit) / rep.kappa_fit < 0.01
    assert np.all(rep.power_pos >= 0) and np.all(rep.power_neg >= 0)


def test_log_ratio_is_linear_for_unit_kappa():
    p = horizon_params(1.0)
    assert thermal_spectrum(chirped_wave(p), p).fit_residual < 0.02


def test_plane_wave_is_rejected():
    p = horizon_params(1.0)
    k1 = 2.0
    psi = plane_wave(p.x_grid, k1)
    with pytest.raises(DegenerateFitError):
        thermal_spectrum(psi, p)
    g = p.x_grid
    f = _backend.regulated_dft(psi.samples, g.origin[0], g.spacing[0], analysis_weight(p),
                               np.array([k1, -k1]))
    # the finite window leaks a little into negative frequencies; nothing near 1e-6
    assert abs(f[1]) ** 2 / abs(f[0]) ** 2 < 1e-3


def test_degenerate_window():
    p = horizon_params(1.0, fit_window=(1.0, 1.2))
    with pytest.raises(DegenerateFitError):
        thermal_spectrum(chirped_wave(p), p)


def test_grid_mismatch():
    p = horizon_params(1.0)
    with pytest.raises(ValidationError):
        thermal_spectrum(chirped_wave(horizon_params(2.0)), p)


@pytest.mark.parametrize("kw,name", [(dict(k0=0.0), "k0"), (dict(kappa=-1.0), "kappa"),
                                     (dict(regulator=0.0), "regulator"),
                                     (dict(window="hann"), "window"),
                                     (dict(fit_window=(3.0, 1.0)), "fit_window")])
def test_param_validation(kw, name):
    args = {**dict(k0=10.0, kappa=1.0, x_grid=ZERO_GRID), **kw}
    with pytest.raises(ValidationError) as info:
        HorizonParams(**args)
    assert info.value.field == name


def test_aliasing_guard():
    with pytest.raises(ValidationError) as info:
        HorizonParams(10.0, 1.0, make_grid(64, -3.0, 0.2))
    assert info.value.field == "x_grid"


def test_with_kappa_keeps_edge_ratio():
    p = horizon_params(1.0)
    q = p.with_kappa(2.0)
    assert q.max_wavenumber / q.kappa == pytest.approx(p.max_wavenumber / p.kappa, rel=1e-12)
    assert q.regulator == pytest.approx(2 * p.regulator)
    assert q.fit_window == pytest.approx((1.0, 6.0))


def test_scan():
    template = horizon_params(1.0)
    assert surface_gravity_scan([], template) == []
    rows = surface_gravity_scan([0.5, 1.0, 2.0], template, threads=1)
    assert [r.kappa for r in rows] == [0.5, 1.0, 2.0]
    assert all(r.rel_err < 0.05 for r in rows)
    direct = thermal_spectrum(chirped_wave(template), template)
    assert rows[1].kappa_fit == direct.kappa_fit
    assert surface_gravity_scan([0.5, 1.0, 2.0], template, threads=3) == rows


def test_scan_attaches_kappa_to_failures():
    with pytest.raises(ScanError) as info:
        surface_gravity_scan([1.0, -2.0], horizon_params(1.0), threads=1)
    assert info.value.kappa == -2.0
