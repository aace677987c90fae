import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dualwave.grid import Field, Sector, ValidationError, make_grid, norm2
from dualwave.sector_xt import XtParams, energy_expectation, evolve_xt, xt_trajectory
from dualwave.states import coherent_state, gaussian, harmonic_potential, plane_wave
from oracles import coherent_orbit, free_gaussian

WELL = make_grid(512, -32.0, 0.125)


def strang_exponent(dt=0.02, total=1.0):
    """Observed order from errors at dt and dt/2 against a dt/8 reference in a harmonic well.

    The reference error biases the estimate up by about 0.07.
    """
    v = harmonic_potential(WELL)
    psi0 = gaussian(WELL, center=1.5, sigma=0.6, wavenumber=0.5)

    def run(h):
        return evolve_xt(psi0, XtParams(1.0, v, h), int(round(total / h))).samples

    ref = run(dt / 8)
    e1 = np.abs(run(dt) - ref).max()
    e2 = np.abs(run(dt / 2) - ref).max()
    return np.log2(e1 / e2)


def test_free_gaussian_matches_closed_form():
    g = make_grid(1024, -32.0, 0.0625)
    psi = evolve_xt(gaussian(g, sigma=1.0), XtParams(1.0, np.zeros(1024), 0.01), 200)
    want = free_gaussian(g.coords(0), 2.0, 1.0)
    assert np.abs(psi.samples - want).max() < 1e-10
    d = np.abs(psi.samples) ** 2
    x = g.coords(0)
    assert np.sqrt(np.sum(x**2 * d) / np.sum(d)) == pytest.approx(np.sqrt(2), rel=1e-10)


def test_free_case_is_step_size_independent():
    g = make_grid(256, -16.0, 0.125)
    psi0 = gaussian(g, sigma=0.8, wavenumber=1.0)
    a = evolve_xt(psi0, XtParams(2.0, np.zeros(256), 0.5), 2).samples
    b = evolve_xt(psi0, XtParams(2.0, np.zeros(256), 0.01), 100).samples
    assert np.abs(a - b).max() < 1e-12


def test_zero_steps_is_identity():
    psi0 = coherent_state(WELL, 1.0)
    out = evolve_xt(psi0, XtParams(1.0, harmonic_potential(WELL), 1e-3), 0)
    assert np.array_equal(out.samples, psi0.samples)


def test_coherent_state_returns_after_one_period():
    n = 6283
    p = XtParams(1.0, harmonic_potential(WELL), 2 * np.pi / n)
    psi = evolve_xt(coherent_state(WELL, 2.0), p, n)
    # the analytic orbit carries the zero-point phase exp(-i pi) = -1 at one period
    want = coherent_orbit(WELL.coords(0), 2 * np.pi, 2.0)
    assert np.abs(psi.samples - want).max() < 1e-4
    assert np.abs(psi.samples + coherent_state(WELL, 2.0).samples).max() < 1e-4


def test_coherent_state_follows_orbit_midway():
    p = XtParams(1.0, harmonic_potential(WELL), 1e-3)
    psi = evolve_xt(coherent_state(WELL, 2.0), p, 1500)
    assert np.abs(psi.samples - coherent_orbit(WELL.coords(0), 1.5, 2.0)).max() < 1e-5


def test_strang_is_second_order():
    assert 1.8 <= strang_exponent() <= 2.2


def test_norm_conserved_for_rough_potential():
    rng = np.random.default_rng(0)
    v = rng.uniform(-50, 50, WELL.n_points[0])
    psi0 = gaussian(WELL, sigma=2.0, wavenumber=3.0)
    out = evolve_xt(psi0, XtParams(0.7, v, 0.01), 1000)
    assert abs(norm2(out) - norm2(psi0)) < 1e-10 * norm2(psi0)


def test_time_reversal():
    p = XtParams(1.0, harmonic_potential(WELL) + np.sin(WELL.coords(0)), 2e-3)
    psi0 = gaussian(WELL, center=-1.0, sigma=0.7, wavenumber=2.0)
    back = evolve_xt(evolve_xt(psi0, p, 400), p, -400)
    assert np.abs(back.samples - psi0.samples).max() < 1e-9


def test_trajectory_records():
    p = XtParams(1.0, harmonic_potential(WELL), 1e-2)
    steps = [s for s, _ in xt_trajectory(coherent_state(WELL, 1.0), p, 25, every=10)]
    assert steps == [0, 10, 20, 25]
    final = list(xt_trajectory(coherent_state(WELL, 1.0), p, 25, every=10))[-1][1]
    direct = evolve_xt(coherent_state(WELL, 1.0), p, 25)
    assert np.abs(final.samples - direct.samples).max() < 1e-13


def test_parameter_validation():
    v = np.zeros(512)
    with pytest.raises(ValidationError) as info:
        XtParams(1.0, np.where(np.arange(512) == 3, np.nan, 0.0), 1e-3)
    assert info.value.field == "potential"
    for kw, name in ((dict(mass=0.0), "mass"), (dict(dt=-1.0), "dt"), (dict(hbar=0.0), "hbar")):
        args = {**dict(mass=1.0, potential=v, dt=1e-3), **kw}
        with pytest.raises(ValidationError) as info:
            XtParams(**args)
        assert info.value.field == name
    with pytest.raises(ValidationError):
        evolve_xt(coherent_state(WELL, 1.0), XtParams(1.0, np.zeros(64), 1e-3), 1)
    with pytest.raises(ValidationError):
        evolve_xt(coherent_state(WELL, 1.0).retag(Sector.KE), XtParams(1.0, v, 1e-3), 1)


def test_energy_of_plane_wave():
    g = make_grid(256, -8.0, 0.0625)
    k1 = 11 * g.dual_spacing(0)
    p = XtParams(1.3, np.zeros(256), 1e-3, hbar=0.7)
    assert energy_expectation(plane_wave(g, k1), p) == pytest.approx(0.7**2 * k1**2 / 2.6, abs=1e-10)


def test_ground_state_energy():
    psi = gaussian(WELL, sigma=np.sqrt(0.5))
    assert energy_expectation(psi, XtParams(1.0, harmonic_potential(WELL), 1e-3)) == pytest.approx(0.5, abs=1e-6)


def test_energy_drift_over_thousand_steps():
    # Strang conserves a modified energy; at dt = 2e-4 the wobble of <H> is ~1e-9
    p = XtParams(1.0, harmonic_potential(WELL), 2e-4)
    e = [energy_expectation(f, p) for _, f in xt_trajectory(coherent_state(WELL, 2.0), p, 1000, 10)]
    assert max(abs(v - e[0]) for v in e) < 1e-8
    free = XtParams(1.0, np.zeros(512), 0.05)
    e = [energy_expectation(f, free)
         for _, f in xt_trajectory(gaussian(WELL, sigma=1.0, wavenumber=1.0), free, 1000, 100)]
    assert max(abs(v - e[0]) for v in e) < 1e-12


def test_zero_field_energy_rejected():
    with pytest.raises(ValidationError):
        energy_expectation(Field(Sector.XT, WELL, np.zeros(512)), XtParams(1.0, np.zeros(512), 1e-3))


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 2**31), amp=st.floats(0.0, 100.0), dt=st.floats(1e-4, 0.1))
def test_norm_conservation_property(seed, amp, dt):
    g = make_grid(128, -8.0, 0.125)
    rng = np.random.default_rng(seed)
    psi0 = Field(Sector.XT, g, rng.normal(size=128) + 1j * rng.normal(size=128))
    out = evolve_xt(psi0, XtParams(1.0, amp * rng.normal(size=128), dt), 1000)
    assert abs(norm2(out) - norm2(psi0)) < 1e-10 * norm2(psi0)
