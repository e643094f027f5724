import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from eqym.geometry import named_metric
from eqym.solvers import (CFLViolation, ScalarWave, StepFailure, WaveConfig, convergence_factor, evolve_wave,
                          integrate_radial, ode_residual, restrict, series_start, son_series)
from eqym.reduced import son_lhs


def test_series_start_oracle():
    s = series_start("SON", 1.0, 0.01, n=5)
    assert s["g"] == pytest.approx(1 - 9 / 14 * 1e-4, rel=1e-14)
    assert s["g'"] == pytest.approx(-9 / 7 * 0.01, rel=1e-14)


def test_series_start_guards_and_trivial_data():
    assert series_start("SON", 0.0, 0.05, n=6) == {"g": 0.0, "g'": 0.0}
    for bad in (0.0, 0.2):
        with pytest.raises(ValueError):
            series_start("SON", 1.0, bad)
    with pytest.raises(ValueError):
        series_start("SUN-H", 1.0, 0.01)


def test_series_truncation_error_is_fourth_order():
    # with the r^4 term included the ODE defect is O(r^4): halving r0 cuts it by ~16
    def defect(r0, order):
        g, gp = son_series(5, 1.0, r0, order)
        c = -9 / 14
        gpp = 2 * c + (12 * (-(3) * (6 * c - 1) / 36) * r0 ** 2 if order >= 4 else 0.0)
        return abs(son_lhs(5, r0, g, gp, gpp))
    ratio = defect(0.02, 4) / defect(0.01, 4)
    assert 12 < ratio < 20


def test_zero_data_stays_zero():
    sol = integrate_radial("SON", 0.0, (0.01, 3.0), n=5)
    assert not np.any(sol.values["g"])


def test_radial_solution_satisfies_ode():
    sol = integrate_radial("SON", 1.0, (0.01, 3.0), n=5)
    r = np.linspace(0.05, 2.9, 40)
    assert ode_residual(sol, r).max() < 1e-7
    head, rows = sol.to_rows()
    assert head == ["r", "g", "g'"] and len(rows) == len(sol.r)


def test_blow_up_is_reported():
    with pytest.raises(StepFailure) as exc:
        integrate_radial("SON", -40.0, (0.01, 5.0), n=8)
    assert exc.value.last_r < 5.0


@settings(max_examples=10)
@given(st.floats(-1.5, 1.5), st.sampled_from([0, 1, 2]))
def test_so4_start_respects_hpm_structure(b, p):
    s = series_start("SOPQ4", b, 0.01, p=p, a=0.3)
    assert np.isfinite(list(s.values())).all()
    assert s["f"] == pytest.approx(0.3, abs=0.01)


def test_wave_config_validation():
    with pytest.raises(CFLViolation):
        WaveConfig(cfl=0.95).validate()
    with pytest.raises(CFLViolation):
        WaveConfig(cfl=0.0).validate()
    with pytest.raises(ValueError):
        WaveConfig(mode="other").validate()
    with pytest.raises(ValueError):
        WaveConfig(r_min=2.0, r_max=1.0).validate()


def test_unstable_grid_near_origin_is_rejected():
    with pytest.raises(CFLViolation):
        evolve_wave(1.0, 0.0, WaveConfig(r_min=0.0, r_max=1.0, N=400, cfl=0.9, T=0.1, n=8))


def test_vacuum_stays_put():
    cfg = WaveConfig(N=128, T=1.0)
    run = evolve_wave(np.ones_like, lambda r: 0 * r, cfg)
    assert np.array_equal(run.final["u"], np.ones(128))
    assert np.all(run.energies == 0)


def test_energy_is_conserved_with_mirror_faces():
    cfg = WaveConfig(N=256, T=2.0)
    run = evolve_wave(lambda r: 1 + 0.3 * np.exp(-(r - 5) ** 2), lambda r: 0 * r, cfg)
    assert run.energy_drift < 1e-3


def test_outflow_does_not_create_energy():
    cfg = WaveConfig(N=256, T=6.0, boundary="outflow")
    run = evolve_wave(lambda r: 1 + 0.3 * np.exp(-4 * (r - 8) ** 2), lambda r: 0 * r, cfg)
    assert run.energies[-1] < run.energies[0]


def test_full_mode_constant_data_is_static():
    met = named_metric("warped", 5)
    cfg = WaveConfig(mode="full", N=128, T=0.5)
    run = evolve_wave(lambda r: (0 * r, 0 * r, 0 * r + 0.4), lambda r: (0 * r, 0 * r, 0 * r), cfg, met)
    assert np.allclose(run.final["h3"], 0.4, atol=1e-13)
    assert np.abs(run.final["h1"]).max() < 1e-13


def test_full_mode_is_second_order():
    cfg = WaveConfig(mode="full", n=5, N=64, T=0.5)
    u0 = lambda r: (np.cos(0.2 * np.exp(-(r - 5) ** 2)), np.sin(0.2 * np.exp(-(r - 5) ** 2)), 0 * r)
    v0 = lambda r: (0 * r, 0 * r, 0 * r)
    res = convergence_factor(u0, v0, cfg, key="h1")
    assert 3.0 < res["factor"] < 5.0


def test_discrete_energy_matches_hamiltonian_derivative():
    # force = -grad of the potential part of energy/2
    sw = ScalarWave(WaveConfig(N=32))
    rng = np.random.default_rng(1)
    u = 1 + 0.1 * rng.normal(size=32)
    d = rng.normal(size=32) * 1e-6
    dE = (sw.energy(u + d, 0 * u) - sw.energy(u - d, 0 * u)) / 2
    assert dE == pytest.approx(-2 * np.dot(sw.force(u), d), rel=1e-6)


def test_restrict_averages_pairs():
    assert np.array_equal(restrict(np.array([1.0, 3.0, 5.0, 7.0])), [2.0, 6.0])
