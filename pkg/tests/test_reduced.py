import numpy as np
import pytest
from hypothesis import given, strategies as st

from eqym.ansatz import constant, make_ansatz
from eqym.geometry import named_metric
from eqym.reduced import (ComplexProfile, ReducedState, constraint_residuals, energy, hpm_inverse, hpm_transform,
                          hwave_lhs, o2_action, projected_lhs, reduced_lhs, reduced_rhs, reduced_rhs_hpm,
                          reduced_rhs_hpm_printed, scale, so4_lhs, son_lhs, sun_lhs)
from eqym.suites import random_ansatz, sample_point

finite = st.floats(-2, 2, allow_nan=False)
radius = st.floats(0.2, 3.0)


def test_so4_unit_profile_oracle():
    # f = 0, g = 1, r = 1: g'' = -4 from the corrected system
    Lg, Lf = so4_lhs(4, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0)
    assert Lg == pytest.approx(4.0) and Lf == 0.0


@pytest.mark.parametrize("p", [1, 2, 3])
def test_printed_so4_system_disagrees_with_projection(p, rng):
    a = random_ansatz("SOPQ4", {"p": p, "q": 4 - p}, rng)
    x = sample_point(a.signature, rng)
    r = float(np.sqrt(a.signature.norm2(x)))
    proj = projected_lhs(a, None, x)
    st_ = ReducedState.from_ansatz(a, r)
    good = reduced_lhs(st_)
    bad = reduced_lhs(st_, variant="printed")
    assert abs(proj["g"] - good["g"]) < 1e-10 * max(1, abs(good["g"]))
    assert abs(proj["g"] - bad["g"]) > 1e-4


@given(finite, finite, finite, finite, radius, st.sampled_from([0, 2, 4]))
def test_even_p_system_decouples(f, g, fp, gp, r, p):
    Lg, Lf = so4_lhs(p, r, f, fp, 0.0, g, gp, 0.0)
    # with f'' = g'' = 0 the LHS equals minus the h-equation RHS of each component
    hp_, hm_ = hpm_transform(f, g, p)
    dp, dm = hpm_transform(fp, gp, p)
    rp, rm = reduced_rhs_hpm(r, hp_, dp), reduced_rhs_hpm(r, hm_, dm)
    assert np.isclose(-(Lg + Lf), rp, atol=1e-9 * (1 + abs(rp)))
    assert np.isclose(-(Lg - Lf), rm, atol=1e-9 * (1 + abs(rm)))


@given(finite, finite, finite, finite, radius)
def test_odd_p_system_is_complex_son(f, g, fp, gp, r):
    Lg, Lf = so4_lhs(1, r, f, fp, 0.0, g, gp, 0.0)
    w = reduced_rhs_hpm(r, g + 1j * f, gp + 1j * fp)
    assert np.isclose(-(Lg + 1j * Lf), w, atol=1e-9 * (1 + abs(w)))


def test_printed_coupled_form_is_not_the_decoupled_one():
    a, b = reduced_rhs_hpm_printed(1.0, 0.7, 0.2, 0.1, -0.3)
    assert not np.isclose(a, reduced_rhs_hpm(1.0, 0.7, 0.1))


def test_hpm_roundtrip():
    for p in range(5):
        f, g = hpm_inverse(*hpm_transform(0.3, -1.2, p), p)
        assert np.isclose(f, 0.3) and np.isclose(g, -1.2)
    with pytest.raises(ValueError):
        hpm_transform(0, 0, 7)


@given(radius, finite, finite, finite, st.floats(0, 2 * np.pi))
def test_o2_symmetry_of_sun_system(r, a1, a2, a3, theta):
    met = named_metric("warped", 5)
    h1 = (a1, 0.1, 0.3, -0.2, 0.05, 0.4)
    h2 = (a2, -0.2, 0.1, 0.3, 0.0, -0.1)
    h3 = (a3, 0.2, -0.1, 0.1, 0.2, 0.0)
    base = sun_lhs(5, r, h1, h2, h3, met)
    rot = o2_action(np.array(h1), np.array(h2), np.array(h3), theta)
    moved = sun_lhs(5, r, *rot, met)
    c, s = np.cos(theta), np.sin(theta)
    w1, w2 = c * base["h1wave"] - s * base["h2wave"], s * base["h1wave"] + c * base["h2wave"]
    assert np.isclose(moved["h1wave"], w1, atol=1e-9) and np.isclose(moved["h2wave"], w2, atol=1e-9)
    assert np.isclose(moved["h3wave"], base["h3wave"], atol=1e-9)


def test_complex_wave_agrees_with_real_pair():
    met = named_metric("warped", 4)
    r = 1.3
    h1 = (0.4, 0.1, 0.3, -0.2, 0.0, 0.4)
    h2 = (-0.3, -0.2, 0.1, 0.3, 0.0, -0.1)
    h3 = (0.5, 0.0, -0.1, 0.0, 0.0, 0.0)
    eq = sun_lhs(4, r, h1, h2, h3, met)
    h = tuple(a + 1j * b for a, b in zip(h1, h2))
    assert np.isclose(hwave_lhs(4, r, h, h3, met), eq["h1wave"] + 1j * eq["h2wave"])


def test_reduced_rhs_solves_for_top_derivative(rng):
    a = random_ansatz("SUN-H", {"n": 5}, rng)
    met = named_metric("warped", 5)
    st_ = ReducedState.from_ansatz(a, 1.1, 0.2)
    top = reduced_rhs(st_, met)
    fields = {k: v.copy() for k, v in st_.fields.items()}
    for k in ("h1", "h2", "h3"):
        fields[k][3] = top[k]
    lhs = reduced_lhs(ReducedState("SUN-H", 5, 1.1, fields, 0, 0.2), met)
    assert max(abs(lhs[k]) for k in ("h1wave", "h2wave", "h3wave")) < 1e-10


def test_reduced_state_rejects_origin():
    with pytest.raises(ValueError):
        ReducedState("SON", 5, 0.0, {"g": np.zeros(6)})
    with pytest.raises(ValueError):
        ReducedState("SON", 5, 1.0, {"g": np.zeros(5)})


def test_son_lhs_vacuum_and_unit():
    assert son_lhs(5, 1.0, 0.0, 0.0, 0.0) == 0
    assert son_lhs(5, 1.0, 1.0, 0.0, 0.0) == pytest.approx(6.0)


def test_static_relation_flags_mismatch():
    r = np.linspace(0.3, 4, 100)
    phi_r = 1 / (1 + r * r)
    h = np.exp(1j * np.arctan(r))
    good = ComplexProfile(r, h, -r * phi_r, h_r=1j * phi_r * h)
    bad = ComplexProfile(r, h, 0 * r, h_r=1j * phi_r * h)
    assert constraint_residuals(good, 5)["static_relation"] < 1e-14
    assert constraint_residuals(bad, 5)["static_relation"] > 0.1


def test_phase_is_frozen_where_modulus_vanishes():
    r = np.linspace(0.1, 1, 5)
    h = np.array([0, 0, 1j, 1j, -1 + 0j])
    cp = ComplexProfile(r, h, 0 * r)
    ph = cp.phase
    assert ph[0] == ph[2] and np.isnan(cp.phase_rate("r")[0])


def test_energy_of_vacuum_and_scaling():
    r = np.linspace(0.5, 8, 301)
    assert energy(r, np.ones_like(r), 0.0, 5).E < 1e-25
    u = 1 + 0.2 * np.exp(-(r - 3) ** 2)
    ut = 0.1 * np.exp(-(r - 3) ** 2)
    E = energy(r, u, ut, 5).E
    for lam in (0.5, 1.7, 2.0):
        rs, f = scale(r, {"u": u, "u_t": ut}, lam)
        assert energy(rs, f["u"], f["u_t"], 5).E == pytest.approx(lam * E, rel=1e-12)
        assert energy(rs, f["u"], f["u_t"], 4).E == pytest.approx(energy(r, u, ut, 4).E, rel=1e-12)


def test_energy_guards():
    with pytest.raises(ValueError):
        energy(np.array([0.0, 1.0]), np.ones(2), 0.0, 5)
    with pytest.raises(ValueError):
        scale(np.ones(2), {}, 0.0)


def test_constant_profiles_are_exact_solutions():
    met = named_metric("warped", 6)
    for h1, h2, h3 in [(0, 0, 0.7), (np.cos(1.0), np.sin(1.0), 0.0)]:
        a = make_ansatz("SUN-H", n=6, h1=constant(h1), h2=constant(h2), h3=constant(h3))
        out = projected_lhs(a, met, np.array([0.3, -1.0, 0.5, 0.2, 0.1, 0.9]), 0.4)
        assert max(abs(v) for v in out.values()) < 1e-13
