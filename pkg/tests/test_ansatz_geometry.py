import numpy as np
import pytest

from eqym.ansatz import (SplineProfile, ansatz_eval, constant, equivariance_residual, gaussian_mix, make_ansatz,
                         random_profile, term_fields)
from eqym.geometry import (ansatz_field, curvature, curvature_closed, curvature_fd, default_metric,
                           flat_metric, form_basis, hodge_path_factor, hodge_star, isotropic_metric,
                           named_metric, project, ym_residual, ym_residual_fd)
from eqym.group import random_group_element
from eqym.suites import CASE_REGISTRY, random_ansatz, sample_point


def test_son_oracle_unit_profile():
    # g = 1 at r = 1 in n = 5: R = -L X with L = (n-2) g^2 (3 - r^2 g) = 6
    a = make_ansatz("SON", n=5, g=constant(1.0))
    x = np.eye(5)[0]
    R = ym_residual(a, flat_metric(5), x)
    X = term_fields(a, x)["X"]
    assert np.allclose(R, -6 * X, atol=1e-13)


def test_son_ansatz_values():
    # B_mu = g(r) X_mu with [X_mu]_{ij} = x_i delta_{j mu} - delta_{i mu} x_j
    a = make_ansatz("SON", n=5, g=constant(2.0))
    x = np.array([1.0, 2.0, 0.0, 0.0, 0.0])
    B = ansatz_eval(a, x)
    assert B[0][1, 0] == 2 * 2.0 and B[0][0, 1] == -4.0


@pytest.mark.parametrize("case,kw", CASE_REGISTRY[:6], ids=lambda v: str(v))
def test_jet_curvature_matches_closed_form(case, kw, rng):
    a = random_ansatz(case, kw, rng)
    for _ in range(3):
        x = sample_point(a.signature, rng)
        t = 0.4 if a.time_dependent else 0.0
        assert np.allclose(curvature(a, x, t), curvature_closed(a, x, t), atol=1e-12)


def test_printed_sun_curvature_differs(rng):
    a = random_ansatz("SUN-H", {"n": 4}, rng)
    x = rng.normal(size=4)
    assert not np.allclose(curvature_closed(a, x, 0.2, variant="printed"), curvature(a, x, 0.2))


@pytest.mark.parametrize("case,kw", [("SO4", {"n": 4}), ("SOPQN", {"p": 2, "q": 3}), ("ISO-SON", {"n": 4}),
                                     ("SUN-H", {"n": 4})])
def test_residual_matches_finite_differences(case, kw, rng):
    a = random_ansatz(case, kw, rng)
    met = named_metric("warped", a.n) if a.time_dependent else default_metric(a)
    x = sample_point(a.signature, rng)
    y = np.concatenate([[0.3], x]) if a.time_dependent else x
    R = ym_residual(a, met, x, 0.3)
    Rf = ym_residual_fd(ansatz_field(a), met, y)
    assert np.abs(R - Rf).max() < 1e-5 * max(1, np.abs(R).max())


def test_curvature_fd_on_linear_field_is_exact():
    # B = A_mu fixed matrices times coordinates: F = dB - dB^T + [B,B] with constant dB
    rng = np.random.default_rng(3)
    A = rng.normal(size=(3, 3, 2, 2))

    def field(y):
        return np.einsum("k,kmab->mab", y, A)

    y = rng.normal(size=3)
    F = curvature_fd(field, y)
    B = field(y)
    expect = A - np.swapaxes(A, 0, 1) + np.einsum("mab,nbc->mnac", B, B) - np.einsum("nab,mbc->mnac", B, B)
    assert np.allclose(F, expect, atol=1e-8)


def test_projection_returns_misfit_for_out_of_span():
    X = np.zeros((2, 2, 2))
    X[0, 0, 1] = 1
    R = 3 * X.copy()
    R[1, 1, 0] = 1.0
    c, mis = project(R, [X])
    assert abs(c[0] - 3) < 1e-12 and mis > 0.1


def test_hodge_on_four_dimensional_two_form():
    w = np.zeros((4, 4))
    w[0, 1], w[1, 0] = 1, -1
    s = hodge_star(w, 2, flat_metric(4), np.zeros(4))
    assert s[2, 3] == pytest.approx(1.0) and s[3, 2] == pytest.approx(-1.0)


def test_hodge_sign_in_lorentzian_signature():
    met = flat_metric(4, 1, 3)
    for _, w in form_basis(1, 4):
        ss = hodge_star(hodge_star(w, 1, met, np.zeros(4)), 3, met, np.zeros(4))
        # (-1)^{k(N-k)} sign(det g) = (-1)^3 * (-1) = 1
        assert np.allclose(ss, w)
    assert hodge_path_factor(met, np.zeros(4)) == 1.0


def test_named_metric_and_guards():
    m = named_metric("warped", 5)
    assert m.kind == "isotropic" and m.slots == 6
    with pytest.raises(ValueError):
        named_metric("nope", 5)
    d = isotropic_metric(4).diag(np.array([0.0, 1.0, 0, 0, 0]))
    assert np.allclose(d, [1, -1, -1, -1, -1])


def test_case_guards():
    with pytest.raises(ValueError):
        make_ansatz("SO4", n=5, f=constant(0), g=constant(0))
    with pytest.raises(ValueError):
        make_ansatz("SON", n=5)
    with pytest.raises(ValueError):
        make_ansatz("BOGUS", n=5, g=constant(0))


def test_profiles():
    g = gaussian_mix([1.0], [0.5], [1.0])
    v, t, r, tt, tr, rr = g.derivs(0.0, 1.0)
    assert v == pytest.approx(1.0) and r == pytest.approx(0.0) and t == 0
    grid = np.linspace(0.1, 3, 200)
    sp = SplineProfile(grid, np.sin(grid))
    assert sp.derivs(0, 1.0)[2] == pytest.approx(np.cos(1.0), abs=1e-4)
    p = random_profile(np.random.default_rng(0))
    assert np.isfinite(p(0.0, 0.7))


def test_equivariance_survives_large_boosts(rng):
    a = random_ansatz("SOPQN", {"p": 2, "q": 3}, rng)
    for _ in range(10):
        lam = random_group_element(a.signature, rng, max_rapidity=2.0)
        x = sample_point(a.signature, rng, image_of=lam)
        assert equivariance_residual(a, lam, x) < 1e-8 * max(1, np.abs(lam.matrix).max() ** 2)
