import numpy as np
import pytest
from hypothesis import given, strategies as st

from eqym.equivariance import (EXPECTED_SO, RankGapError, action_matrix, adjoint_fixed_space,
                               closed_form_basis, expected_dimension, fixed_space, invariance_residual,
                               principal_angles, random_stabilizer_elements, su_symmetric_closed_form,
                               su_symmetric_fixed_space)
from eqym.equivariance import _rank_cut
from eqym.group import (frame_matrix, identity, random_group_element, rho_apply, standard_element,
                        stabilizer_generators)
from eqym.lie import Signature, euclidean

SIGS = [euclidean(3), euclidean(5), Signature(1, 2), Signature(2, 2), Signature(1, 3), Signature(2, 3),
        Signature(3, 3)]


@pytest.mark.parametrize("sig", SIGS, ids=str)
def test_random_elements_are_in_identity_component(sig, rng):
    for _ in range(10):
        assert random_group_element(sig, rng).is_valid()


@pytest.mark.parametrize("sig", SIGS, ids=str)
def test_frame_matrix_maps_axis_to_point(sig, rng):
    for _ in range(50):
        x = rng.normal(size=sig.n)
        if sig.norm2(x) <= 0.05 or (sig.p == 1 and x[0] <= 0):
            continue
        g = frame_matrix(x, sig)
        assert g.is_valid(1e-9)
        assert np.allclose(g.matrix[:, 0] * np.sqrt(sig.norm2(x)), x, atol=1e-12)


def test_frame_matrix_rejects_bad_points():
    sig = Signature(1, 2)
    with pytest.raises(ValueError):
        frame_matrix(np.array([-2.0, 0.1, 0.1]), sig)  # past cone
    with pytest.raises(ValueError):
        frame_matrix(np.array([0.1, 1.0, 0.0]), sig)  # space-like
    with pytest.raises(ValueError):
        frame_matrix(np.zeros(3))


def test_frame_fallback_on_axis():
    # radicands vanish on coordinate axes: the Gram-Schmidt path takes over
    g = frame_matrix(np.array([0.0, 0.0, 2.0]))
    assert g.kind == "frame-gs" and g.is_valid()


def test_standard_element_kind_guards():
    sig = Signature(1, 2)
    with pytest.raises(ValueError):
        standard_element("rotation", 1, 2, 0.3, sig)
    with pytest.raises(ValueError):
        standard_element("boost", 2, 3, 0.3, sig)


@pytest.mark.parametrize("sig", [euclidean(4), Signature(2, 2)], ids=str)
def test_rho_is_a_homomorphism(sig, rng):
    g, h = random_group_element(sig, rng), random_group_element(sig, rng)
    lhs = action_matrix(g @ h)
    rhs = action_matrix(g) @ action_matrix(h)
    assert np.allclose(lhs, rhs, atol=1e-10)


@pytest.mark.parametrize("sig", SIGS + [Signature(1, 1), Signature(1, 4)], ids=str)
def test_closed_form_is_invariant_and_spans(sig, rng):
    vs = closed_form_basis(sig)
    els = random_stabilizer_elements(sig, 10, rng)
    assert invariance_residual(vs, sig, els) < 1e-10
    rep = fixed_space(sig)
    assert rep.dimension == len(vs) == expected_dimension(sig)
    assert np.max(principal_angles(rep.basis, vs)) < 1e-7


@pytest.mark.parametrize("sig", [Signature(1, 2), Signature(1, 3), Signature(2, 2), Signature(2, 3)], ids=str)
def test_printed_closed_form_fails_where_signs_slipped(sig, rng):
    vs = closed_form_basis(sig, variant="printed")
    els = random_stabilizer_elements(sig, 5, rng)
    assert invariance_residual(vs, sig, els) > 1e-3


def test_su_symmetric_space():
    for n in (4, 5, 6):
        rep = su_symmetric_fixed_space(n)
        assert rep.dimension == 2
        assert np.max(principal_angles(rep.basis, su_symmetric_closed_form(n))) < 1e-9


def test_adjoint_only_fixed_space():
    # no vector index: nothing survives for n >= 4, one direction (e^A_23) for n = 3
    assert adjoint_fixed_space(4).dimension == 0
    assert adjoint_fixed_space(3).dimension == 1


def test_identity_fixes_everything():
    rep = fixed_space(euclidean(3), generators=[identity(euclidean(3))])
    assert rep.dimension == 9


def test_rank_cut_flags_ambiguous_gap():
    with pytest.raises(RankGapError):
        _rank_cut(np.array([1.0, 1e-8, 1e-10]), 3, 1e-9, 1e3)


def test_enumeration_guard():
    with pytest.raises(ValueError):
        expected_dimension(euclidean(9))
    assert set(EXPECTED_SO) == set(range(3, 9))


@given(st.floats(-3, 3), st.floats(-3, 3))
def test_stabilizer_fixes_e1(a, b):
    sig = Signature(2, 2)
    e1 = np.eye(4)[0]
    for g in stabilizer_generators(sig, params=(a, b)):
        assert np.allclose(g.matrix @ e1, e1)


def test_rho_apply_matches_definition(rng):
    sig = euclidean(4)
    g = random_group_element(sig, rng)
    v = rng.normal(size=(4, 4, 4))
    v = v - np.swapaxes(v, 1, 2)
    gi = g.inverse_matrix
    direct = np.einsum("nm,ab,nbc,cd->mad", gi, g.matrix, v, gi)
    assert np.allclose(rho_apply(g, v), direct, atol=1e-12)
