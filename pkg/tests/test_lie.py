import numpy as np
import pytest
from hypothesis import given, strategies as st

from eqym.lie import (Signature, build_basis, commutator, eA, eS, ebar, euclidean, jacobi_residual,
                      levi_civita, sopq_residual, su_join, su_split, sym_traceless_basis, trace_pairing)


def test_units_are_antisymmetric_and_symmetric():
    assert np.array_equal(eA(1, 2, 3), -eA(2, 1, 3))
    assert np.array_equal(eS(1, 3, 3), eS(3, 1, 3))
    assert eA(2, 2, 4).any() == False  # noqa: E712
    assert eS(2, 2, 3)[1, 1] == 2


def test_levi_civita_signs():
    assert levi_civita((1, 2, 3, 4)) == 1
    assert levi_civita((2, 1, 3, 4)) == -1
    assert levi_civita((1, 1, 3, 4)) == 0


def test_ebar_is_hodge_dual_of_e():
    # ebar_{1,2} has entries eps_{1 i j 2}: nonzero only on the (3,4) block
    m = ebar(1, 2)
    assert m[2, 3] == levi_civita((1, 3, 4, 2)) and m[3, 2] == -m[2, 3]
    assert np.count_nonzero(m) == 2


@pytest.mark.parametrize("p,q", [(3, 0), (1, 2), (2, 2), (1, 3), (3, 3)])
def test_sopq_basis_lies_in_algebra(p, q):
    sig = Signature(p, q)
    b = build_basis("sopq", p=p, q=q) if q else build_basis("so", n=p)
    assert b.dim == sig.n * (sig.n - 1) // 2
    assert max(sopq_residual(m, sig) for m in b.elements) == 0.0


def test_structure_constants_reproduce_brackets():
    b = build_basis("sopq", p=2, q=2)
    c = b.structure_constants
    for a in range(b.dim):
        for k in range(b.dim):
            assert np.allclose(commutator(b.elements[a], b.elements[k]), b.expand(c[a, k]), atol=1e-13)


def test_su_split_roundtrip(rng):
    a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    m = a - a.conj().T
    m -= np.trace(m) / 4 * np.eye(4)
    s = su_split(m)
    assert np.allclose(su_join(s), m)
    with pytest.raises(ValueError):
        su_split(np.eye(4))


def test_signature_guards():
    with pytest.raises(ValueError):
        Signature(0, 0)
    with pytest.raises(IndexError):
        euclidean(3).epsilon(4)
    with pytest.raises(ValueError):
        commutator(np.eye(2), np.eye(3))


def test_sym_traceless_dimension():
    b = sym_traceless_basis(5)
    assert len(b) == 14 and np.allclose(np.trace(b, axis1=1, axis2=2), 0)


mats = st.lists(st.floats(-3, 3), min_size=9, max_size=9).map(lambda v: np.array(v).reshape(3, 3))


@given(mats, mats, mats)
def test_jacobi_identity(a, b, c):
    assert jacobi_residual(a, b, c) < 1e-10 * (1 + np.abs(a).max() * np.abs(b).max() * np.abs(c).max())


@given(mats, mats)
def test_trace_pairing_is_ad_invariant_in_form(a, b):
    assert abs(trace_pairing(a, b) - trace_pairing(b, a)) < 1e-9
