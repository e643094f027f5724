import numpy as np
import pytest
from hypothesis import given, strategies as st

from eqym.jets import Jet, stack
from eqym.lie import Signature, basis_for, commutator
from eqym.spin import (ad_spin, clifford_structure_constants, clifford_vector_action, pairs, random_spin_element,
                       spin_lambda_d, spin_lambda_inv, spin_lambda_inv_printed)

pts = st.lists(st.floats(0.2, 2.0), min_size=3, max_size=3).map(np.array)


def _fd(fun, y, h=1e-5):
    d = len(y)
    g = np.array([(fun(y + h * e) - fun(y - h * e)) / (2 * h) for e in np.eye(d)])
    return g


@given(pts)
def test_jet_products_and_powers_match_derivatives(y):
    x0, x1, x2 = Jet.coords(y)
    j = (x0 * x1 + x2 * x2 * 3.0).power(-1.5) * (x0 * x0 + x1 * x1).sqrt()

    def val(z):
        return (z[0] * z[1] + 3 * z[2] ** 2) ** -1.5 * np.sqrt(z[0] ** 2 + z[1] ** 2)

    assert np.allclose(j.v, val(y))
    assert np.allclose(j.g, _fd(val, y), rtol=1e-6, atol=1e-8)
    hess = np.array([_fd(lambda z, k=k: _fd(val, z)[k], y, 1e-4) for k in range(3)])
    assert np.allclose(j.h, hess, rtol=1e-4, atol=1e-6)


def test_linear_jet_and_stack():
    y = np.array([1.0, 2.0])
    coeff = np.arange(8.0).reshape(2, 2, 2)
    j = Jet.linear(coeff, y)
    assert np.allclose(j.v, coeff[0] + 2 * coeff[1])
    assert np.allclose(j.g[..., 1], coeff[1]) and not j.h.any()
    s = stack(Jet.coords(y))
    assert s.shape == (2,) and np.array_equal(s.g, np.eye(2))


def test_jet_indexing_keeps_derivative_axes():
    x, y = Jet.coords([0.5, 1.5])
    m = stack([x * y, x - y]).reshape(2, 1)
    assert m[1, 0].g.shape == (2,)
    assert np.allclose((3.0 - m[1, 0]).g, [-1, 1])


SPIN_SIGS = [Signature(3, 0), Signature(4, 0), Signature(1, 2), Signature(2, 2), Signature(1, 3), Signature(3, 3)]


@pytest.mark.parametrize("sig", SPIN_SIGS, ids=str)
def test_lambda_d_matches_clifford_action(sig, rng):
    c = rng.normal(size=len(pairs(sig.n)))
    assert np.allclose(spin_lambda_d(c, sig), clifford_vector_action(c, sig), atol=1e-12)


@pytest.mark.parametrize("sig", SPIN_SIGS, ids=str)
def test_lambda_d_is_a_homomorphism(sig, rng):
    a, b = rng.normal(size=(2, len(pairs(sig.n))))
    br = ad_spin(a, sig) @ b
    assert np.allclose(commutator(spin_lambda_d(a, sig), spin_lambda_d(b, sig)), spin_lambda_d(br, sig), atol=1e-12)


@pytest.mark.parametrize("sig", SPIN_SIGS, ids=str)
def test_inverse_roundtrip_and_printed_sign(sig):
    for m in basis_for(sig).elements:
        c = spin_lambda_inv(m, sig)
        assert np.array_equal(spin_lambda_d(c, sig), m)
        # the printed inverse comes out with the opposite sign
        assert np.allclose(spin_lambda_inv_printed(m, sig), -c)


def test_inverse_rejects_non_algebra():
    with pytest.raises(ValueError):
        spin_lambda_inv(np.eye(3), Signature(3, 0))


def test_cover_is_in_group(rng):
    sig = Signature(2, 2)
    s = random_spin_element(sig, rng)
    assert s.cover().is_valid(1e-9)
    # Ad(S) realises Ad(lambda(S)) through lambda_d
    c = rng.normal(size=6)
    lam = s.cover()
    lhs = spin_lambda_d(s.ad() @ c, sig)
    rhs = lam.matrix @ spin_lambda_d(c, sig) @ lam.inverse_matrix
    assert np.allclose(lhs, rhs, atol=1e-10)


def test_structure_constants_antisymmetric():
    c = clifford_structure_constants(Signature(1, 3))
    assert np.allclose(c, -np.swapaxes(c, 0, 1))
