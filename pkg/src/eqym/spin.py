"""spin(p,q) as bivectors of the Clifford algebra Cl(p,q), and the lift of so(p,q) data.

Blades are bitmasks over e_1..e_n (bit k-1 for e_k). The algebra is only used
for brackets of bivectors and the action z x - x z on vectors, so no
matrix representation of Cl(p,q) is built.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

import numpy as np
from scipy.linalg import expm

from .group import GroupElement, generator, standard_element
from .lie import Signature, eA, sopq_residual


def pairs(n: int) -> list[tuple[int, int]]:
    return list(combinations(range(1, n + 1), 2))


# ------------------------------------------------------------ Clifford core


def _reorder_sign(a: int, b: int) -> int:
    """Sign from moving the generators of blade ``b`` past those of ``a``."""
    a >>= 1
    swaps = 0
    while a:
        swaps += bin(a & b).count("1")
        a >>= 1
    return -1 if swaps & 1 else 1


def blade_product(a: int, b: int, sig: Signature) -> tuple[int, int]:
    """e_A e_B = sign * e_{A xor B} under e_k e_k = eps(k)."""
    sign = _reorder_sign(a, b)
    common = a & b
    k = 0
    while common:
        if common & 1:
            sign *= int(sig.eps[k])
        common >>= 1
        k += 1
    return sign, a ^ b


def _mul(x: dict, y: dict, sig: Signature) -> dict:
    out: dict = {}
    for a, ca in x.items():
        for b, cb in y.items():
            s, c = blade_product(a, b, sig)
            out[c] = out.get(c, 0.0) + s * ca * cb
    return {k: v for k, v in out.items() if v != 0.0}


def _sub(x: dict, y: dict) -> dict:
    out = dict(x)
    for k, v in y.items():
        out[k] = out.get(k, 0.0) - v
    return {k: v for k, v in out.items() if v != 0.0}


def _bivector(i: int, j: int) -> dict:
    return {(1 << (i - 1)) | (1 << (j - 1)): 1.0}


def _bivector_coeff(elem: dict, i: int, j: int) -> float:
    # e_i e_j with i < j is the blade itself (no reordering)
    return elem.get((1 << (i - 1)) | (1 << (j - 1)), 0.0)


@lru_cache(maxsize=None)
def clifford_structure_constants(sig: Signature) -> np.ndarray:
    """c[a, b, c] with [e_a, e_b]_Cl = sum_c c[a, b, c] e_c over bivectors e_i e_j (i<j)."""
    ps = pairs(sig.n)
    d = len(ps)
    out = np.zeros((d, d, d))
    for a, (i, j) in enumerate(ps):
        for b, (k, l) in enumerate(ps):
            x, y = _bivector(i, j), _bivector(k, l)
            br = _sub(_mul(x, y, sig), _mul(y, x, sig))
            for c, (u, v) in enumerate(ps):
                out[a, b, c] = _bivector_coeff(br, u, v)
            leftover = {k2 for k2 in br if bin(k2).count("1") != 2}
            if leftover:
                raise AssertionError("bivector bracket left the bivector space")
    return out


def clifford_vector_action(c, sig: Signature) -> np.ndarray:
    """Matrix of x -> z x - x z for z = sum c_a e_i e_j, computed in Cl(p,q)."""
    z: dict = {}
    for coef, (i, j) in zip(np.asarray(c, dtype=float), pairs(sig.n)):
        if coef:
            z[(1 << (i - 1)) | (1 << (j - 1))] = coef
    n = sig.n
    m = np.zeros((n, n))
    for k in range(n):
        x = {1 << k: 1.0}
        img = _sub(_mul(z, x, sig), _mul(x, z, sig))
        for blade, val in img.items():
            if bin(blade).count("1") != 1:
                raise AssertionError("z x - x z is not a vector")
            m[blade.bit_length() - 1, k] = val
    return m


def ad_spin(c, sig: Signature) -> np.ndarray:
    """Matrix of ad_z on spin coefficients (column b = coords of [z, e_b])."""
    sc = clifford_structure_constants(sig)
    return np.einsum("a,abc->cb", np.asarray(c, dtype=float), sc)


# ------------------------------------------------------------ lambda_d


def spin_lambda_d(c, sig: Signature) -> np.ndarray:
    """lambda_d(sum c_ij e_i e_j) = sum c_ij * 2 e^A_{i,j} I_{p,q}."""
    c = np.asarray(c, dtype=float)
    ps = pairs(sig.n)
    if c.shape != (len(ps),):
        raise ValueError(f"expected {len(ps)} spin coefficients, got shape {c.shape}")
    m = np.zeros((sig.n, sig.n))
    for coef, (i, j) in zip(c, ps):
        m += 2.0 * coef * eA(i, j, sig.n)
    return m @ sig.diag


def _check_so(m, sig: Signature, rtol: float):
    m = np.asarray(m, dtype=float)
    if m.shape != (sig.n, sig.n):
        raise ValueError("shape mismatch")
    if sopq_residual(m, sig) > rtol * max(1.0, np.abs(m).max()):
        raise ValueError("matrix is not in so(p,q)")
    return m


def spin_lambda_inv(m, sig: Signature, rtol: float = 1e-10) -> np.ndarray:
    """Inverse of :func:`spin_lambda_d`: c_{k,l} = eps(l) M_{k,l} / 2."""
    m = _check_so(m, sig, rtol)
    return np.array([0.5 * sig.epsilon(l) * m[k - 1, l - 1] for k, l in pairs(sig.n)])


def spin_lambda_inv_printed(m, sig: Signature, rtol: float = 1e-10) -> np.ndarray:
    """The published inverse, transcribed literally; kept to report its discrepancy."""
    m = _check_so(m, sig, rtol)
    d = sig.diag
    e = np.eye(sig.n)
    return np.array([0.5 * ((m @ e[k - 1]) @ d @ e[l - 1]) * sig.epsilon(k) * sig.epsilon(l)
                     for k, l in pairs(sig.n)])


def lift_field(comps, sig: Signature) -> np.ndarray:
    """Componentwise lambda_d^{-1}: (n, n, n) so-valued tensor -> (n, dim) coefficients."""
    return np.array([spin_lambda_inv(c, sig) for c in comps])


# ------------------------------------------------------------ spin group elements


@dataclass(frozen=True, eq=False)
class SpinElement:
    """exp(z_1) ... exp(z_k) in Spin+(p,q), stored through its Lie-algebra factors."""

    factors: tuple
    signature: Signature

    def ad(self) -> np.ndarray:
        """Ad(S) on spin coefficients, from the Clifford bracket."""
        d = len(pairs(self.signature.n))
        out = np.eye(d)
        for z in self.factors:
            out = out @ expm(ad_spin(z, self.signature))
        return out

    def cover(self) -> GroupElement:
        """lambda(S) = exp(lambda_d z_1) ... exp(lambda_d z_k)."""
        m = np.eye(self.signature.n)
        for z in self.factors:
            m = m @ expm(spin_lambda_d(z, self.signature))
        return GroupElement(m, self.signature, "general")


def lift_standard(kind: str, i: int, j: int, param: float, sig: Signature) -> SpinElement:
    """A preimage of the standard element under the covering map."""
    standard_element(kind, i, j, param, sig)  # validates
    z = spin_lambda_inv(param * generator(kind, i, j, sig), sig)
    return SpinElement((z,), sig)


def random_spin_element(sig: Signature, rng, factors: int = 6, max_rapidity: float = 0.8) -> SpinElement:
    zs = []
    for _ in range(factors):
        i, j = pairs(sig.n)[rng.integers(len(pairs(sig.n)))]
        if sig.epsilon(i) == sig.epsilon(j):
            zs.extend(lift_standard("rotation", i, j, rng.uniform(-np.pi, np.pi), sig).factors)
        else:
            zs.extend(lift_standard("boost", i, j, rng.uniform(-max_rapidity, max_rapidity), sig).factors)
    return SpinElement(tuple(zs), sig)


def spin_equivariance_residual(field, s: SpinElement, x) -> float:
    """max_mu || C_mu(L x) - sum_nu [L^{-1}]_{nu,mu} Ad(S) C_nu(x) || with L = lambda(S).

    ``field(x)`` returns spin coefficients of shape (n, dim).
    """
    lam = s.cover()
    x = np.asarray(x, dtype=float)
    lhs = field(lam.matrix @ x)
    rhs = np.einsum("nm,ab,nb->ma", lam.inverse_matrix, s.ad(), field(x))
    return float(np.linalg.norm(lhs - rhs, axis=1).max())
