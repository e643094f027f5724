"""Matrix Lie algebras used throughout the package.

Index conventions: every function that takes *matrix-unit labels* (``eA(i, j, n)``,
``build_basis`` index maps, ``Signature.epsilon``) uses 1-based labels,
matching standard notation.  Arrays are 0-based.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations

import numpy as np

ATOL = 1e-12

KINDS = ("so", "sopq", "so4-dual", "sopq4-dual", "su-split", "spin")


# ---------------------------------------------------------------- signature


@dataclass(frozen=True)
class Signature:
    """Diagonal metric I_{p,q}: ``p`` entries +1 followed by ``q`` entries -1."""

    p: int
    q: int = 0

    def __post_init__(self):
        if self.p < 0 or self.q < 0 or self.p + self.q < 1:
            raise ValueError(f"invalid signature ({self.p}, {self.q})")

    @property
    def n(self) -> int:
        return self.p + self.q

    @cached_property
    def diag(self) -> np.ndarray:
        return np.diag(self.eps.astype(float))

    @cached_property
    def eps(self) -> np.ndarray:
        """Sign vector (0-based array)."""
        return np.array([1] * self.p + [-1] * self.q)

    def epsilon(self, i: int) -> int:
        """Sign of the 1-based coordinate ``i``."""
        if not 1 <= i <= self.n:
            raise IndexError(i)
        return 1 if i <= self.p else -1

    @property
    def is_euclidean(self) -> bool:
        return self.q == 0

    def norm2(self, x) -> float:
        x = np.asarray(x, dtype=float)
        return float(x @ (self.eps * x))


def euclidean(n: int) -> Signature:
    return Signature(n, 0)


# ------------------------------------------------------------ matrix units


def eA(i: int, j: int, n: int) -> np.ndarray:
    """Antisymmetric unit e_i e_j^T - e_j e_i^T (1-based labels)."""
    m = np.zeros((n, n))
    m[i - 1, j - 1] += 1.0
    m[j - 1, i - 1] -= 1.0
    return m


def eS(i: int, j: int, n: int) -> np.ndarray:
    """Symmetric unit e_i e_j^T + e_j e_i^T (1-based labels)."""
    m = np.zeros((n, n))
    m[i - 1, j - 1] += 1.0
    m[j - 1, i - 1] += 1.0
    return m


def levi_civita(indices) -> int:
    """Sign of the permutation ``indices``; 0 on any repeated entry."""
    idx = list(indices)
    if len(set(idx)) != len(idx):
        return 0
    # sort by counting inversions
    sign = 1
    for a in range(len(idx)):
        for b in range(a + 1, len(idx)):
            if idx[a] > idx[b]:
                sign = -sign
    return sign


def levi_civita_tensor(n: int) -> np.ndarray:
    """Dense rank-n epsilon tensor (0-based axes); only sensible for n <= 6."""
    eps = np.zeros((n,) * n)
    from itertools import permutations

    for perm in permutations(range(n)):
        eps[perm] = levi_civita(perm)
    return eps


def ebar(k: int, l: int) -> np.ndarray:
    """Dual so(4) element with entries [ebar_{k,l}]_{i,j} = eps_{k,i,j,l}."""
    m = np.zeros((4, 4))
    for i in range(1, 5):
        for j in range(1, 5):
            m[i - 1, j - 1] = levi_civita((k, i, j, l))
    return m


# ----------------------------------------------------------- basic algebra


def _check_same_shape(*mats):
    shapes = {np.shape(m) for m in mats}
    if len(shapes) != 1:
        raise ValueError(f"shape mismatch: {sorted(shapes)}")
    shape = shapes.pop()
    if len(shape) != 2 or shape[0] != shape[1]:
        raise ValueError(f"expected square matrices, got shape {shape}")


def commutator(a, b) -> np.ndarray:
    a, b = np.asarray(a), np.asarray(b)
    _check_same_shape(a, b)
    return a @ b - b @ a


def jacobi_residual(a, b, c) -> float:
    a, b, c = map(np.asarray, (a, b, c))
    _check_same_shape(a, b, c)
    total = (commutator(a, commutator(b, c)) + commutator(b, commutator(c, a))
             + commutator(c, commutator(a, b)))
    return float(np.linalg.norm(total))


def trace_pairing(a, b):
    a, b = np.asarray(a), np.asarray(b)
    _check_same_shape(a, b)
    val = np.trace(a @ b)
    return float(val.real) if np.isrealobj(val) or abs(val.imag) == 0 else complex(val)


def sopq_residual(m, sig: Signature) -> float:
    """Norm of M^T I + I M plus |trace M|; zero exactly on so(p,q)."""
    m = np.asarray(m)
    d = sig.diag
    return float(np.linalg.norm(m.T @ d + d @ m) + abs(np.trace(m)))


# ---------------------------------------------------------------- su split


@dataclass(frozen=True)
class SuSplit:
    antisym: np.ndarray
    sym: np.ndarray


def su_split(m, rtol: float = 1e-12) -> SuSplit:
    """Write an anti-Hermitian traceless M as B + iS (B real antisymmetric, S real symmetric traceless)."""
    m = np.asarray(m, dtype=complex)
    _check_same_shape(m)
    scale = max(np.linalg.norm(m), 1.0)
    bad = np.linalg.norm(m + m.conj().T) + abs(np.trace(m))
    if bad > rtol * scale:
        raise ValueError(f"matrix is not anti-Hermitian traceless (defect {bad:.3g})")
    return SuSplit(antisym=m.real.copy(), sym=m.imag.copy())


def su_join(s: SuSplit) -> np.ndarray:
    return s.antisym + 1j * s.sym


# ------------------------------------------------------------ ordered basis


@dataclass(frozen=True, eq=False)
class OrderedBasis:
    """Indexed family of matrices spanning a Lie algebra.

    ``labels[a]`` is a 1-based pair ``(i, j)``, or ``(i, j, tag)`` for kinds that
    mix several families; ``index_map`` inverts it.
    """

    kind: str
    signature: Signature
    elements: np.ndarray  # shape (dim, m, m)
    labels: tuple
    index_map: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.signature.n

    @property
    def dim(self) -> int:
        return len(self.elements)

    @cached_property
    def _solver(self):
        flat = self.elements.reshape(self.dim, -1).T
        if np.iscomplexobj(flat):
            flat = np.vstack([flat.real, flat.imag])
        return np.linalg.pinv(flat), flat

    def coords(self, m) -> np.ndarray:
        """Coordinates of ``m`` in this basis (least squares; exact on the span)."""
        m = np.asarray(m)
        vec = m.reshape(-1)
        if np.iscomplexobj(self.elements):
            vec = np.concatenate([vec.real, vec.imag])
        elif np.iscomplexobj(vec):
            vec = vec.real
        return self._solver[0] @ vec

    def expand(self, coeffs) -> np.ndarray:
        return np.tensordot(np.asarray(coeffs), self.elements, axes=1)

    def expansion_residual(self, m) -> float:
        return float(np.linalg.norm(self.expand(self.coords(m)) - m))

    def __getitem__(self, label) -> np.ndarray:
        return self.elements[self.index_map[label]]

    @cached_property
    def structure_constants(self) -> np.ndarray:
        """c[a, b, c] with [E_a, E_b] = sum_c c[a, b, c] E_c."""
        d = self.dim
        out = np.zeros((d, d, d), dtype=self.elements.dtype)
        for a in range(d):
            for b in range(d):
                out[a, b] = self.coords(commutator(self.elements[a], self.elements[b]))
        return out


def _mk(kind, sig, mats, labels):
    return OrderedBasis(kind=kind, signature=sig, elements=np.array(mats), labels=tuple(labels),
                        index_map={lab: a for a, lab in enumerate(labels)})


def build_basis(kind: str, n: int | None = None, p: int | None = None, q: int | None = None) -> OrderedBasis:
    """Construct one of the ordered bases used in the package.

    kinds: ``so`` (e^A_{i,j}), ``sopq`` (rotations e^A then boosts e^S),
    ``so4-dual`` (ebar_{k,l}), ``sopq4-dual`` (I_{p,q} ebar_{k,l}),
    ``su-split`` (e^A, i e^S, i(e_kk - e_{k+1,k+1})) and ``spin`` (images
    lambda_d(e_i x e_j) = 2 e^A_{i,j} I_{p,q}).
    """
    if kind not in KINDS:
        raise ValueError(f"unknown basis kind {kind!r}")
    if kind in ("sopq", "sopq4-dual", "spin"):
        if p is None or q is None:
            raise ValueError(f"{kind} needs p and q")
        sig = Signature(p, q)
        if n is not None and n != sig.n:
            raise ValueError("n must equal p + q")
    else:
        if n is None:
            raise ValueError(f"{kind} needs n")
        sig = euclidean(n)
    n = sig.n
    if n < 2:
        raise ValueError("n must be >= 2")
    if kind in ("so4-dual", "sopq4-dual") and n != 4:
        raise ValueError(f"{kind} requires n = 4")

    pairs = list(combinations(range(1, n + 1), 2))
    if kind == "so":
        return _mk(kind, sig, [eA(i, j, n) for i, j in pairs], pairs)
    if kind == "sopq":
        rot = [(i, j) for i, j in pairs if sig.epsilon(i) == sig.epsilon(j)]
        boost = [(i, j) for i, j in pairs if sig.epsilon(i) != sig.epsilon(j)]
        mats = [eA(i, j, n) for i, j in rot] + [eS(i, j, n) for i, j in boost]
        return _mk(kind, sig, mats, rot + boost)
    if kind == "so4-dual":
        return _mk(kind, sig, [ebar(k, l) for k, l in pairs], pairs)
    if kind == "sopq4-dual":
        return _mk(kind, sig, [sig.diag @ ebar(k, l) for k, l in pairs], pairs)
    if kind == "spin":
        return _mk(kind, sig, [2.0 * eA(i, j, n) @ sig.diag for i, j in pairs], pairs)
    # su-split
    mats, labels = [], []
    for i, j in pairs:
        mats.append(eA(i, j, n).astype(complex))
        labels.append((i, j, "A"))
    for i, j in pairs:
        mats.append(1j * eS(i, j, n))
        labels.append((i, j, "S"))
    for k in range(1, n):
        d = np.zeros((n, n), dtype=complex)
        d[k - 1, k - 1], d[k, k] = 1j, -1j
        mats.append(d)
        labels.append((k, k + 1, "D"))
    return _mk(kind, sig, mats, labels)


def basis_for(sig: Signature) -> OrderedBasis:
    """The natural real basis of so(p,q) for a signature (``so`` when Euclidean)."""
    if sig.is_euclidean:
        return build_basis("so", n=sig.n)
    return build_basis("sopq", p=sig.p, q=sig.q)


def sym_traceless_basis(n: int) -> np.ndarray:
    """Real symmetric traceless matrices: e^S_{i,j} (i<j) then e_kk - e_{k+1,k+1}."""
    mats = [eS(i, j, n) for i, j in combinations(range(1, n + 1), 2)]
    for k in range(n - 1):
        d = np.zeros((n, n))
        d[k, k], d[k + 1, k + 1] = 1.0, -1.0
        mats.append(d)
    return np.array(mats)
