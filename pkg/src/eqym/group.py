"""Group elements of SO+(p,q), the adjoint and tensor representations, frame matrices."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lie import OrderedBasis, Signature, basis_for, euclidean

GROUP_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class GroupElement:
    matrix: np.ndarray
    signature: Signature
    kind: str = "general"

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        object.__setattr__(self, "matrix", m)
        if m.shape != (self.signature.n, self.signature.n):
            raise ValueError(f"matrix shape {m.shape} does not match signature n={self.signature.n}")

    @property
    def inverse_matrix(self) -> np.ndarray:
        d = self.signature.diag
        return d @ self.matrix.T @ d

    def __matmul__(self, other: "GroupElement") -> "GroupElement":
        return GroupElement(self.matrix @ other.matrix, self.signature)

    def defect(self) -> float:
        """Largest violation of g^T I g = I, det g = 1 and orthochronicity."""
        d = self.signature.diag
        m = self.matrix
        bad = max(np.abs(m.T @ d @ m - d).max(), abs(np.linalg.det(m) - 1.0))
        p = self.signature.p
        if p and np.linalg.det(m[:p, :p]) <= 0:
            bad = max(bad, 1.0)
        return float(bad)

    def is_valid(self, tol: float = GROUP_TOL) -> bool:
        return self.defect() < tol


def identity(sig: Signature) -> GroupElement:
    return GroupElement(np.eye(sig.n), sig, "identity")


def standard_element(kind: str, i: int, j: int, param: float, sig: Signature) -> GroupElement:
    """Rotation g^theta_{i,j} or boost k^h_{i,j} (1-based, i < j)."""
    n = sig.n
    if not 1 <= i < j <= n:
        raise ValueError(f"need 1 <= i < j <= {n}, got ({i}, {j})")
    same = sig.epsilon(i) == sig.epsilon(j)
    m = np.eye(n)
    a, b = i - 1, j - 1
    if kind == "rotation":
        if not same:
            raise ValueError(f"rotation needs a same-sign pair, ({i}, {j}) is mixed")
        c, s = np.cos(param), np.sin(param)
        m[a, a], m[a, b], m[b, a], m[b, b] = c, -s, s, c
    elif kind == "boost":
        if same:
            raise ValueError(f"boost needs a mixed-sign pair, ({i}, {j}) is not")
        c, s = np.cosh(param), np.sinh(param)
        m[a, a], m[a, b], m[b, a], m[b, b] = c, s, s, c
    else:
        raise ValueError(f"unknown standard element kind {kind!r}")
    return GroupElement(m, sig, kind)


def generator(kind: str, i: int, j: int, sig: Signature) -> np.ndarray:
    """Derivative at 0 of the standard one-parameter family."""
    g = standard_element(kind, i, j, 0.0, sig)  # validates indices
    n = sig.n
    m = np.zeros((n, n))
    if kind == "rotation":
        m[i - 1, j - 1], m[j - 1, i - 1] = -1.0, 1.0
    else:
        m[i - 1, j - 1] = m[j - 1, i - 1] = 1.0
    del g
    return m


def stabilizer_generators(sig: Signature, params=(1.0, np.sqrt(2.0))) -> list[GroupElement]:
    """Standard elements fixing e_1: rotations/boosts on index pairs 2 <= i < j."""
    out = []
    for i in range(2, sig.n + 1):
        for j in range(i + 1, sig.n + 1):
            kind = "rotation" if sig.epsilon(i) == sig.epsilon(j) else "boost"
            for t in params:
                out.append(standard_element(kind, i, j, t, sig))
    return out


def random_stabilizer_element(sig: Signature, rng, factors: int = 6) -> GroupElement:
    """Product of random standard elements fixing e_1 (the identity when n <= 2)."""
    g = identity(sig)
    gens = [(i, j) for i in range(2, sig.n + 1) for j in range(i + 1, sig.n + 1)]
    if not gens:
        return g
    for _ in range(factors):
        i, j = gens[rng.integers(len(gens))]
        if sig.epsilon(i) == sig.epsilon(j):
            g = g @ standard_element("rotation", i, j, rng.uniform(-np.pi, np.pi), sig)
        else:
            g = g @ standard_element("boost", i, j, rng.uniform(-1.0, 1.0), sig)
    return g


def random_group_element(sig: Signature, rng, factors: int = 8, max_rapidity: float = 0.8) -> GroupElement:
    """Product of random standard elements on all index pairs."""
    g = identity(sig)
    n = sig.n
    pairs = [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]
    for _ in range(factors):
        i, j = pairs[rng.integers(len(pairs))]
        if sig.epsilon(i) == sig.epsilon(j):
            g = g @ standard_element("rotation", i, j, rng.uniform(-np.pi, np.pi), sig)
        else:
            g = g @ standard_element("boost", i, j, rng.uniform(-max_rapidity, max_rapidity), sig)
    return g


# ------------------------------------------------------------ representations


def conjugate(g: GroupElement, m) -> np.ndarray:
    """Ad(g)(M) = g M I g^T I, i.e. g M g^{-1}."""
    return g.matrix @ np.asarray(m) @ g.inverse_matrix


def adjoint_op(g: GroupElement, basis: OrderedBasis | None = None) -> np.ndarray:
    """Matrix of Ad(g) in basis coordinates (column a = coords of Ad(g)(E_a))."""
    basis = basis or basis_for(g.signature)
    return np.column_stack([basis.coords(conjugate(g, e)) for e in basis.elements])


def twist(g: GroupElement) -> np.ndarray:
    """The vector-index factor of rho: (g^{-1})^T = I g I."""
    d = g.signature.diag
    return d @ g.matrix @ d


def rho_op(g: GroupElement, basis: OrderedBasis | None = None) -> np.ndarray:
    """rho(g) = (I g I) kron Ad(g) on coordinates ordered (mu, algebra index)."""
    return np.kron(twist(g), adjoint_op(g, basis))


def rho_apply(g: GroupElement, comps) -> np.ndarray:
    """Componentwise rho(g)(C)_mu = sum_nu [g^{-1}]_{nu,mu} Ad(g)(C_nu)."""
    comps = np.asarray(comps)
    ginv = g.inverse_matrix
    conj = np.array([conjugate(g, c) for c in comps])
    return np.einsum("nm,nij->mij", ginv, conj)


def tensor_coords(comps, basis: OrderedBasis) -> np.ndarray:
    return np.concatenate([basis.coords(c) for c in comps])


def tensor_from_coords(v, basis: OrderedBasis) -> np.ndarray:
    v = np.asarray(v)
    return np.array([basis.expand(chunk) for chunk in v.reshape(-1, basis.dim)])


# ------------------------------------------------------------- frame matrix


def _fix_orientation(a: np.ndarray, sig: Signature) -> np.ndarray:
    a = a.copy()
    n, p = sig.n, sig.p
    if np.linalg.det(a) < 0:
        a[:, n - 1] *= -1
    if 0 < p < n and np.linalg.det(a[:p, :p]) < 0:
        if p < 2:
            raise ValueError("vector lies in the past cone; not reachable from e_1 in SO+(p,q)")
        a[:, 1] *= -1
        a[:, n - 1] *= -1
    return a


def _closed_form_frame(x: np.ndarray, sig: Signature, r: float, cut: float):
    n = sig.n
    eps = sig.eps
    # radicands D_j = x_1^2 + sum_{k >= j} eps(k) x_k^2, j = 2..n+1 (1-based)
    tails = np.concatenate([np.cumsum((eps * x * x)[::-1])[::-1], [0.0]])
    D = x[0] ** 2 + tails  # D[j-1] for 1-based j; D[n] = x_1^2
    if np.any(D[1:] <= cut * r * r):
        return None
    sq = np.sqrt(D)
    g = np.zeros((n, n))
    g[:, 0] = x / r
    for j in range(1, n):  # 0-based column j is column j+1 in 1-based indexing
        den = sq[j] * sq[j + 1]
        g[0, j] = x[0] * x[j] / den
        g[j, j] = -eps[j] * sq[j + 1] / sq[j]
        for i in range(j + 1, n):
            g[i, j] = x[i] * x[j] / den
    return g


def _gram_schmidt_frame(x: np.ndarray, sig: Signature, r: float) -> np.ndarray:
    n, p = sig.n, sig.p
    d = sig.diag
    ys = [x / r]
    ok = True
    for k in range(1, n):
        v = np.eye(n)[k].copy()
        for y in ys:
            v = v - (y @ d @ v) / (y @ d @ y) * y
        nv = v @ d @ v
        want = 1.0 if k < p else -1.0
        if nv * want < 1e-8:
            ok = False
            break
        ys.append(v / np.sqrt(abs(nv)))
    if ok:
        return np.column_stack(ys)
    # pivot-free fallback: diagonalise the Gram matrix of the I-orthogonal complement
    _, _, vt = np.linalg.svd((d @ x)[None, :])
    comp = vt[1:].T
    gram = comp.T @ d @ comp
    lam, q = np.linalg.eigh(gram)
    order = np.argsort(-lam)
    cols = [comp @ q[:, a] / np.sqrt(abs(lam[a])) for a in order]
    return np.column_stack([x / r] + cols)


def frame_matrix(x, sig: Signature | None = None, cut: float = 1e-8) -> GroupElement:
    """Element g_x of SO+(p,q) with g_x (||x|| e_1) = x.

    Uses the closed-form entries when all radicands are safely positive,
    signature-aware Gram-Schmidt otherwise; columns are then sign-fixed for
    determinant and time orientation.
    """
    x = np.asarray(x, dtype=float)
    sig = sig or euclidean(len(x))
    if x.shape != (sig.n,):
        raise ValueError("dimension mismatch")
    nn = sig.norm2(x)
    if not np.any(x):
        raise ValueError("x = 0 has no frame")
    if nn <= 0:
        raise ValueError("x is not time-like")
    if sig.p == 1 and sig.q > 0 and x[0] <= 0:
        raise ValueError("x lies in the past cone; not reachable from e_1 in SO+(p,q)")
    r = np.sqrt(nn)
    g = _closed_form_frame(x, sig, r, cut)
    kind = "frame"
    if g is None:
        g = _gram_schmidt_frame(x, sig, r)
        kind = "frame-gs"
    g = _fix_orientation(g, sig)
    return GroupElement(g, sig, kind)


# ------------------------------------------------------------------ Killing


def killing_residual(xi_value, xi_jacobian, metric_value, metric_gradient_along_xi) -> float:
    """|| J^T g + g J + (dg)(xi) ||_F for the pointwise Killing condition."""
    j = np.asarray(xi_jacobian, dtype=float)
    g = np.asarray(metric_value, dtype=float)
    dg = np.asarray(metric_gradient_along_xi, dtype=float)
    xi = np.asarray(xi_value, dtype=float)
    n = len(xi)
    if j.shape != (n, n) or g.shape != (n, n) or dg.shape != (n, n):
        raise ValueError("shape mismatch in Killing residual")
    return float(np.linalg.norm(j.T @ g + g @ j + dg))
