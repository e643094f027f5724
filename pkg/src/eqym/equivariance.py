"""Fixed spaces of the rho action and the closed-form bases that span them.

A tensor vector (element of R^n (x) g) is stored as an array of shape
(n, m, m): component ``mu`` is the algebra matrix C_mu.
"""
from __future__ import annotations

import json
from functools import lru_cache
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import subspace_angles

from .group import (GroupElement, identity, random_stabilizer_element, rho_apply,
                    stabilizer_generators, twist)
from .lie import Signature, basis_for, eA, eS, euclidean, sym_traceless_basis

RANK_TOL = 1e-9
GAP_MIN = 1e3

EXPECTED_SO = {3: 3, 4: 2, 5: 1, 6: 1, 7: 1, 8: 1}
EXPECTED_SOPQ = {(1, 1): 2, (1, 2): 3, (1, 3): 2, (2, 2): 2, (2, 3): 1, (3, 3): 1, (1, 4): 1}


class RankGapError(RuntimeError):
    """The singular-value spectrum has no clean cut at the requested tolerance."""


@dataclass
class FixedSpaceReport:
    case: str
    dimension: int
    basis: np.ndarray  # (dim, n, m, m) tensor vectors, orthonormal in coordinates
    coords: np.ndarray  # (dim, N) coordinate vectors
    max_residual: float
    gap_ratio: float
    singular_values: np.ndarray
    generators_used: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "case": self.case,
            "dimension": self.dimension,
            "gap_ratio": None if not np.isfinite(self.gap_ratio) else float(self.gap_ratio),
            "max_residual": float(self.max_residual),
            "generators": self.generators_used,
            "basis": np.round(self.basis, 15).tolist(),
        }


# ------------------------------------------------------------ target spaces


def _component_mats(algebra: str, sig: Signature) -> np.ndarray:
    if algebra == "so":
        return basis_for(sig).elements
    if algebra == "sym":
        if not sig.is_euclidean:
            raise ValueError("symmetric-traceless target only defined for SO(n)")
        return sym_traceless_basis(sig.n)
    raise ValueError(f"unknown algebra {algebra!r}")


def _tensor_basis(mats: np.ndarray, n: int, vector_index: bool) -> np.ndarray:
    """Unit tensors e_mu (x) E_a in (mu major, a minor) order."""
    if not vector_index:
        return mats[:, None]  # treat as a single component
    d, m = len(mats), mats.shape[-1]
    out = np.zeros((n * d, n, m, m))
    for mu in range(n):
        out[mu * d:(mu + 1) * d, mu] = mats
    return out


@lru_cache(maxsize=None)
def _coord_solver(algebra: str, sig: Signature):
    mats = _component_mats(algebra, sig)
    return mats, np.linalg.pinv(mats.reshape(len(mats), -1).T)


def action_matrix(g: GroupElement, algebra: str = "so", vector_index: bool = True) -> np.ndarray:
    """Matrix of rho(g) (or plain Ad(g) when ``vector_index`` is false) on coordinates.

    Coordinates are ordered (mu major, algebra index minor), so rho(g) is
    kron(I g I, Ad(g)).
    """
    mats, solve = _coord_solver(algebra, g.signature)
    ginv = g.inverse_matrix
    images = g.matrix @ mats @ ginv
    ad = solve @ images.reshape(len(mats), -1).T
    if not vector_index:
        return ad
    return np.kron(twist(g), ad)


def _rank_cut(s: np.ndarray, ncols: int, tol: float, gap_min: float):
    smax = s[0] if len(s) else 0.0
    if smax < 1e-12:  # the zero map: everything is fixed
        return ncols, np.inf
    full = np.zeros(ncols)
    full[:len(s)] = s
    small = int(np.sum(full < tol * smax))
    rank = ncols - small
    if small == 0:
        # no null directions: insist the smallest value sits well above the cut
        if full[-1] < gap_min * tol * smax:
            raise RankGapError(f"smallest singular value {full[-1]:.3g} too close to cut {tol * smax:.3g}")
        return 0, np.inf
    below = full[rank]
    gap = np.inf if below == 0 else full[rank - 1] / below if rank > 0 else np.inf
    if gap < gap_min:
        raise RankGapError(f"ambiguous rank gap {gap:.3g} < {gap_min:g} at rank {rank}")
    return small, gap


def fixed_space(sig: Signature, generators=None, tol: float = RANK_TOL, gap_min: float = GAP_MIN,
                algebra: str = "so", vector_index: bool = True, case: str | None = None) -> FixedSpaceReport:
    """Common 1-eigenspace of rho(g) over ``generators`` (default: the stabilizer of e_1).

    Stacks (rho(g_k) - Id) and reads the nullspace off an SVD. Raises
    :class:`RankGapError` when the singular values show no crisp cut.
    """
    if generators is None:
        generators = stabilizer_generators(sig)
    if not generators:
        generators = [identity(sig)]
    blocks = [action_matrix(g, algebra, vector_index) for g in generators]
    size = blocks[0].shape[0]
    stacked = np.vstack([b - np.eye(size) for b in blocks])
    _, s, vt = np.linalg.svd(stacked, full_matrices=False)
    dim, gap = _rank_cut(s, size, tol, gap_min)
    null = vt[size - dim:] if dim else np.zeros((0, size))
    resid = max((np.abs((b - np.eye(size)) @ null.T).max() if dim else 0.0) for b in blocks)
    mats = _component_mats(algebra, sig)
    units = _tensor_basis(mats, sig.n, vector_index)
    tensors = np.tensordot(null, units, axes=1)
    labels = [f"{g.kind}" for g in generators]
    name = case or (f"so({sig.n})" if sig.is_euclidean else f"so+({sig.p},{sig.q})")
    return FixedSpaceReport(case=name, dimension=dim, basis=tensors, coords=null, max_residual=float(resid),
                            gap_ratio=float(gap), singular_values=s, generators_used=labels)


def expected_dimension(sig: Signature) -> int:
    if sig.is_euclidean:
        if sig.n not in EXPECTED_SO:
            raise ValueError(f"SO({sig.n}) is not an enumerated case")
        return EXPECTED_SO[sig.n]
    key = (sig.p, sig.q)
    if key not in EXPECTED_SOPQ:
        raise ValueError(f"SO+{key} is not an enumerated case")
    return EXPECTED_SOPQ[key]


# ------------------------------------------------------------ closed forms


def _tv(n: int, terms, m: int | None = None) -> np.ndarray:
    """Sum of coef * e_mu (x) M over ``terms`` = [(coef, mu (1-based), M), ...]."""
    m = m or n
    out = np.zeros((n, m, m))
    for coef, mu, mat in terms:
        out[mu - 1] += coef * mat
    return out


def closed_form_basis(sig: Signature, variant: str = "corrected") -> np.ndarray:
    """Spanning vectors of the stabilizer fixed space, as listed by the classification.

    ``variant="printed"`` transcribes the published lists literally;
    ``"corrected"`` fixes the sign slips found by numerical checking
    (the two agree wherever the printed list is already right).
    """
    if variant not in ("corrected", "printed"):
        raise ValueError(variant)
    n, p, q = sig.n, sig.p, sig.q
    if sig.is_euclidean:
        if n == 3:
            return np.array([
                _tv(3, [(1, 2, eA(2, 1, 3)), (1, 3, eA(3, 1, 3))]),
                _tv(3, [(1, 2, eA(3, 1, 3)), (-1, 3, eA(2, 1, 3))]),
                _tv(3, [(1, 1, eA(2, 3, 3))]),
            ])
        if n == 4:
            return np.array([
                _tv(4, [(1, k, eA(k, 1, 4)) for k in (2, 3, 4)]),
                _tv(4, [(1, 2, eA(3, 4, 4)), (-1, 3, eA(2, 4, 4)), (1, 4, eA(2, 3, 4))]),
            ])
        if n >= 5:
            return np.array([_tv(n, [(1, k, eA(k, 1, n)) for k in range(1, n + 1)])])
        raise ValueError(f"SO({n}) is not an enumerated case")
    key = (p, q)
    if key == (1, 1):
        # the full space R^2 (x) so(1,1)
        return np.array([_tv(2, [(1, 1, eS(1, 2, 2))]), _tv(2, [(1, 2, eS(1, 2, 2))])])
    if key == (1, 2):
        s1 = -1 if variant == "printed" else 1
        return np.array([
            _tv(3, [(1, 2, eS(2, 1, 3)), (s1, 3, eS(3, 1, 3))]),
            _tv(3, [(1, 2, eS(3, 1, 3)), (-1, 3, eS(2, 1, 3))]),
            _tv(3, [(1, 1, eA(2, 3, 3))]),
        ])
    if key == (1, 3):
        s = -1 if variant == "printed" else 1
        return np.array([
            _tv(4, [(1, 2, eS(2, 1, 4)), (1, 3, eS(3, 1, 4)), (s, 4, eS(4, 1, 4))]),
            _tv(4, [(1, 2, eA(3, 4, 4)), (-1, 3, eA(2, 4, 4)), (1, 4, eA(2, 3, 4))]),
        ])
    if key == (2, 2):
        s = -1 if variant == "printed" else 1
        return np.array([
            _tv(4, [(1, 3, eS(3, 1, 4)), (1, 4, eS(4, 1, 4)), (s, 2, eA(2, 1, 4))]),
            _tv(4, [(-1, 4, eS(3, 2, 4)), (1, 2, eA(3, 4, 4)), (1, 3, eS(4, 2, 4))]),
        ])
    if n >= 5 or key in ((2, 3), (3, 3), (1, 4)):
        s = -1 if variant == "printed" else 1
        terms = [(1, i, eA(i, 1, n)) for i in range(2, p + 1)]
        terms += [(s, j, eS(j, 1, n)) for j in range(p + 1, n + 1)]
        return np.array([_tv(n, terms)])
    raise ValueError(f"SO+({p},{q}) is not an enumerated case")


def _flat(vs) -> np.ndarray:
    vs = np.asarray(vs)
    return vs.reshape(len(vs), -1).T


def principal_angles(a, b) -> np.ndarray:
    """Principal angles between the spans of two stacks of tensor vectors."""
    return subspace_angles(_flat(a), _flat(b))


def invariance_residual(vs, sig: Signature, elements) -> float:
    """max ||rho(g) v - v|| over vectors and group elements."""
    vs = np.asarray(vs)
    worst = 0.0
    for g in elements:
        for v in vs:
            scale = max(np.linalg.norm(v), 1.0)
            worst = max(worst, np.linalg.norm(rho_apply(g, v) - v) / scale)
    return float(worst)


def random_stabilizer_elements(sig: Signature, count: int, rng) -> list[GroupElement]:
    return [random_stabilizer_element(sig, rng) for _ in range(count)]


# ------------------------------------------------------------ SU(n) and Ad-only


def su_symmetric_fixed_space(n: int, **kw) -> FixedSpaceReport:
    """Fixed space of the stabilizer on R^n (x) (traceless symmetric)."""
    return fixed_space(euclidean(n), algebra="sym", case=f"su({n})-sym", **kw)


def su_symmetric_closed_form(n: int) -> np.ndarray:
    """e_1 (x) (e_11 - Id/n) and sum_i e_i (x) e^S_{i,1} - (2/n) e_1 (x) Id."""
    e11 = np.zeros((n, n))
    e11[0, 0] = 1.0
    first = _tv(n, [(1, 1, e11 - np.eye(n) / n)])
    second = _tv(n, [(1, i, eS(i, 1, n)) for i in range(1, n + 1)])
    second[0] -= 2.0 / n * np.eye(n)
    return np.array([first, second])


def adjoint_fixed_space(n: int, **kw) -> FixedSpaceReport:
    """Fixed space of Ad over the stabilizer of e_1, with no vector index."""
    return fixed_space(euclidean(n), vector_index=False, case=f"ad-so({n})", **kw)


def write_report(reports, path) -> None:
    with open(path, "w") as fh:
        json.dump([r.to_json() for r in reports], fh, indent=1, sort_keys=True)

