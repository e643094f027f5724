"""Exhaustive checks of the bracket and derivative tables used in the reductions.

Each checker returns {identity name: max residual} over every admissible index
tuple (and, for x-dependent identities, over a set of random points).
"""
from __future__ import annotations

from itertools import product

import numpy as np

from .ansatz import f_basis, generator_fields, make_ansatz, constant
from .lie import Signature, eA, eS, ebar, euclidean, levi_civita

TOL = 1e-10


def _c(a, b):
    return a @ b - b @ a


def _d(i, j):
    return 1.0 if i == j else 0.0


def _worst(acc: dict, name: str, value: float):
    acc[name] = max(acc.get(name, 0.0), float(value))


# ------------------------------------------------------------ so(4) table


def so4_table() -> dict:
    n = 4
    e = {(i, j): eA(i, j, n) for i in range(1, 5) for j in range(1, 5)}
    eb = {(i, j): ebar(i, j) for i in range(1, 5) for j in range(1, 5)}
    R = range(1, 5)
    out: dict = {}
    for k, b, l, a in product(R, R, R, R):
        rhs = _d(a, k) * e[b, l] + _d(a, b) * e[l, k] + _d(l, b) * e[k, a] + _d(l, k) * e[a, b]
        _worst(out, "[e,e]", np.abs(_c(e[k, b], e[l, a]) - rhs).max())
        _worst(out, "[ebar,ebar]", np.abs(_c(eb[k, b], eb[l, a]) - rhs).max())
        rhs3 = sum(levi_civita((l, b, m, a)) * e[k, m] + levi_civita((l, m, k, a)) * e[b, m] for m in R)
        _worst(out, "[e,ebar]", np.abs(_c(e[k, b], eb[l, a]) - rhs3).max())
    for k, b, l in product(R, R, R):
        rhs = e[l, k] + _d(b, k) * e[b, l] + _d(b, l) * e[k, b]
        _worst(out, "[e,e] same beta", np.abs(_c(e[k, b], e[l, b]) - rhs).max())
        _worst(out, "[ebar,ebar] same beta", np.abs(_c(eb[k, b], eb[l, b]) - rhs).max())
        rhs4 = sum(levi_civita((l, m, k, b)) * e[b, m] for m in R)
        _worst(out, "[e,ebar] same beta", np.abs(_c(e[k, b], eb[l, b]) - rhs4).max())
    for i, j, k, l, m, a in product(R, repeat=6):
        lhs = sum(levi_civita((i, j, k, b)) * levi_civita((l, m, a, b)) for b in R)
        rhs = (_d(i, l) * (_d(j, m) * _d(k, a) - _d(j, a) * _d(k, m))
               + _d(i, m) * (_d(j, a) * _d(k, l) - _d(j, l) * _d(k, a))
               + _d(i, a) * (_d(j, l) * _d(k, m) - _d(j, m) * _d(k, l)))
        _worst(out, "epsilon contraction", abs(lhs - rhs))
    return out


# ------------------------------------------------------------ so(p,q) table


def sopq_table(sig: Signature, rng, points: int = 20) -> dict:
    n = sig.n
    eps = {i: sig.epsilon(i) for i in range(1, n + 1)}
    fb = f_basis(sig)
    f = {(i, j): fb[i - 1, j - 1] for i in range(1, n + 1) for j in range(1, n + 1)}
    R = range(1, n + 1)
    out: dict = {}
    for k, a in product(R, R):
        _worst(out, "f antisymmetric", np.abs(f[k, a] + f[a, k]).max())
    for k, a, l, b in product(R, repeat=4):
        rhs = (eps[a] * (_d(l, a) * f[k, b] + _d(b, a) * f[l, k])
               + eps[k] * (_d(k, l) * f[b, a] + _d(b, k) * f[a, l]))
        _worst(out, "[f,f]", np.abs(_c(f[k, a], f[l, b]) - rhs).max())
    a_ = make_ansatz("SOPQN", p=sig.p, q=sig.q, g=constant(0.0))
    for _ in range(points):
        x = _timelike(sig, rng)
        fl = generator_fields(a_, x)
        r = float(np.sqrt(sig.norm2(x)))
        X = fl["X"].v
        _worst(out, "dr/dx", np.abs(fl["r"].g - sig.eps * x / r).max())
        dX = np.moveaxis(fl["X"].g, -1, 0)  # dX[nu, mu] = d_nu X_mu
        _worst(out, "dX/dx", np.abs(dX - fb).max())
        _worst(out, "sum x X", np.abs(np.einsum("b,bij->ij", x, X)).max())
        for al, be in product(R, R):
            Xa, Xb = X[al - 1], X[be - 1]
            rhs = eps[al] * x[al - 1] * Xb - r * r * f[al, be] - eps[be] * x[be - 1] * Xa
            _worst(out, "[X,X]", np.abs(_c(Xa, Xb) - rhs).max() / max(1, r * r))
            rhs2 = -eps[be] * ((1 - _d(al, be)) * Xa + x[be - 1] * f[al, be])
            _worst(out, "[X,f]", np.abs(_c(Xb, f[al, be]) - rhs2).max())
    return out


def _timelike(sig: Signature, rng):
    while True:
        x = rng.normal(size=sig.n)
        if sig.norm2(x) > 0.3 and (sig.p != 1 or sig.q == 0 or x[0] > 0):
            return x


# ------------------------------------------------------------ su(n) table


def sun_table(n: int, rng, points: int = 20) -> dict:
    R = range(1, n + 1)
    I = np.eye(n)
    A = {(i, j): eA(i, j, n) for i in R for j in R}
    S = {(i, j): eS(i, j, n) for i in R for j in R}
    out: dict = {}
    for k, i, l, j in product(R, repeat=4):
        rhs = _d(i, l) * A[k, j] + _d(i, j) * A[l, k] - _d(k, l) * A[i, j] - _d(k, j) * A[l, i]
        _worst(out, "[eA,eA]", np.abs(_c(A[k, i], A[l, j]) - rhs).max())
        rhs = -_d(l, i) * A[k, j] + _d(j, i) * A[l, k] - _d(l, k) * A[i, j] + _d(k, j) * A[l, i]
        _worst(out, "[i eS,i eS]", np.abs(_c(1j * S[k, i], 1j * S[l, j]) - rhs).max())
        rhs = 1j * (_d(i, l) * S[k, j] + _d(i, j) * S[k, l] - _d(k, l) * S[i, j] - _d(k, j) * S[i, l])
        _worst(out, "[eA,i eS]", np.abs(_c(A[k, i], 1j * S[l, j]) - rhs).max())
    a = make_ansatz("SUN-H", n=n, h1=constant(0.0), h2=constant(0.0), h3=constant(0.0))
    for _ in range(points):
        x = rng.normal(size=n)
        y = np.concatenate([[0.0], x])
        fl = generator_fields(a, y)
        r2 = float(x @ x)
        F, G1, G2, xG1 = fl["F"], fl["G1"], fl["G2"], fl["xG1"]
        dF = np.moveaxis(F.g, -1, 0)[1:]  # [j, i] = d_j F_i
        dG1 = np.moveaxis(G1.g, -1, 0)[1:]
        dxG1 = np.moveaxis(xG1.g, -1, 0)[1:]
        dG2 = np.moveaxis(G2.g, -1, 0)[1:]
        Fv, G1v, G2v, xG1v = F.v, G1.v, G2.v, xG1.v
        xx = np.outer(x, x)
        for i, j in product(R, R):
            a0, b0 = i - 1, j - 1
            xi, xj = x[a0], x[b0]
            chk = {
                "dF": (dF[b0, a0], -A[i, j] / r2 - 2 * xj / r2 * Fv[a0]),
                "d(x G1)": (dxG1[b0, a0], xi / r2 * G2v[b0] + (_d(i, j) - 4 * xi * xj / r2) * G1v),
                "dG2": (dG2[b0, a0], -2 * xj / r2 * G2v[a0] + 1j / r2 * (S[i, j] - 2 * _d(i, j) / n * I)),
                "[F,F]": (_c(Fv[a0], Fv[b0]), -A[i, j] / r2 + (xi * Fv[b0] - xj * Fv[a0]) / r2),
                "[G2,G2]": (_c(G2v[a0], G2v[b0]), -A[i, j] / r2 - (xi * Fv[b0] - xj * Fv[a0]) / r2),
                "[F,G2]": (_c(Fv[a0], G2v[b0]), -1j * S[i, j] / r2 + 2 * _d(i, j) / r2 ** 2 * 1j * xx
                           + (xi * G2v[b0] - xj * G2v[a0]) / r2),
            }
            for name, (lhs, rhs) in chk.items():
                _worst(out, name, np.abs(lhs - rhs).max())
        for j in R:
            b0 = j - 1
            xj = x[b0]
            _worst(out, "dG1", np.abs(dG1[b0] - (G2v[b0] / r2 - 4 * xj / r2 * G1v)).max())
            _worst(out, "[F,G1]", np.abs(_c(Fv[b0], G1v) - (2 * xj / r2 * G1v - G2v[b0] / r2)).max())
            _worst(out, "[G2,G1]", np.abs(_c(G2v[b0], G1v) - Fv[b0] / r2).max())
        idx = np.arange(n)
        sums = {
            "sum x F": np.einsum("j,jab->ab", x, Fv),
            "sum x G2 - 2 r^2 G1": np.einsum("j,jab->ab", x, G2v) - 2 * r2 * G1v,
            "sum dF": dF[idx, idx].sum(0),
            "sum dG2 + 4 G1": dG2[idx, idx].sum(0) + 4 * G1v,
            "sum d(x G1) - (n-2) G1": dxG1[idx, idx].sum(0) - (n - 2) * G1v,
            "sum [F,G2] - 2n G1": sum(_c(Fv[j], G2v[j]) for j in idx) - 2 * n * G1v,
            "sum [F,x G1]": sum(_c(Fv[j], xG1v[j]) for j in idx),
            "sum [G2,x G1]": sum(_c(G2v[j], xG1v[j]) for j in idx),
        }
        for name, v in sums.items():
            _worst(out, name, np.abs(v).max())
    return out


def signatures_up_to(pmax: int = 3, qmax: int = 3) -> list[Signature]:
    out = []
    # p = 0 has no x with r^2 > 0, so it is left out
    for p in range(1, pmax + 1):
        for q in range(0, qmax + 1):
            if p + q >= 3:
                out.append(euclidean(p + q) if q == 0 else Signature(p, q))
    return out


def all_tables(rng=None, points: int = 20) -> dict:
    rng = rng or np.random.default_rng(0)
    res = {"so4": so4_table()}
    for sig in signatures_up_to():
        res[f"sopq({sig.p},{sig.q})"] = sopq_table(sig, rng, points)
    for n in (4, 5, 6):
        res[f"sun({n})"] = sun_table(n, rng, points)
    return res


def failures(tables: dict, tol: float = TOL) -> list[tuple[str, str, float]]:
    return [(t, k, v) for t, d in tables.items() for k, v in d.items() if not v < tol]


__all__ = ["all_tables", "failures", "so4_table", "sopq_table", "sun_table", "signatures_up_to"]
