"""Metrics, curvature, the Hodge star and the Yang-Mills residual on diagonal metrics.

Curvature arrays have shape (N, N, m, m) over slot indices (alpha, beta).
Derivatives of B come from jets, so F and dF are exact up to roundoff.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from math import factorial
from typing import Callable

import numpy as np

from .ansatz import GaugeAnsatz, f_basis, fbar_basis, field_jet, generator_fields
from .lie import Signature, euclidean, levi_civita_tensor


def _zero(r):
    return 0.0


# ------------------------------------------------------------------ metrics


@dataclass
class MetricSpec:
    """Diagonal metric: constant I_{p,q}, or isotropic diag(e^{f_t}, -e^{f_r} Id_n).

    For the isotropic kind slot 0 is time and f_t, f_r are functions of the
    spatial radius with analytic first derivatives.
    """

    kind: str
    n: int
    signature: Signature | None = None
    ft: Callable = _zero
    fr: Callable = _zero
    dft: Callable = _zero
    dfr: Callable = _zero

    def __post_init__(self):
        if self.kind == "constant":
            if self.signature is None:
                self.signature = euclidean(self.n)
            if self.signature.n != self.n:
                raise ValueError("signature size does not match n")
        elif self.kind != "isotropic":
            raise ValueError(f"unknown metric kind {self.kind!r}")

    @property
    def slots(self) -> int:
        return self.n + 1 if self.kind == "isotropic" else self.n

    def _radius(self, y) -> float:
        r = float(np.linalg.norm(np.asarray(y, float)[1:]))
        if r <= 0:
            raise ValueError("isotropic metric queried at r = 0")
        return r

    def diag(self, y) -> np.ndarray:
        if self.kind == "constant":
            return self.signature.diag.diagonal().astype(float)
        r = self._radius(y)
        et, er = np.exp(self.ft(r)), np.exp(self.fr(r))
        d = np.concatenate([[et], -er * np.ones(self.n)])
        if not np.all(np.isfinite(d)) or np.any(d == 0):
            raise ValueError("degenerate metric")
        return d

    def inv(self, y) -> np.ndarray:
        return 1.0 / self.diag(y)

    def sqrt_det(self, y) -> float:
        return float(np.sqrt(np.abs(np.prod(self.diag(y)))))

    def grad_log_diag(self, y) -> np.ndarray:
        """G[mu, beta] = d/dx^beta log|g_{mu mu}|."""
        N = self.slots
        if self.kind == "constant":
            return np.zeros((N, N))
        y = np.asarray(y, float)
        r = self._radius(y)
        dr = np.concatenate([[0.0], y[1:] / r])
        rates = np.concatenate([[self.dft(r)], self.dfr(r) * np.ones(self.n)])
        return np.outer(rates, dr)

    def log_factor(self, y) -> np.ndarray:
        """L[alpha, beta] = d_beta log(sqrt|g| |g^{beta beta}| |g^{alpha alpha}|)."""
        G = self.grad_log_diag(y)
        half = 0.5 * G.sum(axis=0)
        diagG = np.diagonal(G)
        return half[None, :] - diagG[None, :] - G

    @property
    def lorentzian_factor(self):
        """e^{-f_t + f_r} as a function of r (isotropic kind only)."""
        return lambda r: np.exp(-self.ft(r) + self.fr(r))


def flat_metric(n: int, p: int | None = None, q: int | None = None) -> MetricSpec:
    sig = Signature(p, q) if p is not None else euclidean(n)
    return MetricSpec("constant", sig.n, sig)


def isotropic_metric(n: int, ft=_zero, fr=_zero, dft=_zero, dfr=_zero) -> MetricSpec:
    return MetricSpec("isotropic", n, None, ft, fr, dft, dfr)


def default_metric(a: GaugeAnsatz) -> MetricSpec:
    if a.time_dependent:
        return isotropic_metric(a.n)
    return MetricSpec("constant", a.n, a.signature)


def _warp_ft(r):
    return 0.3 * r * r / (1 + r * r)


def _warp_dft(r):
    return 0.6 * r / (1 + r * r) ** 2


def _warp_fr(r):
    return -0.2 * np.sin(r)


def _warp_dfr(r):
    return -0.2 * np.cos(r)


# isotropic metric profiles selectable by name (CLI and test suites)
NAMED_PROFILES = {
    "flat": (_zero, _zero, _zero, _zero),
    "warped": (_warp_ft, _warp_fr, _warp_dft, _warp_dfr),
}


def named_metric(name: str, n: int) -> MetricSpec:
    try:
        ft, fr, dft, dfr = NAMED_PROFILES[name]
    except KeyError:
        raise ValueError(f"unknown metric profile {name!r}; choose from {sorted(NAMED_PROFILES)}") from None
    return isotropic_metric(n, ft, fr, dft, dfr)


# ---------------------------------------------------------------- curvature


def _comm(a, b):
    return a @ b - b @ a


def _bracket_table(A, Bm):
    """[A_a, B_b] for stacks A (N, m, m), B (N, m, m) -> (N, N, m, m)."""
    return np.einsum("aij,bjk->abik", A, Bm) - np.einsum("bij,ajk->abik", Bm, A)


def curvature_from_jet(B) -> tuple[np.ndarray, np.ndarray]:
    """(F, dF) with F[a, b] and dF[c, a, b] = d_c F_{ab}, from a jet of B."""
    v = B.v
    dB = np.moveaxis(B.g, -1, 0)  # dB[c, a] = d_c B_a
    F = dB - np.swapaxes(dB, 0, 1) + _bracket_table(v, v)
    # H[c, a, b] = d_c d_a B_b
    H = np.transpose(B.h, (4, 3, 0, 1, 2))
    dF = H - np.swapaxes(H, 1, 2)
    dF = dF + np.einsum("caij,bjk->cabik", dB, v) - np.einsum("bij,cajk->cabik", v, dB)
    dF = dF + np.einsum("aij,cbjk->cabik", v, dB) - np.einsum("cbij,ajk->cabik", dB, v)
    return F, dF


def _slot_point(a: GaugeAnsatz, x, t):
    x = np.asarray(x, float)
    return np.concatenate([[t], x]) if a.time_dependent else x


def curvature(a: GaugeAnsatz, x, t: float = 0.0) -> np.ndarray:
    """Exact curvature F_{alpha beta} via jets."""
    return curvature_from_jet(field_jet(a, _slot_point(a, x, t)))[0]


def curvature_fd(field: Callable, y, step: float = 1e-5) -> np.ndarray:
    """Central-difference curvature of ``field(y) -> (N, m, m)`` at slot point y."""
    y = np.asarray(y, float)
    B = np.asarray(field(y))
    N = len(y)
    dB = []
    for c in range(N):
        e = np.zeros(N)
        e[c] = step
        dB.append((np.asarray(field(y + e)) - np.asarray(field(y - e))) / (2 * step))
    dB = np.array(dB)
    return dB - np.swapaxes(dB, 0, 1) + _bracket_table(B, B)


def ansatz_field(a: GaugeAnsatz) -> Callable:
    """Slot-coordinate evaluator y -> B(y) for finite differences."""
    return lambda y: field_jet(a, y).v


def _sym_outer(u, X):
    """u_a X_b - u_b X_a for vectors u (N,) and stacks X (N, m, m)."""
    return np.einsum("a,bij->abij", u, X) - np.einsum("b,aij->abij", u, X)


def curvature_closed(a: GaugeAnsatz, x, t: float = 0.0, variant: str = "corrected") -> np.ndarray:
    """Curvature from the closed-form displays (profiles and generator fields only).

    ``variant="printed"`` keeps the published SU(n) display, whose last term
    carries an extra factor i; "corrected" drops it.
    """
    y = _slot_point(a, x, t)
    fl = generator_fields(a, y)
    sig = a.signature
    r = float(fl["r"].v)
    xv = np.asarray(x, float)
    N, n = a.slots, a.n
    off = N - n
    prof = {k: p.derivs(t, r) for k, p in a.profiles.items()}
    c = a.case
    if c in ("SON", "SOPQN", "ISO-SON", "SO4", "SOPQ4"):
        X = fl["X"].v
        ex = sig.eps * xv
        fab = f_basis(sig)  # f_{alpha beta} = e^A_{alpha beta} I
        g0, gt, gr = prof["g"][0], prof["g"][1], prof["g"][2]
        if c in ("SO4", "SOPQ4"):
            f0, fr_ = prof["f"][0], prof["f"][2]
            s = (-1) ** sig.p
            Y = fl["Y"].v
            fbar = fbar_basis(sig)
            F = (gr / r + g0 ** 2 + s * f0 ** 2) * _sym_outer(ex, X)
            F += (2 * g0 - r * r * (g0 ** 2 + s * f0 ** 2)) * fab
            F += fr_ / r * _sym_outer(ex, Y)
            F += 2 * f0 * fbar
            F += 2 * f0 * g0 * (_bracket_table(X, Y))
            return F
        Fs = (gr / r + g0 ** 2) * _sym_outer(ex, X) + g0 * (2 - r * r * g0) * fab
        if off == 0:
            return Fs
        out = np.zeros((N, N, n, n))
        out[1:, 1:] = Fs
        out[0, 1:] = gt * X
        out[1:, 0] = -gt * X
        return out
    if c == "SUN-H":
        h1, h2, h3 = prof["h1"], prof["h2"], prof["h3"]
        Fi, G1, G2 = fl["F"].v, fl["G1"].v, fl["G2"].v
        xG1 = fl["xG1"].v
        eA = np.array([[np.outer(np.eye(n)[i], np.eye(n)[j]) - np.outer(np.eye(n)[j], np.eye(n)[i])
                        for j in range(n)] for i in range(n)])
        k3 = 1j if variant == "printed" else 1.0
        Fij = ((r * h1[2] + h1[0] ** 2 + h2[0] ** 2 - 1 - h2[0] * h3[0]) / r ** 2 * _sym_outer(xv, Fi)
               + (1 - h1[0] ** 2 - h2[0] ** 2) / r ** 2 * eA
               + (r * h2[2] + h1[0] * h3[0]) * k3 / r ** 2 * _sym_outer(xv, G2))
        F0 = h1[1] * Fi + h3[1] * xG1 + h2[1] * (G2 - 2 * xG1)
        out = np.zeros((N, N, n, n), complex)
        out[1:, 1:] = Fij
        out[0, 1:] = F0
        out[1:, 0] = -F0
        return out
    if c in ("SO3", "SOPQ3", "SUN"):
        return _curvature_from_terms(a, xv, prof, r)
    raise ValueError(f"no closed-form curvature for case {c}")


def _term_table(a: GaugeAnsatz, x: np.ndarray, r: float):
    """[(profile, scalar factor, T[mu], dT[alpha, mu])] with hand-written derivatives."""
    n, sig = a.n, a.signature
    eps = sig.eps.astype(float)
    eye = np.eye(n)
    X = np.einsum("k,kmij->mij", x, f_basis(sig))
    dX = f_basis(sig)
    if a.case in ("SO3", "SOPQ3"):
        e3 = levi_civita_tensor(3)
        W = np.einsum("ijk,k->ij", e3, x)
        dW = np.moveaxis(e3, 2, 0)  # dW[alpha] = eps_{i j alpha}
        Z = np.einsum("m,ij->mij", x, W)
        dZ = np.einsum("am,ij->amij", eye, W) + np.einsum("m,aij->amij", x, dW)
        if a.case == "SO3":
            E = np.moveaxis(e3, 2, 0)
            return [("f", 1.0, E, np.zeros((3,) + E.shape)), ("g", 1.0, X, dX), ("h", 1.0, Z, dZ)]
        sgn = eps[:, None, None] * eps[None, :, None] * np.ones((3, 3, 3))
        Epq = np.einsum("m,j,mij->mij", eps, eps, e3)
        return [("f", 1.0, Z * sgn, dZ * sgn[None]), ("g", 1.0, X, dX),
                ("h", 1.0, Epq, np.zeros((3,) + Epq.shape))]
    # SU(n) with profiles f, g1, g2
    A = X
    xx = np.outer(x, x)
    r2 = x @ x
    S1 = np.einsum("m,ij->mij", x, xx - r2 * eye / n)
    dS1 = (np.einsum("am,ij->amij", eye, xx - r2 * eye / n)
           + np.einsum("m,aij->amij", x, np.einsum("ai,j->aij", eye, x) + np.einsum("i,aj->aij", x, eye)
                       - 2 * np.einsum("a,ij->aij", x, eye) / n))
    S2 = (np.einsum("mi,j->mij", eye, x) + np.einsum("i,mj->mij", x, eye) - 2 * np.einsum("m,ij->mij", x, eye) / n)
    dS2 = (np.einsum("mi,aj->amij", eye, eye) + np.einsum("ai,mj->amij", eye, eye)
           - 2 * np.einsum("am,ij->amij", eye, eye) / n)
    return [("f", 1.0, A, dX), ("g1", 1j, S1, dS1), ("g2", 1j, S2, dS2)]


def _curvature_from_terms(a: GaugeAnsatz, x: np.ndarray, prof: dict, r: float) -> np.ndarray:
    """F from B = sum phi_k(t, r) c_k T_k(x) using the analytic derivatives of T_k."""
    eps = a.signature.eps.astype(float)
    dr = eps * x / r
    terms = _term_table(a, x, r)
    B = sum(prof[k][0] * c * T for k, c, T, _ in terms)
    dB = sum(c * (np.einsum("a,mij->amij", prof[k][2] * dr, T) + prof[k][0] * dT) for k, c, T, dT in terms)
    Fs = dB - np.swapaxes(dB, 0, 1) + _bracket_table(B, B)
    if not a.time_dependent:
        return Fs
    n = a.n
    out = np.zeros((n + 1, n + 1, n, n), complex)
    out[1:, 1:] = Fs
    Bt = sum(prof[k][1] * c * T for k, c, T, _ in terms)
    out[0, 1:] = Bt
    out[1:, 0] = -Bt
    return out


# -------------------------------------------------------------- Yang-Mills


def ym_residual_from_jet(B, metric: MetricSpec, y) -> np.ndarray:
    """R_alpha = sum_beta g^{bb}([B_b, F_ab] + d_b F_ab + F_ab d_b log(sqrt|g| |g^bb| |g^aa|))."""
    F, dF = curvature_from_jet(B)
    ginv = metric.inv(y)
    L = metric.log_factor(y)
    v = B.v
    N = len(ginv)
    br = np.einsum("bij,abjk->abik", v, F) - np.einsum("abij,bjk->abik", F, v)
    div = dF[np.arange(N), :, np.arange(N)]  # [b, a] = d_b F_ab
    div = np.swapaxes(div, 0, 1)
    total = br + div + F * L[:, :, None, None]
    return np.einsum("b,abij->aij", ginv, total)


def ym_residual(a: GaugeAnsatz, metric: MetricSpec | None, x, t: float = 0.0) -> np.ndarray:
    """Yang-Mills residual family R_alpha (shape (N, m, m)) at spatial point x, time t."""
    metric = metric or default_metric(a)
    if metric.slots != a.slots:
        raise ValueError("metric and ansatz disagree on the number of slots")
    y = _slot_point(a, x, t)
    return ym_residual_from_jet(field_jet(a, y), metric, y)


def ym_residual_fd(field: Callable, metric: MetricSpec, y, step: float = 1e-4) -> np.ndarray:
    """Fallback: the same residual with dF from central differences of curvature_fd."""
    y = np.asarray(y, float)
    F = curvature_fd(field, y, step)
    N = len(y)
    ginv, L, B = metric.inv(y), metric.log_factor(y), np.asarray(field(y))
    out = []
    dF = []
    for c in range(N):
        e = np.zeros(N)
        e[c] = step
        dF.append((curvature_fd(field, y + e, step) - curvature_fd(field, y - e, step)) / (2 * step))
    for al in range(N):
        acc = np.zeros_like(F[0, 0])
        for be in range(N):
            acc = acc + ginv[be] * (_comm(B[be], F[al, be]) + dF[be][al, be] + F[al, be] * L[al, be])
        out.append(acc)
    return np.array(out)


def project(residual, fields) -> np.ndarray:
    """Least-squares coefficients c with residual ~ sum_k c_k fields[k]; returns (c, misfit)."""
    A = np.array([np.asarray(f).ravel() for f in fields]).T
    b = np.asarray(residual).ravel()
    if np.iscomplexobj(A) or np.iscomplexobj(b):
        A = np.vstack([A.real, A.imag])
        b = np.concatenate([b.real, b.imag])
    c, *_ = np.linalg.lstsq(A, b, rcond=None)
    return c, float(np.linalg.norm(A @ c - b))


# ------------------------------------------------------------------- Hodge


def hodge_star(coeffs, k: int, metric: MetricSpec, y) -> np.ndarray:
    """(*w)_{nu_{k+1}..nu_N} = sqrt|g| / k! * w^{nu_1..nu_k} eps_{nu_1..nu_N}.

    ``coeffs`` is the full antisymmetric component array of shape (N,)*k,
    optionally followed by trailing value axes (e.g. algebra matrices).
    """
    N = metric.slots
    if not 0 <= k <= N:
        raise ValueError(f"form degree {k} outside [0, {N}]")
    w = np.asarray(coeffs)
    ginv = metric.inv(y)
    up = w
    for ax in range(k):
        shape = [1] * w.ndim
        shape[ax] = N
        up = up * ginv.reshape(shape)
    eps = levi_civita_tensor(N)
    out = np.tensordot(up, eps, axes=(list(range(k)), list(range(k))))
    # tensordot puts the remaining value axes first; move them back to the end
    extra = w.ndim - k
    out = np.moveaxis(out, list(range(extra)), list(range(out.ndim - extra, out.ndim)))
    return metric.sqrt_det(y) / factorial(k) * out


def form_basis(k: int, N: int):
    """Antisymmetric unit k-forms dx^{I} for increasing multi-indices I."""
    from itertools import combinations, permutations
    out = []
    for idx in combinations(range(N), k):
        w = np.zeros((N,) * k)
        for perm in permutations(range(k)):
            sign = np.linalg.det(np.eye(k)[list(perm)]) if k else 1.0
            w[tuple(idx[p] for p in perm)] = round(sign)
        out.append((idx, w))
    return out


def exterior_covariant(omega, domega, B) -> np.ndarray:
    """d_B of a p-form with values: (d_B w)_{m0..mp} = sum_i (-1)^i (d_{mi} w + [B_{mi}, w])_{..hat mi..}.

    ``domega[c]`` is d_c of the component array ``omega``.
    """
    omega = np.asarray(omega)
    N = B.shape[0]
    p = omega.ndim - 2
    T = np.asarray(domega) + (np.einsum("cij,...jk->c...ik", B, omega) - np.einsum("...ij,cjk->c...ik", omega, B))
    out = np.zeros((N,) * (p + 1) + omega.shape[-2:], dtype=T.dtype)
    for idx in product(range(N), repeat=p + 1):
        if len(set(idx)) < p + 1:
            continue
        acc = 0
        for i in range(p + 1):
            rest = idx[:i] + idx[i + 1:]
            acc = acc + (-1) ** i * T[(idx[i],) + rest]
        out[idx] = acc
    return out


def hodge_path_residual(a: GaugeAnsatz, metric: MetricSpec, x, t: float = 0.0) -> np.ndarray:
    """*d_B*F for constant diagonal metrics (n <= 5)."""
    if metric.kind != "constant":
        raise ValueError("Hodge path implemented for constant metrics only")
    if metric.slots > 5:
        raise ValueError("Hodge path limited to n <= 5")
    y = _slot_point(a, x, t)
    B = field_jet(a, y)
    F, dF = curvature_from_jet(B)
    N = metric.slots
    sF = hodge_star(F, 2, metric, y)
    dsF = np.array([hodge_star(dF[c], 2, metric, y) for c in range(N)])
    return hodge_star(exterior_covariant(sF, dsF, B.v), N - 1, metric, y)


def hodge_path_factor(metric: MetricSpec, y) -> float:
    """*d_B*F = s R with s = (-1)^(N+1) sign(det g), found by direct comparison."""
    d = metric.diag(y)
    return float((-1) ** (len(d) + 1) * np.sign(np.prod(d)))


def hodge_path_prediction(R, metric: MetricSpec, y) -> np.ndarray:
    """The direct residual mapped to the Hodge-path normalisation."""
    return hodge_path_factor(metric, y) * np.asarray(R)
