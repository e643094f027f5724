"""Closed-form equivariant connections B_mu(t, x) built from radial profiles.

Each case is a sum  profile(t, r) * (generator field)  where the generator
fields (X_mu, Y_mu, F_i, G^1, G^2_i, ...) are explicit tensors in x. Every
field is evaluated as a :class:`~eqym.jets.Jet`, so B comes with exact first
and second derivatives.

Slot convention: constant-metric cases have slots x_1..x_n; the time-dependent
cases (ISO-SON, SUN, SUN-H) put t in slot 0 and B_0 = 0.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.interpolate import CubicSpline

from .group import GroupElement, conjugate
from .jets import Jet, of_two, stack
from .lie import Signature, eA, ebar, euclidean, levi_civita, levi_civita_tensor

CASES = ("SO3", "SO4", "SON", "SOPQ3", "SOPQ4", "SOPQN", "SUN", "SUN-H", "ISO-SON")
TIME_CASES = ("SUN", "SUN-H", "ISO-SON")
PROFILE_NAMES = {
    "SO3": ("f", "g", "h"), "SO4": ("f", "g"), "SON": ("g",),
    "SOPQ3": ("f", "g", "h"), "SOPQ4": ("f", "g"), "SOPQN": ("g",),
    "SUN": ("f", "g1", "g2"), "SUN-H": ("h1", "h2", "h3"), "ISO-SON": ("g",),
}


# ----------------------------------------------------------------- profiles


class Profile:
    """phi(t, r) with partials (v, t, r, tt, tr, rr)."""

    time_dependent = False

    def derivs(self, t: float, r: float) -> tuple:
        raise NotImplementedError

    def __call__(self, t: float, r: float) -> float:
        return self.derivs(t, r)[0]

    def domain_ok(self, r: float) -> bool:
        return np.isfinite(r)


@dataclass
class RadialProfile(Profile):
    """phi(r) from callables for the value and its first two derivatives."""

    f: Callable
    df: Callable
    d2f: Callable
    r_min: float = 0.0
    r_max: float = np.inf

    def derivs(self, t, r):
        if not self.r_min <= r <= self.r_max:
            raise ValueError(f"r={r} outside profile domain [{self.r_min}, {self.r_max}]")
        return (float(self.f(r)), 0.0, float(self.df(r)), 0.0, 0.0, float(self.d2f(r)))


@dataclass
class SpaceTimeProfile(Profile):
    """phi(t, r) from a callable returning all six partials."""

    fn: Callable
    time_dependent = True

    def derivs(self, t, r):
        return tuple(float(v) for v in self.fn(t, r))


def constant(c: float) -> RadialProfile:
    return RadialProfile(lambda r: c, lambda r: 0.0, lambda r: 0.0)


def gaussian_mix(amps, widths, centers=None, offset: float = 0.0) -> RadialProfile:
    """offset + sum_k a_k exp(-(r - c_k)^2 / w_k^2)."""
    a = np.asarray(amps, float)
    w = np.asarray(widths, float)
    c = np.zeros_like(a) if centers is None else np.asarray(centers, float)

    def parts(r):
        u = (r - c) / w
        e = a * np.exp(-u * u)
        return e, u

    def f(r):
        return offset + parts(r)[0].sum()

    def df(r):
        e, u = parts(r)
        return (-2 * u / w * e).sum()

    def d2f(r):
        e, u = parts(r)
        return ((4 * u * u - 2) / (w * w) * e).sum()

    return RadialProfile(f, df, d2f)


def random_profile(rng, terms: int = 3, scale: float = 1.0) -> RadialProfile:
    """A smooth random radial profile (Gaussian mixture plus offset)."""
    return gaussian_mix(scale * rng.normal(size=terms), rng.uniform(0.6, 2.0, size=terms),
                        rng.uniform(-1.0, 1.5, size=terms), offset=scale * rng.normal() * 0.5)


def random_spacetime_profile(rng, scale: float = 1.0) -> SpaceTimeProfile:
    """phi(t, r) = a(r) + b(r) sin(w t + c) with smooth random a, b."""
    pa, pb = random_profile(rng, scale=scale), random_profile(rng, scale=scale)
    w, c = rng.uniform(0.5, 2.0), rng.uniform(0, 2 * np.pi)

    def fn(t, r):
        a0, _, a1, _, _, a2 = pa.derivs(0, r)
        b0, _, b1, _, _, b2 = pb.derivs(0, r)
        s, co = np.sin(w * t + c), np.cos(w * t + c)
        return (a0 + b0 * s, b0 * w * co, a1 + b1 * s, -b0 * w * w * s, b1 * w * co, a2 + b2 * s)

    return SpaceTimeProfile(fn)


@dataclass
class SplineProfile(Profile):
    """Cubic-spline interpolant of sampled values; derivatives from the spline."""

    r: np.ndarray
    values: np.ndarray
    spline: CubicSpline = field(init=False, repr=False)

    def __post_init__(self):
        self.r = np.asarray(self.r, float)
        self.values = np.asarray(self.values, float)
        self.spline = CubicSpline(self.r, self.values)

    def derivs(self, t, r):
        if not self.r[0] <= r <= self.r[-1]:
            raise ValueError(f"r={r} outside sampled domain [{self.r[0]}, {self.r[-1]}]")
        s = self.spline
        return (float(s(r)), 0.0, float(s(r, 1)), 0.0, 0.0, float(s(r, 2)))


# ----------------------------------------------------------------- ansatz


@dataclass
class GaugeAnsatz:
    case: str
    signature: Signature
    profiles: dict

    def __post_init__(self):
        if self.case not in CASES:
            raise ValueError(f"unknown ansatz case {self.case!r}")
        need = PROFILE_NAMES[self.case]
        missing = [k for k in need if k not in self.profiles]
        if missing:
            raise ValueError(f"case {self.case} needs profiles {missing}")
        n, sig = self.signature.n, self.signature
        rules = {
            "SO3": sig.is_euclidean and n == 3, "SO4": sig.is_euclidean and n == 4,
            "SON": sig.is_euclidean and n >= 3, "SOPQ3": n == 3, "SOPQ4": n == 4, "SOPQN": n >= 3,
            "SUN": sig.is_euclidean and n >= 4, "SUN-H": sig.is_euclidean and n >= 4,
            "ISO-SON": sig.is_euclidean and n >= 3,
        }
        if not rules[self.case]:
            raise ValueError(f"case {self.case} is not defined for signature ({sig.p},{sig.q})")

    @property
    def n(self) -> int:
        return self.signature.n

    @property
    def time_dependent(self) -> bool:
        return self.case in TIME_CASES

    @property
    def slots(self) -> int:
        return self.n + 1 if self.time_dependent else self.n

    @property
    def complex_valued(self) -> bool:
        return self.case in ("SUN", "SUN-H")


def make_ansatz(case: str, n: int | None = None, p: int | None = None, q: int | None = None,
                **profiles) -> GaugeAnsatz:
    sig = Signature(p, q) if p is not None else euclidean(n)
    return GaugeAnsatz(case, sig, profiles)


# --------------------------------------------------------- generator fields


def f_basis(sig: Signature) -> np.ndarray:
    """f[k, mu] = e^A_{k,mu} I_{p,q} (0-based axes), the so(p,q) frame used by X."""
    n = sig.n
    out = np.zeros((n, n, n, n))
    for k in range(n):
        for mu in range(n):
            if k != mu:
                out[k, mu] = eA(k + 1, mu + 1, n) @ sig.diag
    return out


def fbar_basis(sig: Signature) -> np.ndarray:
    """fbar[k, mu] = I_{p,q} ebar_{k,mu} (n = 4 only)."""
    out = np.zeros((4, 4, 4, 4))
    for k in range(4):
        for mu in range(4):
            out[k, mu] = sig.diag @ ebar(k + 1, mu + 1)
    return out


def _eps3() -> np.ndarray:
    return levi_civita_tensor(3)


def sign_vec(sig: Signature) -> np.ndarray:
    return sig.eps.astype(float)


def _spatial(xs, slots: int, comps: Jet, offset: int) -> Jet:
    """Embed n spatial components into ``slots`` (zero time component when offset=1)."""
    if offset == 0:
        return comps
    zero = Jet.const(np.zeros(comps.shape[1:], comps.v.dtype), comps.dim)
    return stack([zero] + [comps[k] for k in range(comps.shape[0])])


def generator_fields(a: GaugeAnsatz, y) -> dict:
    """Jets of every generator field of the case at slot coordinates ``y``."""
    sig, n = a.signature, a.n
    coords = Jet.coords(y)
    off = 1 if a.time_dependent else 0
    xs = coords[off:]
    x = stack(xs)  # shape (n,)
    eps = sign_vec(sig)
    r2 = sum((x[k] * x[k]) * eps[k] for k in range(n))
    out: dict = {"r": r2.sqrt(), "x": x, "t": coords[0] if off else None}
    fb = f_basis(sig)
    out["X"] = sum((xs[k] * fb[k] for k in range(n)), Jet.const(np.zeros((n, n, n)), len(y)))
    if a.case in ("SO3", "SOPQ3"):
        e3 = _eps3()
        # W_{ij} = sum_k eps_{ijk} x_k ;  E_mu = [eps_{ij mu}]
        W = sum((xs[k] * e3[:, :, k] for k in range(3)), Jet.const(np.zeros((3, 3)), len(y)))
        E = np.moveaxis(e3, 2, 0)  # E[mu]_{ij} = eps_{i j mu}
        if a.case == "SO3":
            out["E"] = Jet.const(E, len(y))
            out["Z"] = x.reshape(3, 1, 1) * W.reshape(1, 3, 3)
        else:
            ei = eps[None, :, None]
            out["Zpq"] = (x.reshape(3, 1, 1) * W.reshape(1, 3, 3)) * (eps[:, None, None] * ei * np.ones((3, 3, 3)))
            hterm = np.einsum("m,j,mij->mij", eps, eps, np.transpose(e3, (0, 1, 2)))
            out["Epq"] = Jet.const(hterm, len(y))
    if a.case in ("SO4", "SOPQ4"):
        fbb = fbar_basis(sig)
        out["Y"] = sum((xs[k] * fbb[k] for k in range(4)), Jet.const(np.zeros((4, 4, 4)), len(y)))
    if a.case in ("SUN", "SUN-H"):
        eye = np.eye(n)
        xxT = x.reshape(n, 1) * x.reshape(1, n)
        # e_i x^T + x e_i^T as a jet over i
        S2 = Jet.linear(np.einsum("ka,ib->kiab", eye, eye) + np.einsum("kb,ia->kiab", eye, eye),
                        np.asarray(y)[off:])
        S2 = _pad_linear(S2, off)
        xI = x.reshape(n, 1, 1) * np.broadcast_to(eye, (n, n, n))
        if a.case == "SUN":
            out["A"] = _euclid_X(xs, n, len(y))  # x e_i^T - e_i x^T
            out["S1"] = x.reshape(n, 1, 1) * (xxT - r2 * (eye / n)).reshape(1, n, n)
            out["S2"] = S2 - xI * (2.0 / n)
        else:
            inv_r2 = r2.power(-1.0)
            out["F"] = _euclid_X(xs, n, len(y)) * inv_r2
            G1 = (xxT * inv_r2 - eye / n) * inv_r2 * 1j
            out["G1"] = G1
            out["xG1"] = x.reshape(n, 1, 1) * G1.reshape(1, n, n)
            out["G2"] = (S2 - xI * (2.0 / n)) * inv_r2 * 1j
    return out


def _pad_linear(j: Jet, off: int) -> Jet:
    if off == 0:
        return j
    d = j.dim + off
    g = np.concatenate([np.zeros(j.shape + (off,)), j.g], axis=-1)
    return Jet(j.v, g, np.zeros(j.shape + (d, d)))


def _euclid_X(xs, n: int, d: int) -> Jet:
    fb = f_basis(euclidean(n))
    return sum((xs[k] * fb[k] for k in range(n)), Jet.const(np.zeros((n, n, n)), d))


def _profile_jet(prof: Profile, fields: dict, tval: float) -> Jet:
    r = fields["r"]
    t = fields["t"]
    d = prof.derivs(tval, float(r.v))
    if t is None:
        t = Jet.const(0.0, r.dim)
    return of_two(t, r, d)


def field_jet(a: GaugeAnsatz, y, fields: dict | None = None) -> Jet:
    """B as a jet of shape (slots, m, m) at slot coordinates ``y``."""
    y = np.asarray(y, dtype=float)
    if y.shape != (a.slots,):
        raise ValueError(f"expected {a.slots} coordinates, got {y.shape}")
    fields = fields or generator_fields(a, y)
    rv = float(fields["r"].v) if np.isfinite(fields["r"].v) else np.nan
    if not rv > 0:
        raise ValueError("ansatz evaluated at r <= 0 or at a non-time-like point")
    tval = float(y[0]) if a.time_dependent else 0.0
    P = {k: _profile_jet(p, fields, tval) for k, p in a.profiles.items() if k in PROFILE_NAMES[a.case]}
    c = a.case
    if c in ("SON", "SOPQN", "ISO-SON"):
        B = P["g"] * fields["X"]
    elif c == "SO3":
        B = P["f"] * fields["E"] + P["g"] * fields["X"] + P["h"] * fields["Z"]
    elif c == "SOPQ3":
        B = P["f"] * fields["Zpq"] + P["g"] * fields["X"] + P["h"] * fields["Epq"]
    elif c in ("SO4", "SOPQ4"):
        B = P["g"] * fields["X"] + P["f"] * fields["Y"]
    elif c == "SUN":
        B = P["f"] * fields["A"] + (P["g1"] * fields["S1"] + P["g2"] * fields["S2"]) * 1j
    else:  # SUN-H
        B = (P["h1"] + 1.0) * fields["F"] + P["h3"] * fields["xG1"] + P["h2"] * (fields["G2"] - fields["xG1"] * 2.0)
    return _spatial(None, a.slots, B, 1 if a.time_dependent else 0)


def ansatz_eval(a: GaugeAnsatz, x, t: float = 0.0) -> np.ndarray:
    """B_mu at spatial point x (and time t): array (slots, m, m)."""
    y = _slot_coords(a, x, t)
    _check_domain(a, np.asarray(x, float))
    return field_jet(a, y).v


def _slot_coords(a: GaugeAnsatz, x, t) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (a.n,):
        raise ValueError(f"expected a point in R^{a.n}")
    return np.concatenate([[t], x]) if a.time_dependent else x


def _check_domain(a: GaugeAnsatz, x: np.ndarray):
    sig = a.signature
    if sig.norm2(x) <= 0:
        raise ValueError("point is not time-like (x^T I x <= 0)")


# ------------------------------------------------------------ equivariance


def equivariance_residual(a, lam: GroupElement, x, t: float = 0.0, evaluator=None) -> float:
    """max_mu || B_mu(L x) - sum_nu Ad(L)(B_nu(x)) [L^{-1}]_{nu,mu} || (spatial components).

    ``evaluator(x) -> (n, m, m)`` overrides the ansatz (used for negative controls).
    """
    x = np.asarray(x, dtype=float)
    if evaluator is None:
        off = 1 if a.time_dependent else 0

        def evaluator(z):
            return ansatz_eval(a, z, t)[off:]
    lx = lam.matrix @ x
    lhs = evaluator(lx)
    base = evaluator(x)
    conj = np.array([conjugate(lam, c) for c in base])
    rhs = np.einsum("nm,nij->mij", lam.inverse_matrix, conj)
    return float(max(np.linalg.norm(lhs[m] - rhs[m]) for m in range(len(lhs))))


def corrupted_evaluator(a: GaugeAnsatz, t: float = 0.0, strength: float = 0.5):
    """The ansatz with g(r) replaced by g(r) + strength * x_2: breaks equivariance."""
    off = 1 if a.time_dependent else 0
    X = f_basis(a.signature)

    def ev(x):
        base = ansatz_eval(a, x, t)[off:]
        return base + strength * x[1] * np.tensordot(x, X, axes=1)

    return ev


def term_fields(a: GaugeAnsatz, x, t: float = 0.0) -> dict:
    """Values of the generator fields at x (for projections)."""
    return {k: v.v for k, v in generator_fields(a, _slot_coords(a, x, t)).items()
            if isinstance(v, Jet) and k not in ("r", "x", "t")}


__all__ = [
    "CASES", "GaugeAnsatz", "Profile", "RadialProfile", "SpaceTimeProfile", "SplineProfile", "ansatz_eval",
    "constant", "corrupted_evaluator", "equivariance_residual", "f_basis", "fbar_basis", "field_jet",
    "gaussian_mix", "generator_fields", "make_ansatz", "random_profile", "random_spacetime_profile",
    "term_fields", "levi_civita",
]
