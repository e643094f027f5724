"""Second-order jets: a value with its exact gradient and Hessian at one point.

Enough arithmetic to push coordinates through the ansatz formulas and read
off B, dB and d2B without finite differences.
"""
from __future__ import annotations

import numpy as np


class Jet:
    __slots__ = ("v", "g", "h")

    def __init__(self, v, g, h):
        self.v = np.asarray(v)
        self.g = np.asarray(g)
        self.h = np.asarray(h)

    @property
    def dim(self) -> int:
        return self.g.shape[-1]

    @property
    def shape(self):
        return self.v.shape

    # -- construction
    @classmethod
    def const(cls, value, dim: int) -> "Jet":
        value = np.asarray(value)
        return cls(value, np.zeros(value.shape + (dim,), value.dtype), np.zeros(value.shape + (dim, dim), value.dtype))

    @classmethod
    def coords(cls, y) -> list["Jet"]:
        """Independent coordinate jets y_0, ..., y_{d-1}."""
        y = np.asarray(y, dtype=float)
        d = len(y)
        eye = np.eye(d)
        return [cls(y[k], eye[k], np.zeros((d, d))) for k in range(d)]

    @classmethod
    def linear(cls, coeff, y) -> "Jet":
        """Tensor sum_k y_k coeff[k] (coeff has a leading axis of length d)."""
        coeff = np.asarray(coeff)
        d = coeff.shape[0]
        v = np.tensordot(np.asarray(y, dtype=float), coeff, axes=1)
        g = np.moveaxis(coeff, 0, -1)
        return cls(v, g, np.zeros(v.shape + (d, d), coeff.dtype))

    # -- algebra
    def _lift(self, other) -> "Jet":
        return other if isinstance(other, Jet) else Jet.const(other, self.dim)

    def __add__(self, other):
        o = self._lift(other)
        return Jet(self.v + o.v, self.g + o.g, self.h + o.h)

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.v, -self.g, -self.h)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, Jet):
            c = np.asarray(other)
            return Jet(self.v * c, self.g * c[..., None], self.h * c[..., None, None])
        a, b = self, other
        v = a.v * b.v
        g = a.v[..., None] * b.g + b.v[..., None] * a.g
        h = (a.v[..., None, None] * b.h + b.v[..., None, None] * a.h
             + a.g[..., :, None] * b.g[..., None, :] + b.g[..., :, None] * a.g[..., None, :])
        return Jet(v, g, h)

    __rmul__ = __mul__

    def reshape(self, *shape) -> "Jet":
        d = self.dim
        return Jet(self.v.reshape(*shape), self.g.reshape(*shape, d), self.h.reshape(*shape, d, d))

    def __getitem__(self, idx) -> "Jet":
        if not isinstance(idx, tuple):
            idx = (idx,)
        return Jet(self.v[idx], self.g[idx + (Ellipsis, slice(None))], self.h[idx + (Ellipsis, slice(None), slice(None))])

    def compose(self, f0, f1, f2) -> "Jet":
        """phi(self) for a scalar jet, given phi, phi', phi'' at self.v."""
        g = f1 * self.g
        h = f2 * np.multiply.outer(self.g, self.g) + f1 * self.h
        return Jet(f0, g, h)

    def sqrt(self) -> "Jet":
        s = np.sqrt(self.v)
        return self.compose(s, 0.5 / s, -0.25 / (s * self.v))

    def power(self, k: float) -> "Jet":
        v = self.v
        return self.compose(v ** k, k * v ** (k - 1), k * (k - 1) * v ** (k - 2))


def stack(jets) -> Jet:
    return Jet(np.stack([j.v for j in jets]), np.stack([j.g for j in jets]), np.stack([j.h for j in jets]))


def of_two(t: Jet, r: Jet, d) -> Jet:
    """phi(t, r) from its partials ``d`` = (v, t, r, tt, tr, rr)."""
    v, ft, fr, ftt, ftr, frr = d
    g = ft * t.g + fr * r.g
    h = (ftt * np.multiply.outer(t.g, t.g) + ftr * (np.multiply.outer(t.g, r.g) + np.multiply.outer(r.g, t.g))
         + frr * np.multiply.outer(r.g, r.g) + ft * t.h + fr * r.h)
    return Jet(v, g, h)
