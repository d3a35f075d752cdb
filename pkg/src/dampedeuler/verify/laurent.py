"""Exact fields of the form  sum_n P_n(t, x1, x2) (1 + t)^(-n).

This class is closed under d/dt, d/dx_i, multiplication by t, x_i and powers of
(1+t)^-1, so every vector-field identity can be evaluated without rounding in
the algebra itself; the only floating point error comes from the final point
evaluation. Coefficients are float64 holding small integers.
"""
from __future__ import annotations

import numpy as np


def _pad_to(a, shape):
    if a.shape == shape:
        return a
    out = np.zeros(shape)
    out[tuple(slice(0, s) for s in a.shape)] = a
    return out


class LaurentField:
    """Immutable; ``terms`` maps n -> coefficient array c[a, b, c] of t^a x1^b x2^c."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {}
        for n, c in (terms or {}).items():
            c = np.asarray(c, dtype=float)
            if c.ndim != 3:
                raise ValueError("coefficient arrays must be 3-D")
            if np.any(c):
                self.terms[int(n)] = c

    # construction -------------------------------------------------------
    @classmethod
    def polynomial(cls, coeffs):
        return cls({0: coeffs})

    @classmethod
    def random_polynomial(cls, rng, degree=5, low=-3, high=3):
        """Integer coefficients on all monomials of total degree <= degree."""
        c = np.zeros((degree + 1,) * 3)
        for a in range(degree + 1):
            for b in range(degree + 1 - a):
                for d in range(degree + 1 - a - b):
                    c[a, b, d] = rng.integers(low, high + 1)
        return cls.polynomial(c)

    @classmethod
    def monomial(cls, a, b, c, coef=1.0, n=0):
        arr = np.zeros((a + 1, b + 1, c + 1))
        arr[a, b, c] = coef
        return cls({n: arr})

    # algebra ------------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, LaurentField):
            return NotImplemented
        out = dict(self.terms)
        for n, c in other.terms.items():
            if n in out:
                shape = tuple(max(i, j) for i, j in zip(out[n].shape, c.shape))
                out[n] = _pad_to(out[n], shape) + _pad_to(c, shape)
            else:
                out[n] = c
        return LaurentField(out)

    def __neg__(self):
        return LaurentField({n: -c for n, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rmul__(self, k):
        return LaurentField({n: k * c for n, c in self.terms.items()})

    def inv_pow(self, k):
        """Multiply by (1+t)^-k (k may be negative)."""
        out = LaurentField()
        for n, c in self.terms.items():
            out = out + LaurentField({n + k: c}) if n + k >= 0 else out + LaurentField(
                {0: _times_one_plus_t(c, -(n + k))})
        return out

    def times_var(self, axis):
        """Multiply by t (axis 0), x1 (1) or x2 (2)."""
        out = {}
        for n, c in self.terms.items():
            shape = list(c.shape)
            shape[axis] += 1
            new = np.zeros(shape)
            idx = [slice(None)] * 3
            idx[axis] = slice(1, None)
            new[tuple(idx)] = c
            out[n] = new
        return LaurentField(out)

    # derivatives --------------------------------------------------------
    def d(self, axis):
        """Partial derivative in t (0), x1 (1) or x2 (2)."""
        out = LaurentField()
        for n, c in self.terms.items():
            if c.shape[axis] > 1:
                k = np.arange(1, c.shape[axis], dtype=float)
                idx = [slice(None)] * 3
                idx[axis] = slice(1, None)
                shape = [1, 1, 1]
                shape[axis] = -1
                out = out + LaurentField({n: c[tuple(idx)] * k.reshape(shape)})
            if axis == 0 and n > 0:
                # d/dt (1+t)^-n = -n (1+t)^-(n+1)
                out = out + LaurentField({n + 1: -n * c})
        return out

    # evaluation ---------------------------------------------------------
    def __call__(self, t, x1, x2):
        t, x1, x2 = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (t, x1, x2)))
        total = np.zeros(t.shape)
        for n, c in self.terms.items():
            total = total + _horner(c, t, x1, x2) * (1.0 + t) ** (-n)
        return total

    def abs_bound(self, t, x1, x2):
        """Sum of the absolute values of all monomial contributions: a scale for
        the rounding error of the point evaluation."""
        t, x1, x2 = (np.abs(np.asarray(v, dtype=float)) for v in (t, x1, x2))
        total = np.zeros(np.broadcast(t, x1, x2).shape)
        for n, c in self.terms.items():
            total = total + _horner(np.abs(c), t, x1, x2) * (1.0 + t) ** (-n)
        return total

    def is_zero(self):
        return not self.terms


def _times_one_plus_t(c, k):
    out = c
    for _ in range(k):
        new = np.zeros((out.shape[0] + 1,) + out.shape[1:])
        new[:-1] += out
        new[1:] += out
        out = new
    return out


def _horner(c, t, x1, x2):
    out = np.zeros(t.shape)
    for a in range(c.shape[0] - 1, -1, -1):
        inner = np.zeros(t.shape)
        for b in range(c.shape[1] - 1, -1, -1):
            row = np.polynomial.polynomial.polyval(x2, c[a, b]) if c.shape[2] else 0.0
            inner = inner * x1 + row
        out = out * t + inner
    return out


# vector fields on LaurentField --------------------------------------------

def dt(f):
    return f.d(0)


def dx(f, i):
    return f.d(i)


def box(f):
    return f.d(0).d(0) - f.d(1).d(1) - f.d(2).d(2)


def scaling(f):
    """S = t d_t + x . grad."""
    return f.d(0).times_var(0) + f.d(1).times_var(1) + f.d(2).times_var(2)


def rotation(f):
    """Omega = x1 d_2 - x2 d_1."""
    return f.d(2).times_var(1) - f.d(1).times_var(2)


def z_field(j, f, hat=False):
    """Z_j (or hat Z_j) applied to f: (-d_t, d_1, d_2, S -+ 1, Omega)."""
    if j == 0:
        return -f.d(0)
    if j in (1, 2):
        return f.d(j)
    if j == 3:
        return scaling(f) + f if hat else scaling(f) - f
    if j == 4:
        return rotation(f)
    raise ValueError(f"vector field index {j} out of range")


def z_alpha(alpha, f, hat=False):
    """Z^alpha f = Z_0^a0 ... Z_4^a4 f (Z_4 applied first)."""
    for j in range(4, -1, -1):
        for _ in range(alpha[j]):
            f = z_field(j, f, hat)
    return f
