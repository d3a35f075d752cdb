"""Bump x polynomial manufactured fields with closed-form derivatives.

    Phi(t, x) = B(|x - c|^2 / rho(t)^2) P(t, x),   B(q) = exp(1 - 1/(1 - q)) for q < 1,
    rho(t) = rho0 + kappa t,

with P a polynomial in (t, x1, x2). The support at time t is the closed disc of
radius rho(t) about c. Derivatives are generated symbolically once per
polynomial degree and evaluated numerically; no finite differences anywhere.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import sympy as sp

MAX_ORDER = 6

_t, _x1, _x2, _c1, _c2, _r0, _k = sp.symbols("t x1 x2 c1 c2 rho0 kappa", real=True)


def _monomials(degree):
    return [(a, b, c) for a in range(degree + 1) for b in range(degree + 1 - a)
            for c in range(degree + 1 - a - b)]


@lru_cache(maxsize=None)
def _template(degree):
    mons = _monomials(degree)
    coefs = sp.symbols(f"p0:{len(mons)}", real=True)
    poly = sum(cf * _t**a * _x1**b * _x2**c for cf, (a, b, c) in zip(coefs, mons))
    q = ((_x1 - _c1) ** 2 + (_x2 - _c2) ** 2) / (_r0 + _k * _t) ** 2
    return sp.exp(1 - 1 / (1 - q)) * poly, q, coefs


@lru_cache(maxsize=None)
def _derivative_fn(degree, orders):
    expr, q, coefs = _template(degree)
    d = expr
    for sym, n in zip((_t, _x1, _x2), orders):
        if n:
            d = sp.diff(d, sym, n)
    args = (_t, _x1, _x2, _c1, _c2, _r0, _k) + tuple(coefs)
    return sp.lambdify(args, d, "numpy", cse=True), sp.lambdify(args, q, "numpy")


@dataclass(frozen=True)
class ManufacturedField:
    center: tuple
    rho0: float
    kappa: float
    coeffs: tuple
    degree: int

    @classmethod
    def random(cls, rng, support_radius, t=0.0, degree=2, kappa=0.0, min_frac=0.15):
        """Random field whose support at time ``t`` lies in B(0, support_radius).

        ``kappa`` is capped so that the support radius stays positive at t = 0.
        """
        rad = rng.uniform(min_frac, 1.0) * support_radius
        if t > 0:
            kappa = min(kappa, 0.9 * rad / t)
        rho0 = rad - kappa * t
        off = rng.uniform(0.0, support_radius - rad)
        ang = rng.uniform(0.0, 2 * np.pi)
        n = len(_monomials(degree))
        coeffs = tuple(rng.normal(size=n))
        return cls((off * np.cos(ang), off * np.sin(ang)), rho0, kappa, coeffs, degree)

    def radius(self, t=0.0):
        return self.rho0 + self.kappa * t

    def bounding_box(self, t=0.0):
        r = self.radius(t)
        return (self.center[0] - r, self.center[0] + r, self.center[1] - r, self.center[1] + r)

    def d(self, orders, t, x1, x2):
        """Partial derivative d_t^a d_1^b d_2^c (orders = (a, b, c)), exactly."""
        orders = tuple(int(o) for o in orders)
        if sum(orders) > MAX_ORDER:
            raise ValueError(f"derivative order above {MAX_ORDER}")
        fn, qfn = _derivative_fn(self.degree, orders)
        t, x1, x2 = np.broadcast_arrays(np.asarray(t, float), np.asarray(x1, float),
                                        np.asarray(x2, float))
        args = (self.center[0], self.center[1], self.rho0, self.kappa) + self.coeffs
        q = qfn(t, x1, x2, *args)
        inside = q < 1.0
        out = np.zeros(t.shape)
        if np.any(inside):
            out[inside] = fn(t[inside], x1[inside], x2[inside], *args)
        return out

    def __call__(self, t, x1, x2):
        return self.d((0, 0, 0), t, x1, x2)

    def jet2(self, t, x1, x2):
        """All derivatives of order <= 2 as a dict keyed by (a, b, c)."""
        keys = [k for k in itertools.product(range(3), repeat=3) if sum(k) <= 2]
        return {k: self.d(k, t, x1, x2) for k in keys}


