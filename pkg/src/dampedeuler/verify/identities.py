"""Exact operator identities between the vector fields Z, hat Z, box and the
damping weights, checked on random polynomial (Laurent in 1+t) fields.

Each identity is a function f -> (lhs, rhs) of LaurentFields. Evaluation at
random points must agree to ``rtol`` times the absolute-value scale of the
monomials involved, which bounds the rounding error of the evaluation.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import factorial

import numpy as np

from ..errors import IdentityViolation
from .laurent import LaurentField, box, dt, dx, rotation, scaling, z_alpha, z_field

E0 = (1, 0, 0, 0, 0)
E3 = (0, 0, 0, 1, 0)


def _sub(alpha, e, k=1):
    return tuple(a - k * b for a, b in zip(alpha, e))


def _w(f, k):
    return f.inv_pow(k)


def damping_defect_theta(alpha, f):
    """hat Z^a((1+t)^-1 f_t) - (1+t)^-1 d_t Z^a f, computed directly."""
    return z_alpha(alpha, _w(dt(f), 1), hat=True) - _w(dt(z_alpha(alpha, f)), 1)


def damping_defect_u(alpha, f):
    """hat Z^a((1+t)^-2 f) - (1+t)^-2 Z^a f, computed directly."""
    return z_alpha(alpha, _w(f, 2), hat=True) - _w(z_alpha(alpha, f), 2)


def damping_formula_theta(alpha, f):
    """Closed-form right side for :func:`damping_defect_theta`."""
    out = LaurentField()
    a0, a3 = alpha[0], alpha[3]
    for j in range(1, a0 + 1):
        c = factorial(a0) / factorial(a0 - j)
        out = out + c * _w(dt(z_alpha(_sub(alpha, E0, j), f)), j + 1)
    for j in range(a3):
        inner = _w(dt(z_alpha(_sub((0,) * 5, E3, -j), f)), 2)
        out = out + z_alpha(_sub(alpha, E3, j + 1), inner, hat=True)
    return out


def damping_formula_u(alpha, f):
    out = LaurentField()
    a0, a3 = alpha[0], alpha[3]
    for j in range(1, a0 + 1):
        c = factorial(a0) * (j + 1) / factorial(a0 - j)
        out = out + c * _w(z_alpha(_sub(alpha, E0, j), f), j + 2)
    for j in range(a3):
        inner = 2.0 * _w(z_alpha(_sub((0,) * 5, E3, -j), f), 3)
        out = out + z_alpha(_sub(alpha, E3, j + 1), inner, hat=True)
    return out


def multi_indices(max_order):
    for n in range(1, max_order + 1):
        for a in itertools.product(range(n + 1), repeat=5):
            if sum(a) == n:
                yield a


def _z3_power(f, k, hat=False):
    for _ in range(k):
        f = z_field(3, f, hat)
    return f


@dataclass(frozen=True)
class Identity:
    identity_id: str
    fn: object  # f -> (lhs, rhs)


def _registry(max_order=2, max_power=3):
    ids = []

    def add(name, fn):
        ids.append(Identity(name, fn))

    s_minus = lambda f: z_field(3, f)  # noqa: E731
    partials = {"dt": dt, "d1": lambda f: dx(f, 1), "d2": lambda f: dx(f, 2)}
    for name, d in partials.items():
        add(f"[{name},S-1]=d", lambda f, d=d: (d(s_minus(f)) - s_minus(d(f)), d(f)))
    add("[d1,Omega]=d2", lambda f: (dx(rotation(f), 1) - rotation(dx(f, 1)), dx(f, 2)))
    add("[d2,Omega]=-d1", lambda f: (dx(rotation(f), 2) - rotation(dx(f, 2)), -dx(f, 1)))
    add("[S,Omega]=0", lambda f: (scaling(rotation(f)) - rotation(scaling(f)), LaurentField()))
    for name, d in partials.items():
        add(f"[{name},box]=0", lambda f, d=d: (d(box(f)) - box(d(f)), LaurentField()))
    add("[Omega,box]=0", lambda f: (rotation(box(f)) - box(rotation(f)), LaurentField()))
    add("[S,box]=-2box", lambda f: (scaling(box(f)) - box(scaling(f)), -2.0 * box(f)))
    add("hatZ3 box - box Z3 = 0", lambda f: (z_field(3, box(f), True) - box(z_field(3, f)),
                                             LaurentField()))
    add("hatZ3 damping theta", lambda f: (z_field(3, _w(dt(f), 1), True) - _w(dt(z_field(3, f)), 1),
                                          _w(dt(f), 2)))
    add("hatZ3 damping u", lambda f: (z_field(3, _w(f, 2), True) - _w(z_field(3, f), 2),
                                      2.0 * _w(f, 3)))
    for k in range(1, max_power + 1):
        def pth(f, k=k):
            lhs = _z3_power(_w(dt(f), 1), k, True) - _w(dt(_z3_power(f, k)), 1)
            rhs = LaurentField()
            for j in range(k):
                rhs = rhs + _z3_power(_w(dt(_z3_power(f, j)), 2), k - 1 - j, True)
            return lhs, rhs

        def pu(f, k=k):
            lhs = _z3_power(_w(f, 2), k, True) - _w(_z3_power(f, k), 2)
            rhs = LaurentField()
            for j in range(k):
                rhs = rhs + _z3_power(2.0 * _w(_z3_power(f, j), 3), k - 1 - j, True)
            return lhs, rhs

        add(f"hatZ3^{k} damping theta", pth)
        add(f"hatZ3^{k} damping u", pu)
    for a in multi_indices(max_order):
        tag = "".join(map(str, a))
        add(f"hatZ^{tag} box", lambda f, a=a: (z_alpha(a, box(f), True) - box(z_alpha(a, f)),
                                               LaurentField()))
        add(f"hatZ^{tag} damping theta",
            lambda f, a=a: (damping_defect_theta(a, f), damping_formula_theta(a, f)))
        add(f"hatZ^{tag} damping u",
            lambda f, a=a: (damping_defect_u(a, f), damping_formula_u(a, f)))
    return ids


def identity_ids(max_order=2, max_power=3):
    return [i.identity_id for i in _registry(max_order, max_power)]


def check_identity(identity, fields, points, rtol=1e-12):
    """Largest scaled residual over all fields and points; raises
    IdentityViolation on the first point beyond ``rtol``."""
    t, x1, x2 = points
    worst = 0.0
    for f in fields:
        lhs, rhs = identity.fn(f)
        diff = lhs - rhs
        res = np.abs(diff(t, x1, x2))
        scale = np.maximum(lhs.abs_bound(t, x1, x2) + rhs.abs_bound(t, x1, x2), 1.0)
        rel = res / scale
        k = int(np.argmax(rel))
        worst = max(worst, float(rel[k]))
        if rel[k] > rtol:
            pt = (float(t[k]), float(x1[k]), float(x2[k]))
            raise IdentityViolation(f"{identity.identity_id} fails at {pt}: residual {res[k]:.3e}",
                                    identity_id=identity.identity_id, point=pt,
                                    residual=float(res[k]))
    return worst


def sample_points(rng, n=100, t_max=3.0, x_max=2.0):
    t = rng.uniform(0.0, t_max, n)
    x1 = rng.uniform(-x_max, x_max, n)
    x2 = rng.uniform(-x_max, x_max, n)
    return t, x1, x2


def check_commutators(seed=0, n_fields=100, n_points=100, degree=5, rtol=1e-12, max_order=2,
                      max_power=3, identities=None):
    """Run every registered identity. Returns a list of result dicts
    ``{identity_id, passed, worst, error}``; never raises."""
    rng = np.random.default_rng(seed)
    fields = [LaurentField.random_polynomial(rng, degree) for _ in range(n_fields)]
    points = sample_points(rng, n_points)
    results = []
    for ident in _registry(max_order, max_power):
        if identities is not None and ident.identity_id not in identities:
            continue
        try:
            worst = check_identity(ident, fields, points, rtol)
            results.append({"identity_id": ident.identity_id, "passed": True, "worst": worst,
                            "error": None})
        except IdentityViolation as exc:
            results.append({"identity_id": ident.identity_id, "passed": False,
                            "worst": exc.residual, "error": str(exc), "point": exc.point})
    return results


def check_forcing_decomposition(mu=1.0, alphas=None, seed=0, n_fields=20, rtol=1e-12,
                                t_grid=None, x=(0.3, -0.2)):
    """Damping parts of the differentiated forcings,

        F_theta^(a) - hat Z^a F_theta = mu (1+t)^-1 d_t Z^a f - hat Z^a(mu (1+t)^-1 f_t)
        F_u^(a)     - hat Z^a F_u     = d_t(mu (1+t)^-1 Z^a f) - hat Z^a d_t(mu (1+t)^-1 f),

    against their closed forms, plus the size of these parts relative to
    mu (1+t)^-2 |d Z^{<|a|} f| on t in ``t_grid`` (reported, not asserted).
    """
    rng = np.random.default_rng(seed)
    fields = [LaurentField.random_polynomial(rng, 3) for _ in range(n_fields)]
    alphas = list(multi_indices(2)) if alphas is None else alphas
    t_grid = np.linspace(1.0, 100.0, 100) if t_grid is None else np.asarray(t_grid, float)
    pts = sample_points(rng, 50)
    out = []
    for a in alphas:
        worst = 0.0
        ratio = 0.0
        for f in fields:
            d_theta = -mu * damping_defect_theta(a, f)
            d_u = mu * (damping_defect_u(a, f) - damping_defect_theta(a, f))
            closed_theta = -mu * damping_formula_theta(a, f)
            closed_u = mu * (damping_formula_u(a, f) - damping_formula_theta(a, f))
            for got, want in ((d_theta, closed_theta), (d_u, closed_u)):
                diff = got - want
                scale = np.maximum(got.abs_bound(*pts) + want.abs_bound(*pts), 1.0)
                worst = max(worst, float(np.max(np.abs(diff(*pts)) / scale)))
            # decay relative to the lower-order energy density
            x1 = np.full_like(t_grid, x[0])
            x2 = np.full_like(t_grid, x[1])
            lower = np.zeros_like(t_grid)
            for b in _lower(a):
                g = z_alpha(b, f)
                for ax in range(3):
                    lower += np.abs(g.d(ax)(t_grid, x1, x2))
            with np.errstate(divide="ignore", invalid="ignore"):
                r = np.abs(d_theta(t_grid, x1, x2)) * (1.0 + t_grid) ** 2 / (mu * lower)
            r = r[np.isfinite(r)]
            if r.size:
                ratio = max(ratio, float(r.max()))
        out.append({"alpha": list(a), "passed": worst <= rtol, "worst": worst,
                    "decay_ratio_max": ratio})
    return out


def _lower(alpha):
    n = sum(alpha)
    yield (0,) * 5
    for m in range(1, n):
        yield from (b for b in multi_indices(m) if sum(b) == m)
