"""Property tests of the functional inequalities on random bump x polynomial
fields.

Explicit-constant inequalities are checked case by case against their stated
constant (with a quadrature slack). For the implicit ones the constant is
fitted as the largest lhs/rhs ratio seen; it must be finite, and
:func:`constant_stability` compares fitted constants across seeds.

Norms use midpoint quadrature: on a Cartesian grid over the support's bounding
box, or on a polar grid about the origin (radius r = s^2, midpoint in s and in
angle) where a 1/|x| weight is involved. Sup norms are grid maxima taken over
the grid and its refinement by two.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from ..errors import InequalityViolation
from .fields import ManufacturedField

SLACK = 0.05


@dataclass
class InequalityCase:
    inequality_id: str
    lhs: float
    rhs: float
    witness: dict = field(default_factory=dict)

    @property
    def ratio(self):
        return self.lhs / self.rhs if self.rhs > 0 else (0.0 if self.lhs == 0 else np.inf)


# quadrature -----------------------------------------------------------------

def cart_grid(box, n):
    x0, x1, y0, y1 = box
    hx, hy = (x1 - x0) / n, (y1 - y0) / n
    xs = x0 + (np.arange(n) + 0.5) * hx
    ys = y0 + (np.arange(n) + 0.5) * hy
    X, Y = np.meshgrid(xs, ys, indexing="xy")
    return X, Y, hx * hy


def polar_grid(r_max, ns, nphi):
    s_max = np.sqrt(r_max)
    ds = s_max / ns
    s = (np.arange(ns) + 0.5) * ds
    phi = (np.arange(nphi) + 0.5) * 2 * np.pi / nphi
    S, P = np.meshgrid(s, phi, indexing="ij")
    R = S**2
    w = 2.0 * S**3 * ds * (2 * np.pi / nphi)  # dx = r dr dphi, dr = 2 s ds
    return R * np.cos(P), R * np.sin(P), w


def lp(q, w, p=2.0):
    return float(np.sum(np.abs(q) ** p * w) ** (1.0 / p))


def l2v(parts, w):
    return float(np.sqrt(np.sum(sum(np.abs(c) ** 2 for c in parts) * w)))


def _sup(fn, box, n):
    """Grid maximum with a doubling check."""
    out = 0.0
    for m in (n, 2 * n):
        X, Y, _ = cart_grid(box, m)
        out = max(out, float(np.max(np.abs(fn(X, Y)))))
    return out


def _pad_box(box, frac=0.02):
    x0, x1, y0, y1 = box
    dx, dy = frac * (x1 - x0), frac * (y1 - y0)
    return (x0 - dx, x1 + dx, y0 - dy, y1 + dy)


# inequalities ------------------------------------------------------------

@dataclass(frozen=True)
class InequalitySpec:
    inequality_id: str
    constant: float | None  # None: implicit, fitted
    evaluate: object  # (rng, n) -> InequalityCase


def _grad(f, t, X, Y):
    return f.d((0, 1, 0), t, X, Y), f.d((0, 0, 1), t, X, Y)


def _hess(f, t, X, Y):
    return [f.d(k, t, X, Y) for k in ((0, 2, 0), (0, 1, 1), (0, 1, 1), (0, 0, 2))]


def _poincare(p):
    def ev(rng, n):
        f = ManufacturedField.random(rng, rng.uniform(0.2, 2.0))
        R = float(np.hypot(*f.center) + f.radius())
        X, Y, w = cart_grid(_pad_box(f.bounding_box()), n)
        gx, gy = _grad(f, 0.0, X, Y)
        return InequalityCase(f"poincare_p{p:g}", lp(f(0.0, X, Y), w, p),
                              R * lp(np.hypot(gx, gy), w, p), {"field": asdict(f), "R": R})
    return ev


def _hardy(p):
    def ev(rng, n):
        f = ManufacturedField.random(rng, rng.uniform(0.2, 1.0))
        X, Y, w = polar_grid(np.hypot(*f.center) + f.radius(), n, 2 * n)
        gx, gy = _grad(f, 0.0, X, Y)
        r = np.hypot(X, Y)
        return InequalityCase(f"hardy_p{p:g}", lp(f(0.0, X, Y) / r, w, p),
                              lp(np.hypot(gx, gy), w, p), {"field": asdict(f)})
    return ev


def _div_curl(rng, n):
    f = ManufacturedField.random(rng, 1.0)
    g = ManufacturedField.random(rng, 1.0)
    X, Y, w = cart_grid((-1.0, 1.0, -1.0, 1.0), n)
    f1, f2 = _grad(f, 0.0, X, Y)
    g1, g2 = _grad(g, 0.0, X, Y)
    lhs = l2v((f1, f2, g1, g2), w)
    rhs = lp(g1 - f2, w) + lp(f1 + g2, w)
    return InequalityCase("div_curl", lhs, rhs, {"field": asdict(f), "field2": asdict(g)})


def _gn(rng, n):
    f = ManufacturedField.random(rng, rng.uniform(0.2, 2.0))
    box = _pad_box(f.bounding_box())
    X, Y, w = cart_grid(box, n)
    sup = _sup(lambda a, b: f(0.0, a, b), box, n)
    rhs = np.sqrt(lp(f(0.0, X, Y), w) * l2v(_hess(f, 0.0, X, Y), w))
    return InequalityCase("gagliardo_nirenberg", sup, float(rhs), {"field": asdict(f)})


def _hardy_ball(norm):
    def ev(rng, n):
        t = rng.uniform(0.0, 5.0)
        f = ManufacturedField.random(rng, 0.5 + t)
        box = _pad_box(f.bounding_box())
        weight = lambda X, Y: 1.0 / (t + 1.0 - np.hypot(X, Y))  # noqa: E731
        if norm == "l2":
            X, Y, w = cart_grid(box, n)
            gx, gy = _grad(f, 0.0, X, Y)
            lhs = lp(f(0.0, X, Y) * weight(X, Y), w)
            rhs = lp(np.hypot(gx, gy), w)
        else:
            lhs = _sup(lambda a, b: f(0.0, a, b) * weight(a, b), box, n)
            rhs = _sup(lambda a, b: np.hypot(*_grad(f, 0.0, a, b)), box, n)
        return InequalityCase(f"hardy_ball_{norm}", lhs, rhs, {"field": asdict(f), "t": t})
    return ev


def _st_field(rng, support):
    """Time-dependent field with supp_x inside B(0, support(t)) at the drawn t."""
    t = rng.uniform(0.0, 5.0)
    f = ManufacturedField.random(rng, support(t), t=t, kappa=rng.uniform(0.0, 1.0))
    return f, t


def _ks_parts(f, t, X, Y):
    """d^2 Phi, d Z^{<=1} Phi and box Phi on the grid (d = (d_t, d_1, d_2))."""
    j = f.jet2(t, X, Y)
    D = {k: j[k] for k in j}
    first = [D[(1, 0, 0)], D[(0, 1, 0)], D[(0, 0, 1)]]
    second = {(a, b): D[tuple(np.add(_e(a), _e(b)))] for a in range(3) for b in range(3)}
    # Z-fields: Phi, -Phi_t, Phi_1, Phi_2, (S-1)Phi, Omega Phi; take d of each
    dZ = []
    dZ.append(first)
    for a in range(3):
        dZ.append([second[(a, b)] for b in range(3)])  # d(d_a Phi), sign irrelevant
    # d_b (t Phi_t + x.grad Phi - Phi)
    dS = []
    for b in range(3):
        v = t * second[(0, b)] + X * second[(1, b)] + Y * second[(2, b)]
        if b == 0:
            v = v + first[0]
        else:
            v = v + first[b]
        dS.append(v - first[b])
    dZ.append(dS)
    # d_b (x1 Phi_2 - x2 Phi_1)
    dO = []
    for b in range(3):
        v = X * second[(2, b)] - Y * second[(1, b)]
        if b == 1:
            v = v + first[2]
        elif b == 2:
            v = v - first[1]
        dO.append(v)
    dZ.append(dO)
    box = second[(0, 0)] - second[(1, 1)] - second[(2, 2)]
    return second, [c for grp in dZ for c in grp], box


def _e(a):
    e = [0, 0, 0]
    e[a] = 1
    return e


def _ks(alpha):
    def ev(rng, n):
        f, t = _st_field(rng, lambda s: 1.0 + s)
        X, Y, w = cart_grid(_pad_box(f.bounding_box(t)), n)
        sigma = np.clip(1.0 + t - np.hypot(X, Y), 0.0, None)
        second, dz, box = _ks_parts(f, t, X, Y)
        lhs = l2v([sigma ** (1 + alpha) * v for v in second.values()], w)
        rhs = l2v([sigma**alpha * v for v in dz], w) + (1 + t) * lp(sigma**alpha * box, w)
        return InequalityCase(f"ks_weighted_a{alpha}", lhs, rhs, {"field": asdict(f), "t": t})
    return ev


def _ks_pointwise(which):
    def ev(rng, n):
        f, t = _st_field(rng, lambda s: 1.0 + s)
        X, Y, _ = cart_grid(_pad_box(f.bounding_box(t)), n)
        r = np.hypot(X, Y)
        second, dz, box = _ks_parts(f, t, X, Y)
        dzn = np.sqrt(sum(v**2 for v in dz))
        if which == 1:
            lhs = np.abs((t - r) * second[(0, 0)])
            rhs = dzn + r * np.abs(box)
        else:
            lap = second[(1, 1)] + second[(2, 2)]
            lhs = np.abs((t - r) * lap) + np.abs(t - r) * np.hypot(second[(0, 1)], second[(0, 2)])
            rhs = dzn + t * np.abs(box)
        keep = rhs > 1e-10 * rhs.max()
        ratio = lhs[keep] / rhs[keep]
        k = int(np.argmax(ratio))
        return InequalityCase(f"ks_pointwise_{which}", float(lhs[keep][k]), float(rhs[keep][k]),
                              {"field": asdict(f), "t": t,
                               "x": [float(X[keep][k]), float(Y[keep][k])]})
    return ev


def _spatial_parts(f, X, Y):
    first = [f.d((0, 1, 0), 0.0, X, Y), f.d((0, 0, 1), 0.0, X, Y)]
    return first, _hess(f, 0.0, X, Y)


def _embedding(kind):
    def ev(rng, n):
        t = rng.uniform(0.0, 5.0)
        f = ManufacturedField.random(rng, 1.0 + t)
        box = _pad_box(f.bounding_box())
        X, Y, w = cart_grid(box, n)
        sig = lambda a, b: np.clip(1.0 + t - np.hypot(a, b), 0.0, None)  # noqa: E731
        s = sig(X, Y)
        first, hess = _spatial_parts(f, X, Y)
        F = f(0.0, X, Y)
        if kind == "half":
            lhs = _sup(lambda a, b: np.sqrt(sig(a, b)) * f(0.0, a, b), box, n)
            rhs = (np.sqrt(lp(F, w)) * (np.sqrt(l2v([s * c for c in hess], w)) + np.sqrt(l2v(first, w)))
                   + l2v([np.sqrt(s) * c for c in first], w))
        else:
            lhs = _sup(lambda a, b: sig(a, b) ** 1.5 * f(0.0, a, b), box, n)
            rhs = (np.sqrt(lp(s * F, w)) * (np.sqrt(l2v([s**2 * c for c in hess], w))
                                            + np.sqrt(l2v([s * c for c in first], w)))
                   + lp(np.sqrt(s) * F, w))
        return InequalityCase(f"embedding_sigma_{kind}", lhs, float(rhs), {"field": asdict(f), "t": t})
    return ev


def _ks_low(rng, n):
    f = ManufacturedField.random(rng, rng.uniform(0.3, 3.0))
    box = _pad_box(f.bounding_box())
    X, Y, w = cart_grid(box, n)
    first, hess = _spatial_parts(f, X, Y)
    F = f(0.0, X, Y)
    om = X * first[1] - Y * first[0]
    # d_1, d_2 of Omega f
    om1 = first[1] + X * hess[1] - Y * hess[0]
    om2 = -first[0] + X * hess[3] - Y * hess[2]
    rhs = l2v([F, om, first[0], first[1], om1, om2], w)
    lhs = _sup(lambda a, b: np.sqrt(np.hypot(a, b)) * f(0.0, a, b), box, n)
    return InequalityCase("ks_low", lhs, rhs, {"field": asdict(f)})


INEQUALITIES = [
    InequalitySpec("poincare_p2", 1.0, _poincare(2.0)),
    InequalitySpec("poincare_p1", 1.0, _poincare(1.0)),
    InequalitySpec("hardy_p1", 1.0, _hardy(1.0)),
    InequalitySpec("hardy_p1.5", 3.0, _hardy(1.5)),
    InequalitySpec("div_curl", 1.0, _div_curl),
    InequalitySpec("gagliardo_nirenberg", None, _gn),
    InequalitySpec("hardy_ball_l2", None, _hardy_ball("l2")),
    InequalitySpec("hardy_ball_linf", None, _hardy_ball("linf")),
    InequalitySpec("ks_weighted_a0", None, _ks(0)),
    InequalitySpec("ks_weighted_a1", None, _ks(1)),
    InequalitySpec("ks_pointwise_1", None, _ks_pointwise(1)),
    InequalitySpec("ks_pointwise_2", None, _ks_pointwise(2)),
    InequalitySpec("embedding_sigma_half", None, _embedding("half")),
    InequalitySpec("embedding_sigma_three_halves", None, _embedding("three_halves")),
    InequalitySpec("ks_low", None, _ks_low),
]


def check_inequalities(n_cases=100, seed=0, n=160, only=None, raise_on_fail=False):
    """One record per inequality: constant (stated or fitted), violations,
    worst case, spread of lhs/rhs over the cases."""
    if n_cases < 1:
        raise ValueError("n_cases must be positive")
    out = []
    for k, spec in enumerate(INEQUALITIES):
        if only is not None and spec.inequality_id not in only:
            continue
        rng = np.random.default_rng([seed, k])
        cases = [spec.evaluate(rng, n) for _ in range(n_cases)]
        ratios = np.array([c.ratio for c in cases])
        worst = cases[int(np.argmax(ratios))]
        finite = bool(np.all(np.isfinite(ratios)))
        if spec.constant is not None:
            limit = spec.constant * (1.0 + SLACK)
            bad = [c for c in cases if not c.ratio <= limit]
            constant, fitted = spec.constant, False
        else:
            bad = [] if finite else [c for c in cases if not np.isfinite(c.ratio)]
            constant, fitted = float(ratios.max()), True
        pos = ratios[ratios > 0]
        rec = {"inequality_id": spec.inequality_id, "constant": constant, "fitted": fitted,
               "n_cases": n_cases, "seed": seed, "violations": len(bad), "passed": not bad,
               "max_ratio": float(ratios.max()), "min_ratio": float(pos.min()) if pos.size else 0.0,
               "witness": bad[0].witness if bad else worst.witness}
        out.append(rec)
        if raise_on_fail and bad:
            raise InequalityViolation(f"{spec.inequality_id}: {len(bad)} violation(s)",
                                      inequality_id=spec.inequality_id, witness=bad[0].witness)
    return out


def constant_stability(reports, band=10.0):
    """Across several seeds' reports, max/min of each fitted constant."""
    by_id = {}
    for rep in reports:
        for rec in rep:
            if rec["fitted"]:
                by_id.setdefault(rec["inequality_id"], []).append(rec["constant"])
    out = {}
    for k, cs in by_id.items():
        cs = np.array(cs)
        spread = float(cs.max() / cs.min()) if cs.min() > 0 else np.inf
        out[k] = {"constants": cs.tolist(), "spread": spread, "stable": bool(spread <= band)}
    return out
