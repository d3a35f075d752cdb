"""Vector fields Z = (-d_t, d_1, d_2, S - 1, Omega) and hat Z (S + 1 instead of
S - 1) acting on grid fields.

A field is carried as its time jet [f, f_t, f_tt, ...] on one time slice.
Spatial derivatives are fourth-order centred differences; time derivatives of
theta and u come from the evolution equations (recursive substitution),

    theta_t = -u . grad theta - (1 + (g-1) theta) div u,
    u_t     = -mu (1+t)^-lam u - u . grad u - grad theta,

differentiated in t with the Leibniz rule. Every vector field lowers the
available jet length by at most one.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import comb

import numpy as np

from ..errors import InsufficientHistory, OrderCapExceeded
from ..model import EquationParams, SoundState
from .fd import dx1, dx2

DEFAULT_CAP = 2
MAX_CAP = 3


@dataclass(frozen=True)
class VectorFieldOp:
    alpha: tuple
    hat: bool = False
    cap: int = DEFAULT_CAP

    def __post_init__(self):
        if len(self.alpha) != 5 or any(a < 0 for a in self.alpha):
            raise ValueError("alpha must be five nonnegative integers")
        if self.cap > MAX_CAP:
            raise OrderCapExceeded(f"cap {self.cap} above the supported {MAX_CAP}")
        if self.order > self.cap:
            raise OrderCapExceeded(f"|alpha| = {self.order} exceeds the cap {self.cap}")

    @property
    def order(self):
        return sum(self.alpha)

    @property
    def time_order(self):
        """Time derivatives consumed: one per d_t and one per scaling field."""
        return self.alpha[0] + self.alpha[3]


def multi_indices(k):
    """All alpha with |alpha| <= k, graded then lexicographic."""
    out = []
    for n in range(k + 1):
        out += [a for a in itertools.product(range(n + 1), repeat=5) if sum(a) == n]
    return out


# jet algebra -------------------------------------------------------------

def jmul(a, b, m):
    return [sum(comb(j, i) * a[i] * b[j - i] for i in range(j + 1)) for j in range(m + 1)]


def jd(a, h, axis):
    f = dx1 if axis == 1 else dx2
    return [f(q, h) for q in a]


def _damping_jet(p: EquationParams, t, m):
    """d^j/dt^j mu (1+t)^-lam, j = 0..m."""
    out = []
    c = p.mu
    for j in range(m + 1):
        out.append(c * (1.0 + t) ** (-p.lam - j))
        c *= -p.lam - j
    return out


def sound_jets(state: SoundState, p: EquationParams, order: int):
    """Time jets of (theta, u1, u2) up to ``order`` by recursive substitution."""
    if state.mesh.kind != "cart2d":
        raise ValueError("vector-field diagnostics need a cart2d state")
    h, g, t = state.mesh.h, p.gamma, state.t
    th = [state.theta]
    u1 = [state.u[0]]
    u2 = [state.u[1]]
    for n in range(order):
        th1, th2 = jd(th, h, 1), jd(th, h, 2)
        a11, a12 = jd(u1, h, 1), jd(u1, h, 2)
        a21, a22 = jd(u2, h, 1), jd(u2, h, 2)
        div = [x + y for x, y in zip(a11, a22)]
        coef = [1.0 + (g - 1.0) * th[0]] + [(g - 1.0) * q for q in th[1:]]
        A = [-(x + y) - z for x, y, z in zip(jmul(u1, th1, n), jmul(u2, th2, n), jmul(coef, div, n))]
        damp = _damping_jet(p, t, n)
        B1 = [-(d + x + y) - z for d, x, y, z in
              zip(jmul([np.full_like(u1[0], c) for c in damp], u1, n), jmul(u1, a11, n),
                  jmul(u2, a12, n), th1)]
        B2 = [-(d + x + y) - z for d, x, y, z in
              zip(jmul([np.full_like(u2[0], c) for c in damp], u2, n), jmul(u1, a21, n),
                  jmul(u2, a22, n), th2)]
        th.append(A[n])
        u1.append(B1[n])
        u2.append(B2[n])
    return {"theta": th, "u1": u1, "u2": u2}


def _apply_one(j, jet, X, Y, t, h, hat):
    if j == 0:
        return [-q for q in jet[1:]]
    if j in (1, 2):
        return jd(jet, h, j)
    if j == 3:
        # d_t^m (S -+ 1) f = S d_t^m f + m d_t^m f -+ d_t^m f,  S = t d_t + x . grad
        c = 1.0 if hat else -1.0
        return [t * jet[m + 1] + X * dx1(jet[m], h) + Y * dx2(jet[m], h) + (m + c) * jet[m]
                for m in range(len(jet) - 1)]
    if j == 4:
        return [X * dx2(q, h) - Y * dx1(q, h) for q in jet]
    raise ValueError(j)


def apply_to_jet(alpha, jet, mesh, t, hat=False):
    """Z^alpha (Z_4 applied first) on a time jet; returns the shortened jet."""
    X, Y = mesh.coords()
    need = alpha[0] + alpha[3]
    if len(jet) - 1 < need:
        raise InsufficientHistory(f"alpha {alpha} needs {need} time derivatives, jet has {len(jet) - 1}")
    out = list(jet)
    for j in range(4, -1, -1):
        for _ in range(alpha[j]):
            out = _apply_one(j, out, X, Y, t, mesh.h, hat)
    return out


def apply_vector_field(source, op: VectorFieldOp, p: EquationParams | None = None,
                       component: str = "theta", mesh=None, t=None):
    """Z^alpha (or hat Z^alpha) of theta or a velocity component.

    ``source`` is either a cart2d SoundState (time derivatives by substitution,
    ``p`` required) or an explicit time jet [f, f_t, ...] with ``mesh`` and ``t``.
    """
    if isinstance(source, SoundState):
        if p is None:
            raise ValueError("equation parameters are needed for substitution")
        jets = sound_jets(source, p, op.time_order)
        return apply_to_jet(op.alpha, jets[component], source.mesh, source.t, op.hat)[0]
    if mesh is None or t is None:
        raise InsufficientHistory("an explicit jet needs its mesh and time")
    return apply_to_jet(op.alpha, list(source), mesh, t, op.hat)[0]
