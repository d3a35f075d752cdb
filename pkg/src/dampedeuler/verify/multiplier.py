"""Weighted energy identity for theta with the multiplier

    m = mu/2 (1+t)^(mu-1) theta + (1+t)^mu theta_t,

integrated over [0, t] x R^2 on rotationally symmetric solver output:

    [int e dx]_0^t + int_0^t int mu/4 (2-mu) (1+s)^(mu-3) theta^2 = int_0^t int F_theta m,
    e = 1/2 (1+t)^mu |d theta|^2 + mu/2 (1+t)^(mu-1) theta theta_t + mu/4 (1+t)^(mu-2) theta^2.

The flux term integrates to zero because the support stays inside the grid.
"""
from __future__ import annotations

import numpy as np
from scipy.integrate import trapezoid

from ..errors import OrderFailure
from ..model import EquationParams, InitialDataSpec
from .wave import d_r, forcing_theta, observed_order, radial_history, time_derivatives_from_equations


def energy_density(th, th_t, th_r, t, mu):
    w = 1.0 + t
    return (0.5 * w**mu * (th_t**2 + th_r**2) + 0.5 * mu * w ** (mu - 1.0) * th * th_t
             + 0.25 * mu * w ** (mu - 2.0) * th**2)


def energy_density_squared_form(th, th_t, th_r, t, mu):
    """Same density written as a sum of squares (nonnegative for mu <= 2)."""
    w = 1.0 + t
    return (w**mu * ((2.0 - mu) / 4.0 * th_t**2 + 0.5 * th_r**2)
            + 0.25 * mu * w ** (mu - 2.0) * (w * th_t + th) ** 2)


def multiplier_terms(hist, p: EquationParams):
    """Per-snapshot spatial integrals: energy, zeroth-order dissipation, F m."""
    r, h, mu = hist.r, hist.h, p.mu
    wts = 2.0 * np.pi * r * h
    E, D, FM = [], [], []
    for t, th, U in zip(hist.t, hist.theta, hist.u):
        th_t, U_t = time_derivatives_from_equations(th, U, r, h, p, t)
        th_r = d_r(th, h)
        F = forcing_theta(th, U, th_t, U_t, d_r(th_t, h), r, h, p, t)
        m = 0.5 * mu * (1.0 + t) ** (mu - 1.0) * th + (1.0 + t) ** mu * th_t
        E.append(np.sum(energy_density(th, th_t, th_r, t, mu) * wts))
        D.append(np.sum(0.25 * mu * (2.0 - mu) * (1.0 + t) ** (mu - 3.0) * th**2 * wts))
        FM.append(np.sum(F * m * wts))
    return np.array(E), np.array(D), np.array(FM)


def identity_defect(p: EquationParams, h: float, t_end: float, spec=None):
    hist = radial_history(p, h, t_end, spec)
    E, D, FM = multiplier_terms(hist, p)
    lhs = E[-1] - E[0] + trapezoid(D, hist.t)
    rhs = trapezoid(FM, hist.t)
    return {"h": h, "t": float(hist.t[-1]), "lhs": float(lhs), "rhs": float(rhs),
            "defect": float(abs(lhs - rhs)), "energy0": float(E[0])}


def check_multiplier_identity(p: EquationParams | None = None, h: float = 0.005, t_end: float = 0.5,
                              spec=None, min_order=1.5, raise_on_fail=False):
    p = p or EquationParams(mu=0.5, epsilon=0.01)
    spec = spec or InitialDataSpec("poly8")
    coarse = identity_defect(p, h, t_end, spec)
    fine = identity_defect(p, h / 2, t_end, spec)
    order = observed_order(coarse["defect"], fine["defect"])
    passed = order >= min_order
    out = {"check": "multiplier_identity", "params": p.to_dict(), "profile": spec.profile_id,
           "coarse": coarse, "fine": fine, "order": order, "min_order": min_order,
           "passed": passed}
    if raise_on_fail and not passed:
        raise OrderFailure(f"energy identity defect order {order:.3f} below {min_order}", order=order)
    return out
