"""Structural checks applied alongside lifespan sweeps: finite propagation
speed, preservation of curl-free data, and the E_2[u]/E_2[theta] ratio."""
from __future__ import annotations

import math

import numpy as np

from ..diagnostics.energies import embed_radial, energy_E
from ..model import SUPPORT_RADIUS, EquationParams, InitialDataSpec
from .. import solver1d, solver2d, solver_radial


def support_bound(t, h):
    return SUPPORT_RADIUS + t + 2.0 * math.sqrt(2.0) * h


def _perturbation(s):
    if isinstance(s, solver1d.PSystemState):
        return np.abs(s.v - 1.0) + np.abs(s.u), np.abs(s.mesh.centers()) + 0.5 * s.mesh.h
    if isinstance(s, solver_radial.RadialState):
        return np.abs(s.rho - 1.0) + np.abs(s.mru), s.mesh.centers() + 0.5 * s.mesh.h
    c = s.mesh.centers()
    X, Y = np.meshgrid(np.abs(c) + s.mesh.h / 2, np.abs(c) + s.mesh.h / 2)
    return np.abs(s.rho - 1.0) + np.abs(s.mom[0]) + np.abs(s.mom[1]), np.hypot(X, Y)


def support_snapshot(s, p: EquationParams, tol=None):
    """(radius, bound, tail): tail is the largest perturbation outside the bound,
    i.e. the smallest tolerance for which the bound would hold."""
    tol = 1e-9 * p.epsilon if tol is None else tol
    pert, dist = _perturbation(s)
    bound = support_bound(s.t, s.mesh.h)
    mask = pert > tol
    radius = float(dist[mask].max()) if mask.any() else 0.0
    out = dist > bound
    tail = float(pert[out].max()) if out.any() else 0.0
    return radius, bound, tail


def check_support(solver_id, p: EquationParams, spec: InitialDataSpec, h, t_end, n_snap=8,
                  limiter="minmod", cfl=0.8, tol=None):
    """Support radius against 1/2 + t + 2 sqrt(2) h at ``n_snap`` snapshots up to t_end."""
    width = SUPPORT_RADIUS + t_end + 1.0
    if solver_id == "psystem1d":
        s = solver1d.initial_state(spec, p, h, width)
        sol = solver1d.PSystemSolver(p, cfl=cfl, limiter=limiter, window=False)
        adv = lambda s, t: sol.advance(s, np.iinfo(np.int64).max, t_stop=t)
    elif solver_id == "radial":
        s = solver_radial.initial_state(spec, p, h, width)
        sol = solver_radial.RadialSolver(p, cfl=cfl, limiter=limiter, window=False)
        adv = lambda s, t: sol.advance(s, np.iinfo(np.int64).max, t_stop=t)
    else:
        s = solver2d.initial_state(spec, p, h, width)
        adv = lambda s, t: solver2d.advance_to(s, p, t, cfl=cfl, limiter=limiter)
    snaps = []
    for t in np.linspace(0.0, t_end, n_snap + 1):
        if t > s.t:
            s = adv(s, t)
        r, b, tail = support_snapshot(s, p, tol)
        snaps.append({"t": s.t, "radius": r, "bound": b, "tail": tail})
    tol = 1e-9 * p.epsilon if tol is None else tol
    worst = max(x["tail"] for x in snaps)
    return {"solver_id": solver_id, "h": h, "tol": tol, "snapshots": snaps,
            "max_excess": max(x["radius"] - x["bound"] for x in snaps),
            "max_tail": worst, "passed": worst <= tol}


def vorticity_orders(p: EquationParams, t_end, hs=(0.02, 0.01, 0.005), spec=None,
                     limiter="none", cfl=0.8):
    """max |curl u| at t_end on successive grids, and the observed orders."""
    spec = spec or InitialDataSpec("poly8")
    w = []
    for h in hs:
        s = solver2d.initial_state(spec, p, h, SUPPORT_RADIUS + t_end + 0.25)
        s = solver2d.advance_to(s, p, t_end, cfl=cfl, limiter=limiter)
        w.append(float(np.abs(solver2d.vorticity(s.mom / s.rho, h)).max()))
    orders = [math.log(a / b, hs[i] / hs[i + 1]) for i, (a, b) in enumerate(zip(w, w[1:]))]
    return {"h": list(hs), "vort_max": w, "orders": orders}


def energy_ratio(p: EquationParams, spec: InitialDataSpec, h, T_b, h2d=0.01, n_times=5,
                 limiter="minmod", cfl=0.8):
    """E_2[u]/E_2[theta] along a radial run embedded into 2-D, from t_ref to T_b/2.

    t_ref = 1 when T_b >= 4, else T_b/4, so that [t_ref, T_b/2] is never empty.
    """
    t_ref = min(1.0, T_b / 4.0)
    times = np.linspace(t_ref, T_b / 2.0, n_times)
    s = solver_radial.initial_state(spec, p, h, SUPPORT_RADIUS + times[-1] + 1.0)
    sol = solver_radial.RadialSolver(p, cfl=cfl, limiter=limiter, window=False)
    ratios = []
    for t in times:
        s = sol.advance(s, np.iinfo(np.int64).max, t_stop=t)
        st = embed_radial(solver_radial.to_sound(s, p), h2d, SUPPORT_RADIUS + t + 0.1)
        e = energy_E(st, 2, p)
        ratios.append(e["u"] / e["theta"])
    r0 = ratios[0]
    return {"t_ref": t_ref, "times": times.tolist(), "ratios": ratios,
            "max_rel": max(ratios) / r0, "passed": max(ratios) <= 3.0 * r0}
