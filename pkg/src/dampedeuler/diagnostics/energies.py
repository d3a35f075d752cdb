"""Weighted vector-field energies on cart2d snapshots.

    E_k[Phi]   = (1+t)^(mu/2) sum_{|a|<=k} ||d Z^a Phi|| + (1+t)^(mu/2-1) sum_{|a|<=k} ||Z^a Phi||
    eta[Phi]   = (1+t)^((1+mu)/2) |Z^{<=2} d Phi|_inf
    chi_k      = (1+t)^(mu/2) sum_{|a|<=k-1} ||sigma d^2 Z^a Phi||
    tilde chi_k = (1+t)^(mu/2) sum_{|a|<=k-3} ||sigma^2 d^4 Z^a Phi||
    G_k^2      = sum_{|a|<=k} int_0^t (1+s)^(mu-3) ||Z^a theta||^2 ds

with d = (-d_t, d_1, d_2), sigma = 1 + t - |x| and u treated component-wise.
L^2 norms use the midpoint rule on the grid.
"""
from __future__ import annotations

import csv
import itertools
from dataclasses import asdict, dataclass, fields

import numpy as np
from scipy.interpolate import CubicSpline

from ..errors import OrderCapExceeded, UnsortedSeries
from ..model import EquationParams, Mesh, SoundState
from .fd import dx1, dx2
from .vector_fields import DEFAULT_CAP, MAX_CAP, apply_to_jet, multi_indices, sound_jets

COMPONENTS = {"theta": ("theta",), "u": ("u1", "u2")}


def _norm(q, h):
    return float(np.sqrt(np.sum(q * q) * h * h))


def _check_cap(k, cap):
    if cap > MAX_CAP:
        raise OrderCapExceeded(f"cap {cap} above the supported {MAX_CAP}")
    if k > cap:
        raise OrderCapExceeded(f"order {k} exceeds the cap {cap}")


def _grad_t(jet, h):
    """(-d_t f, d_1 f, d_2 f) from a jet of length >= 2."""
    return [-jet[1], dx1(jet[0], h), dx2(jet[0], h)]


def energy_E(state: SoundState, k: int, p: EquationParams, cap: int = DEFAULT_CAP, jets=None):
    """E_k for theta, for u, and their sum (dict keys ``theta``, ``u``, ``total``)."""
    _check_cap(k, cap)
    jets = jets or sound_jets(state, p, k + 1)
    h, t, mesh = state.mesh.h, state.t, state.mesh
    w = 1.0 + t
    out = {}
    for name, comps in COMPONENTS.items():
        d_sum = z_sum = 0.0
        for a in multi_indices(k):
            dsq = np.zeros(mesh.shape)
            zsq = np.zeros(mesh.shape)
            for c in comps:
                z = apply_to_jet(a, jets[c], mesh, t)
                zsq += z[0] ** 2
                for q in _grad_t(z, h):
                    dsq += q**2
            d_sum += _norm(np.sqrt(dsq), h)
            z_sum += _norm(np.sqrt(zsq), h)
        out[name] = w ** (p.mu / 2) * d_sum + w ** (p.mu / 2 - 1) * z_sum
    out["total"] = out["theta"] + out["u"]
    return out


def z_theta_sq(state: SoundState, k: int, p: EquationParams, jets=None):
    """sum_{|a|<=k} ||Z^a theta||^2 (the integrand of G_k^2 without its weight)."""
    jets = jets or sound_jets(state, p, k)
    return sum(_norm(apply_to_jet(a, jets["theta"], state.mesh, state.t)[0], state.mesh.h) ** 2
               for a in multi_indices(k))


def _second(jet, h):
    """All second derivatives in (t, x1, x2) of a jet of length >= 3 (signs irrelevant)."""
    f, ft, ftt = jet[0], jet[1], jet[2]
    g1, g2 = dx1(f, h), dx2(f, h)
    return [ftt, dx1(ft, h), dx2(ft, h), dx1(g1, h), dx2(g1, h), dx2(g2, h)]


def _fourth(jet, h):
    """All fourth derivatives in (t, x1, x2) from a jet of length >= 5."""
    out = []
    for nt in range(5):
        base = jet[nt]
        for n1 in range(5 - nt):
            n2 = 4 - nt - n1
            q = base
            for _ in range(n1):
                q = dx1(q, h)
            for _ in range(n2):
                q = dx2(q, h)
            out.append(q)
    return out


def energy_aux(state: SoundState, k: int, p: EquationParams, cap: int = DEFAULT_CAP, jets=None):
    """(eta, chi_k, tilde_chi_k), each a dict with ``theta``, ``u``, ``total``.

    eta always uses |alpha| <= 2 and so needs three time derivatives;
    tilde_chi_k is an empty sum for k < 3.
    """
    _check_cap(k, cap)
    need = max(3, k + 1, 4 + max(k - 3, 0) if k >= 3 else 0)
    jets = jets or sound_jets(state, p, need)
    mesh, h, t = state.mesh, state.mesh.h, state.t
    X, Y = mesh.coords()
    sigma = 1.0 + t - np.hypot(X, Y)
    w = 1.0 + t
    eta, chi, tchi = {}, {}, {}
    for name, comps in COMPONENTS.items():
        ptw = np.zeros(mesh.shape)
        for c in comps:
            jet = jets[c]
            # Z^a d Phi for each of the three first derivatives
            djets = [[-q for q in jet[1:]], [dx1(q, h) for q in jet], [dx2(q, h) for q in jet]]
            for dj in djets:
                for a in multi_indices(2):
                    ptw += np.abs(apply_to_jet(a, dj, mesh, t)[0])
        eta[name] = w ** ((1 + p.mu) / 2) * float(ptw.max())
        csum = 0.0
        for a in multi_indices(k - 1) if k >= 1 else []:
            sq = np.zeros(mesh.shape)
            for c in comps:
                z = apply_to_jet(a, jets[c], mesh, t)
                for q in _second(z, h):
                    sq += q**2
            csum += _norm(sigma * np.sqrt(sq), h)
        chi[name] = w ** (p.mu / 2) * csum
        tsum = 0.0
        for a in multi_indices(k - 3) if k >= 3 else []:
            sq = np.zeros(mesh.shape)
            for c in comps:
                z = apply_to_jet(a, jets[c], mesh, t)
                for q in _fourth(z, h):
                    sq += q**2
            tsum += _norm(sigma**2 * np.sqrt(sq), h)
        tchi[name] = w ** (p.mu / 2) * tsum
    for d in (eta, chi, tchi):
        d["total"] = d["theta"] + d["u"]
    return eta, chi, tchi


def dissipation_series(t, z_sq, mu):
    """Cumulative trapezoid of (1+s)^(mu-3) z_sq(s); raises UnsortedSeries."""
    t = np.asarray(t, dtype=float)
    z = np.asarray(z_sq, dtype=float)
    if t.size and np.any(np.diff(t) < 0):
        raise UnsortedSeries("report times must be nondecreasing")
    if t.size < 2:
        return np.zeros(t.size)
    f = (1.0 + t) ** (mu - 3.0) * z
    return np.concatenate([[0.0], np.cumsum(0.5 * (f[1:] + f[:-1]) * np.diff(t))])


def dissipation_G(reports, k, mu):
    """G_k^2 at the last report. ``reports`` carry ``t`` and ``z_theta_sq`` (the
    sum over |alpha| <= k), as attributes or dict keys."""
    get = (lambda r, key: r[key]) if reports and isinstance(reports[0], dict) else getattr
    ts = [get(r, "t") for r in reports]
    zs = [get(r, "z_theta_sq") for r in reports]
    s = dissipation_series(ts, zs, mu)
    return float(s[-1]) if s.size else 0.0


# monitors ------------------------------------------------------------------

def monitors(state: SoundState, p: EquationParams, tol: float | None = None):
    """c1_norm, vacuum_margin, vort_max and support_radius of a cart2d state.

    c1_norm = |u|_C1 + |theta|_C1 + |u_t|_inf + |theta_t|_inf with the time
    derivatives substituted from the equations; vorticity by second-order
    centred differences of u.
    """
    from ..solver2d import vorticity

    h = state.mesh.h
    jets = sound_jets(state, p, 1)
    c1 = 0.0
    for c in ("theta", "u1", "u2"):
        f = jets[c]
        c1 += np.abs(f[0]).max() + np.abs(dx1(f[0], h)).max() + np.abs(dx2(f[0], h)).max()
        c1 += np.abs(f[1]).max()
    tol = 1e-9 * max(p.epsilon, 1e-300) if tol is None else tol
    pert = np.abs(state.theta) + np.abs(state.u[0]) + np.abs(state.u[1])
    iy, ix = np.nonzero(pert > tol)
    cc = state.mesh.centers()
    supp = float(np.max(np.hypot(np.abs(cc[ix]) + h / 2, np.abs(cc[iy]) + h / 2))) if iy.size else 0.0
    return {"c1_norm": float(c1),
            "vacuum_margin": float(state.theta.min() + 1.0 / (p.gamma - 1.0)),
            "vort_max": float(np.abs(vorticity(state.u, h)).max()),
            "support_radius": supp}


# reports -------------------------------------------------------------------

@dataclass
class EnergyReport:
    t: float
    k: int
    E_k: float
    E_k_theta: float
    E_k_u: float
    eta: float
    chi_k: float
    tilde_chi_k: float
    G_k_sq: float
    z_theta_sq: float
    vort_max: float
    support_radius: float
    c1_norm: float
    vacuum_margin: float


CSV_COLUMNS = [f.name for f in fields(EnergyReport)]


def energy_report(state: SoundState, p: EquationParams, k: int = 2, cap: int = DEFAULT_CAP,
                  G_k_sq: float = 0.0) -> EnergyReport:
    _check_cap(k, cap)
    jets = sound_jets(state, p, max(3, k + 1, 4 if k >= 3 else 0))
    E = energy_E(state, k, p, cap, jets)
    eta, chi, tchi = energy_aux(state, k, p, cap, jets)
    m = monitors(state, p)
    return EnergyReport(state.t, k, E["total"], E["theta"], E["u"], eta["total"], chi["total"],
                        tchi["total"], G_k_sq, z_theta_sq(state, k, p, jets), m["vort_max"],
                        m["support_radius"], m["c1_norm"], m["vacuum_margin"])


def energy_history(states, p: EquationParams, k: int = 2, cap: int = DEFAULT_CAP):
    """Reports for a time-ordered list of states with G_k^2 accumulated."""
    reps = [energy_report(s, p, k, cap) for s in states]
    g = dissipation_series([r.t for r in reps], [r.z_theta_sq for r in reps], p.mu)
    for r, v in zip(reps, g):
        r.G_k_sq = float(v)
    return reps


def write_energy_csv(path, reports):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(CSV_COLUMNS)
        for r in reports:
            d = asdict(r)
            w.writerow([repr(d[c]) if isinstance(d[c], float) else d[c] for c in CSV_COLUMNS])


# radial runs ---------------------------------------------------------------

def embed_radial(state: SoundState, h: float, half_width: float | None = None) -> SoundState:
    """Cart2d SoundState from a radial one (theta(r), U(r) e_r) by cubic splines
    in r; the grid covers the radial mesh's extent unless ``half_width`` is given."""
    if state.mesh.kind != "radial":
        raise ValueError("embed_radial expects a radial state")
    r = state.mesh.centers()
    L = state.mesh.hi if half_width is None else half_width
    n = 2 * int(round(L / h))
    mesh = Mesh("cart2d", n, h, -n * h / 2)
    X, Y = mesh.coords()
    R = np.hypot(X, Y)
    if state.mesh.lo > 0:
        raise ValueError("the radial state must still include the axis")
    # even extension for theta, odd for U, so the splines are smooth at r = 0
    rr = np.concatenate([-r[::-1], r])
    th = CubicSpline(rr, np.concatenate([state.theta[::-1], state.theta]))(np.minimum(R, r[-1]))
    U = CubicSpline(rr, np.concatenate([-state.u[::-1], state.u]))(np.minimum(R, r[-1]))
    outside = R >= r[-1]
    th[outside] = 0.0
    U[outside] = 0.0
    with np.errstate(invalid="ignore", divide="ignore"):
        ex = np.where(R > 0, X / R, 0.0)
        ey = np.where(R > 0, Y / R, 0.0)
    return SoundState(state.t, mesh, th, np.stack([U * ex, U * ey]))
