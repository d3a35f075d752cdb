"""Damped p-system (1-D Euler in Lagrangian mass coordinates).

    v_t - u_x = 0,   u_t + p(v)_x = -mu/(1+t)^lam u,   p(v) = v^-gamma / gamma.

Second-order MUSCL + two-wave HLL flux with SSP-RK2, Strang-split with the exact
damping factor on u. Even data (v even, u odd) is solved on x >= 0 behind a
reflecting wall; once the pulse has left the wall the grid becomes a window that
slides with the unit-speed front.
"""
from __future__ import annotations

import sys
from dataclasses import dataclass

import numpy as np

from . import _kernels
from ._driver import run_to_blowup
from .errors import CFLCollapse, VacuumError
from .model import EquationParams, InitialDataSpec, Mesh, SUPPORT_RADIUS

SOLVER_ID = "psystem1d"


@dataclass
class PSystemState:
    t: float
    mesh: Mesh
    v: np.ndarray
    u: np.ndarray
    left_bc: str = "background"  # "wall" | "outflow" | "background"

    def copy(self):
        return PSystemState(self.t, self.mesh, self.v.copy(), self.u.copy(), self.left_bc)


def pressure(v, gamma):
    return v ** (-gamma) / gamma


def sound_speed(v, gamma):
    """Lagrangian sound speed sqrt(-p'(v))."""
    return v ** (-0.5 * (gamma + 1.0))


def initial_state(spec: InitialDataSpec, p: EquationParams, h: float, half_width: float = 4.0,
                  symmetric: bool = True) -> PSystemState:
    """v(0,x) = 1/(1 + eps rho0(x)), u(0,x) = eps phi'(x), given in the mass coordinate."""
    if symmetric:
        n = int(round(half_width / h))
        mesh = Mesh("line", n, h, 0.0)
        left = "wall"
    else:
        n = 2 * int(round(half_width / h))
        mesh = Mesh("line", n, h, -n * h / 2)
        left = "background"
    x = mesh.centers()
    r = np.abs(x)
    rho0 = spec.rho0(r)
    a = p.epsilon * rho0
    if np.any(1.0 + a <= 0):
        from .errors import AmplitudeError
        raise AmplitudeError("1 + eps*rho0 must stay positive")
    v = 1.0 / (1.0 + a)
    u = p.epsilon * spec.potential(r)[1] * np.sign(x)
    outside = r >= SUPPORT_RADIUS
    v[outside] = 1.0
    u[outside] = 0.0
    return PSystemState(0.0, mesh, v, u, left)


_BC = {"background": 0, "wall": 1, "outflow": 2}


def _pad(q, left_bc, parity, bg):
    out = np.empty(q.size + 4)
    out[2:-2] = q
    if left_bc == "wall":
        out[1] = parity * q[0]
        out[0] = parity * q[1]
    elif left_bc == "outflow":
        out[0] = out[1] = q[0]
    else:
        out[0] = out[1] = bg
    out[-2] = out[-1] = bg
    return out


class PSystemSolver:
    """Stateful stepper; call :meth:`step` repeatedly.

    ``flux=False`` switches off the hyperbolic part (damping substeps only), a
    hook used to test the damping integrator in isolation.
    """

    def __init__(self, p: EquationParams, cfl: float = 0.8, limiter: str = "minmod",
                 dt_floor: float = 1e-10, flux: bool = True, window: bool = True,
                 front_margin: float = 1.0):
        if not 0.0 < cfl < 1.0:
            raise ValueError("cfl must lie in (0, 1)")
        self.p = p
        self.cfl = cfl
        self.code = _kernels.LIMITER_CODES[limiter]
        self.dt_floor = dt_floor
        self.flux = flux
        self.window = window
        self.front_margin = front_margin

    def max_speed(self, s: PSystemState):
        return float(np.max(sound_speed(s.v, self.p.gamma)))

    def advance(self, s: PSystemState, nsteps: int = 1, t_stop: float = np.inf) -> PSystemState:
        """Take up to ``nsteps`` steps (stopping once t >= t_stop)."""
        if not (self.window and s.left_bc != "background"):
            return self._advance(s, nsteps, t_stop)[0]
        # stop whenever the front gets within half a margin of the right end,
        # slide, and carry on
        left = nsteps
        while left > 0 and s.t < t_stop:
            guard = s.mesh.hi - SUPPORT_RADIUS - 0.5 * self.front_margin
            out, k = self._advance(s, left, min(t_stop, guard) if guard > s.t else t_stop)
            left -= max(k, 1)
            s = self._slide(out)
        return s

    def _advance(self, s, nsteps, t_stop):
        p = self.p
        v = s.v.copy()
        u = s.u.copy()
        t, k, status, dt = _kernels.psystem_advance(
            v, u, s.t, s.mesh.h, _BC[s.left_bc], p.gamma, p.mu, p.lam, self.cfl, self.code,
            nsteps, t_stop, self.dt_floor, self.flux)
        if status == 1:
            raise VacuumError(f"v <= 0 near t={t:.6g}")
        if status == 2:
            raise CFLCollapse(f"dt={dt:.3e} below floor at t={t:.6g}", t=t, dt=dt)
        return PSystemState(t, s.mesh, v, u, s.left_bc), k

    def step(self, s: PSystemState) -> PSystemState:
        return self.advance(s, 1)

    def _slide(self, s: PSystemState) -> PSystemState:
        front = SUPPORT_RADIUS + s.t + self.front_margin
        h = s.mesh.h
        k = int(np.ceil((front - s.mesh.hi) / h))
        if k <= 0:
            return s
        k = max(k, 8)
        mesh = Mesh("line", s.mesh.n, h, s.mesh.lo + k * h)
        v = np.concatenate([s.v[k:], np.ones(k)])
        u = np.concatenate([s.u[k:], np.zeros(k)])
        return PSystemState(s.t, mesh, v, u, "outflow")


def monitors(s: PSystemState, p: EquationParams) -> dict:
    """C^1 monitor, sup of the perturbation, vacuum margin and support radius.

    Time derivatives come from the equations: v_t = u_x, u_t = -p(v)_x - a u.
    """
    h = s.mesh.h
    vp = _pad(s.v, s.left_bc, 1.0, 1.0)[1:-1]
    up = _pad(s.u, s.left_bc, -1.0, 0.0)[1:-1]
    vx = np.abs(vp[2:] - vp[:-2]) / (2.0 * h)
    ux = np.abs(up[2:] - up[:-2]) / (2.0 * h)
    px = pressure(vp[2:], p.gamma) - pressure(vp[:-2], p.gamma)
    a = p.damping(s.t)
    # v_t = u_x and u_t = -p(v)_x - a u
    ut = np.abs(px / (2.0 * h) + a * s.u)
    c1 = np.max(np.abs(s.v - 1.0)) + np.max(np.abs(s.u)) + vx.max() + 2.0 * ux.max() + ut.max()
    amp = float(np.max(np.abs(s.v - 1.0)) + np.max(np.abs(s.u)))
    theta = np.expm1((1.0 - p.gamma) * np.log(s.v)) / (p.gamma - 1.0)
    return {
        "t": s.t,
        "c1_norm": float(c1),
        "amplitude": amp,
        "vacuum_margin": float(theta.min() + 1.0 / (p.gamma - 1.0)),
        "vort_max": 0.0,
        "support_radius": support_radius(s, p),
    }


def support_radius(s: PSystemState, p: EquationParams, tol: float | None = None) -> float:
    tol = 1e-9 * max(p.epsilon, 1e-300) if tol is None else tol
    pert = np.abs(s.v - 1.0) + np.abs(s.u)
    idx = np.nonzero(pert > tol)[0]
    if idx.size == 0:
        return 0.0
    x = s.mesh.centers()
    return float(np.max(np.abs(x[idx]) + 0.5 * s.mesh.h))


def run_to_blowup_1d(spec: InitialDataSpec, p: EquationParams, detector, h: float = 0.01,
                     cfl: float = 0.8, horizon: float = 1e4, limiter: str = "minmod",
                     half_width: float = 4.0, report_stride: float | None = None,
                     on_report=None):
    """Integrate until ``detector`` fires; returns the detector's trigger dict
    augmented with the resolution and wall time.

    ``detector`` follows :class:`dampedeuler.harness.detect.BlowupDetector`.
    ``on_report`` (optional) receives the monitor dict at every
    ``report_stride`` time units.
    """
    def make(q):
        return PSystemSolver(q, cfl=cfl, limiter=limiter, dt_floor=detector.dt_floor)

    return run_to_blowup(sys.modules[__name__], make, spec, p, detector, h, half_width, horizon,
                         report_stride, on_report)
