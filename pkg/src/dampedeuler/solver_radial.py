"""Rotationally symmetric 2-D damped Euler as a 1+1-D system in r.

    rho_t + (rho u)_r + rho u / r = 0
    m_t + (m u + p)_r + m u / r = -mu/(1+t)^lam m,     m = rho u,  p = rho^gamma/gamma

The geometric terms are folded into an area-weighted update (see
``_kernels.radial_residual``), which keeps the constant state exact and conserves
sum(rho r) to round-off. The axis is a reflecting wall (rho even, u odd). Once
the pulse has detached from the axis the grid can slide outward with the front.
"""
from __future__ import annotations

import sys
from dataclasses import dataclass

import numpy as np

from . import _kernels
from ._driver import run_to_blowup
from .errors import CFLCollapse, VacuumError
from .model import EquationParams, InitialDataSpec, Mesh, SUPPORT_RADIUS, SoundState, make_initial_data

SOLVER_ID = "radial"


@dataclass
class RadialState:
    t: float
    mesh: Mesh
    rho: np.ndarray
    mru: np.ndarray
    left_bc: str = "wall"

    def copy(self):
        return RadialState(self.t, self.mesh, self.rho.copy(), self.mru.copy(), self.left_bc)

    @property
    def u(self):
        return self.mru / self.rho


_BC = {"background": 0, "wall": 1, "outflow": 2}


def initial_state(spec: InitialDataSpec, p: EquationParams, h: float, r_max: float = 6.0) -> RadialState:
    mesh = Mesh("radial", int(round(r_max / h)), h, 0.0)
    s = make_initial_data(spec, p, mesh)
    rho = np.exp(np.log1p((p.gamma - 1.0) * s.theta) / (p.gamma - 1.0))
    return RadialState(0.0, mesh, rho, rho * s.u, "wall")


def to_sound(s: RadialState, p: EquationParams) -> SoundState:
    theta = np.expm1((p.gamma - 1.0) * np.log(s.rho)) / (p.gamma - 1.0)
    return SoundState(s.t, s.mesh, theta, s.mru / s.rho)


class RadialSolver:
    """``window=True`` lets the grid slide with the front once the data has left
    the axis region (the inner boundary then becomes zero-gradient outflow).
    ``dt_fixed`` forces a constant step for convergence studies.
    """

    def __init__(self, p: EquationParams, cfl: float = 0.8, limiter: str = "minmod",
                 dt_floor: float = 1e-10, window: bool = True, front_margin: float = 1.0,
                 dt_fixed: float = 0.0):
        if not 0.0 < cfl < 1.0:
            raise ValueError("cfl must lie in (0, 1)")
        self.p = p
        self.cfl = cfl
        self.code = _kernels.LIMITER_CODES[limiter]
        self.dt_floor = dt_floor
        self.window = window
        self.front_margin = front_margin
        self.dt_fixed = dt_fixed

    def max_speed(self, s: RadialState):
        c = s.rho ** (0.5 * (self.p.gamma - 1.0))
        return float(np.max(np.abs(s.mru / s.rho) + c))

    def advance(self, s: RadialState, nsteps: int = 1, t_stop: float = np.inf) -> RadialState:
        if not self.window:
            return self._advance(s, nsteps, t_stop)[0]
        left = nsteps
        while left > 0 and s.t < t_stop:
            guard = s.mesh.hi - SUPPORT_RADIUS - 0.5 * self.front_margin
            out, k = self._advance(s, left, min(t_stop, guard) if guard > s.t else t_stop)
            left -= max(k, 1)
            s = self._slide(out)
        return s

    def _advance(self, s, nsteps, t_stop):
        p = self.p
        rho = s.rho.copy()
        m = s.mru.copy()
        t, k, status, dt = _kernels.radial_advance(
            rho, m, s.t, s.mesh.lo, s.mesh.h, _BC[s.left_bc], p.gamma, p.mu, p.lam, self.cfl,
            self.code, nsteps, t_stop, self.dt_floor, self.dt_fixed)
        if status == 1:
            raise VacuumError(f"rho <= 0 near t={t:.6g}")
        if status == 2:
            raise CFLCollapse(f"dt={dt:.3e} below floor at t={t:.6g}", t=t, dt=dt)
        return RadialState(t, s.mesh, rho, m, s.left_bc), k

    def step(self, s: RadialState) -> RadialState:
        return self.advance(s, 1)

    def _slide(self, s: RadialState) -> RadialState:
        h = s.mesh.h
        front = SUPPORT_RADIUS + s.t + self.front_margin
        k = int(np.ceil((front - s.mesh.hi) / h))
        if k <= 0:
            return s
        k = max(k, 8)
        # the trailing edge of an outgoing 2-D pulse decays but never vanishes;
        # only detach from the axis once the tail is well behind the front
        if s.left_bc == "wall" and s.t < 2.0 * s.mesh.n * h / 3.0:
            return s
        mesh = Mesh("radial", s.mesh.n, h, s.mesh.lo + k * h)
        rho = np.concatenate([s.rho[k:], np.ones(k)])
        m = np.concatenate([s.mru[k:], np.zeros(k)])
        return RadialState(s.t, mesh, rho, m, "outflow")


def monitors(s: RadialState, p: EquationParams) -> dict:
    """Same keys as :func:`dampedeuler.solver1d.monitors`; derivatives in r with
    time derivatives taken from the equations."""
    h = s.mesh.h
    r = s.mesh.centers()
    left = s.left_bc
    g = p.gamma
    theta = np.expm1((g - 1.0) * np.log(s.rho)) / (g - 1.0)
    u = s.mru / s.rho

    def pad(q, parity, bg):
        out = np.empty(q.size + 2)
        out[1:-1] = q
        out[0] = parity * q[0] if left == "wall" else (q[0] if left == "outflow" else bg)
        out[-1] = bg
        return out

    # centred differences (second order); ghosts from the boundary condition
    th_r = (pad(theta, 1.0, 0.0)[2:] - pad(theta, 1.0, 0.0)[:-2]) / (2.0 * h)
    u_r = (pad(u, -1.0, 0.0)[2:] - pad(u, -1.0, 0.0)[:-2]) / (2.0 * h)
    a = p.damping(s.t)
    th_t = -u * th_r - (1.0 + (g - 1.0) * theta) * (u_r + u / r)
    u_t = -a * u - u * u_r - th_r
    c1 = (np.max(np.abs(u)) + np.max(np.abs(u_r)) + np.max(np.abs(theta)) + np.max(np.abs(th_r))
          + np.max(np.abs(u_t)) + np.max(np.abs(th_t)))
    amp = float(np.max(np.abs(theta)) + np.max(np.abs(u)))
    return {
        "t": s.t,
        "c1_norm": float(c1),
        "amplitude": amp,
        "vacuum_margin": float(theta.min() + 1.0 / (g - 1.0)),
        "vort_max": 0.0,
        "support_radius": support_radius(s, p),
    }


def support_radius(s: RadialState, p: EquationParams, tol: float | None = None) -> float:
    tol = 1e-9 * max(p.epsilon, 1e-300) if tol is None else tol
    pert = np.abs(s.rho - 1.0) + np.abs(s.mru)
    idx = np.nonzero(pert > tol)[0]
    if idx.size == 0:
        return 0.0
    return float(s.mesh.lo + (idx[-1] + 1) * s.mesh.h)


def run_to_blowup_radial(spec: InitialDataSpec, p: EquationParams, detector, h: float = 0.01,
                         cfl: float = 0.8, horizon: float = 1e4, limiter: str = "minmod",
                         r_max: float = 6.0, report_stride: float | None = None, on_report=None):
    """Radial counterpart of :func:`dampedeuler.solver1d.run_to_blowup_1d`."""
    def make(q):
        return RadialSolver(q, cfl=cfl, limiter=limiter, dt_floor=detector.dt_floor)

    return run_to_blowup(sys.modules[__name__], make, spec, p, detector, h, r_max, horizon,
                         report_stride, on_report)
