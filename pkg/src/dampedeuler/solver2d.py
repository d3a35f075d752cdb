"""Full 2-D Cartesian damped Euler,

    rho_t + div(rho u) = 0,   (rho u)_t + div(rho u (x) u) + grad p = -mu/(1+t)^lam rho u,

unsplit MUSCL with a per-face HLL flux and SSP-RK2, exact damping factor on
both momentum components (Strang split). The square [-L, L]^2 is surrounded by
background ghost cells; L must exceed 1/2 + t_end so the data never reach them.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels, _kernels2d
from .errors import CFLCollapse, VacuumError
from .model import EquationParams, InitialDataSpec, Mesh, SoundState, make_initial_data, rho_of_theta, theta_of_rho

SOLVER_ID = "cart2d"


@dataclass
class Cartesian2DState:
    t: float
    mesh: Mesh
    rho: np.ndarray
    mom: np.ndarray  # (2, n, n): rho u1, rho u2

    def copy(self):
        return Cartesian2DState(self.t, self.mesh, self.rho.copy(), self.mom.copy())


def make_mesh(half_width: float, h: float) -> Mesh:
    n = 2 * int(round(half_width / h))
    return Mesh("cart2d", n, h, -n * h / 2)


def initial_state(spec: InitialDataSpec, p: EquationParams, h: float, half_width: float = 1.5):
    mesh = make_mesh(half_width, h)
    s = make_initial_data(spec, p, mesh)
    rho = rho_of_theta(s.theta, p.gamma)
    return Cartesian2DState(0.0, mesh, rho, rho * s.u)


def to_sound(s: Cartesian2DState, p: EquationParams) -> SoundState:
    return SoundState(s.t, s.mesh, theta_of_rho(s.rho, p.gamma), s.mom / s.rho)


def step_2d(s: Cartesian2DState, p: EquationParams, cfl: float = 0.8, limiter: str = "minmod",
            nsteps: int = 1, t_stop: float = np.inf, dt_floor: float = 1e-10) -> Cartesian2DState:
    """``nsteps`` steps (stopping early at ``t_stop``). dt = cfl h / (2 max(|u|_inf + c))."""
    if not 0.0 < cfl < 1.0:
        raise ValueError("cfl must lie in (0, 1)")
    rho = s.rho.copy()
    mx = s.mom[0].copy()
    my = s.mom[1].copy()
    t, _, status, dt = _kernels2d.euler2d_advance(
        rho, mx, my, s.t, s.mesh.h, p.gamma, p.mu, p.lam, cfl, _kernels.LIMITER_CODES[limiter],
        nsteps, t_stop, dt_floor)
    if status == 1:
        raise VacuumError(f"rho <= 0 near t={t:.6g}")
    if status == 2:
        raise CFLCollapse(f"dt={dt:.3e} below floor at t={t:.6g}", t=t, dt=dt)
    return Cartesian2DState(t, s.mesh, rho, np.stack([mx, my]))


def advance_to(s, p, t_end, **kw):
    return step_2d(s, p, nsteps=np.iinfo(np.int64).max, t_stop=t_end, **kw)


def vorticity(u: np.ndarray, h: float) -> np.ndarray:
    """curl u = d1 u2 - d2 u1 by second-order centred differences (zero outside)."""
    u1 = np.pad(u[0], 1)
    u2 = np.pad(u[1], 1)
    return (u2[1:-1, 2:] - u2[1:-1, :-2]) / (2 * h) - (u1[2:, 1:-1] - u1[:-2, 1:-1]) / (2 * h)


def support_radius(s: Cartesian2DState, p: EquationParams, tol: float | None = None) -> float:
    """Largest distance from the origin of a cell corner of any cell where the
    perturbation exceeds ``tol``."""
    tol = 1e-9 * max(p.epsilon, 1e-300) if tol is None else tol
    pert = np.abs(s.rho - 1.0) + np.abs(s.mom[0]) + np.abs(s.mom[1])
    iy, ix = np.nonzero(pert > tol)
    if iy.size == 0:
        return 0.0
    c = s.mesh.centers()
    h = s.mesh.h
    return float(np.max(np.hypot(np.abs(c[ix]) + h / 2, np.abs(c[iy]) + h / 2)))
