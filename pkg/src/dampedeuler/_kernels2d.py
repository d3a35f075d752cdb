"""Numba kernels for the 2-D Cartesian Euler update (arrays indexed [iy, ix],
two ghost layers on every side)."""
import numpy as np
from numba import njit

from ._kernels import _damp, _limited_slope


@njit(cache=True, inline="always")
def _hll(a, b, ua, ub, va, vb, gamma):
    """HLL flux normal to a face; u is the normal and v the tangential velocity.
    Returns (F_rho, F_normal, F_tangential, max signal speed)."""
    ca = a ** (0.5 * (gamma - 1.0))
    cb = b ** (0.5 * (gamma - 1.0))
    sl = min(ua - ca, ub - cb)
    sr = max(ua + ca, ub + cb)
    ma, mb = a * ua, b * ub
    fa0, fb0 = ma, mb
    fa1 = ma * ua + a ** gamma / gamma
    fb1 = mb * ub + b ** gamma / gamma
    fa2, fb2 = ma * va, mb * vb
    s = max(abs(sl), abs(sr))
    if sl >= 0.0:
        return fa0, fa1, fa2, s
    if sr <= 0.0:
        return fb0, fb1, fb2, s
    d = sr - sl
    f0 = (sr * fa0 - sl * fb0 + sl * sr * (b - a)) / d
    f1 = (sr * fa1 - sl * fb1 + sl * sr * (mb - ma)) / d
    f2 = (sr * fa2 - sl * fb2 + sl * sr * (b * vb - a * va)) / d
    return f0, f1, f2, s


@njit(cache=True)
def residual2d(rho, u, v, h, gamma, code, r0, r1, r2):
    """Flux-difference residual of (rho, rho u, rho v); primitive reconstruction."""
    N = rho.shape[0] - 4
    smax = 0.0
    # x-faces: face (j, f) between cells (j, f+1) and (j, f+2) of the padded array
    fx0 = np.empty((N, N + 1))
    fx1 = np.empty((N, N + 1))
    fx2 = np.empty((N, N + 1))
    for j in range(N):
        jj = j + 2
        for f in range(N + 1):
            i = f + 1
            sr_ = _limited_slope(rho[jj, i] - rho[jj, i - 1], rho[jj, i + 1] - rho[jj, i], code)
            su_ = _limited_slope(u[jj, i] - u[jj, i - 1], u[jj, i + 1] - u[jj, i], code)
            sv_ = _limited_slope(v[jj, i] - v[jj, i - 1], v[jj, i + 1] - v[jj, i], code)
            sr2 = _limited_slope(rho[jj, i + 1] - rho[jj, i], rho[jj, i + 2] - rho[jj, i + 1], code)
            su2 = _limited_slope(u[jj, i + 1] - u[jj, i], u[jj, i + 2] - u[jj, i + 1], code)
            sv2 = _limited_slope(v[jj, i + 1] - v[jj, i], v[jj, i + 2] - v[jj, i + 1], code)
            a = rho[jj, i] + 0.5 * sr_
            b = rho[jj, i + 1] - 0.5 * sr2
            if a <= 0.0 or b <= 0.0:
                fx0[j, f] = np.nan
                fx1[j, f] = np.nan
                fx2[j, f] = np.nan
                continue
            f0, f1, f2, s = _hll(a, b, u[jj, i] + 0.5 * su_, u[jj, i + 1] - 0.5 * su2,
                                 v[jj, i] + 0.5 * sv_, v[jj, i + 1] - 0.5 * sv2, gamma)
            fx0[j, f] = f0
            fx1[j, f] = f1
            fx2[j, f] = f2
            if s > smax:
                smax = s
    fy0 = np.empty((N + 1, N))
    fy1 = np.empty((N + 1, N))
    fy2 = np.empty((N + 1, N))
    for f in range(N + 1):
        i = f + 1
        for k in range(N):
            kk = k + 2
            sr_ = _limited_slope(rho[i, kk] - rho[i - 1, kk], rho[i + 1, kk] - rho[i, kk], code)
            su_ = _limited_slope(u[i, kk] - u[i - 1, kk], u[i + 1, kk] - u[i, kk], code)
            sv_ = _limited_slope(v[i, kk] - v[i - 1, kk], v[i + 1, kk] - v[i, kk], code)
            sr2 = _limited_slope(rho[i + 1, kk] - rho[i, kk], rho[i + 2, kk] - rho[i + 1, kk], code)
            su2 = _limited_slope(u[i + 1, kk] - u[i, kk], u[i + 2, kk] - u[i + 1, kk], code)
            sv2 = _limited_slope(v[i + 1, kk] - v[i, kk], v[i + 2, kk] - v[i + 1, kk], code)
            a = rho[i, kk] + 0.5 * sr_
            b = rho[i + 1, kk] - 0.5 * sr2
            if a <= 0.0 or b <= 0.0:
                fy0[f, k] = np.nan
                fy1[f, k] = np.nan
                fy2[f, k] = np.nan
                continue
            # normal velocity is v, tangential u
            f0, f1, f2, s = _hll(a, b, v[i, kk] + 0.5 * sv_, v[i + 1, kk] - 0.5 * sv2,
                                 u[i, kk] + 0.5 * su_, u[i + 1, kk] - 0.5 * su2, gamma)
            fy0[f, k] = f0
            fy1[f, k] = f2
            fy2[f, k] = f1
            if s > smax:
                smax = s
    for j in range(N):
        for k in range(N):
            r0[j, k] = -((fx0[j, k + 1] - fx0[j, k]) + (fy0[j + 1, k] - fy0[j, k])) / h
            r1[j, k] = -((fx1[j, k + 1] - fx1[j, k]) + (fy1[j + 1, k] - fy1[j, k])) / h
            r2[j, k] = -((fx2[j, k + 1] - fx2[j, k]) + (fy2[j + 1, k] - fy2[j, k])) / h
    return smax


@njit(cache=True)
def _fill2d(rho, mx, my, pr, pu, pv):
    N = rho.shape[0]
    for j in range(N + 4):
        for k in range(N + 4):
            pr[j, k] = 1.0
            pu[j, k] = 0.0
            pv[j, k] = 0.0
    for j in range(N):
        for k in range(N):
            pr[j + 2, k + 2] = rho[j, k]
            pu[j + 2, k + 2] = mx[j, k] / rho[j, k]
            pv[j + 2, k + 2] = my[j, k] / rho[j, k]


@njit(cache=True)
def euler2d_advance(rho, mx, my, t, h, gamma, mu, lam, cfl, code, nsteps, t_stop, dt_floor):
    """In-place SSP-RK2 steps with Strang-split exact damping and background
    ghost cells. Returns (t, steps, status, dt); status 1 vacuum, 2 dt floor."""
    N = rho.shape[0]
    pr = np.empty((N + 4, N + 4))
    pu = np.empty((N + 4, N + 4))
    pv = np.empty((N + 4, N + 4))
    r0 = np.empty((N, N))
    r1 = np.empty((N, N))
    r2 = np.empty((N, N))
    q0 = np.empty((N, N))
    q1 = np.empty((N, N))
    q2 = np.empty((N, N))
    dt = 0.0
    for step in range(nsteps):
        if t >= t_stop:
            return t, step, 0, dt
        smax = 0.0
        for j in range(N):
            for k in range(N):
                if not rho[j, k] > 0.0:
                    return t, step, 1, dt
                c = rho[j, k] ** (0.5 * (gamma - 1.0))
                s = max(abs(mx[j, k]), abs(my[j, k])) / rho[j, k] + c
                if s > smax:
                    smax = s
        dt = cfl * h / (2.0 * smax)
        if not dt >= dt_floor:
            return t, step, 2, dt
        if t + dt > t_stop:
            dt = t_stop - t
        f = _damp(mu, lam, t, t + 0.5 * dt)
        for j in range(N):
            for k in range(N):
                mx[j, k] *= f
                my[j, k] *= f
        _fill2d(rho, mx, my, pr, pu, pv)
        residual2d(pr, pu, pv, h, gamma, code, r0, r1, r2)
        for j in range(N):
            for k in range(N):
                q0[j, k] = rho[j, k] + dt * r0[j, k]
                q1[j, k] = mx[j, k] + dt * r1[j, k]
                q2[j, k] = my[j, k] + dt * r2[j, k]
                if not q0[j, k] > 0.0:
                    return t, step, 1, dt
        _fill2d(q0, q1, q2, pr, pu, pv)
        residual2d(pr, pu, pv, h, gamma, code, r0, r1, r2)
        for j in range(N):
            for k in range(N):
                rho[j, k] = 0.5 * (rho[j, k] + q0[j, k] + dt * r0[j, k])
                mx[j, k] = 0.5 * (mx[j, k] + q1[j, k] + dt * r1[j, k])
                my[j, k] = 0.5 * (my[j, k] + q2[j, k] + dt * r2[j, k])
                if not (rho[j, k] > 0.0 and np.isfinite(mx[j, k]) and np.isfinite(my[j, k])):
                    return t + dt, step + 1, 1, dt
        f = _damp(mu, lam, t + 0.5 * dt, t + dt)
        for j in range(N):
            for k in range(N):
                mx[j, k] *= f
                my[j, k] *= f
        t = t + dt
    return t, nsteps, 0, dt
