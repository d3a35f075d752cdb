"""Numba kernels for the one-dimensional finite-volume updates.

Both the Lagrangian p-system and the radial Euler system are 2x2 systems on a
uniform 1-D cell grid. The kernels take arrays with two ghost cells on each side
already filled and return the flux-difference residual -(F_{i+1/2} - F_{i-1/2})/h
on the interior cells.
"""
import numpy as np
from numba import njit

LIMITER_CODES = {"minmod": 0, "mc": 1, "none": 2, "vanleer": 3}


@njit(cache=True, inline="always")
def _limited_slope(a, b, code):
    # a: backward difference, b: forward difference
    if code == 2:
        return 0.5 * (a + b)
    if a * b <= 0.0:
        return 0.0
    if code == 0:
        return a if abs(a) < abs(b) else b
    if code == 3:
        return 2.0 * a * b / (a + b)
    # monotonized central
    c = 0.5 * (a + b)
    m = 2.0 * a if abs(2.0 * a) < abs(2.0 * b) else 2.0 * b
    return c if abs(c) < abs(m) else m


@njit(cache=True)
def _reconstruct(q, code):
    """Face states from cell averages with two ghosts per side.

    Returns (qL, qR) of length n+1 (interior faces, left/right of each face).
    """
    N = q.shape[0]
    n = N - 4
    slope = np.zeros(N)
    for i in range(1, N - 1):
        slope[i] = _limited_slope(q[i] - q[i - 1], q[i + 1] - q[i], code)
    qL = np.empty(n + 1)
    qR = np.empty(n + 1)
    for f in range(n + 1):
        i = f + 1  # cell left of the face
        qL[f] = q[i] + 0.5 * slope[i]
        qR[f] = q[i + 1] - 0.5 * slope[i + 1]
    return qL, qR


@njit(cache=True)
def psystem_residual(v, u, h, gamma, code):
    """Rusanov/HLL residual for v_t - u_x = 0, u_t + p(v)_x = 0, p = v^-gamma/gamma."""
    vL, vR = _reconstruct(v, code)
    uL, uR = _reconstruct(u, code)
    n = v.shape[0] - 4
    Fv = np.empty(n + 1)
    Fu = np.empty(n + 1)
    smax = 0.0
    for f in range(n + 1):
        a, b = vL[f], vR[f]
        if a <= 0.0 or b <= 0.0:
            # signal vacuum-like breakdown to the caller through NaNs
            Fv[f] = np.nan
            Fu[f] = np.nan
            continue
        cL = a ** (-0.5 * (gamma + 1.0))
        cR = b ** (-0.5 * (gamma + 1.0))
        s = cL if cL > cR else cR
        if s > smax:
            smax = s
        pL = a ** (-gamma) / gamma
        pR = b ** (-gamma) / gamma
        # symmetric two-wave HLL: S_L = -s, S_R = s
        Fv[f] = 0.5 * (-uL[f] - uR[f]) - 0.5 * s * (b - a)
        Fu[f] = 0.5 * (pL + pR) - 0.5 * s * (uR[f] - uL[f])
    rv = np.empty(n)
    ru = np.empty(n)
    for i in range(n):
        rv[i] = -(Fv[i + 1] - Fv[i]) / h
        ru[i] = -(Fu[i + 1] - Fu[i]) / h
    return rv, ru, smax


@njit(cache=True)
def radial_residual(rho, m, r_faces, h, gamma, code):
    """Residual of the cylindrical-symmetric Euler system in (rho, m = rho u).

    Area-weighted form: rho_t = -(r F0)_r / r, m_t = -(r F1)_r / r + p / r,
    with F = (rho u, rho u^2 + p) from an HLL solver and r the cell centre
    (the mean of its two faces). The constant state is preserved exactly and the
    sum of rho_i r_i h changes only through the end faces.
    Reconstruction is done in primitive variables (rho, u).
    """
    N = rho.shape[0]
    n = N - 4
    uu = np.empty(N)
    for i in range(N):
        uu[i] = m[i] / rho[i]
    rL, rR = _reconstruct(rho, code)
    uL, uR = _reconstruct(uu, code)
    F0 = np.empty(n + 1)
    F1 = np.empty(n + 1)
    smax = 0.0
    for f in range(n + 1):
        a, b = rL[f], rR[f]
        if a <= 0.0 or b <= 0.0:
            F0[f] = np.nan
            F1[f] = np.nan
            continue
        ua, ub = uL[f], uR[f]
        ca = a ** (0.5 * (gamma - 1.0))
        cb = b ** (0.5 * (gamma - 1.0))
        sl = min(ua - ca, ub - cb)
        sr = max(ua + ca, ub + cb)
        s = max(abs(sl), abs(sr))
        if s > smax:
            smax = s
        ma, mb = a * ua, b * ub
        fa1 = ma * ua + a ** gamma / gamma
        fb1 = mb * ub + b ** gamma / gamma
        if sl >= 0.0:
            F0[f] = ma
            F1[f] = fa1
        elif sr <= 0.0:
            F0[f] = mb
            F1[f] = fb1
        else:
            d = sr - sl
            F0[f] = (sr * ma - sl * mb + sl * sr * (b - a)) / d
            F1[f] = (sr * fa1 - sl * fb1 + sl * sr * (mb - ma)) / d
    r0 = np.empty(n)
    r1 = np.empty(n)
    for i in range(n):
        rc = 0.5 * (r_faces[i] + r_faces[i + 1])
        pc = rho[i + 2] ** gamma / gamma
        r0[i] = -(r_faces[i + 1] * F0[i + 1] - r_faces[i] * F0[i]) / (rc * h)
        # pressure taken relative to the cell value: with (r_{i+1} - r_i)/h = 1
        # this is the same update, but the constant state stays fixed bitwise
        r1[i] = -(r_faces[i + 1] * (F1[i + 1] - pc) - r_faces[i] * (F1[i] - pc)) / (rc * h)
    return r0, r1, smax


# ---------------------------------------------------------------------------
# Whole-step drivers. Boundary codes: 0 background constant, 1 reflecting
# wall (first field even, second field odd), 2 zero-gradient outflow.


@njit(cache=True)
def _fill(q, interior, left, parity, bg):
    n = interior.shape[0]
    for i in range(n):
        q[i + 2] = interior[i]
    if left == 1:
        q[1] = parity * interior[0]
        q[0] = parity * interior[1]
    elif left == 2:
        q[0] = interior[0]
        q[1] = interior[0]
    else:
        q[0] = bg
        q[1] = bg
    q[n + 2] = bg
    q[n + 3] = bg


@njit(cache=True)
def _damp(mu, lam, t0, t1):
    if mu == 0.0:
        return 1.0
    if lam == 1.0:
        return ((1.0 + t0) / (1.0 + t1)) ** mu
    k = 1.0 - lam
    return np.exp(-mu * ((1.0 + t1) ** k - (1.0 + t0) ** k) / k)


@njit(cache=True)
def psystem_advance(v, u, t, h, left, gamma, mu, lam, cfl, code, nsteps, t_stop, dt_floor, use_flux):
    """Advance up to ``nsteps`` steps (or until t >= t_stop) in place.

    Returns (t, steps_taken, status, last_dt); status 0 ok, 1 vacuum, 2 dt below floor.
    """
    n = v.shape[0]
    vp = np.empty(n + 4)
    up = np.empty(n + 4)
    v1 = np.empty(n)
    u1 = np.empty(n)
    dt = 0.0
    for k in range(nsteps):
        if t >= t_stop:
            return t, k, 0, dt
        smax = 0.0
        for i in range(n):
            if not v[i] > 0.0:
                return t, k, 1, dt
            c = v[i] ** (-0.5 * (gamma + 1.0))
            if c > smax:
                smax = c
        dt = cfl * h / smax
        if not dt >= dt_floor:
            return t, k, 2, dt
        if t + dt > t_stop:
            dt = t_stop - t
        f = _damp(mu, lam, t, t + 0.5 * dt)
        for i in range(n):
            u[i] *= f
        if use_flux:
            _fill(vp, v, left, 1.0, 1.0)
            _fill(up, u, left, -1.0, 0.0)
            rv, ru, _ = psystem_residual(vp, up, h, gamma, code)
            for i in range(n):
                v1[i] = v[i] + dt * rv[i]
                u1[i] = u[i] + dt * ru[i]
                if not v1[i] > 0.0:
                    return t, k, 1, dt
            _fill(vp, v1, left, 1.0, 1.0)
            _fill(up, u1, left, -1.0, 0.0)
            rv, ru, _ = psystem_residual(vp, up, h, gamma, code)
            for i in range(n):
                v[i] = 0.5 * (v[i] + v1[i] + dt * rv[i])
                u[i] = 0.5 * (u[i] + u1[i] + dt * ru[i])
                if not (v[i] > 0.0 and np.isfinite(u[i])):
                    return t + dt, k + 1, 1, dt
        f = _damp(mu, lam, t + 0.5 * dt, t + dt)
        for i in range(n):
            u[i] *= f
        t = t + dt
    return t, nsteps, 0, dt


@njit(cache=True)
def radial_advance(rho, m, t, lo, h, left, gamma, mu, lam, cfl, code, nsteps, t_stop, dt_floor, dt_fixed):
    """Radial analogue of :func:`psystem_advance`; cells occupy [lo, lo + n h].

    ``dt_fixed`` > 0 forces a constant step (used by convergence studies).
    """
    n = rho.shape[0]
    rp = np.empty(n + 4)
    mp = np.empty(n + 4)
    r1 = np.empty(n)
    m1 = np.empty(n)
    faces = lo + h * np.arange(n + 1)
    dt = 0.0
    for k in range(nsteps):
        if t >= t_stop:
            return t, k, 0, dt
        smax = 0.0
        for i in range(n):
            if not rho[i] > 0.0:
                return t, k, 1, dt
            s = abs(m[i] / rho[i]) + rho[i] ** (0.5 * (gamma - 1.0))
            if s > smax:
                smax = s
        dt = dt_fixed if dt_fixed > 0.0 else cfl * h / smax
        if not dt >= dt_floor:
            return t, k, 2, dt
        if t + dt > t_stop and dt_fixed <= 0.0:
            dt = t_stop - t
        f = _damp(mu, lam, t, t + 0.5 * dt)
        for i in range(n):
            m[i] *= f
        _fill(rp, rho, left, 1.0, 1.0)
        _fill(mp, m, left, -1.0, 0.0)
        a0, a1, _ = radial_residual(rp, mp, faces, h, gamma, code)
        for i in range(n):
            r1[i] = rho[i] + dt * a0[i]
            m1[i] = m[i] + dt * a1[i]
            if not r1[i] > 0.0:
                return t, k, 1, dt
        _fill(rp, r1, left, 1.0, 1.0)
        _fill(mp, m1, left, -1.0, 0.0)
        a0, a1, _ = radial_residual(rp, mp, faces, h, gamma, code)
        for i in range(n):
            rho[i] = 0.5 * (rho[i] + r1[i] + dt * a0[i])
            m[i] = 0.5 * (m[i] + m1[i] + dt * a1[i])
            if not (rho[i] > 0.0 and np.isfinite(m[i])):
                return t + dt, k + 1, 1, dt
        f = _damp(mu, lam, t + 0.5 * dt, t + dt)
        for i in range(n):
            m[i] *= f
        t = t + dt
    return t, nsteps, 0, dt
