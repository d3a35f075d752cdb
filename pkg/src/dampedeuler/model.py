"""Equation parameters, grid states, the rho <-> theta change of variables and
compactly supported initial data.

All perturbations are measured against the background (rho, u) = (1, 0), whose
sound speed is 1.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import AmplitudeError, VacuumError

SUPPORT_RADIUS = 0.5


@dataclass(frozen=True)
class EquationParams:
    mu: float
    gamma: float = 2.0
    epsilon: float = 0.1
    lam: float = 1.0
    bar_rho: float = 1.0
    bar_c: float = 1.0

    def __post_init__(self):
        if not self.gamma > 1.0:
            raise ValueError(f"gamma must exceed 1, got {self.gamma}")
        if not 0.0 <= self.mu <= 2.0:
            raise ValueError(f"mu must lie in [0, 2], got {self.mu}")
        if self.epsilon < 0.0:
            raise ValueError(f"epsilon must be nonnegative, got {self.epsilon}")
        if self.lam < 0.0:
            raise ValueError("lam must be nonnegative")
        if self.bar_rho != 1.0 or self.bar_c != 1.0:
            raise ValueError("background state is fixed at rho = c = 1")

    def damping(self, t):
        return self.mu / (1.0 + t) ** self.lam

    def damping_factor(self, t0, t1):
        """exp(-int_{t0}^{t1} mu (1+s)^-lam ds): exact solution map of u' = -a(t) u."""
        if self.mu == 0.0:
            return 1.0
        if self.lam == 1.0:
            return ((1.0 + t0) / (1.0 + t1)) ** self.mu
        k = 1.0 - self.lam
        integral = ((1.0 + t1) ** k - (1.0 + t0) ** k) / k
        return math.exp(-self.mu * integral)

    def to_dict(self):
        return {"mu": self.mu, "gamma": self.gamma, "epsilon": self.epsilon, "lam": self.lam}


@dataclass(frozen=True)
class Mesh:
    """Uniform cell-centred mesh.

    kind is one of ``"line"`` (cells on [lo, lo + n h]), ``"radial"`` (same, with
    lo >= 0 the radius of the first cell face) or ``"cart2d"`` (square
    [lo, lo + n h]^2, arrays indexed [iy, ix]).
    """

    kind: str
    n: int
    h: float
    lo: float = 0.0

    def __post_init__(self):
        if self.kind not in ("line", "radial", "cart2d"):
            raise ValueError(f"unknown mesh kind {self.kind!r}")
        if self.n < 1 or not self.h > 0:
            raise ValueError("mesh needs n >= 1 and h > 0")

    @property
    def hi(self):
        return self.lo + self.n * self.h

    def centers(self):
        return self.lo + (np.arange(self.n) + 0.5) * self.h

    def coords(self):
        """Cell centres: 1-D array, or (X, Y) for cart2d."""
        c = self.centers()
        if self.kind == "cart2d":
            return np.meshgrid(c, c, indexing="xy")
        return c

    def radius(self):
        if self.kind == "cart2d":
            X, Y = self.coords()
            return np.hypot(X, Y)
        return np.abs(self.centers())

    @property
    def shape(self):
        return (self.n, self.n) if self.kind == "cart2d" else (self.n,)

    def cell_measure(self):
        """Quadrature weights of the 2-D measure (line meshes: plain dx)."""
        if self.kind == "radial":
            return 2.0 * np.pi * self.centers() * self.h
        if self.kind == "cart2d":
            return np.full(self.shape, self.h * self.h)
        return np.full(self.shape, self.h)

    def to_dict(self):
        return {"kind": self.kind, "n": self.n, "h": self.h, "lo": self.lo}


@dataclass
class PrimitiveState:
    t: float
    mesh: Mesh
    rho: np.ndarray
    mom: np.ndarray  # (n,) for line/radial, (2, n, n) for cart2d


@dataclass
class SoundState:
    t: float
    mesh: Mesh
    theta: np.ndarray
    u: np.ndarray  # (n,) for line/radial (radial: u_r), (2, n, n) for cart2d


def theta_of_rho(rho, gamma):
    rho = np.asarray(rho, dtype=float)
    return np.expm1((gamma - 1.0) * np.log(rho)) / (gamma - 1.0)


def rho_of_theta(theta, gamma):
    theta = np.asarray(theta, dtype=float)
    return np.exp(np.log1p((gamma - 1.0) * theta) / (gamma - 1.0))


def vacuum_floor(gamma):
    """theta value at which the density vanishes."""
    return -1.0 / (gamma - 1.0)


def to_sound_state(s: PrimitiveState, p: EquationParams) -> SoundState:
    if np.any(~(s.rho > 0)):
        raise VacuumError(f"non-positive density at t={s.t}")
    theta = theta_of_rho(s.rho, p.gamma)
    u = s.mom / s.rho
    return SoundState(s.t, s.mesh, theta, u)


def to_primitive(s: SoundState, p: EquationParams) -> PrimitiveState:
    if np.any(~(s.theta > vacuum_floor(p.gamma))):
        raise VacuumError(f"theta at or below -1/(gamma-1) at t={s.t}")
    rho = rho_of_theta(s.theta, p.gamma)
    return PrimitiveState(s.t, s.mesh, rho, rho * s.u)


# --------------------------------------------------------------------------
# Initial data profiles. Each profile is a radial function of r = |x| given
# as (value, d/dr value), vanishing identically for r >= 1/2.


def _bump(r):
    r = np.asarray(r, dtype=float)
    out = np.zeros_like(r)
    d = np.zeros_like(r)
    inside = r < SUPPORT_RADIUS
    q = 1.0 - 4.0 * r[inside] ** 2
    b = np.exp(1.0 - 1.0 / q)
    out[inside] = b
    d[inside] = b * (-8.0 * r[inside] / q**2)
    return out, d


def _bump_squared(r):
    b, db = _bump(r)
    return b * b, 2.0 * b * db


def _zero(r):
    r = np.asarray(r, dtype=float)
    return np.zeros_like(r), np.zeros_like(r)


def _ring(r):
    # (4 r^2) * bump: vanishes at the origin, peaks near r ~ 0.3
    b, db = _bump(r)
    w = 4.0 * np.asarray(r, dtype=float) ** 2
    return w * b, 8.0 * np.asarray(r, dtype=float) * b + w * db


def _poly8(r):
    # (1 - 4 r^2)_+^8: C^7 with moderate derivatives, for convergence studies
    r = np.asarray(r, dtype=float)
    q = np.clip(1.0 - 4.0 * r**2, 0.0, None)
    return q**8, -64.0 * r * q**7


RadialProfile = Callable[[np.ndarray], tuple]

PROFILES: dict[str, tuple[RadialProfile, RadialProfile]] = {
    # name: (rho0 profile, velocity potential profile)
    "bump": (_bump, _bump),
    "bump_density": (_bump, _zero),
    "bump_velocity": (_zero, _bump),
    "bump_squared": (_bump_squared, _bump_squared),
    "ring": (_ring, _ring),
    "poly8": (_poly8, _poly8),
}


@dataclass(frozen=True)
class InitialDataSpec:
    profile_id: str = "bump"
    support_radius: float = SUPPORT_RADIUS

    def __post_init__(self):
        if self.profile_id not in PROFILES:
            raise ValueError(f"unknown profile {self.profile_id!r}; known: {sorted(PROFILES)}")
        if self.support_radius != SUPPORT_RADIUS:
            raise ValueError("support radius is fixed at 1/2")

    def rho0(self, r):
        return PROFILES[self.profile_id][0](r)[0]

    def potential(self, r):
        """(phi, dphi/dr) of the velocity potential."""
        return PROFILES[self.profile_id][1](r)


def exact_initial_theta(rho0, p: EquationParams):
    """theta(0) = ((1 + eps rho0)^(gamma-1) - 1)/(gamma-1), without truncation."""
    a = p.epsilon * np.asarray(rho0, dtype=float)
    if np.any(~(1.0 + a > 0)):
        raise AmplitudeError("1 + eps*rho0 must stay positive")
    return np.expm1((p.gamma - 1.0) * np.log1p(a)) / (p.gamma - 1.0)


def make_initial_data(spec: InitialDataSpec, p: EquationParams, mesh: Mesh) -> SoundState:
    """Sound-speed form of the curl-free initial data u0 = eps grad(phi)."""
    r = mesh.radius()
    theta = exact_initial_theta(spec.rho0(r), p)
    _, dphi = spec.potential(r)
    if mesh.kind == "cart2d":
        X, Y = mesh.coords()
        with np.errstate(invalid="ignore", divide="ignore"):
            ex = np.where(r > 0, X / r, 0.0)
            ey = np.where(r > 0, Y / r, 0.0)
        u = p.epsilon * np.stack([dphi * ex, dphi * ey])
    elif mesh.kind == "line":
        u = p.epsilon * dphi * np.sign(mesh.centers())
    else:
        u = p.epsilon * dphi
    outside = r >= spec.support_radius
    theta[outside] = 0.0
    if mesh.kind == "cart2d":
        u[:, outside] = 0.0
    else:
        u[outside] = 0.0
    return SoundState(0.0, mesh, theta, u)


# --------------------------------------------------------------------------
# Snapshot files: one JSON header line, then row-major little-endian float64
# arrays back to back, in the order listed in header["fields"].


def write_snapshot(path, state, p: EquationParams | None = None, extra: dict | None = None):
    if isinstance(state, SoundState):
        fields = {"theta": state.theta, "u": state.u}
    elif isinstance(state, PrimitiveState):
        fields = {"rho": state.rho, "mom": state.mom}
    else:
        raise TypeError(f"cannot serialise {type(state).__name__}")
    header = {
        "format": "dampedeuler-snapshot/1",
        "state": type(state).__name__,
        "t": state.t,
        "mesh": state.mesh.to_dict(),
        "params": p.to_dict() if p is not None else None,
        "dtype": "<f8",
        "fields": [{"name": k, "shape": list(np.shape(v))} for k, v in fields.items()],
        "extra": extra or {},
    }
    with open(path, "wb") as fh:
        fh.write(json.dumps(header, sort_keys=True).encode() + b"\n")
        for v in fields.values():
            fh.write(np.ascontiguousarray(v, dtype="<f8").tobytes())


def read_snapshot(path):
    """Returns (state, params_or_None, header)."""
    with open(path, "rb") as fh:
        header = json.loads(fh.readline())
        blob = fh.read()
    arrays = {}
    off = 0
    for f in header["fields"]:
        count = int(np.prod(f["shape"])) if f["shape"] else 1
        arrays[f["name"]] = np.frombuffer(blob, dtype="<f8", count=count, offset=off).reshape(f["shape"]).copy()
        off += 8 * count
    mesh = Mesh(**header["mesh"])
    params = EquationParams(**header["params"]) if header.get("params") else None
    if header["state"] == "SoundState":
        state = SoundState(header["t"], mesh, arrays["theta"], arrays["u"])
    else:
        state = PrimitiveState(header["t"], mesh, arrays["rho"], arrays["mom"])
    return state, params, header

