"""Lifespan-law fits and two-grid confirmation of blow-up times."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from ..errors import InsufficientData, Unconfirmed

MIN_POINTS = 4
MIN_SPAN = 4.0
EXPONENTIAL_MU_MIN = 0.9


@dataclass(frozen=True)
class FitResult:
    law: str  # "power": log T = c + p log(1/eps); "exponential": log T = c + p / eps
    slope: float
    stderr: float
    intercept: float
    rss: float
    n: int

    def to_dict(self):
        return asdict(self)


def _ols(x, y):
    n = x.size
    xm, ym = x.mean(), y.mean()
    sxx = float(np.sum((x - xm) ** 2))
    slope = float(np.sum((x - xm) * (y - ym)) / sxx)
    intercept = float(ym - slope * xm)
    res = y - (intercept + slope * x)
    rss = float(np.sum(res**2))
    stderr = math.sqrt(rss / (n - 2) / sxx) if n > 2 else float("nan")
    return slope, stderr, intercept, rss


def fit_exponent(epsilons, T, law="power", mu=None, min_span=MIN_SPAN):
    """Least-squares fit of log T against log(1/eps) (power) or 1/eps
    (exponential). ``law="auto"`` fits both when mu >= 0.9 and keeps the one
    with the smaller residual sum; otherwise only the power law is admitted."""
    eps = np.asarray(epsilons, dtype=float)
    T = np.asarray(T, dtype=float)
    if eps.size != T.size:
        raise ValueError("epsilons and T differ in length")
    if eps.size < MIN_POINTS:
        raise InsufficientData(f"need >= {MIN_POINTS} points, got {eps.size}")
    if np.any(eps <= 0) or np.any(~(T > 0)):
        raise InsufficientData("epsilon and T must be positive")
    if eps.max() / eps.min() < min_span * (1 - 1e-12):
        raise InsufficientData(f"epsilon range {eps.max() / eps.min():.3g}x below {min_span:g}x")
    y = np.log(T)
    if law == "auto":
        power = fit_exponent(eps, T, "power", min_span=min_span)
        if mu is None or mu < EXPONENTIAL_MU_MIN:
            return power
        expo = fit_exponent(eps, T, "exponential", mu, min_span)
        return expo if expo.rss < power.rss else power
    if law == "power":
        x = np.log(1.0 / eps)
    elif law == "exponential":
        if mu is not None and mu < EXPONENTIAL_MU_MIN:
            raise ValueError("the exponential law is only admitted for mu >= 0.9")
        x = 1.0 / eps
    else:
        raise ValueError(f"unknown law {law!r}")
    slope, se, c, rss = _ols(x, y)
    return FitResult(law, slope, se, c, rss, int(eps.size))


def predicted_exponent(solver_id, mu):
    """Sharp lifespan exponents: 2/(2-mu) in 1-D; 2/(1-mu) in 2-D for mu < 1
    (2 when undamped). None where the law is not a power (2-D, mu >= 1)."""
    if solver_id == "psystem1d":
        return 2.0 / (2.0 - mu) if mu < 2 else None
    return 2.0 / (1.0 - mu) if mu < 1 else None


def confirm(T_coarse, T_fine, rtol=0.1):
    """Two-grid confirmation; returns the extrapolated 2 T_fine - T_coarse
    (first-order detection bias removed)."""
    if T_coarse is None or T_fine is None or not (T_coarse > 0 and T_fine > 0):
        raise Unconfirmed("missing or non-positive blow-up time")
    rel = abs(T_coarse - T_fine) / T_fine
    if rel > rtol:
        raise Unconfirmed(f"refinement changes T_b by {rel:.1%} (> {rtol:.0%})")
    return 2.0 * T_fine - T_coarse
