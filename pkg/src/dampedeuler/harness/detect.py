"""Operational blow-up detection on a stream of monitor reports.

Three triggers: the C^1 monitor crossing a threshold (shock / ODE blow-up),
the vacuum margin dropping below a floor, and time-step collapse. Crossing
times are linearly interpolated between consecutive reports.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import HorizonExceeded

MONITORS = ("steepening", "steepness", "c1")


@dataclass
class BlowupDetector:
    """Configurable detector.

    monitor:
        ``"steepening"`` (default) watches the steepness c1_norm/amplitude
        divided by the same quantity for a linear companion run supplied as
        ``m["steepness_ref"]``. Linear geometric focusing and spreading cancel
        in the ratio, leaving the nonlinear gradient amplification, which
        diverges at the smooth blow-up time.
        ``"steepness"`` watches c1_norm/amplitude itself and ``"c1"`` the raw
        c1_norm.
    factor:
        threshold as a multiple of the monitor's initial value.
    threshold:
        absolute threshold; overrides ``factor`` when set.
    vacuum_floor:
        fraction of 1/(gamma-1); the vacuum trigger fires when
        vacuum_margin <= vacuum_floor/(gamma-1).
    """

    monitor: str = "steepening"
    factor: float = 2.0
    threshold: float | None = None
    vacuum_floor: float = 0.05
    gamma: float = 2.0
    dt_floor: float = 1e-9
    _prev: dict | None = field(default=None, repr=False)
    _level: float | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.monitor not in MONITORS:
            raise ValueError(f"unknown monitor {self.monitor!r}")

    @property
    def needs_reference(self):
        return self.monitor == "steepening"

    def reset(self):
        self._prev = None
        self._level = None

    def value(self, m):
        if self.monitor == "c1":
            return m["c1_norm"]
        amp = m.get("amplitude", 0.0)
        s = m["c1_norm"] / amp if amp > 0 else 0.0
        if self.monitor == "steepness":
            return s
        ref = m.get("steepness_ref", 0.0)
        return s / ref if ref > 0 else 0.0

    @property
    def vacuum_level(self):
        return self.vacuum_floor / (self.gamma - 1.0)

    def fire(self, detector_id, t, value):
        return {"T_b": float(t), "detector_id": detector_id, "detector_value": float(value)}

    def update(self, m):
        q = self.value(m)
        if self._level is None:
            if self.threshold is not None:
                self._level = self.threshold
            elif q > 0:
                self._level = self.factor * q
            else:
                self._level = float("inf")
        hit = None
        prev = self._prev
        if m["vacuum_margin"] <= self.vacuum_level:
            t = m["t"]
            if prev is not None and prev["vacuum_margin"] > self.vacuum_level:
                a, b = prev["vacuum_margin"], m["vacuum_margin"]
                t = prev["t"] + (a - self.vacuum_level) / (a - b) * (m["t"] - prev["t"])
            hit = self.fire("vacuum", t, m["vacuum_margin"])
        elif q >= self._level:
            t = m["t"]
            if prev is not None:
                qa = self.value(prev)
                if qa < self._level:
                    t = prev["t"] + (self._level - qa) / (q - qa) * (m["t"] - prev["t"])
            hit = self.fire("c1-threshold", t, q)
        self._prev = dict(m)
        return hit


def detect_blowup(reports, detector: BlowupDetector | None = None):
    """First trigger in a time-ordered iterable of monitor dicts.

    Returns (T_b, detector_id, detector_value); raises HorizonExceeded when the
    stream ends without a trigger.
    """
    det = detector or BlowupDetector()
    det.reset()
    last_t = None
    for m in reports:
        hit = det.update(m)
        last_t = m["t"]
        if hit is not None:
            return hit["T_b"], hit["detector_id"], hit["detector_value"]
    raise HorizonExceeded(f"no trigger up to t={last_t}", horizon=last_t)
