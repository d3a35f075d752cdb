"""RunRecord persistence: append-only JSON lines."""
from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass


@dataclass(frozen=True)
class RunRecord:
    config_hash: str
    solver_id: str
    mu: float
    epsilon: float
    gamma: float
    lam: float
    profile: str
    h: float
    status: str  # "ok" | "error"
    T_b: float | None = None
    detector_id: str | None = None
    detector_value: float | None = None
    wall_time: float = 0.0
    error: str | None = None

    def __post_init__(self):
        if self.status == "ok" and not (self.T_b is not None and self.T_b > 0):
            raise ValueError("a successful record needs T_b > 0")

    @property
    def cell(self):
        return cell_key(self.solver_id, self.mu, self.epsilon, self.h)

    def to_json(self):
        return json.dumps(asdict(self), sort_keys=True)


def cell_key(solver_id, mu, epsilon, h):
    return f"{solver_id}|mu={float(mu)!r}|eps={float(epsilon)!r}|h={float(h)!r}"


def read_records(path):
    """All parseable records; a torn final line (interrupted write) is skipped."""
    out = []
    if not os.path.exists(path):
        return out
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            try:
                out.append(RunRecord(**json.loads(line)))
            except (json.JSONDecodeError, TypeError, ValueError):
                continue
    return out


class RecordLog:
    """Single appender; each record is flushed and fsynced as one line."""

    def __init__(self, path):
        self.path = path
        d = os.path.dirname(path)
        if d:
            os.makedirs(d, exist_ok=True)
        self._repair()

    def _repair(self):
        # drop a torn last line so the next append starts on a fresh line
        if not os.path.exists(self.path):
            return
        with open(self.path, "rb") as fh:
            data = fh.read()
        if data and not data.endswith(b"\n"):
            cut = data.rfind(b"\n") + 1
            with open(self.path, "wb") as fh:
                fh.write(data[:cut])

    def append(self, rec: RunRecord):
        with open(self.path, "a") as fh:
            fh.write(rec.to_json() + "\n")
            fh.flush()
            os.fsync(fh.fileno())
