"""Sweep configuration: a JSON object or an INI-style ``key = value`` file.

INI files may use a ``[detector]`` section for the detector keys; everything
else goes in ``[sweep]`` (or before any section header). List values are
comma separated.
"""
from __future__ import annotations

import configparser
import hashlib
import json
from dataclasses import asdict, dataclass, field, fields

from ..errors import ConfigError
from ..model import PROFILES
from .detect import MONITORS, BlowupDetector

SOLVERS = ("psystem1d", "radial")
LIMITERS = ("minmod", "mc", "none", "vanleer")


@dataclass(frozen=True)
class DetectorConfig:
    monitor: str = "steepening"
    factor: float = 2.0
    threshold: float | None = None
    vacuum_floor: float = 0.05
    dt_floor: float = 1e-9

    def build(self, gamma):
        return BlowupDetector(monitor=self.monitor, factor=self.factor, threshold=self.threshold,
                              vacuum_floor=self.vacuum_floor, gamma=gamma, dt_floor=self.dt_floor)


@dataclass(frozen=True)
class SweepConfig:
    solver_id: str
    mu: tuple
    epsilon: tuple
    resolutions: tuple = (0.005, 0.0025)
    name: str = "sweep"
    gamma: float = 2.0
    lam: float = 1.0
    profile: str = "bump"
    cfl: float = 0.8
    limiter: str = "minmod"
    horizon: float = 1e4
    width: float | None = None
    confirm_rtol: float = 0.1
    min_span: float = 4.0
    slope_tolerance: float | None = None
    detector: DetectorConfig = field(default_factory=DetectorConfig)
    output_dir: str = "sweep_out"
    workers: int = 1

    def __post_init__(self):
        if self.solver_id not in SOLVERS:
            raise ConfigError(f"solver_id must be one of {SOLVERS}, got {self.solver_id!r}")
        if self.profile not in PROFILES:
            raise ConfigError(f"unknown profile {self.profile!r}")
        if self.limiter not in LIMITERS:
            raise ConfigError(f"unknown limiter {self.limiter!r}")
        if self.detector.monitor not in MONITORS:
            raise ConfigError(f"unknown detector monitor {self.detector.monitor!r}")
        if len(self.resolutions) != 2 or not self.resolutions[0] > self.resolutions[1] > 0:
            raise ConfigError("resolutions must be a pair (h, h_fine) with h > h_fine > 0")
        if any(not 0.0 <= m <= 2.0 for m in self.mu):
            raise ConfigError("mu values must lie in [0, 2]")
        if any(not e > 0 for e in self.epsilon):
            raise ConfigError("epsilon values must be positive")
        if not 0.0 < self.cfl < 1.0:
            raise ConfigError("cfl must lie in (0, 1)")
        if not self.min_span >= 1.0:
            raise ConfigError("min_span must be >= 1")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")

    @property
    def config_hash(self):
        """Hash of everything that influences results (not output_dir/workers/name)."""
        d = asdict(self)
        for k in ("output_dir", "workers", "name", "slope_tolerance"):
            d.pop(k)
        blob = json.dumps(d, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]

    @property
    def default_width(self):
        if self.width is not None:
            return self.width
        return 4.0 if self.solver_id == "psystem1d" else 6.0

    def cells(self):
        """(mu, epsilon, h) grid in a fixed order."""
        return [(m, e, h) for m in self.mu for e in self.epsilon for h in self.resolutions]

    def to_dict(self):
        return asdict(self)


_SEQ = ("mu", "epsilon", "resolutions")


def _coerce(key, value, typ):
    try:
        if key in _SEQ:
            if isinstance(value, str):
                value = [v for v in value.replace("[", "").replace("]", "").split(",") if v.strip()]
            elif not isinstance(value, (list, tuple)):
                value = [value]
            return tuple(float(v) for v in value)
        if "None" in typ and (value is None or str(value).strip().lower() in ("none", "null", "")):
            return None
        if typ in ("float", "float | None"):
            return float(value)
        if typ == "int":
            return int(value)
        return str(value).strip()
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad value for {key!r}: {value!r}") from exc


def config_from_dict(d: dict) -> SweepConfig:
    if not isinstance(d, dict):
        raise ConfigError("config must be a mapping")
    d = dict(d)
    det = d.pop("detector", {}) or {}
    if not isinstance(det, dict):
        raise ConfigError("detector must be a mapping")
    top = {f.name: f.type for f in fields(SweepConfig) if f.name != "detector"}
    dk = {f.name: f.type for f in fields(DetectorConfig)}
    unknown = sorted(set(d) - set(top)) + sorted(set(det) - set(dk))
    if unknown:
        raise ConfigError(f"unknown config keys: {unknown}")
    for req in ("solver_id", "mu", "epsilon"):
        if req not in d:
            raise ConfigError(f"missing required key {req!r}")
    kw = {k: _coerce(k, v, top[k]) for k, v in d.items()}
    dkw = {k: _coerce(k, v, dk[k]) for k, v in det.items()}
    try:
        return SweepConfig(detector=DetectorConfig(**dkw), **kw)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def parse_config(text: str) -> SweepConfig:
    s = text.strip()
    if s.startswith("{"):
        try:
            return config_from_dict(json.loads(s))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON config: {exc}") from exc
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        try:
            cp.read_string(text)
        except configparser.MissingSectionHeaderError:
            cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
            cp.read_string("[sweep]\n" + text)
    except configparser.Error as exc:
        raise ConfigError(f"invalid config: {exc}") from exc
    d = dict(cp["sweep"]) if cp.has_section("sweep") else {}
    if cp.has_section("detector"):
        d["detector"] = dict(cp["detector"])
    extra = [s for s in cp.sections() if s not in ("sweep", "detector")]
    if extra:
        raise ConfigError(f"unknown sections: {extra}")
    return config_from_dict(d)


def load_config(path) -> SweepConfig:
    try:
        with open(path) as fh:
            return parse_config(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
