"""Parallel (mu, eps, h) sweeps with resumable JSON-lines persistence."""
from __future__ import annotations

import json
import os
import traceback
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import asdict, dataclass, field

from ..errors import InsufficientData, Unconfirmed
from ..model import EquationParams, InitialDataSpec
from .config import SweepConfig
from .fit import MIN_SPAN, confirm, fit_exponent, predicted_exponent
from .records import RecordLog, RunRecord, read_records

RECORDS_FILE = "records.jsonl"
RESULT_FILE = "sweep_result.json"


def run_cell(cfg: SweepConfig, mu, eps, h) -> RunRecord:
    """One solver run; every failure becomes an error record."""
    from ..solver1d import run_to_blowup_1d
    from ..solver_radial import run_to_blowup_radial

    base = dict(config_hash=cfg.config_hash, solver_id=cfg.solver_id, mu=mu, epsilon=eps,
                gamma=cfg.gamma, lam=cfg.lam, profile=cfg.profile, h=h)
    try:
        p = EquationParams(mu=mu, gamma=cfg.gamma, epsilon=eps, lam=cfg.lam)
        det = cfg.detector.build(cfg.gamma)
        run = run_to_blowup_1d if cfg.solver_id == "psystem1d" else run_to_blowup_radial
        kw = {"half_width" if cfg.solver_id == "psystem1d" else "r_max": cfg.default_width}
        hit = run(InitialDataSpec(cfg.profile), p, det, h=h, cfl=cfg.cfl, horizon=cfg.horizon,
                  limiter=cfg.limiter, **kw)
        return RunRecord(status="ok", T_b=hit["T_b"], detector_id=hit["detector_id"],
                         detector_value=hit["detector_value"], wall_time=hit["wall_time"], **base)
    except Exception as exc:  # recorded, never propagated
        msg = f"{type(exc).__name__}: {exc}"
        if not hasattr(exc, "horizon"):
            msg += " | " + traceback.format_exc(limit=2).strip().splitlines()[-1]
        return RunRecord(status="error", error=msg, **base)


def _run_cell_args(args):
    return run_cell(*args)


@dataclass
class SweepResult:
    solver_id: str
    mu: float
    config_hash: str
    epsilon: list
    T_b: list
    T_coarse: list
    T_fine: list
    excluded: list = field(default_factory=list)
    law: str | None = None
    slope: float | None = None
    stderr: float | None = None
    predicted: float | None = None
    rel_error: float | None = None
    side: str | None = None
    exponential: dict | None = None
    power: dict | None = None
    fit_error: str | None = None

    def to_dict(self):
        return asdict(self)


def summarize(records, config_hash, solver_id, mu, confirm_rtol=0.1, min_span=MIN_SPAN):
    """SweepResult for one (hash, solver, mu) from its records (order-independent)."""
    recs = [r for r in records if r.config_hash == config_hash and r.solver_id == solver_id
            and r.mu == mu]
    hs = sorted({r.h for r in recs}, reverse=True)
    by = {(r.epsilon, r.h): r for r in recs}
    out = SweepResult(solver_id, mu, config_hash, [], [], [], [])
    for eps in sorted({r.epsilon for r in recs}, reverse=True):
        if len(hs) < 2:
            out.excluded.append({"epsilon": eps, "reason": "single resolution"})
            continue
        rc, rf = by.get((eps, hs[0])), by.get((eps, hs[-1]))
        if rc is None or rf is None:
            out.excluded.append({"epsilon": eps, "reason": "missing run"})
            continue
        if rc.status != "ok" or rf.status != "ok":
            out.excluded.append({"epsilon": eps, "reason": rc.error or rf.error})
            continue
        try:
            T = confirm(rc.T_b, rf.T_b, confirm_rtol)
        except Unconfirmed as exc:
            out.excluded.append({"epsilon": eps, "reason": f"unconfirmed: {exc}",
                                 "T_coarse": rc.T_b, "T_fine": rf.T_b})
            continue
        out.epsilon.append(eps)
        out.T_b.append(T)
        out.T_coarse.append(rc.T_b)
        out.T_fine.append(rf.T_b)
    out.predicted = predicted_exponent(solver_id, mu)
    try:
        pw = fit_exponent(out.epsilon, out.T_b, "power", min_span=min_span)
        out.power = pw.to_dict()
        best = fit_exponent(out.epsilon, out.T_b, "auto", mu, min_span)
        if mu >= 0.9:
            out.exponential = fit_exponent(out.epsilon, out.T_b, "exponential", mu, min_span).to_dict()
        out.law, out.slope, out.stderr = best.law, best.slope, best.stderr
        if out.predicted is not None:
            out.rel_error = abs(pw.slope - out.predicted) / out.predicted
            out.side = "below" if pw.slope < out.predicted else "above"
    except InsufficientData as exc:
        out.fit_error = str(exc)
    return out


def summarize_all(records, confirm_rtol=0.1, min_span=MIN_SPAN):
    keys = sorted({(r.config_hash, r.solver_id, r.mu) for r in records})
    return [summarize(records, *k, confirm_rtol=confirm_rtol, min_span=min_span) for k in keys]


def result_json(results):
    """Canonical serialisation: sorted keys, no timing information."""
    return json.dumps([r.to_dict() for r in results], sort_keys=True, indent=1) + "\n"


def run_sweep(cfg: SweepConfig, workers: int | None = None, max_new_runs: int | None = None,
              log=None):
    """Run every (mu, eps, h) cell not yet recorded under this config hash,
    then summarise. ``max_new_runs`` stops early (used to emulate interrupts)."""
    os.makedirs(cfg.output_dir, exist_ok=True)
    path = os.path.join(cfg.output_dir, RECORDS_FILE)
    appender = RecordLog(path)
    h = cfg.config_hash
    done = {r.cell for r in read_records(path) if r.config_hash == h}
    from .records import cell_key
    todo = [c for c in cfg.cells() if cell_key(cfg.solver_id, *c) not in done]
    if max_new_runs is not None:
        todo = todo[:max_new_runs]
    workers = workers or cfg.workers
    if todo:
        if workers == 1:
            for c in todo:
                rec = run_cell(cfg, *c)
                appender.append(rec)
                if log:
                    log(rec)
        else:
            with ProcessPoolExecutor(max_workers=workers) as ex:
                futs = [ex.submit(_run_cell_args, (cfg, *c)) for c in todo]
                for f in as_completed(futs):
                    rec = f.result()
                    appender.append(rec)
                    if log:
                        log(rec)
    records = [r for r in read_records(path) if r.config_hash == h]
    results = [summarize(records, h, cfg.solver_id, m, cfg.confirm_rtol, cfg.min_span)
               for m in sorted(set(cfg.mu))]
    if not cfg.epsilon:
        results = []
    with open(os.path.join(cfg.output_dir, RESULT_FILE), "w") as fh:
        fh.write(result_json(results))
    return results, len(todo)
