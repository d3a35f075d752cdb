import csv
import json
import os

import numpy as np
import pytest
from hypothesis import given, strategies as st

from dampedeuler.errors import ConfigError, HorizonExceeded, InsufficientData, Unconfirmed
from dampedeuler.harness import detect
from dampedeuler.harness.config import SweepConfig, config_from_dict, load_config, parse_config
from dampedeuler.harness.fit import confirm, fit_exponent, predicted_exponent
from dampedeuler.harness.records import RecordLog, RunRecord, read_records
from dampedeuler.harness.report import LIFESPAN_COLUMNS, SLOPE_COLUMNS, write_report
from dampedeuler.harness.sweep import RECORDS_FILE, RESULT_FILE, run_cell, run_sweep, summarize

BlowupDetector = detect.BlowupDetector


# detector -----------------------------------------------------------------

def _stream(ts, c1, margin=None):
    margin = np.full_like(ts, 10.0) if margin is None else margin
    return [{"t": t, "c1_norm": c, "amplitude": 1.0, "vacuum_margin": v}
            for t, c, v in zip(ts, c1, margin)]


def test_threshold_crossing_of_ode_blowup():
    ts = np.arange(0.0, 9.9999, 1e-4)
    T, did, val = detect.detect_blowup(_stream(ts, 1.0 / (10.0 - ts)),
                                       BlowupDetector(monitor="c1", threshold=100.0))
    assert T == pytest.approx(9.99, abs=1e-6)
    assert did == "c1-threshold" and val >= 100.0


def test_vacuum_fires_first():
    ts = np.linspace(0, 8, 81)
    T, did, _ = detect.detect_blowup(_stream(ts, np.ones_like(ts), 1.0 - 0.19 * ts),
                                     BlowupDetector(monitor="c1", threshold=100.0, gamma=2.0))
    assert did == "vacuum"
    assert T == pytest.approx(5.0, abs=1e-12)


def test_no_trigger_raises():
    ts = np.linspace(0, 3, 10)
    with pytest.raises(HorizonExceeded):
        detect.detect_blowup(_stream(ts, np.ones_like(ts)), BlowupDetector(monitor="c1"))


def test_factor_and_steepening_monitor():
    det = BlowupDetector(factor=3.0)
    base = {"t": 0.0, "c1_norm": 4.0, "amplitude": 2.0, "vacuum_margin": 1.0, "steepness_ref": 2.0}
    assert det.value(base) == 1.0
    assert det.update(base) is None
    hit = det.update(dict(base, t=1.0, c1_norm=16.0))
    assert hit["T_b"] == pytest.approx(2.0 / 3.0)
    with pytest.raises(ValueError):
        BlowupDetector(monitor="nope")


def test_zero_amplitude_run_reaches_horizon():
    cfg = SweepConfig(solver_id="psystem1d", mu=(0.0,), epsilon=(0.1,), resolutions=(0.02, 0.01),
                      horizon=2.0)
    rec = run_cell(cfg, 0.0, 1e-12, 0.02)
    assert rec.status == "error" and rec.error.startswith("HorizonExceeded")


# fits ---------------------------------------------------------------------

EPS = np.array([0.4, 0.2, 0.1, 0.05])


def test_power_fit_exact():
    f = fit_exponent(EPS, 10.0 * EPS**-3.0)
    assert f.law == "power" and f.n == 4
    assert f.slope == pytest.approx(3.0, abs=1e-12)
    assert f.intercept == pytest.approx(np.log(10.0), abs=1e-12)
    assert f.rss < 1e-20


@given(st.floats(0.5, 4.0), st.floats(1e-3, 1e3), st.floats(0.01, 100.0))
def test_power_fit_scale_invariant(p, c, lam):
    T = c * EPS**-p
    a = fit_exponent(EPS, T).slope
    b = fit_exponent(EPS, lam * T).slope
    assert a == pytest.approx(p, rel=1e-9)
    assert b == pytest.approx(a, rel=1e-9)


def test_insufficient_data():
    with pytest.raises(InsufficientData):
        fit_exponent(EPS[:3], EPS[:3] ** -2)
    with pytest.raises(InsufficientData):
        fit_exponent([0.4, 0.3, 0.25, 0.2], [1, 2, 3, 4])
    with pytest.raises(InsufficientData):
        fit_exponent(EPS, [1, 2, -1, 4])


def test_auto_law_selection():
    T_exp = np.exp(0.3 / EPS)
    assert fit_exponent(EPS, T_exp, "auto", mu=1.2).law == "exponential"
    assert fit_exponent(EPS, T_exp, "auto", mu=0.5).law == "power"
    assert fit_exponent(EPS, EPS**-2.0, "auto", mu=1.2).law == "power"
    with pytest.raises(ValueError):
        fit_exponent(EPS, T_exp, "exponential", mu=0.5)


def test_predicted_exponents():
    assert predicted_exponent("radial", 0.5) == pytest.approx(4.0)
    assert predicted_exponent("psystem1d", 1.5) == pytest.approx(4.0)
    assert predicted_exponent("psystem1d", 0.0) == pytest.approx(1.0)
    assert predicted_exponent("radial", 0.0) == pytest.approx(2.0)
    assert predicted_exponent("radial", 1.0) is None


def test_confirm():
    assert confirm(10.0, 10.5) == pytest.approx(11.0)
    with pytest.raises(Unconfirmed):
        confirm(10.0, 12.0)
    with pytest.raises(Unconfirmed):
        confirm(None, 1.0)


# config -------------------------------------------------------------------

INI = """
[sweep]
solver_id = radial
mu = 0, 0.5
epsilon = 0.4, 0.2
resolutions = 0.01, 0.005
limiter = none
width = none
[detector]
factor = 3
"""


def test_parse_ini_and_json(tmp_path):
    a = parse_config(INI)
    assert a.mu == (0.0, 0.5) and a.limiter == "none" and a.width is None
    assert a.detector.factor == 3.0
    b = parse_config(json.dumps({"solver_id": "radial", "mu": [0, 0.5], "epsilon": [0.4, 0.2],
                                 "resolutions": [0.01, 0.005], "limiter": "none",
                                 "detector": {"factor": 3}}))
    assert a.config_hash == b.config_hash
    p = tmp_path / "c.ini"
    p.write_text(INI)
    assert load_config(p) == a


def test_hash_ignores_bookkeeping():
    base = dict(solver_id="psystem1d", mu=(0.0,), epsilon=(0.1,))
    a = SweepConfig(**base)
    assert a.config_hash == SweepConfig(**base, output_dir="x", workers=4, name="n").config_hash
    assert a.config_hash != SweepConfig(**base, cfl=0.5).config_hash


@pytest.mark.parametrize("bad", [
    "{not json", "[sweep]\nsolver_id = psystem3d\nmu = 0\nepsilon = 0.1",
    "[sweep]\nsolver_id = radial\nmu = 0\nepsilon = -1",
    "[sweep]\nsolver_id = radial\nmu = 0\nepsilon = 0.1\nbogus = 1",
    "[sweep]\nsolver_id = radial\nmu = 0",
    "[sweep]\nsolver_id = radial\nmu = 0\nepsilon = 0.1\nresolutions = 0.01, 0.02",
    "[sweep]\nsolver_id = radial\nmu = 0\nepsilon = 0.1\ncfl = abc",
    "[sweep]\nsolver_id = radial\nmu = 0\nepsilon = 0.1\n[extra]\nx = 1",
])
def test_config_errors(bad):
    with pytest.raises(ConfigError):
        parse_config(bad)


def test_missing_config_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "nope.ini")
    with pytest.raises(ConfigError):
        config_from_dict([1, 2])


# records ------------------------------------------------------------------

def _rec(eps, h=0.01, T=1.0):
    return RunRecord("abc", "psystem1d", 0.0, eps, 2.0, 1.0, "bump", h, "ok", T, "c1-threshold", 2.0)


def test_record_log_repairs_torn_line(tmp_path):
    path = tmp_path / "r.jsonl"
    log = RecordLog(str(path))
    log.append(_rec(0.1))
    with open(path, "a") as fh:
        fh.write('{"config_hash": "abc", "solv')
    assert len(read_records(path)) == 1
    RecordLog(str(path)).append(_rec(0.2))
    recs = read_records(path)
    assert [r.epsilon for r in recs] == [0.1, 0.2]
    assert path.read_text().count("\n") == 2


def test_record_validation():
    with pytest.raises(ValueError):
        RunRecord("abc", "radial", 0.0, 0.1, 2.0, 1.0, "bump", 0.01, "ok", None)


def test_summarize_excludes_unconfirmed():
    recs = [_rec(e, h, T) for e, Tc, Tf in ((0.4, 1.0, 1.02), (0.2, 2.0, 3.0), (0.1, 4.0, 4.1),
                                            (0.05, 8.0, 8.1), (0.025, 16.0, 16.1))
            for h, T in ((0.02, Tc), (0.01, Tf))]
    out = summarize(recs, "abc", "psystem1d", 0.0)
    assert out.epsilon == [0.4, 0.1, 0.05, 0.025]
    assert out.excluded[0]["epsilon"] == 0.2
    assert out.predicted == 1.0 and out.slope is not None and out.side in ("below", "above")


# sweeps -------------------------------------------------------------------

def small_cfg(tmp_path, name="a", **kw):
    base = dict(solver_id="psystem1d", mu=(0.0, 1.0), epsilon=(0.4, 0.2, 0.1), resolutions=(0.02, 0.01),
                limiter="none", output_dir=str(tmp_path / name))
    base.update(kw)
    return SweepConfig(**base)


def _result_bytes(cfg):
    with open(os.path.join(cfg.output_dir, RESULT_FILE), "rb") as fh:
        return fh.read()


def test_empty_epsilon_gives_empty_result(tmp_path):
    cfg = small_cfg(tmp_path, epsilon=())
    res, n = run_sweep(cfg)
    assert res == [] and n == 0
    assert json.loads(_result_bytes(cfg)) == []


def test_resume_and_interrupt(tmp_path):
    full = small_cfg(tmp_path, "full")
    res, n = run_sweep(full)
    assert n == 12
    first = _result_bytes(full)
    assert run_sweep(full)[1] == 0
    assert _result_bytes(full) == first

    part = small_cfg(tmp_path, "part")
    assert run_sweep(part, max_new_runs=5)[1] == 5
    with open(os.path.join(part.output_dir, RECORDS_FILE), "a") as fh:
        fh.write('{"config_hash": "')  # torn write at the interrupt
    assert run_sweep(part)[1] == 7
    assert _result_bytes(part) == first
    assert len(read_records(os.path.join(part.output_dir, RECORDS_FILE))) == 12


def test_worker_count_independence(tmp_path):
    a = small_cfg(tmp_path, "w1", mu=(0.0,))
    b = small_cfg(tmp_path, "w3", mu=(0.0,), workers=3)
    run_sweep(a)
    run_sweep(b)
    assert _result_bytes(a) == _result_bytes(b)


def test_report_csvs(tmp_path):
    cfg = small_cfg(tmp_path, "rep", mu=(0.0,), epsilon=(0.4, 0.2, 0.1, 0.05), resolutions=(0.01, 0.005),
                    confirm_rtol=1.0)
    run_sweep(cfg)
    results = write_report(cfg.output_dir, confirm_rtol=1.0)
    with open(os.path.join(cfg.output_dir, "slopes.csv")) as fh:
        rows = list(csv.DictReader(fh))
    assert list(rows[0]) == SLOPE_COLUMNS and len(rows) == 1
    assert float(rows[0]["slope"]) == pytest.approx(results[0].slope)
    with open(os.path.join(cfg.output_dir, "lifespans.csv")) as fh:
        life = list(csv.DictReader(fh))
    assert list(life[0]) == LIFESPAN_COLUMNS and len(life) == 4


def test_shipped_configs_parse():
    root = os.path.join(os.path.dirname(__file__), os.pardir, "scripts", "configs")
    for name in sorted(os.listdir(root)):
        cfg = load_config(os.path.join(root, name))
        assert cfg.limiter == "none" and cfg.slope_tolerance is not None


def test_headerless_and_commented_ini():
    a = parse_config("# note\nsolver_id = radial\nmu = 0\nepsilon = 0.1\n")
    b = parse_config("# note\n[sweep]\nsolver_id = radial\nmu = 0\nepsilon = 0.1\n")
    assert a == b


def test_min_span_is_configurable():
    eps = [0.35, 0.25, 0.18, 0.13]
    T = [e**-4.0 for e in eps]
    with pytest.raises(InsufficientData):
        fit_exponent(eps, T)
    assert fit_exponent(eps, T, min_span=2.5).slope == pytest.approx(4.0)
    with pytest.raises(ConfigError):
        SweepConfig(solver_id="radial", mu=(0.5,), epsilon=(0.1,), min_span=0.5)
