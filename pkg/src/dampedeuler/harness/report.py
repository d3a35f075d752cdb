"""CSV tables from a sweep directory."""
from __future__ import annotations

import csv
import math
import os

from .records import read_records
from .fit import MIN_SPAN
from .sweep import RECORDS_FILE, summarize_all

SLOPE_COLUMNS = ["config_hash", "solver_id", "mu", "law", "slope", "stderr", "predicted",
                 "rel_error", "side", "power_slope", "exponential_slope", "power_rss",
                 "exponential_rss", "n_points", "n_excluded", "fit_error"]
LIFESPAN_COLUMNS = ["config_hash", "solver_id", "mu", "epsilon", "inv_epsilon", "log_inv_epsilon",
                    "T_coarse", "T_fine", "T_b", "log_T_b"]


def slope_rows(results):
    for r in results:
        yield {
            "config_hash": r.config_hash, "solver_id": r.solver_id, "mu": r.mu, "law": r.law,
            "slope": r.slope, "stderr": r.stderr, "predicted": r.predicted,
            "rel_error": r.rel_error, "side": r.side,
            "power_slope": r.power["slope"] if r.power else None,
            "exponential_slope": r.exponential["slope"] if r.exponential else None,
            "power_rss": r.power["rss"] if r.power else None,
            "exponential_rss": r.exponential["rss"] if r.exponential else None,
            "n_points": len(r.epsilon), "n_excluded": len(r.excluded), "fit_error": r.fit_error,
        }


def lifespan_rows(results):
    for r in results:
        for e, tc, tf, t in zip(r.epsilon, r.T_coarse, r.T_fine, r.T_b):
            yield {"config_hash": r.config_hash, "solver_id": r.solver_id, "mu": r.mu,
                   "epsilon": e, "inv_epsilon": 1.0 / e, "log_inv_epsilon": math.log(1.0 / e),
                   "T_coarse": tc, "T_fine": tf, "T_b": t, "log_T_b": math.log(t)}


def _write(path, columns, rows):
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, columns)
        w.writeheader()
        for row in rows:
            w.writerow({k: ("" if v is None else v) for k, v in row.items()})


def write_report(directory, confirm_rtol=0.1, min_span=MIN_SPAN):
    """Writes slopes.csv and lifespans.csv next to records.jsonl; returns the results."""
    recs = read_records(os.path.join(directory, RECORDS_FILE))
    results = summarize_all(recs, confirm_rtol, min_span)
    _write(os.path.join(directory, "slopes.csv"), SLOPE_COLUMNS, slope_rows(results))
    _write(os.path.join(directory, "lifespans.csv"), LIFESPAN_COLUMNS, lifespan_rows(results))
    return results
