"""Suite runner and the JSON verification report."""
from __future__ import annotations

import json

import numpy as np

from .identities import check_commutators, check_forcing_decomposition
from .inequalities import check_inequalities, constant_stability
from .multiplier import check_multiplier_identity
from .wave import check_wave_reformulation

SUITES = ("commutators", "wave", "inequalities", "multiplier", "all")


def _commutators(quick):
    recs = check_commutators(max_order=2 if quick else 3, n_fields=20 if quick else 100)
    recs += [{"identity_id": f"forcing_decomposition alpha={r['alpha']}", **r}
             for r in check_forcing_decomposition()]
    return recs


def _inequalities(quick, seeds=(0, 1, 2)):
    reports = [check_inequalities(20 if quick else 100, seed=s) for s in (seeds[:1] if quick else seeds)]
    recs = [r for rep in reports for r in rep]
    if len(reports) > 1:
        for k, v in constant_stability(reports).items():
            recs.append({"inequality_id": f"{k} stability", "passed": v["stable"], **v})
    return recs


def run_suite(name="all", quick=False):
    """Records of one suite (or all); each has a boolean ``passed``."""
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; choose from {SUITES}")
    names = SUITES[:-1] if name == "all" else (name,)
    out = {}
    for n in names:
        if n == "commutators":
            out[n] = _commutators(quick)
        elif n == "wave":
            out[n] = [check_wave_reformulation()]
        elif n == "multiplier":
            out[n] = [check_multiplier_identity()]
        else:
            out[n] = _inequalities(quick)
    return out


def all_passed(results):
    return all(r["passed"] for recs in results.values() for r in recs)


def _jsonable(o):
    if isinstance(o, dict):
        return {str(k): _jsonable(v) for k, v in o.items()}
    if isinstance(o, (list, tuple)):
        return [_jsonable(v) for v in o]
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.bool_):
        return bool(o)
    if isinstance(o, float) and not np.isfinite(o):
        return str(o)
    return o


def write_report(results, path):
    doc = {"passed": all_passed(results), "suites": _jsonable(results)}
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1, sort_keys=True)
    return doc
