"""Command line entry point.

    dampedeuler sweep <config> [--workers N]
    dampedeuler verify [--suite commutators|wave|inequalities|multiplier|all] [--quick] [--out FILE]
    dampedeuler diagnose <snapshot> [--k K] [--h2d H]
    dampedeuler fit <records.jsonl>
    dampedeuler report <dir>

Exit codes: 0 success, 2 acceptance failure, 3 configuration error.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import asdict

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 2, 3

log = logging.getLogger("dampedeuler")


def _sweep(args):
    from .harness.config import load_config
    from .harness.report import write_report
    from .harness.sweep import run_sweep

    cfg = load_config(args.config)
    res, n_new = run_sweep(cfg, workers=args.workers,
                           log=lambda r: log.info("%s mu=%g eps=%g h=%g -> %s", r.solver_id, r.mu,
                                                  r.epsilon, r.h, r.T_b if r.status == "ok" else r.error))
    write_report(cfg.output_dir, cfg.confirm_rtol, cfg.min_span)
    ok = True
    for r in res:
        if r.fit_error:
            print(f"mu={r.mu:g}: no fit ({r.fit_error})")
            ok = False
            continue
        line = f"mu={r.mu:g}: {r.law} slope {r.slope:.4f} +- {r.stderr:.4f}"
        if r.predicted is not None:
            line += f", predicted {r.predicted:g} ({r.side}, rel. error {r.rel_error:.1%})"
            if cfg.slope_tolerance is not None and r.rel_error > cfg.slope_tolerance:
                ok = False
        print(line)
    print(f"{n_new} new runs; results in {cfg.output_dir}")
    if cfg.slope_tolerance is None:
        return EXIT_OK
    return EXIT_OK if ok else EXIT_FAIL


def _verify(args):
    from .verify.report import all_passed, run_suite, write_report

    res = run_suite(args.suite, quick=args.quick)
    for suite, recs in res.items():
        bad = [r for r in recs if not r["passed"]]
        print(f"{suite}: {len(recs) - len(bad)}/{len(recs)} passed")
        for r in bad:
            print("  FAIL", r.get("identity_id") or r.get("inequality_id") or r)
    if args.out:
        write_report(res, args.out)
    return EXIT_OK if all_passed(res) else EXIT_FAIL


def _diagnose(args):
    from .diagnostics.energies import embed_radial, energy_report
    from .model import PrimitiveState, read_snapshot, to_sound_state
    from .errors import ConfigError

    try:
        state, p, _ = read_snapshot(args.snapshot)
    except (OSError, ValueError, KeyError) as exc:
        raise ConfigError(f"cannot read snapshot {args.snapshot}: {exc}") from exc
    if p is None:
        raise ConfigError("snapshot carries no equation parameters")
    if isinstance(state, PrimitiveState):
        state = to_sound_state(state, p)
    if state.mesh.kind == "radial":
        state = embed_radial(state, args.h2d)
    elif state.mesh.kind != "cart2d":
        raise ConfigError("diagnose needs a cart2d or radial snapshot")
    rep = energy_report(state, p, k=args.k)
    print(json.dumps(asdict(rep), indent=1))
    return EXIT_OK


def _fit(args):
    from .errors import ConfigError
    from .harness.records import read_records
    from .harness.sweep import result_json, summarize_all

    if not os.path.exists(args.records):
        raise ConfigError(f"no such file {args.records}")
    sys.stdout.write(result_json(summarize_all(read_records(args.records), args.confirm_rtol, args.min_span)))
    return EXIT_OK


def _report(args):
    from .errors import ConfigError
    from .harness.report import write_report
    from .harness.sweep import RECORDS_FILE

    if not os.path.exists(os.path.join(args.dir, RECORDS_FILE)):
        raise ConfigError(f"{args.dir} has no {RECORDS_FILE}")
    res = write_report(args.dir, args.confirm_rtol, args.min_span)
    print(f"{len(res)} sweep groups -> {os.path.join(args.dir, 'slopes.csv')}, "
          f"{os.path.join(args.dir, 'lifespans.csv')}")
    return EXIT_OK


def build_parser():
    from .verify.report import SUITES

    ap = argparse.ArgumentParser(prog="dampedeuler", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="cmd", required=True)
    s = sub.add_parser("sweep", help="run a (mu, eps, h) sweep")
    s.add_argument("config")
    s.add_argument("--workers", type=int, default=None)
    s.set_defaults(fn=_sweep)
    s = sub.add_parser("verify", help="identity / convergence / inequality checks")
    s.add_argument("--suite", choices=SUITES, default="all")
    s.add_argument("--quick", action="store_true", help="fewer fields and seeds")
    s.add_argument("--out", default=None, help="write the JSON report here")
    s.set_defaults(fn=_verify)
    s = sub.add_parser("diagnose", help="energies of a snapshot")
    s.add_argument("snapshot")
    s.add_argument("--k", type=int, default=2)
    s.add_argument("--h2d", type=float, default=0.01, help="grid for embedding radial snapshots")
    s.set_defaults(fn=_diagnose)
    s = sub.add_parser("fit", help="fit lifespan laws from a records file")
    s.add_argument("records")
    s.add_argument("--confirm-rtol", type=float, default=0.1)
    s.add_argument("--min-span", type=float, default=4.0, help="smallest eps_max/eps_min to fit")
    s.set_defaults(fn=_fit)
    s = sub.add_parser("report", help="CSV tables for a sweep directory")
    s.add_argument("dir")
    s.add_argument("--confirm-rtol", type=float, default=0.1)
    s.add_argument("--min-span", type=float, default=4.0, help="smallest eps_max/eps_min to fit")
    s.set_defaults(fn=_report)
    return ap


def main(argv=None):
    from .errors import ConfigError

    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(asctime)s %(levelname)s %(message)s")
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
