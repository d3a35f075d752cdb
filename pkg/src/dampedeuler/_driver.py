"""Shared run-to-blow-up loop for the 1-D and radial solvers."""
from __future__ import annotations

import time
from dataclasses import replace

import numpy as np

from .errors import CFLCollapse, HorizonExceeded, VacuumError

# amplitude of the linear companion run relative to the real one
REFERENCE_SCALE = 1e-6


def run_to_blowup(module, make_solver, spec, p, detector, h, width, horizon,
                  report_stride=None, on_report=None):
    """Advance ``module.initial_state`` with ``make_solver(p)`` until ``detector`` fires.

    When the detector needs a linear reference (``detector.needs_reference``) a
    companion run with amplitude REFERENCE_SCALE*eps is advanced to the same
    time levels and its steepness is passed along as ``steepness_ref``.
    """
    solver = make_solver(p)
    s = module.initial_state(spec, p, h, width)
    ref = None
    if getattr(detector, "needs_reference", False):
        p_ref = replace(p, epsilon=p.epsilon * REFERENCE_SCALE)
        ref_solver = make_solver(p_ref)
        ref = module.initial_state(spec, p_ref, h, width)
    wall0 = time.perf_counter()
    detector.reset()
    next_report = 0.0
    while True:
        m = module.monitors(s, p)
        if ref is not None:
            mr = module.monitors(ref, p_ref)
            m["steepness_ref"] = mr["c1_norm"] / mr["amplitude"] if mr["amplitude"] > 0 else 0.0
        if on_report is not None and report_stride is not None and s.t >= next_report:
            on_report(m)
            next_report += report_stride
        hit = detector.update(m)
        if hit is not None:
            break
        if s.t >= horizon:
            raise HorizonExceeded(f"no blow-up before t={horizon}", horizon=horizon)
        # monitor roughly every 0.2% of elapsed time, at least every step
        chunk = int(min(max(2e-3 * s.t * solver.max_speed(s) / (solver.cfl * h), 1), 200))
        try:
            s = solver.advance(s, chunk)
        except CFLCollapse as exc:
            hit = detector.fire("cfl-collapse", exc.t, exc.dt)
            break
        except VacuumError:
            hit = detector.fire("vacuum", s.t, 0.0)
            break
        if ref is not None:
            ref = ref_solver.advance(ref, np.iinfo(np.int64).max, t_stop=s.t)
    hit = dict(hit)
    hit.update(h=h, wall_time=time.perf_counter() - wall0, solver_id=module.SOLVER_ID)
    return hit
