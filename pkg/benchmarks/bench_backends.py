#!/usr/bin/env python3
"""Compare the compiled and pure-Python inner-kernel backends.

The backend is fixed at import time by ``QCC_BACKEND``, so each
measurement runs in a fresh subprocess.  Three workloads are timed:

* ``commutator``: a 200-point inner commutator profile (the hot loop
  behind every S2 / interaction-energy quadrature);
* ``field``: the matching 200-point field-energy profile;
* ``report``: one full end-to-end signalling report for the shipped
  2+1D demo configuration.

Besides the timings, the two backends' profile arrays are compared
point by point and the largest disagreement is reported.

Usage::

    python benchmarks/bench_backends.py [--repeat N] [--points M]
"""

import argparse
import json
import os
import subprocess
import sys
import time

HERE = os.path.dirname(os.path.abspath(__file__))
ROOT = os.path.dirname(HERE)
DEMO_CFG = os.path.join(ROOT, "configs", "demo_2p1.cfg")

# demo-style inner-profile arguments: 2 spatial dimensions, unit
# separation, gap-3 Alice switched on over [0, 3]
PROFILE_ARGS = dict(spatial_dim=2, L=1.0, om=3.0, cr=0.5, ci=-0.5,
                    a_on=0.0, a_off=3.0, tol=1e-11)


def run_worker(repeat, points):
    import numpy as np

    from qcc._core import (
        backend_name,
        inner_commutator_profile,
        inner_field_profile,
    )
    from qcc.config import load_config
    from qcc.signalling import signalling_report

    ts = np.linspace(4.5, 11.5, points)
    a = PROFILE_ARGS

    def time_best(fn):
        best = float("inf")
        for _ in range(repeat):
            t0 = time.perf_counter()
            fn()
            best = min(best, time.perf_counter() - t0)
        return best * 1e3  # ms

    comm = lambda: inner_commutator_profile(
        ts, a["spatial_dim"], a["L"], a["om"], a["cr"], a["ci"],
        a["a_on"], a["a_off"], a["tol"])
    field = lambda: inner_field_profile(
        ts, a["L"], a["om"], a["cr"], a["ci"], a["a_on"], a["a_off"],
        a["tol"])
    scenario = load_config(DEMO_CFG).scenario
    report = lambda: signalling_report(scenario, tol=1e-8)

    payload = {
        "backend": backend_name,
        "commutator_ms": time_best(comm),
        "field_ms": time_best(field),
        "report_ms": time_best(report),
        "commutator_values": list(comm()[0]),
        "field_values": list(field()[0]),
    }
    json.dump(payload, sys.stdout)


def run_backend(backend, repeat, points):
    env = dict(os.environ, QCC_BACKEND=backend)
    proc = subprocess.run(
        [sys.executable, os.path.abspath(__file__), "--worker",
         "--repeat", str(repeat), "--points", str(points)],
        env=env, capture_output=True, text=True)
    if proc.returncode != 0:
        sys.stderr.write(proc.stderr)
        raise SystemExit(f"{backend} worker failed")
    out = json.loads(proc.stdout)
    assert out["backend"] == backend, out["backend"]
    return out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=7,
                    help="timing repetitions per workload (best is kept)")
    ap.add_argument("--points", type=int, default=200,
                    help="evaluation points per profile")
    ap.add_argument("--worker", action="store_true", help=argparse.SUPPRESS)
    args = ap.parse_args(argv)

    if args.worker:
        run_worker(args.repeat, args.points)
        return 0

    results = {b: run_backend(b, args.repeat, args.points)
               for b in ("python", "compiled")}

    print(f"{args.points}-point profiles, best of {args.repeat} runs\n")
    print(f"{'workload':<14}{'python':>12}{'compiled':>12}{'speedup':>10}")
    for key, label in (("commutator_ms", "commutator"),
                       ("field_ms", "field"),
                       ("report_ms", "report")):
        py, cy = results["python"][key], results["compiled"][key]
        print(f"{label:<14}{py:>10.3f} ms{cy:>10.3f} ms{py / cy:>9.1f}x")

    worst = 0.0
    for key in ("commutator_values", "field_values"):
        a = results["python"][key]
        b = results["compiled"][key]
        worst = max(worst, max(abs(x - y) for x, y in zip(a, b)))
    print(f"\nlargest backend disagreement: {worst:.3e}")
    if worst > 1e-10:
        print("WARNING: backends disagree beyond 1e-10", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
