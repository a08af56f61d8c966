"""Pilot runs for the convergence and discontinuity checks.

Prints, per replication, the distance from the selected region to the
optimum and the value-estimate error, then the pass counts.

    python scripts/pilot_convergence.py abs_peak
    python scripts/pilot_convergence.py step_sphere
"""

import argparse
import time

import numpy as np

from rtsopt.objective import NoiseSpec, make_objective
from rtsopt.search import SearchConfig, run_search

SETUPS = {
    # d=1, -|x - 0.3| on [0, 1], maximized
    "abs_peak": dict(
        objective=dict(name="abs_peak", dim=1, center=0.3),
        noise=0.1, budget=20000, n0=500, dist_tol=0.05, est_tol=0.05,
    ),
    # ||x - c||^2 + 5 * 1{||x - c|| > 0.2} on [-1, 1]^2, minimized
    "step_sphere": dict(
        objective=dict(name="step_sphere", dim=2, center=[0.3, -0.2], radius=0.2, jump=5.0),
        noise=0.05, budget=4000, n0=300, dist_tol=0.1, est_tol=None,
    ),
}


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("setup", choices=sorted(SETUPS))
    ap.add_argument("--reps", type=int, default=20)
    ap.add_argument("--seed0", type=int, default=0)
    args = ap.parse_args()
    s = SETUPS[args.setup]
    obj = make_objective(**s["objective"])
    x_opt, v_opt = obj.known_optimum
    t0 = time.time()
    n_dist = n_est = 0
    for r in range(args.reps):
        cfg = SearchConfig(budget=s["budget"], n0=s["n0"], seed=args.seed0 + r)
        res = run_search(obj, NoiseSpec.gaussian(s["noise"]), cfg)
        dist = res.dist_to(x_opt)
        err = abs(res.estimate - v_opt)
        n_dist += dist <= s["dist_tol"]
        n_est += s["est_tol"] is not None and err <= s["est_tol"]
        print(f"rep {r:3d}  dist={dist:.4f}  |est-opt|={err:.4f}  depth={res.max_depth}"
              f"  leaves={res.leaf_count}")
    print(f"{args.setup}: dist<= {s['dist_tol']} in {n_dist}/{args.reps}; "
          f"|est|<= {s['est_tol']} in {n_est}/{args.reps}; {time.time() - t0:.1f}s")


if __name__ == "__main__":
    main()
