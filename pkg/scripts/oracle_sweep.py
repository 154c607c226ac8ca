"""Solver endpoints against the scalar endpoint recursion over a (beta, N) grid."""
import argparse
import time

import numpy as np

from svbsde.bsde import solve_condexp_form
from svbsde.oracles import interval_endpoints

from contraction_table import interval_problem


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--betas", type=float, nargs="+", default=[0.0, 0.5, 1.0, 2.0])
    ap.add_argument("--steps", type=int, nargs="+", default=[2, 4, 8, 10])
    ap.add_argument("--tol", type=float, default=1e-13)
    args = ap.parse_args()

    print(f"{'beta':>5} {'N':>4} {'iters':>6} {'max |err|':>11} {'seconds':>8}")
    worst = 0.0
    for beta in args.betas:
        for n in args.steps:
            if beta * 1.0 / n >= 1:
                continue
            prob = interval_problem(n, 1.0, beta)
            t0 = time.perf_counter()
            sol = solve_condexp_form(prob, tol=args.tol, max_iter=500)
            secs = time.perf_counter() - t0
            b = [np.array([body.interval_bounds() for body in s.bodies]) for s in sol.Y.slices]
            bt = prob.tree.walk(n)
            lo, hi = interval_endpoints(n, 1.0, beta, (0.0, 1.0), bt - 1.0, 1.0 + bt + bt * bt)
            err = max(max(np.abs(e[:, 0] - l).max(), np.abs(e[:, 1] - h).max()) for e, l, h in zip(b, lo, hi))
            worst = max(worst, err)
            print(f"{beta:>5g} {n:>4} {sol.diagnostics.iterations:>6} {err:>11.3e} {secs:>8.2f}")
    print(f"worst endpoint error {worst:.3e}")
    return 0 if worst <= 1e-10 else 1


if __name__ == "__main__":
    raise SystemExit(main())
