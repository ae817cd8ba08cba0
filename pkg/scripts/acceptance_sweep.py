"""Sweep (c, d) at n = 3 and tabulate the worst verifier residual per check.

Goes beyond the fixed acceptance set: several d values per ambient curvature.
"""
import argparse
import csv
import sys
import time
from fractions import Fraction

from lagforge.immersions import build
from lagforge.profile import ProfileParams, ProfileState, integrate
from lagforge.seeds import legendrian_torus, real_hyperbolic
from lagforge.verifier import VerifyConfig, run_report

D_VALUES = ["1/6", "1/4", "1/3", "2/3", "1", "3", "-1/2"]
# (c, branch, lam0, mu0, t_end, seed)
CASES = [(0, None, 1.0, -0.3, 1.0, "torus"), (1, None, 1.0, 0.3, 1.0, "torus"),
         (-1, 1, 0.5, 0.3, 0.5, "hyperbolic"), (-1, 2, 5.0, 0.3, 0.5, "torus")]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", help="CSV file (default stdout)")
    ap.add_argument("--points", type=int, default=4, help="grid points per axis")
    args = ap.parse_args()

    seeds = {"torus": legendrian_torus(3), "hyperbolic": real_hyperbolic(3)}
    rows, checks = [], None
    for c, branch, lam0, mu0, t_end, seed in CASES:
        for ds in D_VALUES:
            d = Fraction(ds)
            t0 = time.perf_counter()
            tr = integrate(ProfileParams(c, d), ProfileState(0.0, lam0, mu0), t_end, 1e-3)
            try:
                ch = build(tr, seeds[seed], branch or "auto")
                rep = run_report(ch, VerifyConfig(t_points=args.points, u_points=args.points))
            except ValueError as exc:
                print(f"c={c} d={ds}: skipped ({exc})", file=sys.stderr)
                continue
            checks = checks or sorted(rep.summary)
            rows.append([c, branch or "", ds, "PASS" if rep.passed else "FAIL"]
                        + [f"{rep.summary[k]['max']:.3e}" for k in checks] + [f"{time.perf_counter() - t0:.2f}"])
    w = csv.writer(open(args.out, "w", newline="") if args.out else sys.stdout)
    w.writerow(["c", "branch", "d", "status"] + (checks or []) + ["seconds"])
    w.writerows(rows)


if __name__ == "__main__":
    main()
