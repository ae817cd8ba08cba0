"""Write (lambda, mu) phase-portrait CSVs for a fan of initial conditions.

One file per curvature c in {-1, 0, 1}; columns: run, t, lambda, mu, q_factor.
"""
import argparse
import csv
from fractions import Fraction
from pathlib import Path

import numpy as np

from lagforge.profile import ProfileParams, ProfileState, integrate


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--d", default="1/4")
    ap.add_argument("--out", default="phase_portraits")
    ap.add_argument("--t-end", type=float, default=1.0)
    ap.add_argument("--runs", type=int, default=12)
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    d = Fraction(args.d)

    rng = np.random.default_rng(0)
    starts = np.column_stack([rng.uniform(0.2, 3.0, args.runs), rng.uniform(-1.5, 1.5, args.runs)])
    for c in (-1, 0, 1):
        path = out / f"phase_c{c:+d}.csv"
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["run", "t", "lambda", "mu", "q_factor"])
            for i, (lam0, mu0) in enumerate(starts):
                tr = integrate(ProfileParams(c, d), ProfileState(0.0, lam0, mu0), args.t_end, 1e-3)
                for row in zip(tr.t, tr.lam, tr.mu, tr.q_factor()):
                    w.writerow([i] + [f"{v:.17g}" for v in row])
                if tr.truncated:
                    print(f"c={c} run {i}: truncated ({tr.reason})")
        print(f"wrote {path}")


if __name__ == "__main__":
    main()
