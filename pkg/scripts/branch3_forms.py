"""Compare the two closed forms of the c = -1, Q = 0 immersion on a flat-line seed.

Prints the norm-constraint error and the verifier outcome for each form.
"""
import argparse
from fractions import Fraction

import numpy as np

from lagforge.immersions import build_chn_lift
from lagforge.linalg import hermitian_inner
from lagforge.profile import ProfileParams, ProfileState, integrate
from lagforge.seeds import flat_line
from lagforge.verifier import VerifyConfig, run_report


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--d", default="1/4")
    ap.add_argument("--mu0", type=float, default=0.0)
    ap.add_argument("--t-end", type=float, default=1.0)
    args = ap.parse_args()

    d = Fraction(args.d)
    lam0 = np.sqrt(1 - args.mu0**2) / abs(float(d))  # puts the start on Q = 0
    traj = integrate(ProfileParams(-1, d), ProfileState(0.0, lam0, args.mu0), args.t_end, 1e-3)
    seed, w = flat_line()
    for form in ("printed", "derived"):
        ch = build_chn_lift(traj, seed, 3, w, form)
        pts = ch.grid(9, 9, 0.01)
        L = ch(pts)
        err = np.max(np.abs(hermitian_inner(L, L, ch.ambient) + 1))
        rep = run_report(ch, VerifyConfig())
        failed = [k for k, s in rep.summary.items() if not s["passed"]]
        print(f"{form:8s} max |<L,L> + 1| = {err:.3e}  verifier: {'PASS' if rep.passed else 'FAIL'}"
              + (f" ({', '.join(failed)})" if failed else ""))


if __name__ == "__main__":
    main()
