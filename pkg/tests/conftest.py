from fractions import Fraction

import numpy as np
import pytest
from hypothesis import settings

from lagforge.immersions import build_chn_lift, build_cpn_lift, build_flat
from lagforge.profile import ProfileParams, ProfileState, integrate
from lagforge.seeds import flat_line, legendrian_torus, real_hyperbolic

settings.register_profile("lagforge", deadline=None, max_examples=40, derandomize=True)
settings.load_profile("lagforge")


def traj(c, d, lam, mu, t_end=1.0, t0=0.0, step=1e-3):
    return integrate(ProfileParams(c, Fraction(d)), ProfileState(t0, lam, mu), t_end, step)


# (c, d, branch) -> chart, for n = 3; the set used by the round-trip criteria
def chart_set():
    torus = legendrian_torus(3)
    return {
        "flat d=1": build_flat(traj(0, 1, 1.0, 1.0), torus),
        "flat d=1/4": build_flat(traj(0, Fraction(1, 4), 1.0, -0.3), torus),
        "cpn d=1/4": build_cpn_lift(traj(1, Fraction(1, 4), 1.0, 0.3), torus),
        "cpn d=1/6": build_cpn_lift(traj(1, Fraction(1, 6), 1.0, 0.3), torus),
        "chn d=1/4 b1": build_chn_lift(traj(-1, Fraction(1, 4), 1.0, 0.3, 0.5), real_hyperbolic(3), 1),
        "chn d=1/4 b2": build_chn_lift(traj(-1, Fraction(1, 4), 5.0, 0.3, 0.5), torus, 2),
    }


@pytest.fixture(scope="session")
def charts():
    return chart_set()


@pytest.fixture(scope="session")
def branch3_n2():
    seed, w = flat_line()
    t = traj(-1, Fraction(1, 4), 4.0, 0.0)
    return {form: build_chn_lift(t, seed, 3, w, form) for form in ("printed", "derived")}


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_points(chart, k, rng, pad=0.02):
    lo = np.array([a for a, _ in chart.domain]) + pad
    hi = np.array([b for _, b in chart.domain]) - pad
    return lo + (hi - lo) * rng.random((k, chart.chart_dim))
