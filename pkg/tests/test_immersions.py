from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import quad

from conftest import random_points, traj
from lagforge.immersions import (BranchError, BuildError, CumulativeIntegral, build, build_chn_lift, build_cpn_lift,
                                 build_flat, check_d, graph_chart, hopf_project, select_branch)
from lagforge.linalg import AmbientSpace, hermitian_inner, real_inner
from lagforge.seeds import (circle_geodesic, flat_line, hyperbolic_geodesic, lagrangian_plane, legendrian_torus,
                            perturbed_torus, real_hyperbolic)

Q = Fraction(1, 4)


def norms(chart, pts):
    L = chart(pts)
    return np.real(hermitian_inner(L, L, chart.ambient))


def test_flat_identities(rng):
    torus = legendrian_torus(3)
    tr = traj(0, Q, 1.0, -0.3)
    ch = build_flat(tr, torus)
    pts = random_points(ch, 100, rng)
    lam, mu, th = tr.state_at(pts[:, 0])
    j = ch.jet(pts)
    expect = np.exp(1j * th)[:, None] * torus(pts[:, 1:])
    assert np.max(np.abs(j.first[:, 0] - expect)) <= 1e-6
    scale = 1 / np.sqrt(mu**2 + float(Q) ** 2 * lam**2)
    assert np.max(np.abs(np.linalg.norm(j.value, axis=1) - scale)) <= 1e-10
    jphi = torus.jet(pts[:, 1:])
    for a in range(2):
        ratio = np.linalg.norm(j.first[:, a + 1], axis=1) / np.linalg.norm(jphi.first[:, a], axis=1)
        assert np.max(np.abs(ratio - scale)) <= 1e-6


def test_cpn_identities(rng):
    ch = build_cpn_lift(traj(1, Q, 1.0, 0.3), legendrian_torus(3))
    pts = random_points(ch, 100, rng)
    assert np.max(np.abs(norms(ch, pts) - 1)) <= 1e-12
    j = ch.jet(pts)
    assert np.max(np.abs(real_inner(j.first, 1j * j.value[:, None, :], ch.ambient))) <= 1e-6
    assert ch.ambient.signature == (1, 1, 1, 1)


def test_cpn_last_slot_at_mu_zero():
    tr = traj(1, Q, 2.0, 0.0)
    tr.theta[0] = 0.0
    ch = build_cpn_lift(tr, legendrian_torus(3))
    lam, th = 2.0, 0.0
    expect = np.exp(1j * 0.75 * th) * (1j * lam / 4) / np.sqrt(1 + lam**2 / 16)
    assert ch([0.0, 0.1, 0.2])[-1] == pytest.approx(expect, abs=1e-14)


def test_chn_branches_norm(rng):
    b1 = build_chn_lift(traj(-1, Q, 1.0, 0.3, 0.5), real_hyperbolic(3), 1)
    b2 = build_chn_lift(traj(-1, Q, 5.0, 0.3, 0.5), legendrian_torus(3), 2)
    for ch in (b1, b2):
        assert np.max(np.abs(norms(ch, random_points(ch, 100, rng)) + 1)) <= 1e-10
        assert ch.ambient.signature[0] == -1


def test_auto_branch_selection():
    assert select_branch(traj(-1, Q, 1.0, 0.3, 0.1)) == 1
    assert select_branch(traj(-1, Q, 5.0, 0.3, 0.1)) == 2
    assert select_branch(traj(-1, Q, 3.2, 0.6, 0.1)) == 3
    ch = build(traj(-1, Q, 5.0, 0.3, 0.2), legendrian_torus(3))
    assert ch.meta["branch"] == 2


def test_branch_mismatch_errors():
    with pytest.raises(BranchError, match="q_factor"):
        build_chn_lift(traj(-1, Q, 1.0, 0.3, 0.2), legendrian_torus(3), 2)
    with pytest.raises(BuildError, match="branch-1 requires an anti-de-Sitter seed"):
        build_chn_lift(traj(-1, Q, 1.0, 0.3, 0.2), legendrian_torus(3), 1)
    with pytest.raises(BranchError):
        build_chn_lift(traj(-1, Q, 1.0, 0.3, 0.2), flat_line()[0], 3, flat_line()[1])
    seed, _ = flat_line()
    with pytest.raises(BuildError, match="WPotential"):
        build_chn_lift(traj(-1, Q, 4.0, 0.0, 0.2), seed, 3, None)


def test_precondition_errors():
    with pytest.raises(BuildError, match="uncertified"):
        build_cpn_lift(traj(1, Q, 1.0, 0.3, 0.1), perturbed_torus(3))
    with pytest.raises(BuildError, match="c = 0"):
        build_flat(traj(1, Q, 1.0, 0.3, 0.1), legendrian_torus(3))
    with pytest.raises(BuildError, match="degenerate minimal-surface"):
        build_flat(traj(0, -1, 1.0, 0.3, 0.1), circle_geodesic())
    with pytest.raises(BuildError, match="degenerate minimal-surface"):
        check_d(Fraction(-1), 2)
    check_d(Fraction(-1), 3)


def test_branch3_forms():
    seed, w = flat_line()
    tr = traj(-1, Q, 4.0, 0.0)
    printed = build_chn_lift(tr, seed, 3, w, "printed")
    derived = build_chn_lift(tr, seed, 3, w, "derived")
    # the integral term vanishes at t = 0, so both forms are plain evaluations there
    assert np.all(np.isfinite(printed([0.0, 0.3])))
    pts = np.array([[t, u] for t in np.linspace(0.05, 0.95, 7) for u in (-0.5, 0.0, 0.5)])
    assert np.max(np.abs(norms(derived, pts) + 1)) <= 1e-10
    # the source's closed form leaves the hyperboloid away from t = 0
    assert np.max(np.abs(norms(printed, pts) + 1)) > 1e-2
    with pytest.raises(BuildError, match="form"):
        build_chn_lift(tr, seed, 3, w, "other")


def test_branch3_higher_dim(rng):
    seed, w = lagrangian_plane(3)
    tr = traj(-1, Q, 4 * np.sqrt(1 - 0.25), -0.5, 0.0, -0.5)
    ch = build_chn_lift(tr, seed, 3, w, "derived")
    pts = random_points(ch, 50, rng)
    assert np.max(np.abs(norms(ch, pts) + 1)) <= 1e-10
    j = ch.jet(pts)
    assert np.max(np.abs(real_inner(j.first, 1j * j.value[:, None, :], ch.ambient))) <= 1e-6


def test_cumulative_integral():
    def g(s):
        return np.cosh(0.7 * s) ** 2 * np.exp(1j * np.sin(s))
    ci = CumulativeIntegral(g, -1.0, 1.5)
    for t in (-0.93, 0.0, 0.337, 1.41):
        re = quad(lambda s: g(s).real, 0, t, epsabs=1e-14)[0]
        im = quad(lambda s: g(s).imag, 0, t, epsabs=1e-14)[0]
        assert abs(ci(np.array([t]))[0] - (re + 1j * im)) < 1e-10


def test_n2_seeds_build():
    tr0, tr1 = traj(0, Q, 1.0, -0.3), traj(1, Q, 1.0, 0.3)
    assert build(tr0, circle_geodesic()).ambient.dim == 2
    assert build(tr1, circle_geodesic()).ambient.dim == 3
    b1 = build(traj(-1, Q, 1.0, 0.3, 0.5), hyperbolic_geodesic())
    assert b1.meta["branch"] == 1


def test_hopf_project(rng):
    space = AmbientSpace.sphere_lift(2)
    z = rng.normal(size=3) + 1j * rng.normal(size=3)
    z /= np.linalg.norm(z)
    assert np.allclose(hopf_project(z, space), hopf_project(1j * z, space), atol=1e-14)
    assert np.allclose(hopf_project(np.exp(0.7j) * z, space), hopf_project(z, space), atol=1e-12)
    assert np.linalg.norm(hopf_project(z, space)) == pytest.approx(1, abs=1e-14)
    e = np.array([1, 0, 0], complex)
    assert np.array_equal(hopf_project(e, space), e)
    with pytest.raises(BuildError):
        hopf_project(2 * z, space)
    ads = AmbientSpace.ads_lift(1)
    v = np.array([np.cosh(0.3), np.sinh(0.3)]) * np.exp(0.4j)
    assert hopf_project(v, ads)[0].imag == pytest.approx(0, abs=1e-15)


def test_graph_chart():
    ch = graph_chart(lambda x: np.stack([-x[:, 1], x[:, 0]], 1), 2, [(-1, 1), (-1, 1)])
    assert ch([0.5, 0.25]) == pytest.approx(np.array([0.5 - 0.25j, 0.25 + 0.5j]))


unit = st.floats(0.02, 0.98)


@pytest.mark.parametrize("name", ["cpn d=1/4", "cpn d=1/6", "chn d=1/4 b1", "chn d=1/4 b2"])
@given(x=st.tuples(unit, unit, unit))
def test_lift_invariants_property(charts, name, x):
    ch = charts[name]
    lo, hi = np.array(ch.domain).T
    p = lo + (hi - lo) * np.array(x)
    j = ch.jet(p[None])
    target = 1.0 if ch.ambient.curvature_c == 1 else -1.0
    assert abs(hermitian_inner(j.value, j.value, ch.ambient)[0] - target) <= 1e-10
    assert np.max(np.abs(real_inner(j.first, 1j * j.value[:, None, :], ch.ambient))) <= 1e-6


@pytest.mark.parametrize("name", ["flat d=1", "flat d=1/4"])
@given(x=st.tuples(unit, unit, unit))
def test_flat_metric_property(charts, name, x):
    ch = charts[name]
    lo, hi = np.array(ch.domain).T
    p = (lo + (hi - lo) * np.array(x))[None]
    D = ch.jet(p).first[0]
    g = real_inner(D[:, None, :], D[None, :, :])
    lam, mu, _ = ch.profile.state_at(p[0, 0])
    f2 = 1 / (mu**2 + ch.d**2 * lam**2)
    g0 = ch.seed.metric(p[:, 1:])[0]
    assert abs(g[0, 0] - 1) <= 1e-6 and np.max(np.abs(g[0, 1:])) <= 1e-6
    assert np.max(np.abs(g[1:, 1:] - f2 * g0)) <= 1e-6
