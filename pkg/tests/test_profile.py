import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lagforge.profile import (DomainError, ProfileParams, ProfileState, closed_form_along, closed_form_flat,
                              conserved_flat, flat_k, integrate, ode_rhs, q_factor, q_zero_profile)

Q = Fraction(1, 4)


def test_ode_rhs_examples():
    assert ode_rhs(ProfileParams(0, 1), 1.0, 0.0) == (0.0, 0.0, 1.0)
    dl, dm, dt = ode_rhs(ProfileParams(1, Q), 2.0, 1.0)
    assert (dl, dm, dt) == (4.0, -11 / 4, 2.0)
    assert ode_rhs(ProfileParams(-1, Q), 3.2, 0.6)[1] == pytest.approx(-1.28, abs=1e-14)


def test_params_reject_degenerate_d():
    for d in (0, Fraction(1, 2), "1/2"):
        with pytest.raises(ValueError):
            ProfileParams(0, d)
    with pytest.raises(ValueError):
        ProfileParams(2, Q)


def test_integrate_log_family():
    tr = integrate(ProfileParams(0, 1), ProfileState(1.0, 1.0, 1.0, 0.0), 2.0, 1e-3)
    assert not tr.truncated and tr.t[-1] == pytest.approx(2.0)
    assert np.max(np.abs(tr.lam - 1 / tr.t)) < 1e-8
    assert np.max(np.abs(tr.mu - 1 / tr.t)) < 1e-8
    assert np.max(np.abs(tr.theta - np.log(tr.t))) < 1e-8


def test_integrate_trivial_and_errors():
    s0 = ProfileState(0.5, 1.0, 0.2, 0.1)
    tr = integrate(ProfileParams(1, Q), s0, 0.5, 1e-3)
    assert len(tr) == 1 and tr.samples[0] == s0
    with pytest.raises(ValueError):
        integrate(ProfileParams(1, Q), s0, 1.0, 0.0)
    with pytest.raises(ValueError):
        integrate(ProfileParams(1, Q), s0, 0.0, 1e-3)
    with pytest.raises(DomainError):
        integrate(ProfileParams(1, Q), ProfileState(0, 0.0, 0.2), 1.0, 1e-3)


def test_blow_up_is_truncated():
    tr = integrate(ProfileParams(0, Q), ProfileState(0, 1.0, -5.0), 1.0, 1e-3)
    assert tr.truncated and tr.t[-1] < 0.25
    assert "cap" in tr.reason or "floor" in tr.reason


def test_conserved_examples():
    assert conserved_flat(Q, 1.0, 0.0) == pytest.approx(1 / 16, abs=1e-16)
    assert conserved_flat(Q, 1.0, 1.0) == pytest.approx(17 / 16, abs=1e-16)
    with pytest.raises(DomainError):
        conserved_flat(Q, 0.0, 1.0)


def test_q_factor_examples():
    assert q_factor(ProfileParams(-1, Q), 3.2, 0.6) == pytest.approx(0.0, abs=1e-14)
    assert q_factor(ProfileParams(1, Q), 0.0, 0.0) >= 1
    assert q_factor(ProfileParams(0, Q), 1e-3, 0.0) > 0


@given(st.floats(0.2, 3.0), st.floats(-0.5, 0.5), st.sampled_from([Q, Fraction(1, 6), Fraction(3), Fraction(-1)]))
def test_conserved_along_trajectory(lam0, mu0, d):
    tr = integrate(ProfileParams(0, d), ProfileState(0, lam0, mu0), 1.0, 1e-3)
    k2 = tr.conserved()
    assert np.ptp(k2) <= 1e-8 * max(1.0, k2[0])


@given(st.sampled_from([-1, 1]), st.floats(0.2, 3.0), st.floats(-0.5, 0.5),
       st.sampled_from([Q, Fraction(1, 6), Fraction(3, 4), Fraction(2)]))
def test_q_factor_first_integral(c, lam0, mu0, d):
    tr = integrate(ProfileParams(c, d), ProfileState(0, lam0, mu0), 1.0, 1e-3)
    q = tr.q_factor()
    if len(q) < 5:
        return
    dq = (q[:-4] - 8 * q[1:-3] + 8 * q[3:-1] - q[4:]) / (12 * tr.step)
    assert np.max(np.abs(dq + 2 * tr.mu[2:-2] * q[2:-2])) <= 1e-6 * max(1.0, np.max(np.abs(q)))
    assert np.all(np.sign(q) == np.sign(q[0]))


@given(st.sampled_from([-1, 0, 1]), st.floats(0.3, 2.0), st.floats(-0.4, 0.4))
def test_time_reversal(c, lam0, mu0):
    p = ProfileParams(c, Q)
    fwd = integrate(p, ProfileState(0, lam0, mu0), 0.5, 1e-3)
    if fwd.truncated:
        return
    back = integrate(p, ProfileState(0, fwd.lam[-1], -fwd.mu[-1]), 0.5, 1e-3)
    assert back.lam[-1] == pytest.approx(lam0, abs=1e-9)
    assert back.mu[-1] == pytest.approx(-mu0, abs=1e-9)


def test_dense_output():
    p = ProfileParams(1, Q)
    tr = integrate(p, ProfileState(0, 1.0, 0.3), 1.0, 1e-2)
    fine = integrate(p, ProfileState(0, 1.0, 0.3), 1.0, 1e-4)
    t = np.linspace(0.0, 1.0, 37)
    lam, mu, th = tr.state_at(t)
    lf, mf, tf = fine.state_at(t)
    assert np.max(np.abs(lam - lf)) < 1e-9 and np.max(np.abs(th - tf)) < 1e-9
    with pytest.raises(DomainError):
        tr.state_at(2.0)


def test_closed_form_examples():
    (b,) = closed_form_flat(1, 1.0, 0.5)
    assert b.mu == pytest.approx(0.5) and b.theta == pytest.approx(math.log(2))
    k = flat_k(Q, 1.3, 0.0)
    assert all(abs(x.mu) < 1e-7 for x in closed_form_flat(Q, k, 1.3))
    with pytest.raises(DomainError, match="admissible"):
        closed_form_flat(Q, k, 5.0)
    with pytest.raises(DomainError):
        closed_form_flat(Q, k, -1.0)


@pytest.mark.parametrize("d", [Q, Fraction(1, 6), Fraction(3), Fraction(-1)])
def test_closed_form_theta_derivative(d):
    k, df = flat_k(d, 1.0, 0.4), float(d)
    h = 1e-6
    for lam in (0.99, 1.0, 1.01):
        for i, sgn in enumerate((1, -1)):
            fd = (closed_form_flat(d, k, lam + h)[i].theta - closed_form_flat(d, k, lam - h)[i].theta) / (2 * h)
            root = math.sqrt(k * k * lam ** (2 * df / (2 * df - 1)) - df * df * lam * lam)
            # theta' = lambda and lambda' = ratio * lambda * mu give dtheta/dlambda = d / ((1 - 2d) mu)
            assert fd == pytest.approx(sgn * (df / (1 - 2 * df)) / root, abs=1e-6)


@pytest.mark.parametrize("d,s0", [(Q, (0, 1.0, -0.3)), (Fraction(3), (0, 1.0, 0.2)), (Fraction(-1), (0, 1.0, 0.2))])
def test_closed_form_matches_integration(d, s0):
    tr = integrate(ProfileParams(0, d), ProfileState(*s0), 1.0, 1e-3)
    lam, mu, th = closed_form_along(tr)
    assert max(np.abs(lam - tr.lam).max(), np.abs(mu - tr.mu).max(), np.abs(th - tr.theta).max()) <= 1e-8


def test_closed_form_along_turning_point():
    tr = integrate(ProfileParams(0, Q), ProfileState(0, 1.0, 0.3), 1.0, 1e-3)
    with pytest.raises(DomainError, match="turning"):
        closed_form_along(tr)


def test_q_zero_profile_solves_system():
    p = ProfileParams(-1, Q)
    t = np.linspace(-0.5, 0.5, 11)
    lam, mu = q_zero_profile(Q, t)
    assert np.max(np.abs(q_factor(p, lam, mu))) < 1e-14
    tr = integrate(p, ProfileState(-0.5, lam[0], mu[0]), 0.5, 1e-3)
    assert np.max(np.abs(tr.state_at(t)[0] - lam)) < 1e-9
