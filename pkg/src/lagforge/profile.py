"""Profile functions (lambda, mu, theta) along the e_1 geodesics.

The system integrated here is

    lambda' = ((1 - 2d)/d) lambda mu
    mu'     = -c - mu^2 - d(1 - d) lambda^2
    theta'  = lambda

together with its first integrals and the explicit flat-space solutions.
"""
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional

import numpy as np
from scipy.integrate import quad

from .delta import parse_rational

LAMBDA_FLOOR = 1e-9
MAGNITUDE_CAP = 1e9
STEP_TOL = 1e-10
MAX_HALVINGS = 12


class DomainError(ValueError):
    pass


@dataclass(frozen=True)
class ProfileParams:
    c: int
    d: Fraction

    def __post_init__(self):
        if self.c not in (-1, 0, 1):
            raise ValueError(f"c must be -1, 0 or 1, got {self.c}")
        d = parse_rational(self.d) if not isinstance(self.d, Fraction) else self.d
        object.__setattr__(self, "d", d)
        if d == 0 or d == Fraction(1, 2):
            raise ValueError("d must differ from 0 and 1/2")

    @property
    def df(self) -> float:
        return float(self.d)

    @property
    def ratio(self) -> float:
        """(1 - 2d)/d, the coefficient in lambda' = ratio * lambda * mu."""
        return float((1 - 2 * self.d) / self.d)


@dataclass(frozen=True)
class ProfileState:
    t: float
    lam: float
    mu: float
    theta: float = 0.0

    def as_array(self) -> np.ndarray:
        return np.array([self.lam, self.mu, self.theta])


def ode_rhs(p: ProfileParams, lam, mu, theta=None):
    """Right-hand side (lambda', mu', theta'); broadcasts over arrays."""
    d = p.df
    dlam = p.ratio * lam * mu
    dmu = -p.c - mu * mu - d * (1 - d) * lam * lam
    return dlam, dmu, lam


def _f(p: ProfileParams, y: np.ndarray) -> np.ndarray:
    dl, dm, dt = ode_rhs(p, y[0], y[1])
    return np.array([dl, dm, dt]) if np.ndim(y[0]) == 0 else np.stack([dl, dm, dt])


def rk4_step(p: ProfileParams, y: np.ndarray, h) -> np.ndarray:
    """One classical RK4 step; ``y`` is (3,) or (3, k) with ``h`` scalar or (k,)."""
    k1 = _f(p, y)
    k2 = _f(p, y + 0.5 * h * k1)
    k3 = _f(p, y + 0.5 * h * k2)
    k4 = _f(p, y + h * k3)
    return y + h * (k1 + 2 * k2 + 2 * k3 + k4) / 6.0


def _rk4_scalar(a, c, b, y, h):
    """RK4 on plain floats: lambda' = a lambda mu, mu' = -c - mu^2 - b lambda^2, theta' = lambda."""
    l0, m0, t0 = y
    k1l, k1m = a * l0 * m0, -c - m0 * m0 - b * l0 * l0
    l1, m1 = l0 + 0.5 * h * k1l, m0 + 0.5 * h * k1m
    k2l, k2m = a * l1 * m1, -c - m1 * m1 - b * l1 * l1
    l2, m2 = l0 + 0.5 * h * k2l, m0 + 0.5 * h * k2m
    k3l, k3m = a * l2 * m2, -c - m2 * m2 - b * l2 * l2
    l3, m3 = l0 + h * k3l, m0 + h * k3m
    k4l, k4m = a * l3 * m3, -c - m3 * m3 - b * l3 * l3
    return (l0 + h * (k1l + 2 * k2l + 2 * k3l + k4l) / 6.0,
            m0 + h * (k1m + 2 * k2m + 2 * k3m + k4m) / 6.0,
            t0 + h * (l0 + 2 * l1 + 2 * l2 + l3) / 6.0)


def _guarded_step(p, y, h, depth=0):
    """Step of size h with step-doubling; subdivides until the estimate passes."""
    a, c, b = p.ratio, float(p.c), p.df * (1 - p.df)
    y = tuple(float(v) for v in y)
    try:
        full = _rk4_scalar(a, c, b, y, h)
        half = _rk4_scalar(a, c, b, _rk4_scalar(a, c, b, y, h / 2), h / 2)
    except OverflowError:
        return np.full(3, np.inf), np.inf
    err = max(abs(u - v) for u, v in zip(half, full)) / 15.0
    finite = all(math.isfinite(v) for v in half)
    if not finite or err <= STEP_TOL * (1 + max(abs(v) for v in y)) or depth >= MAX_HALVINGS:
        return np.array(half), err
    mid, e1 = _guarded_step(p, y, h / 2, depth + 1)
    end, e2 = _guarded_step(p, mid, h / 2, depth + 1)
    return end, max(e1, e2)


@dataclass
class Trajectory:
    params: ProfileParams
    t: np.ndarray
    lam: np.ndarray
    mu: np.ndarray
    theta: np.ndarray
    step: float
    truncated: bool = False
    reason: str = ""
    max_error_estimate: float = 0.0

    def __len__(self):
        return len(self.t)

    @property
    def samples(self) -> List[ProfileState]:
        return [ProfileState(*row) for row in zip(self.t, self.lam, self.mu, self.theta)]

    @property
    def t_range(self):
        return float(min(self.t[0], self.t[-1])), float(max(self.t[0], self.t[-1]))

    @property
    def initial(self) -> ProfileState:
        return ProfileState(float(self.t[0]), float(self.lam[0]), float(self.mu[0]), float(self.theta[0]))

    def state_at(self, t):
        """Dense output: (lam, mu, theta) at arbitrary t inside the sampled range.

        Two RK4 substeps from the nearest stored sample. The result is a
        smooth function of t between switch points, and the jump at a switch
        point is at roundoff level, which keeps finite-difference jets clean.
        """
        t = np.asarray(t, dtype=float)
        lo, hi = self.t_range
        slack = 1e-6 + 0.51 * abs(self.step)
        if np.any(t < lo - slack) or np.any(t > hi + slack):
            raise DomainError(f"t outside trajectory range [{lo}, {hi}]")
        flat = np.atleast_1d(t)
        if len(self.t) == 1:
            idx = np.zeros(flat.shape, dtype=int)
        else:
            idx = np.clip(np.rint((flat - self.t[0]) / self.step).astype(int), 0, len(self.t) - 1)
        y = np.stack([self.lam[idx], self.mu[idx], self.theta[idx]])
        h = (flat - self.t[idx]) / 2
        y = rk4_step(self.params, rk4_step(self.params, y, h), h)
        if t.ndim == 0:
            return y[0, 0], y[1, 0], y[2, 0]
        return y[0].reshape(t.shape), y[1].reshape(t.shape), y[2].reshape(t.shape)

    def q_factor(self) -> np.ndarray:
        return q_factor(self.params, self.lam, self.mu)

    def conserved(self) -> np.ndarray:
        if self.params.c != 0 or np.any(self.lam <= 0):
            return np.full(len(self.t), np.nan)
        return conserved_flat(self.params.d, self.lam, self.mu)


def integrate(p: ProfileParams, s0: ProfileState, t_end: float, step: float) -> Trajectory:
    """Fixed-step RK4 from ``s0`` to ``t_end`` with uniform output samples.

    Steps whose step-doubling estimate exceeds the tolerance are subdivided
    internally; output spacing stays uniform. Integration halts with
    ``truncated=True`` when |lambda| drops below LAMBDA_FLOOR or any state
    component exceeds MAGNITUDE_CAP.
    """
    if not step > 0:
        raise ValueError("step must be positive")
    if s0.lam == 0:
        raise DomainError("initial lambda must be nonzero")
    if t_end < s0.t:
        raise ValueError(f"t_end={t_end} precedes the initial t={s0.t}")
    span = t_end - s0.t
    nsteps = int(math.ceil(abs(span) / step - 1e-9)) if span else 0
    h = span / nsteps if nsteps else step
    ts = [s0.t]
    ys = [s0.as_array()]
    truncated, reason, max_err = False, "", 0.0
    y = ys[0]
    for i in range(1, nsteps + 1):
        y_new, err = _guarded_step(p, y, h)
        max_err = max(max_err, err)
        if not np.all(np.isfinite(y_new)) or np.max(np.abs(y_new)) > MAGNITUDE_CAP:
            truncated, reason = True, f"magnitude cap exceeded near t={s0.t + i * h:.6g}"
            break
        if abs(y_new[0]) < LAMBDA_FLOOR or np.sign(y_new[0]) != np.sign(s0.lam):
            truncated, reason = True, f"lambda reached the floor near t={s0.t + i * h:.6g}"
            break
        y = y_new
        ts.append(s0.t + i * h)
        ys.append(y)
    ys = np.array(ys)
    return Trajectory(p, np.array(ts), ys[:, 0].copy(), ys[:, 1].copy(), ys[:, 2].copy(),
                      abs(h), truncated, reason, max_err)


def conserved_flat(d, lam, mu):
    """lambda^(2d/(1-2d)) (mu^2 + d^2 lambda^2), constant along c = 0 solutions."""
    d = float(parse_rational(d)) if not isinstance(d, float) else d
    lam = np.asarray(lam, dtype=float)
    if np.any(lam <= 0):
        raise DomainError("conserved_flat needs lambda > 0")
    out = lam ** (2 * d / (1 - 2 * d)) * (np.asarray(mu) ** 2 + d * d * lam**2)
    return out if out.ndim else float(out)


def q_factor(p: ProfileParams, lam, mu):
    """1 + mu^2 + d^2 lambda^2 (c=1), 1 - mu^2 - d^2 lambda^2 (c=-1), mu^2 + d^2 lambda^2 (c=0).

    Satisfies Q' = -2 mu Q along every solution.
    """
    s = np.asarray(mu) ** 2 + p.df**2 * np.asarray(lam) ** 2
    if p.c == 1:
        return 1 + s
    if p.c == -1:
        return 1 - s
    return s


def chn_branch(p: ProfileParams, s: ProfileState, tol: float = 1e-10) -> int:
    """Branch of the hyperbolic lift selected by the sign of the q-factor."""
    if p.c != -1:
        raise ValueError("branches only exist for c = -1")
    q = q_factor(p, s.lam, s.mu)
    if abs(q) <= tol:
        return 3
    return 1 if q > 0 else 2


@dataclass(frozen=True)
class FlatBranch:
    mu: float
    theta: float


def closed_form_flat(d, k, lam) -> List[FlatBranch]:
    """Explicit c = 0 solution evaluated at a given lambda.

    d = 1: ``k`` is k_2 in lambda = k_2/t, mu = 1/t, theta = k_2 ln|t| (k_1 = k_3 = 0);
    one branch is returned.
    d != 1: ``k`` is the positive root of the conserved quantity; returns the
    branches mu > 0 and mu < 0 (in that order) with theta taken with zero
    additive constant via the principal arccosecant.
    """
    d = parse_rational(d)
    lam = float(lam)
    if d == 1:
        if k == 0 or lam == 0:
            raise DomainError("d = 1 closed form needs k_2 != 0 and lambda != 0")
        t = k / lam
        return [FlatBranch(1.0 / t, k * math.log(abs(t)))]
    if d == 0 or d == Fraction(1, 2):
        raise DomainError("d must differ from 0 and 1/2")
    df = float(d)
    if lam <= 0:
        raise DomainError("closed form needs lambda > 0")
    rad = k * k * lam ** (2 * df / (2 * df - 1)) - df * df * lam * lam
    if rad < -1e-14 * max(1.0, df * df * lam * lam):
        raise DomainError(f"lambda={lam} outside the admissible interval: {_admissible(df, k)}")
    root = math.sqrt(max(rad, 0.0))
    y = (k / df) * lam ** (-(df - 1) / (2 * df - 1))
    if abs(y) < 1:
        if abs(y) < 1 - 1e-12:
            raise DomainError(f"arccsc argument |{y}| < 1; admissible: {_admissible(df, k)}")
        y = math.copysign(1.0, y)
    acsc = math.asin(1.0 / y)
    base = acsc / (df - 1)
    # theta' / lambda' = d / ((1 - 2d) mu) fixes which sign goes with which mu
    return [FlatBranch(root, -base), FlatBranch(-root, base)]


def _admissible(d: float, k: float) -> str:
    # k^2 lam^(2d/(2d-1)) >= d^2 lam^2  <=>  lam^(2(d-1)/(2d-1)) <= k^2/d^2
    e = 2 * (d - 1) / (2 * d - 1)
    bound = (k * k / (d * d)) ** (1 / e)
    return f"lambda <= {bound:.6g}" if e > 0 else f"lambda >= {bound:.6g}"


def flat_k(d, lam, mu) -> float:
    """Positive k with k^2 equal to the conserved quantity at (lam, mu)."""
    return math.sqrt(conserved_flat(d, lam, mu))


def closed_form_flat_time(d, k, lam0, lam, mu_sign: int) -> float:
    """Elapsed t between lambda0 and lambda along the flat d != 1 branch with given mu sign.

    Quadrature of dt = d lambda / (((1-2d)/d) lambda mu(lambda)).
    """
    df = float(parse_rational(d))
    ratio = (1 - 2 * df) / df

    def integrand(x):
        m = mu_sign * math.sqrt(max(k * k * x ** (2 * df / (2 * df - 1)) - df * df * x * x, 0.0))
        return 1.0 / (ratio * x * m)

    val, _ = quad(integrand, lam0, lam, epsabs=1e-14, epsrel=1e-13, limit=200)
    return val


def flat_d1_solution(s0: ProfileState):
    """Closed-form (lam, mu, theta)(t) through s0 for c = 0, d = 1 (mu0 != 0)."""
    if s0.mu == 0:
        raise DomainError("d = 1 closed form through mu = 0 is the constant solution")
    k2 = s0.lam / s0.mu
    k1 = 1.0 / s0.mu - s0.t
    k3 = s0.theta - k2 * math.log(abs(s0.t + k1))

    def at(t):
        t = np.asarray(t, dtype=float)
        return k2 / (t + k1), 1.0 / (t + k1), k2 * np.log(np.abs(t + k1)) + k3

    return at


def q_zero_profile(d, t, t_star: float = 0.0):
    """The c = -1 solution with mu^2 + d^2 lambda^2 = 1 normalised so mu(t_star) = 0, d lambda > 0."""
    df = float(parse_rational(d))
    k = (1 - 2 * df) / df
    s = k * (np.asarray(t, dtype=float) - t_star)
    return 1.0 / (df * np.cosh(s)), -np.tanh(s)


def closed_form_along(traj: Trajectory, nodes: int = 8):
    """Closed-form (lam, mu, theta) at the sample times of a c = 0 trajectory.

    d = 1 uses the logarithmic family through the initial state. For d != 1
    the elapsed time is the quadrature of dt = dlam / lam' with the
    closed-form mu(lam); the sampled lambda only serves as the expansion point
    of a first-order correction, so its own error enters quadratically.
    theta is matched to the trajectory at the initial sample (additive constant).
    """
    p = traj.params
    if p.c != 0:
        raise DomainError("closed forms exist only for c = 0")
    s0 = traj.initial
    if p.d == 1:
        return flat_d1_solution(s0)(traj.t)
    if np.any(traj.lam <= 0):
        raise DomainError("closed form needs lambda > 0")
    sgn = np.sign(traj.mu)
    if np.any(sgn != sgn[0]) or sgn[0] == 0:
        raise DomainError("mu changes sign (turning point); compare each monotone piece separately")
    df, k = p.df, flat_k(p.d, s0.lam, s0.mu)
    ratio = (1 - 2 * df) / df

    def mu_of(x):
        return sgn[0] * np.sqrt(np.maximum(k * k * x ** (2 * df / (2 * df - 1)) - df * df * x * x, 0.0))

    x, w = np.polynomial.legendre.leggauss(nodes)
    a, b = traj.lam[:-1], traj.lam[1:]
    mid, half = (a + b) / 2, (b - a) / 2
    lam_nodes = mid[:, None] + half[:, None] * x[None]
    pieces = half * np.sum(w / (ratio * lam_nodes * mu_of(lam_nodes)), axis=1)
    elapsed = np.concatenate([[0.0], np.cumsum(pieces)])
    lam = traj.lam + (traj.t - s0.t - elapsed) * ratio * traj.lam * mu_of(traj.lam)
    branch = 0 if sgn[0] > 0 else 1
    mu = np.empty_like(lam)
    theta = np.empty_like(lam)
    for i, v in enumerate(lam):
        fb = closed_form_flat(p.d, k, v)[branch]
        mu[i], theta[i] = fb.mu, fb.theta
    return lam, mu, theta - theta[0] + s0.theta
