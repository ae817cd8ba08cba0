"""Explicit Lagrangian immersions built from a profile trajectory and a seed map.

c = 0   : L = e^{i theta} / (mu + i d lambda) * phi(u)                      in C^n
c = +1  : horizontal lift into S^{2n+1}(1) subset C^{n+1}
c = -1  : horizontal lift into H^{2n+1}_1(-1) subset C^{n+1}_1, three branches
          according to the sign of 1 - mu^2 - d^2 lambda^2.
"""
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from .linalg import DEFAULT_STEP, AmbientSpace, hermitian_inner, jet2
from .profile import Trajectory, ode_rhs, q_factor
from .seeds import SeedError, SeedMap, WPotential

BRANCH3_TOL = 1e-10
INTEGRAND_CAP = 1e12
BRANCH3_FORMS = ("printed", "derived")


class BuildError(ValueError):
    pass


class BranchError(BuildError):
    pass


@dataclass
class ImmersionChart:
    """A map (t, u_2, ..., u_n) -> ambient coordinates.

    ``lift_norm`` is the constant value of <L, L> for lifts (None in the flat
    model). ``profile`` and ``seed`` are present on builder output and let the
    verifier compare against the generating data; hand-made charts may omit them.
    """

    ambient: AmbientSpace
    chart_dim: int
    evaluator: Callable[[np.ndarray], np.ndarray]
    domain: tuple
    meta: dict = field(default_factory=dict)
    profile: Optional[Trajectory] = None
    seed: Optional[SeedMap] = None
    lift_norm: Optional[float] = None
    warp: Optional[Callable] = None
    truncated: bool = False

    @property
    def is_lift(self) -> bool:
        return self.lift_norm is not None

    @property
    def d(self) -> Optional[float]:
        d = self.meta.get("d")
        return None if d is None else float(Fraction(str(d)))

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        single = x.ndim == 1
        out = self.evaluator(np.atleast_2d(x))
        return out[0] if single else out

    def jet(self, x, step: float = DEFAULT_STEP, order: int = 2):
        return jet2(self.evaluator, x, step, order=order)

    def profile_at(self, t):
        """(lambda, mu, theta, mu') of the generating trajectory at t."""
        if self.profile is None:
            raise BuildError("chart carries no profile")
        lam, mu, th = self.profile.state_at(t)
        _, dmu, _ = ode_rhs(self.profile.params, lam, mu)
        return lam, mu, th, dmu

    def grid(self, t_points: int = 5, u_points: int = 5, margin: float = 0.0) -> np.ndarray:
        axes = []
        for i, (lo, hi) in enumerate(self.domain):
            k = t_points if i == 0 else u_points
            pad = margin + 1e-3 * (hi - lo)
            axes.append(np.linspace(lo + pad, hi - pad, k) if k > 1 else np.array([(lo + hi) / 2]))
        return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, self.chart_dim)


def check_d(d: Fraction, n: int):
    if d == 0 or d == Fraction(1, 2):
        raise BuildError("d must differ from 0 and 1/2")
    if n == 2 and d == -1:
        raise BuildError("d = -1 with n = 2 is the degenerate minimal-surface case and is excluded")


def _check_seed(phi: SeedMap, target: str, who: str):
    if phi.target != target:
        names = {"sphere": "a sphere", "ads": "an anti-de-Sitter", "flat": "a flat"}
        raise BuildError(f"{who} requires {names[target]} seed, got {phi.target!r} ({phi.name})")
    try:
        phi.ensure_certified()
    except SeedError as exc:
        raise BuildError(f"uncertified seed: {exc}") from exc


def _meta(builder, traj, phi, branch=None, **extra):
    meta = {"builder": builder, "d": str(traj.params.d), "c": traj.params.c,
            "n": phi.n, "seed": phi.name, "branch": branch}
    meta.update(extra)
    return meta


def _domain(traj: Trajectory, phi: SeedMap):
    return (traj.t_range,) + tuple(phi.domain)


def build_flat(traj: Trajectory, phi: SeedMap) -> ImmersionChart:
    if traj.params.c != 0:
        raise BuildError(f"build_flat needs a c = 0 trajectory, got c = {traj.params.c}")
    check_d(traj.params.d, phi.n)
    _check_seed(phi, "sphere", "build_flat")
    d = traj.params.df

    def ev(x):
        lam, mu, th = traj.state_at(x[:, 0])
        return (np.exp(1j * th) / (mu + 1j * d * lam))[:, None] * phi.evaluator(x[:, 1:])

    def warp(t):
        lam, mu, _ = traj.state_at(t)
        return 1.0 / np.sqrt(mu**2 + d * d * lam**2)

    return ImmersionChart(AmbientSpace.flat(phi.n), phi.n, ev, _domain(traj, phi),
                          _meta("flat", traj, phi), traj, phi, None, warp, traj.truncated)


def build_cpn_lift(traj: Trajectory, phi: SeedMap) -> ImmersionChart:
    if traj.params.c != 1:
        raise BuildError(f"build_cpn_lift needs a c = 1 trajectory, got c = {traj.params.c}")
    check_d(traj.params.d, phi.n)
    _check_seed(phi, "sphere", "build_cpn_lift")
    d = traj.params.df

    def ev(x):
        lam, mu, th = traj.state_at(x[:, 0])
        r = 1.0 / np.sqrt(1 + mu**2 + d * d * lam**2)
        head = (np.exp(1j * d * th) * r)[:, None] * phi.evaluator(x[:, 1:])
        tail = np.exp(1j * (1 - d) * th) * (1j * d * lam - mu) * r
        return np.concatenate([head, tail[:, None]], axis=1)

    def warp(t):
        lam, mu, _ = traj.state_at(t)
        return 1.0 / np.sqrt(1 + mu**2 + d * d * lam**2)

    return ImmersionChart(AmbientSpace.sphere_lift(phi.n), phi.n, ev, _domain(traj, phi),
                          _meta("cpn_lift", traj, phi), traj, phi, 1.0, warp, traj.truncated)


def _check_branch(traj: Trajectory, branch: int):
    q = traj.q_factor()
    if branch == 3:
        if abs(q[0]) > BRANCH3_TOL:
            raise BranchError(f"branch 3 needs q_factor = 0 at t={traj.t[0]:.6g}, got {q[0]:.3e}")
        return
    bad = q <= 0 if branch == 1 else q >= 0
    if np.any(bad):
        i = int(np.argmax(bad))
        raise BranchError(f"branch {branch} needs q_factor {'>' if branch == 1 else '<'} 0; "
                          f"t={traj.t[i]:.6g} has q_factor={q[i]:.6g}")


def select_branch(traj: Trajectory) -> int:
    q0 = q_factor(traj.params, traj.lam[0], traj.mu[0])
    if abs(q0) <= BRANCH3_TOL:
        return 3
    return 1 if q0 > 0 else 2


def build_chn_lift(traj: Trajectory, phi: SeedMap, branch="auto", w: Optional[WPotential] = None,
                   form: str = "printed") -> ImmersionChart:
    """Lift into H^{2n+1}_1(-1); the timelike slot is the first coordinate in every branch.

    ``form`` only matters for branch 3: "printed" evaluates the closed form as
    written in the source; "derived" is the closed form obtained by solving
    L'' - i lambda L' - L = 0 on the q = 0 profile (see README).
    """
    if traj.params.c != -1:
        raise BuildError(f"build_chn_lift needs a c = -1 trajectory, got c = {traj.params.c}")
    check_d(traj.params.d, phi.n)
    if branch == "auto":
        branch = select_branch(traj)
    branch = int(branch)
    if branch not in (1, 2, 3):
        raise BuildError(f"branch must be 1, 2, 3 or 'auto', got {branch}")
    _check_branch(traj, branch)
    d = traj.params.df

    if branch == 1:
        _check_seed(phi, "ads", "branch-1")

        def ev(x):
            lam, mu, th = traj.state_at(x[:, 0])
            r = 1.0 / np.sqrt(1 - mu**2 - d * d * lam**2)
            head = (np.exp(1j * d * th) * r)[:, None] * phi.evaluator(x[:, 1:])
            tail = np.exp(1j * (1 - d) * th) * (1j * d * lam - mu) * r
            return np.concatenate([head, tail[:, None]], axis=1)

        def warp(t):
            lam, mu, _ = traj.state_at(t)
            return 1.0 / np.sqrt(1 - mu**2 - d * d * lam**2)

        return ImmersionChart(AmbientSpace.ads_lift(phi.n, 0), phi.n, ev, _domain(traj, phi),
                              _meta("chn_lift", traj, phi, 1), traj, phi, -1.0, warp, traj.truncated)

    if branch == 2:
        _check_seed(phi, "sphere", "branch-2")

        def ev(x):
            lam, mu, th = traj.state_at(x[:, 0])
            r = 1.0 / np.sqrt(mu**2 + d * d * lam**2 - 1)
            head = np.exp(1j * (1 - d) * th) * (1j * d * lam - mu) * r
            tail = (np.exp(1j * d * th) * r)[:, None] * phi.evaluator(x[:, 1:])
            return np.concatenate([head[:, None], tail], axis=1)

        def warp(t):
            lam, mu, _ = traj.state_at(t)
            return 1.0 / np.sqrt(mu**2 + d * d * lam**2 - 1)

        return ImmersionChart(AmbientSpace.ads_lift(phi.n, 0), phi.n, ev, _domain(traj, phi),
                              _meta("chn_lift", traj, phi, 2), traj, phi, -1.0, warp, traj.truncated)

    return _build_branch3(traj, phi, w, form)


def _gd(x):
    """Gudermannian 2 arctan(tanh(x/2))."""
    return 2.0 * np.arctan(np.tanh(x / 2.0))


class CumulativeIntegral:
    """t -> int_0^t g(s) ds for a smooth complex g, cached on a uniform node grid.

    Each cell is integrated with composite Gauss-Legendre, refined until two
    successive refinements agree to ``tol``; evaluation adds a fixed-order
    Gauss-Legendre piece from the nearest node, which keeps the result smooth
    in t.
    """

    def __init__(self, g, lo, hi, spacing=0.01, tol=1e-10, nodes=12):
        self.g, self.h = g, spacing
        self.xg, self.wg = np.polynomial.legendre.leggauss(nodes)
        k_lo = int(math.floor(min(lo, 0.0) / spacing)) - 1
        k_hi = int(math.ceil(max(hi, 0.0) / spacing)) + 1
        self.k0 = k_lo
        ks = np.arange(k_lo, k_hi + 1)
        self.nodes = ks * spacing
        cells = np.array([self._cell(a, a + spacing, tol) for a in self.nodes[:-1]])
        cum = np.concatenate([[0.0], np.cumsum(cells)])
        self.values = cum - cum[-k_lo]  # zero at s = 0

    def _gl(self, a, b, pieces=1):
        e = np.linspace(a, b, pieces + 1)
        tot = 0.0
        for p0, p1 in zip(e[:-1], e[1:]):
            s = (p0 + p1) / 2 + (p1 - p0) / 2 * self.xg
            tot = tot + np.sum(self.wg * self.g(s)) * (p1 - p0) / 2
        return tot

    def _cell(self, a, b, tol):
        pieces, prev = 1, self._gl(a, b, 1)
        while pieces < 1024:
            pieces *= 2
            cur = self._gl(a, b, pieces)
            if abs(cur - prev) < tol:
                return cur
            prev = cur
        return cur

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        idx = np.clip(np.rint(t / self.h).astype(int) - self.k0, 0, len(self.nodes) - 1)
        a = self.nodes[idx]
        mid, half = (a + t) / 2, (t - a) / 2
        s = mid[..., None] + half[..., None] * self.xg
        return self.values[idx] + np.sum(self.wg * self.g(s), axis=-1) * half


def _build_branch3(traj: Trajectory, phi: SeedMap, w: Optional[WPotential], form: str):
    if form not in BRANCH3_FORMS:
        raise BuildError(f"form must be one of {BRANCH3_FORMS}")
    _check_seed(phi, "flat", "branch-3")
    if w is None:
        raise BuildError("branch 3 requires a WPotential for the flat seed")
    d = traj.params.df
    lam0, mu0 = traj.lam[0], traj.mu[0]
    if not d * lam0 > 0 or abs(mu0) >= 1:
        raise BuildError("branch 3 expects d*lambda > 0 on the q = 0 profile")
    k = (1 - 2 * d) / d
    p = 2 * d / (2 * d - 1)
    t_star = traj.t[0] + math.atanh(mu0) / k  # mu = -tanh(k (t - t_star))
    lo, hi = traj.t_range

    if form == "printed":
        a = (1 - 2 * d) / (2 * d)

        def pref(s):
            return np.exp(p * 1j * np.arctan(np.tanh(a * s))) / np.cosh(a * s) ** p

        def integrand(s):
            return np.cosh(a * s) ** p * np.exp(2j * np.arctan(np.tanh(a * s)))
    else:
        def pref(s):
            return np.cosh(k * s) ** (p / 2) * np.exp(-1j * (p / 2) * _gd(k * s))

        def integrand(s):
            return np.cosh(k * s) ** (-p) * np.exp(1j * _gd(k * s))

    s_lo, s_hi = lo - t_star, hi - t_star
    truncated = traj.truncated
    probe = np.linspace(s_lo, s_hi, 2001)
    too_big = np.abs(integrand(probe)) > INTEGRAND_CAP
    if np.any(too_big):
        truncated = True
        ok = np.where(~too_big)[0]
        s_lo, s_hi = probe[ok[0]], probe[ok[-1]]
    cum = CumulativeIntegral(integrand, s_lo, s_hi)
    n = phi.n

    def ev(x):
        s = x[:, 0] - t_star
        f = phi.evaluator(x[:, 1:])
        base = w(x[:, 1:]) + 0.5j * np.real(hermitian_inner(f, f))
        I = cum(s)
        vec = np.concatenate([(base + 1j + I)[:, None], f, (base + I)[:, None]], axis=1)
        return pref(s)[:, None] * vec

    def warp(t):
        return np.abs(pref(np.asarray(t) - t_star))

    domain = ((s_lo + t_star, s_hi + t_star),) + tuple(phi.domain)
    meta = _meta("chn_lift", traj, phi, 3, form=form, t_star=t_star)
    return ImmersionChart(AmbientSpace.ads_lift(n, 0), n, ev, domain, meta, traj, phi, -1.0,
                          warp if form == "derived" else None, truncated)


def hopf_project(z, space: AmbientSpace, tol: float = 1e-8) -> np.ndarray:
    """Phase-normalised representative of the fibre through z (first slot above 1e-8 made real positive)."""
    z = np.asarray(z, dtype=complex)
    target = -1.0 if space.is_lorentzian else 1.0
    res = abs(np.real(hermitian_inner(z, z, space)) - target)
    if res > tol:
        raise BuildError(f"point is off the lift target (residual {res:.3e})")
    j = int(np.argmax(np.abs(z) > 1e-8))
    return z * (np.conj(z[j]) / abs(z[j]))


def build(traj: Trajectory, phi: SeedMap, branch="auto", w: Optional[WPotential] = None,
          form: str = "printed") -> ImmersionChart:
    """Dispatch on the curvature of the trajectory."""
    c = traj.params.c
    if c == 0:
        return build_flat(traj, phi)
    if c == 1:
        return build_cpn_lift(traj, phi)
    return build_chn_lift(traj, phi, branch, w, form)


def graph_chart(one_form: Callable, n: int, domain) -> ImmersionChart:
    """x -> x + i A(x) in C^n; Lagrangian iff the 1-form A is closed."""
    def ev(x):
        x = np.asarray(x, float)
        return x + 1j * np.asarray(one_form(x), float)
    return ImmersionChart(AmbientSpace.flat(n), n, ev, tuple(tuple(map(float, r)) for r in domain),
                          {"builder": "graph", "n": n})
