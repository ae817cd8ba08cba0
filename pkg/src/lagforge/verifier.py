"""Numerical verification of immersion charts.

Everything is computed on the chart itself (flat C^n, or the lift in
C^{n+1} / C^{n+1}_1); the projective quotient is never used. Frames are
e_1 = normalised d/dt followed by Gram-Schmidt on d/du_a, cubic-form
components are h[i, j, k] = <h(e_i, e_j), J e_k> with J = multiplication by i.

Intrinsic curvature comes from the metric alone: Christoffel symbols by
central differences of g, Riemann tensor by central differences of those.
"""
import itertools
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Optional

import numpy as np

from .linalg import real_inner

STEP = 1e-4
CURVATURE_STEP = 1e-3
LAMBDA_MIN = 1e-8

TOLERANCES = {
    "constraint": 1e-10,
    "lagrangian": 1e-6,
    "horizontality": 1e-6,
    "normal": 1e-5,
    "cubic": 1e-5,
    "eq1_structure": 1e-5,
    "eq1_trace": 1e-5,
    "d_error": 1e-4,
    "lambda_error": 1e-4,
    "gauss": 5e-4,
    "profile_gauss": 5e-4,
    "codazzi": 5e-4,
    "geodesic": 1e-5,
    "block_diagonal": 1e-6,
    "seed_metric": 1e-6,
    "mu_error": 1e-4,
    "warp_error": 1e-4,
}

# Charts read back from sample files are spline interpolants; their accuracy
# floor (about 1e-9 in the values at 31 samples per axis) sits above the
# tolerances meant for charts evaluated from formulas.
FILE_TOLERANCES = dict(TOLERANCES, constraint=1e-7, cubic=1e-4, eq1_structure=1e-4, eq1_trace=1e-4,
                       d_error=1e-3)


class VerificationError(ValueError):
    pass


class DegenerateFrameError(VerificationError):
    pass


class InconsistentSffError(VerificationError):
    """Second derivatives have a normal part outside span{J e_k}: the input is not Lagrangian."""


@dataclass
class VerifyConfig:
    step: float = STEP
    curvature_step: float = CURVATURE_STEP
    t_points: int = 5
    u_points: int = 5
    tolerances: dict = field(default_factory=lambda: dict(TOLERANCES))
    align_e1: bool = False
    threads: Optional[int] = None


@dataclass
class FramePoint:
    point: np.ndarray
    tangents: np.ndarray  # (n, N): orthonormal e_1..e_n
    metric: np.ndarray  # (n, n) in chart coordinates
    coeffs: np.ndarray  # (n, n): e_i = sum_a coeffs[i, a] d_a


@dataclass
class SffTensor:
    components: np.ndarray  # (n, n, n) symmetric
    basis: FramePoint
    cubic_residual: float
    normal_residual: float


@dataclass
class Eq1Fit:
    lambda_rec: float
    d_rec: float
    trace_residual: float
    structure_residual: float
    minimal: bool = False


def _sig(chart):
    return chart.ambient.sig


def _inner(a, b, sig):
    return real_inner(a, b, sig)


def _first(chart, pts, h):
    """Central first derivatives, shape (p, n, N)."""
    p, n = pts.shape
    eye = np.eye(n) * h
    stencil = np.concatenate([pts[:, None, :] + eye[None], pts[:, None, :] - eye[None]], axis=1)
    vals = chart.evaluator(stencil.reshape(-1, n)).reshape(p, 2 * n, -1)
    return (vals[:, :n] - vals[:, n:]) / (2 * h)


def _metric(chart, pts, h):
    D = _first(chart, pts, h)
    return _inner(D[:, :, None, :], D[:, None, :, :], _sig(chart))


def _frame_coeffs(g, pts=None):
    w = np.linalg.eigvalsh(g)
    if np.any(w[:, 0] <= 1e-10):
        i = int(np.argmin(w[:, 0]))
        where = "" if pts is None else f" at {np.asarray(pts)[i].tolist()}"
        raise DegenerateFrameError(f"metric not positive definite{where} (min eigenvalue {w[i, 0]:.3e})")
    return np.linalg.inv(np.linalg.cholesky(g))


def _cubic_coords(DD, D, sig):
    """C[a, b, c] = Re<d_a d_b L, i d_c L>."""
    return _inner(DD[:, :, :, None, :], 1j * D[:, None, None, :, :], sig)


def _to_frame(T, E):
    k = T.ndim - 1
    letters = "abcd"[:k]
    out = "ijkl"[:k]
    spec = ",".join(f"p{o}{l}" for o, l in zip(out, letters))
    return np.einsum(f"{spec},p{letters}->p{out}", *([E] * k), T)


def _perm_residual(h):
    res = np.zeros(h.shape[0])
    sym = np.zeros_like(h)
    perms = list(itertools.permutations(range(3)))
    for pm in perms:
        t = np.transpose(h, (0,) + tuple(1 + np.array(pm)))
        res = np.maximum(res, np.max(np.abs(h - t), axis=(1, 2, 3)))
        sym += t
    return res, sym / len(perms)


class _Local:
    """Pointwise first-order data for a batch of chart points."""

    def __init__(self, chart, pts, cfg: VerifyConfig):
        self.chart, self.pts = chart, pts
        sig = self.sig = _sig(chart)
        j = chart.jet(pts, cfg.step)
        self.L, self.D, self.DD = j.value, j.first, j.second
        self.g = _inner(self.D[:, :, None, :], self.D[:, None, :, :], sig)
        self.E = _frame_coeffs(self.g, pts)
        self.F = np.einsum("pia,pak->pik", self.E, self.D)
        self.C = _cubic_coords(self.DD, self.D, sig)

    def lagrangian(self):
        om = _inner(1j * self.F[:, :, None, :], self.F[:, None, :, :], self.sig)
        return np.max(np.abs(om), axis=(1, 2))

    def horizontality(self):
        return np.max(np.abs(_inner(self.F, 1j * self.L[:, None, :], self.sig)), axis=1)

    def constraint(self):
        return np.abs(_inner(self.L, self.L, self.sig) - self.chart.lift_norm)

    def sff(self):
        h = _to_frame(self.C, self.E)
        cubic, hs = _perm_residual(h)
        return hs, cubic

    def normal_residual(self):
        sig, F = self.sig, self.F
        p, n, N = F.shape
        DDf = np.einsum("pia,pjb,pabk->pijk", self.E, self.E, self.DD)
        basis = [F[:, i] for i in range(n)]
        if self.chart.is_lift:
            basis += [self.L, 1j * self.L]
        B = np.stack(basis, axis=1)
        G = _inner(B[:, :, None, :], B[:, None, :, :], sig)
        rhs = _inner(DDf[:, :, :, None, :], B[:, None, None, :, :], sig)
        x = np.linalg.solve(G[:, None, None], rhs[..., None])[..., 0]
        nrm = DDf - np.einsum("pijm,pmk->pijk", x, B)
        JF = 1j * F
        y = _inner(nrm[:, :, :, None, :], JF[:, None, None, :, :], sig)
        rem = nrm - np.einsum("pijm,pmk->pijk", y, JF)
        return np.max(np.linalg.norm(rem, axis=-1), axis=(1, 2))

    def geodesic(self):
        """|nabla_{e1} e1| from the tangential part of d_t d_t L."""
        g, D = self.g, self.D
        rhs = _inner(self.DD[:, 0, 0][:, None, :], D, self.sig)
        x = np.linalg.solve(g, rhs[..., None])[..., 0]
        x = x.copy()
        x[:, :] -= (np.einsum("pa,pa->p", x, g[:, :, 0]) / g[:, 0, 0])[:, None] * np.eye(len(g[0]))[0]
        nrm = np.sqrt(np.maximum(np.einsum("pa,pab,pb->p", x, g, x), 0.0))
        return nrm / g[:, 0, 0]


def frame_at(chart, point, step: float = STEP) -> FramePoint:
    pts = np.atleast_2d(np.asarray(point, float))
    loc = _Local(chart, pts, VerifyConfig(step=step))
    return FramePoint(pts[0], loc.F[0], loc.g[0], loc.E[0])


def second_fundamental_form(chart, frame: FramePoint, step: float = STEP, tol: float = 1e-5) -> SffTensor:
    pts = np.atleast_2d(frame.point)
    loc = _Local(chart, pts, VerifyConfig(step=step))
    normal = float(loc.normal_residual()[0])
    if normal > tol:
        raise InconsistentSffError(f"normal part outside span(J e_k): {normal:.3e} (input is not Lagrangian)")
    hs, cubic = loc.sff()
    return SffTensor(hs[0], frame, float(cubic[0]), normal)


def fit_eq1(sff) -> Eq1Fit:
    h = sff.components if isinstance(sff, SffTensor) else np.asarray(sff, float)
    n = h.shape[0]
    if n < 2:
        raise VerificationError("fit_eq1 needs n >= 2")
    lam = float(h[0, 0, 0])
    trace = float(np.max(np.abs(np.einsum("aag->g", h[1:, 1:, 1:])))) if n > 1 else 0.0
    if abs(lam) < LAMBDA_MIN:
        return Eq1Fit(lam, float("nan"), trace, float("nan"), True)
    d = float(np.mean(np.diagonal(h[0, 1:, 1:])) / lam)
    target = d * lam * np.eye(n - 1)
    parts = [
        np.abs(h[0, 0, 1:]),  # h(e1,e1) along J e1 only
        np.abs(h[0, 1:, 1:] - target),  # h(e1,e_a) = d lam J e_a
        np.abs(h[1:, 1:, 0] - target),  # <h(e_a,e_b), J e1> = delta d lam
    ]
    structure = float(max(np.max(x) if x.size else 0.0 for x in parts))
    return Eq1Fit(lam, d, trace, structure)


def _fit_batch(h):
    return [fit_eq1(x) for x in h]


def _christoffel(chart, pts, hc, h):
    """Gamma[c, a, b] = Gamma^c_ab from central differences of the metric."""
    p, n = pts.shape
    eye = np.eye(n) * hc
    Q = np.concatenate([pts[:, None, :], pts[:, None, :] + eye, pts[:, None, :] - eye], axis=1)
    g_all = _metric(chart, Q.reshape(-1, n), h).reshape(p, 2 * n + 1, n, n)
    g = g_all[:, 0]
    dg = (g_all[:, 1:n + 1] - g_all[:, n + 1:]) / (2 * hc)  # dg[x, y, z] = d_x g_yz
    G1 = 0.5 * (dg + np.transpose(dg, (0, 2, 1, 3)) - np.transpose(dg, (0, 2, 3, 1)))  # [a, b, d]
    return np.einsum("pcd,pabd->pcab", np.linalg.inv(g), G1), g


def riemann_lower(chart, pts, hc=CURVATURE_STEP, h=STEP):
    """R[a, b, c, d] = <R(d_a, d_b) d_c, d_d>, plus Gamma and g at pts."""
    p, n = pts.shape
    eye = np.eye(n) * hc
    Q = np.concatenate([pts[:, None, :], pts[:, None, :] + eye, pts[:, None, :] - eye], axis=1)
    Gam_all, g_all = _christoffel(chart, Q.reshape(-1, n), hc, h)
    Gam_all = Gam_all.reshape(p, 2 * n + 1, n, n, n)
    Gam, g = Gam_all[:, 0], g_all.reshape(p, 2 * n + 1, n, n)[:, 0]
    dGam = (Gam_all[:, 1:n + 1] - Gam_all[:, n + 1:]) / (2 * hc)  # dGam[e, c, a, b] = d_e Gamma^c_ab
    # R^d_{c a b} = d_a G^d_bc - d_b G^d_ac + G^d_ae G^e_bc - G^d_be G^e_ac
    Rup = (np.einsum("padbc->pdcab", dGam) - np.einsum("pbdac->pdcab", dGam)
           + np.einsum("pdae,pebc->pdcab", Gam, Gam) - np.einsum("pdbe,peac->pdcab", Gam, Gam))
    R = np.einsum("pde,pecab->pabcd", g, Rup)
    return R, Gam, g


def gauss_tensors(chart, pts, loc: "_Local", hs, hc=CURVATURE_STEP, h=STEP):
    R, Gam, g = riemann_lower(chart, pts, hc, h)
    Rf = _to_frame(R, loc.E)
    n = pts.shape[1]
    I = np.eye(n)
    c = chart.ambient.curvature_c
    rhs = (np.einsum("pilm,pjkm->pijkl", hs, hs) - np.einsum("pikm,pjlm->pijkl", hs, hs)
           + c * (np.einsum("il,jk->ijkl", I, I) - np.einsum("ik,jl->ijkl", I, I))[None])
    return Rf, rhs, Gam


def gauss_residual(chart, points, step: float = STEP, curvature_step: float = CURVATURE_STEP) -> np.ndarray:
    pts = np.atleast_2d(np.asarray(points, float))
    loc = _Local(chart, pts, VerifyConfig(step=step))
    hs, _ = loc.sff()
    Rf, rhs, _ = gauss_tensors(chart, pts, loc, hs, curvature_step, step)
    return np.max(np.abs(Rf - rhs), axis=(1, 2, 3, 4))


def profile_gauss_residual(chart, points, step: float = STEP, curvature_step: float = CURVATURE_STEP) -> np.ndarray:
    """max_a |<R(e_a, e_1) e_1, e_a> + mu' + mu^2| against the generating profile."""
    pts = np.atleast_2d(np.asarray(points, float))
    loc = _Local(chart, pts, VerifyConfig(step=step))
    R, _, _ = riemann_lower(chart, pts, curvature_step, step)
    Rf = _to_frame(R, loc.E)
    return _profile_gauss(chart, pts, Rf)


def _profile_gauss(chart, pts, Rf):
    _, mu, _, dmu = chart.profile_at(pts[:, 0])
    n = pts.shape[1]
    sec = np.stack([Rf[:, a, 0, 0, a] for a in range(1, n)], axis=1)
    return np.max(np.abs(sec + (dmu + mu**2)[:, None]), axis=1)


def codazzi_residual(chart, points, step: float = STEP, curvature_step: float = CURVATURE_STEP,
                     perturbation: Optional[Callable] = None, gamma=None) -> np.ndarray:
    """max |(nabla h)(X,Y,Z) - (nabla h)(Y,X,Z)| over frame index triples.

    ``perturbation(points) -> (p, n, n, n)`` is added to the frame components
    of the cubic form at every stencil point before differentiating
    (negative controls).
    """
    pts = np.atleast_2d(np.asarray(points, float))
    p, n = pts.shape
    hc = curvature_step
    eye = np.eye(n) * hc
    Q = np.concatenate([pts[:, None, :], pts[:, None, :] + eye, pts[:, None, :] - eye], axis=1).reshape(-1, n)
    j = chart.jet(Q, step)
    sig = _sig(chart)
    C = _cubic_coords(j.second, j.first, sig)
    gQ = _inner(j.first[:, :, None, :], j.first[:, None, :, :], sig)
    if perturbation is not None:
        Einv = np.linalg.inv(_frame_coeffs(gQ, Q))
        C = C + np.einsum("pai,pbj,pck,pijk->pabc", Einv, Einv, Einv, perturbation(Q))
    C = C.reshape(p, 2 * n + 1, n, n, n)
    E = _frame_coeffs(gQ.reshape(p, 2 * n + 1, n, n)[:, 0], pts)
    C0 = C[:, 0]
    dC = (C[:, 1:n + 1] - C[:, n + 1:]) / (2 * hc)  # dC[l, a, b, c]
    Gam = _christoffel(chart, pts, hc, step)[0] if gamma is None else gamma
    nab = (dC - np.einsum("pmla,pmbc->plabc", Gam, C0) - np.einsum("pmlb,pamc->plabc", Gam, C0)
           - np.einsum("pmlc,pabm->plabc", Gam, C0))
    nf = _to_frame(nab, E)
    return np.max(np.abs(nf - np.transpose(nf, (0, 2, 1, 3, 4))), axis=(1, 2, 3, 4))


def linear_perturbation(component, direction, amplitude=1e-2, origin=None):
    """Frame-component field amplitude * (x_direction - origin) on one symmetric component."""
    comp = tuple(component)

    def pert(Q):
        n = Q.shape[1]
        out = np.zeros((len(Q), n, n, n))
        x0 = 0.0 if origin is None else origin
        for pm in set(itertools.permutations(comp)):
            out[(slice(None),) + pm] = amplitude * (Q[:, direction] - x0)
        return out
    return pert


def warped_product_check(chart, t_samples, u_samples, step: float = STEP,
                         curvature_step: float = CURVATURE_STEP) -> dict:
    """Recover f(t) and mu = f'/f from the induced metric on a rectangular grid."""
    t_samples = np.asarray(t_samples, float)
    u_samples = np.atleast_2d(np.asarray(u_samples, float))
    if len(t_samples) < 5:
        raise VerificationError("warped_product_check needs at least 5 t-samples")
    n = chart.chart_dim
    T, U = len(t_samples), len(u_samples)
    pts = np.concatenate([np.repeat(t_samples, U)[:, None], np.tile(u_samples, (T, 1))], axis=1)
    hc = curvature_step
    sh = np.zeros(n)
    sh[0] = hc
    g = _metric(chart, pts, step)
    gp = _metric(chart, pts + sh, step)
    gm = _metric(chart, pts - sh, step)
    if chart.seed is not None:
        g0 = chart.seed.metric(u_samples, step)
        g0 = np.tile(g0, (T, 1, 1))
    else:
        g0 = np.tile(g[:U, 1:, 1:], (T, 1, 1))

    def f_of(gg):
        return np.sqrt(gg[:, 1, 1] / g0[:, 0, 0])

    f = f_of(g)
    mu_rec = (np.log(f_of(gp)) - np.log(f_of(gm))) / (2 * hc)
    diag = np.sqrt(np.abs(np.einsum("pii->pi", g)))
    block = np.max(np.abs(g[:, 0, 1:]) / (diag[:, :1] * diag[:, 1:]), axis=1)
    seed_metric = np.max(np.abs(g[:, 1:, 1:] / f[:, None, None] ** 2 - g0), axis=(1, 2))
    loc = _Local(chart, pts, VerifyConfig(step=step))
    out = {"points": pts, "f_rec": f, "mu_rec": mu_rec, "block_diagonal": block,
           "seed_metric": seed_metric, "geodesic": loc.geodesic()}
    if chart.profile is not None:
        out["mu_error"] = np.abs(mu_rec - chart.profile_at(pts[:, 0])[1])
    if chart.warp is not None:
        out["warp_error"] = np.abs(f - chart.warp(pts[:, 0]))
    return out


def find_e1(h, starts: int = 64, iterations: int = 200, seed: int = 0):
    """Search for the distinguished direction of an Eq.(1)-shaped cubic form.

    Candidates are fixed points of v -> C(v, v, .) on the unit sphere
    (critical points of C(v,v,v)); the winner minimises the spread of the
    eigenvalues of C(v, ., .) on v-perp. Returns an orthogonal matrix whose
    first row is the chosen e_1 (frame coordinates).
    """
    h = np.asarray(h, float)
    n = h.shape[0]
    rng = np.random.default_rng(seed)
    best, best_score = None, np.inf
    for _ in range(starts):
        v = rng.normal(size=n)
        v /= np.linalg.norm(v)
        for _ in range(iterations):
            w = np.einsum("ijk,i,j->k", h, v, v)
            nw = np.linalg.norm(w)
            if nw < 1e-14:
                break
            w /= nw
            if np.linalg.norm(w - v) < 1e-13:
                v = w
                break
            v = 0.5 * (v + w)
            v /= np.linalg.norm(v)
        A = np.einsum("ijk,i->jk", h, v)
        Q = np.linalg.qr(np.column_stack([v, np.eye(n)]))[0][:, :n]
        if Q[:, 0] @ v < 0:
            Q[:, 0] *= -1
        perp = Q[:, 1:].T @ A @ Q[:, 1:]
        ev = np.linalg.eigvalsh(perp) if n > 1 else np.zeros(1)
        eig_res = np.linalg.norm(A @ v - (v @ A @ v) * v)
        score = np.ptp(ev) + eig_res
        if score < best_score - 1e-12:
            best, best_score = Q.T, score
    return best


def rotate_sff(h, R):
    return np.einsum("ia,jb,kc,abc->ijk", R, R, R, h)


@dataclass
class VerificationReport:
    records: list
    summary: dict
    meta: dict
    errors: list
    passed: bool

    def to_json(self) -> str:
        return json.dumps({"meta": self.meta, "passed": self.passed, "errors": self.errors,
                           "checks": self.summary}, indent=2, sort_keys=True, default=_jsonable)

    def to_csv(self) -> str:
        cols = sorted({k for r in self.records for k in r if k != "point"})
        n = len(self.records[0]["point"]) if self.records else 0
        head = ["t"] + [f"u{i + 2}" for i in range(n - 1)] + cols
        lines = [",".join(head)]
        for r in self.records:
            vals = [f"{x:.17g}" for x in r["point"]] + [_fmt(r.get(c)) for c in cols]
            lines.append(",".join(vals))
        return "\n".join(lines) + "\n"


def _fmt(x):
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x))
    return f"{float(x):.17g}"


def _jsonable(x):
    if isinstance(x, np.generic):
        return x.item()
    if isinstance(x, np.ndarray):
        return x.tolist()
    raise TypeError(type(x))


def _threads(cfg: VerifyConfig) -> int:
    if cfg.threads:
        return max(1, int(cfg.threads))
    try:
        return max(1, int(os.environ.get("LAGFORGE_THREADS", "1")))
    except ValueError:
        return 1


def _point_checks(chart, pts, cfg: VerifyConfig):
    """All pointwise residuals for a batch; failures are recorded, not raised."""
    out, errors = {}, []
    try:
        loc = _Local(chart, pts, cfg)
    except Exception as exc:
        if chart.is_lift:
            L = chart.evaluator(pts)
            out["constraint"] = np.abs(_inner(L, L, _sig(chart)) - chart.lift_norm)
        return out, [f"frame: {exc}"]
    out["lagrangian"] = loc.lagrangian()
    if chart.is_lift:
        out["horizontality"] = loc.horizontality()
        out["constraint"] = loc.constraint()
    out["normal"] = loc.normal_residual()
    out["geodesic"] = loc.geodesic()
    hs, cubic = loc.sff()
    out["cubic"] = cubic
    if cfg.align_e1:
        hs = np.stack([rotate_sff(x, find_e1(x)) for x in hs])
    fits = _fit_batch(hs)
    out["lambda_rec"] = np.array([f.lambda_rec for f in fits])
    out["d_rec"] = np.array([f.d_rec for f in fits])
    out["minimal"] = np.array([f.minimal for f in fits])
    out["eq1_structure"] = np.array([f.structure_residual for f in fits])
    out["eq1_trace"] = np.array([f.trace_residual for f in fits])
    if chart.d is not None:
        out["d_error"] = np.abs(out["d_rec"] - chart.d)
    if chart.profile is not None:
        lam_p = chart.profile_at(pts[:, 0])[0]
        out["lambda_profile"] = lam_p
        out["lambda_error"] = np.abs(out["lambda_rec"] - lam_p)
    try:
        Rf, rhs, Gam = gauss_tensors(chart, pts, loc, hs, cfg.curvature_step, cfg.step)
        out["gauss"] = np.max(np.abs(Rf - rhs), axis=(1, 2, 3, 4))
        if chart.profile is not None:
            out["profile_gauss"] = _profile_gauss(chart, pts, Rf)
        out["codazzi"] = codazzi_residual(chart, pts, cfg.step, cfg.curvature_step, gamma=Gam)
    except Exception as exc:
        errors.append(f"curvature: {exc}")
    return out, errors


def run_report(chart, cfg: Optional[VerifyConfig] = None, points=None) -> VerificationReport:
    cfg = cfg or VerifyConfig()
    margin = 2 * cfg.curvature_step + 4 * cfg.step
    if points is None:
        if cfg.t_points < 1 or cfg.u_points < 1:
            raise VerificationError("empty grid")
        pts = chart.grid(cfg.t_points, cfg.u_points, margin)
    else:
        pts = np.atleast_2d(np.asarray(points, float))
    if pts.size == 0:
        raise VerificationError("empty grid")

    nthreads = _threads(cfg)
    chunks = np.array_split(np.arange(len(pts)), min(nthreads, len(pts)))
    if nthreads > 1:
        with ThreadPoolExecutor(nthreads) as ex:
            results = list(ex.map(lambda idx: _point_checks(chart, pts[idx], cfg), chunks))
    else:
        results = [_point_checks(chart, pts[idx], cfg) for idx in chunks]

    per_point = {}
    errors = []
    for (vals, errs), idx in zip(results, chunks):
        errors.extend(errs)
        for k, v in vals.items():
            per_point.setdefault(k, np.full(len(pts), np.nan))[idx] = v

    warped_keys = ()
    if chart.profile is not None or chart.warp is not None or chart.seed is not None:
        try:
            tg = np.unique(pts[:, 0])
            ug = np.unique(pts[:, 1:], axis=0)
            if len(tg) >= 5:
                wp = warped_product_check(chart, tg, ug, cfg.step, cfg.curvature_step)
                order = {tuple(p): i for i, p in enumerate(wp["points"])}
                perm = np.array([order[tuple(p)] for p in pts])
                warped_keys = [k for k in ("f_rec", "mu_rec", "block_diagonal", "seed_metric",
                                           "mu_error", "warp_error") if k in wp]
                for k in warped_keys:
                    per_point[k] = wp[k][perm]
        except Exception as exc:
            errors.append(f"warped: {exc}")

    records = []
    for i, p in enumerate(pts):
        rec = {"point": p.tolist()}
        for k, v in per_point.items():
            rec[k] = v[i].item() if hasattr(v[i], "item") else v[i]
        records.append(rec)

    summary = {}
    for k, tol in cfg.tolerances.items():
        if k not in per_point:
            continue
        v = np.asarray(per_point[k], float)
        if np.all(np.isnan(v)):
            continue
        i = int(np.nanargmax(v))
        summary[k] = {"max": float(v[i]), "argmax_point": pts[i].tolist(), "tol": tol,
                      "passed": bool(v[i] <= tol)}
    meta = dict(getattr(chart, "meta", {}) or {})
    meta["grid_points"] = len(pts)
    if np.any(per_point.get("minimal", np.zeros(1)) == 1):
        meta["minimal_points"] = int(np.sum(per_point["minimal"] == 1))
    if meta.get("n") and meta.get("d") is not None:
        from .delta import classify_special_d
        tag = classify_special_d(int(meta["n"]), meta["d"])
        if tag.case_one_m is not None:
            meta["special_case_i_m"] = tag.case_one_m
        if tag.case_two:
            meta["special_case_ii"] = "not certified"
    passed = not errors and all(s["passed"] for s in summary.values())
    return VerificationReport(records, summary, meta, errors, passed)
