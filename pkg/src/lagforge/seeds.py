"""Seed maps phi for the immersion builders, and their numerical certification.

Targets:
  sphere -- Legendrian in S^{2n-1}(1) subset C^n
  ads    -- Legendrian in H^{2n-1}_1(-1) subset C^n_1 (first slot timelike)
  flat   -- Lagrangian in C^{n-1} (third hyperbolic branch), with a w-potential
"""
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .linalg import DEFAULT_STEP, jet2, real_inner, symplectic_form

CERTIFY_TOL = 1e-6
CERTIFY_STEP = 1e-3  # paired with the 4th-order stencil
TARGETS = ("sphere", "ads", "flat")


class SeedError(ValueError):
    pass


class CompatibilityError(SeedError):
    """The w-system is not integrable: phi is not Lagrangian."""


@dataclass
class SeedMap:
    name: str
    target: str
    n: int
    evaluator: Callable[[np.ndarray], np.ndarray]
    domain: tuple = ()
    certified: bool = False
    report: Optional[dict] = None

    def __post_init__(self):
        if self.target not in TARGETS:
            raise SeedError(f"unknown target {self.target!r}")
        if not self.domain:
            self.domain = ((-1.0, 1.0),) * self.chart_dim

    @property
    def chart_dim(self) -> int:
        return self.n - 1

    @property
    def dim(self) -> int:
        """Number of complex slots of phi."""
        return self.n - 1 if self.target == "flat" else self.n

    @property
    def signature(self) -> np.ndarray:
        sig = np.ones(self.dim)
        if self.target == "ads":
            sig[0] = -1.0
        return sig

    @property
    def norm_target(self) -> Optional[float]:
        return {"sphere": 1.0, "ads": -1.0}.get(self.target)

    def __call__(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        single = u.ndim == 1
        out = self.evaluator(np.atleast_2d(u))
        return out[0] if single else out

    def jet(self, u, step: float = DEFAULT_STEP, order: int = 4):
        return jet2(self.evaluator, u, step, order=order)

    def metric(self, u, step: float = DEFAULT_STEP) -> np.ndarray:
        j = self.jet(u, step)
        return real_inner(j.first[..., :, None, :], j.first[..., None, :, :], self.signature)

    def default_grid(self, points: int = 3) -> np.ndarray:
        axes = [np.linspace(lo, hi, points) for lo, hi in self.domain]
        return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, self.chart_dim)

    def ensure_certified(self, grid=None) -> "SeedMap":
        if not self.certified:
            rep = certify_seed(self, grid)
            if not rep["certified"]:
                raise SeedError(f"seed {self.name} failed certification: {rep}")
        return self


@dataclass
class WPotential:
    """w with dw/du_a = Re<i dphi/du_a, phi>, normalised by w(base_point) = w0."""

    seed: SeedMap
    base_point: tuple
    w0: float = 0.0
    axis_order: Optional[Sequence[int]] = None
    constant: bool = False
    residual: float = 0.0
    nodes: int = 16
    panel: float = 0.25

    def gradient_rhs(self, u) -> np.ndarray:
        j = self.seed.jet(u)
        return real_inner(1j * j.first, j.value[..., None, :], None)

    def __call__(self, u) -> np.ndarray:
        u = np.atleast_2d(np.asarray(u, dtype=float))
        if self.constant:
            return np.full(len(u), self.w0)
        m = u.shape[1]
        order = list(self.axis_order) if self.axis_order is not None else list(range(m))
        xg, wg = np.polynomial.legendre.leggauss(self.nodes)
        base = np.asarray(self.base_point, dtype=float)
        out = np.full(len(u), float(self.w0))
        cur = np.tile(base, (len(u), 1))
        for ax in order:
            a, b = cur[:, ax], u[:, ax]
            panels = max(1, int(math.ceil(np.max(np.abs(b - a)) / self.panel)))
            edges = np.linspace(0.0, 1.0, panels + 1)
            for p0, p1 in zip(edges[:-1], edges[1:]):
                s = (p0 + p1) / 2 + (p1 - p0) / 2 * xg
                pts = cur[:, None, :].repeat(len(s), axis=1)
                pts[:, :, ax] = a[:, None] + s[None, :] * (b - a)[:, None]
                j = self.seed.jet(pts.reshape(-1, m), order=4)
                f = real_inner(1j * j.first[:, ax, :], j.value, None).reshape(len(u), len(s))
                out += (f @ wg) * (p1 - p0) / 2 * (b - a)
            cur = cur.copy()
            cur[:, ax] = b
        return out


def _seed_basis(n: int) -> np.ndarray:
    """Orthonormal basis (n x (n-1)) of the complement of (1,...,1): Helmert columns."""
    U = np.zeros((n, n - 1))
    for j in range(1, n):
        U[:j, j - 1] = 1.0
        U[j, j - 1] = -j
        U[:, j - 1] /= math.sqrt(j * (j + 1))
    return U


def circle_geodesic() -> SeedMap:
    def ev(u):
        return np.stack([np.cos(u[:, 0]), np.sin(u[:, 0])], axis=-1).astype(complex)
    return SeedMap("circle", "sphere", 2, ev, ((-math.pi, math.pi),))


def hyperbolic_geodesic() -> SeedMap:
    def ev(u):
        return np.stack([np.cosh(u[:, 0]), np.sinh(u[:, 0])], axis=-1).astype(complex)
    return SeedMap("hyperbolic", "ads", 2, ev, ((-1.0, 1.0),))


def flat_line(w0: float = 0.0):
    def ev(u):
        return u[:, :1].astype(complex)
    seed = SeedMap("flat_line", "flat", 2, ev, ((-1.0, 1.0),))
    return seed, WPotential(seed, (0.0,), w0, constant=True)


def legendrian_torus(n: int, phase_matrix=None, name: str = "torus") -> SeedMap:
    """phi(u) = n^{-1/2} (e^{i theta_1}, ..., e^{i theta_n}) with theta = A u.

    A = sqrt(n) * Helmert basis: columns sum to zero (Legendrian) and the
    induced metric is the identity in u.
    """
    if n < 3:
        raise SeedError("legendrian_torus needs n >= 3")
    A = math.sqrt(n) * _seed_basis(n) if phase_matrix is None else np.asarray(phase_matrix, float)
    scale = 1.0 / math.sqrt(n)

    def ev(u):
        return scale * np.exp(1j * (u @ A.T))
    seed = SeedMap(name, "sphere", n, ev, ((-1.0, 1.0),) * (n - 1))
    seed.phase_matrix = A
    return seed


def perturbed_torus(n: int = 3, factor: float = 1.01) -> SeedMap:
    """Torus with its first phase scaled: no longer Legendrian nor minimal."""
    A = math.sqrt(n) * _seed_basis(n)
    A[0] *= factor
    return legendrian_torus(n, A, name=f"torus_perturbed_{factor}")


def real_sphere(n: int) -> SeedMap:
    """Totally geodesic S^{n-1} = S^{2n-1} cap R^n, in nested polar coordinates."""
    def ev(u):
        x = np.stack([np.cos(u[:, 0]), np.sin(u[:, 0])], axis=-1)
        for k in range(1, u.shape[1]):
            x = np.concatenate([np.cos(u[:, k:k + 1]) * x, np.sin(u[:, k:k + 1])], axis=-1)
        return x.astype(complex)
    return SeedMap("real_sphere", "sphere", n, ev, ((-1.0, 1.0),) + ((-0.8, 0.8),) * (n - 2))


def real_hyperbolic(n: int) -> SeedMap:
    """Totally geodesic H^{n-1} = H^{2n-1}_1 cap R^n_1 (first slot timelike)."""
    def ev(u):
        x = np.stack([np.cosh(u[:, 0]), np.sinh(u[:, 0])], axis=-1)
        for k in range(1, u.shape[1]):
            x = np.concatenate([np.cosh(u[:, k:k + 1]) * x, np.sinh(u[:, k:k + 1])], axis=-1)
        return x.astype(complex)
    return SeedMap("real_hyperbolic", "ads", n, ev, ((-1.0, 1.0),) * (n - 1))


def lagrangian_plane(n: int, w0: float = 0.0):
    """R^{n-1} inside C^{n-1}; w is constant."""
    def ev(u):
        return u.astype(complex)
    seed = SeedMap("lagrangian_plane", "flat", n, ev, ((-1.0, 1.0),) * (n - 1))
    return seed, WPotential(seed, (0.0,) * (n - 1), w0, constant=True)


CATALOG = {
    "circle": lambda n: circle_geodesic(),
    "hyperbolic": lambda n: hyperbolic_geodesic(),
    "flat_line": lambda n: flat_line()[0],
    "torus": legendrian_torus,
    "real_sphere": real_sphere,
    "real_hyperbolic": real_hyperbolic,
    "lagrangian_plane": lambda n: lagrangian_plane(n)[0],
}


def catalog_seed(name: str, n: int) -> SeedMap:
    try:
        seed = CATALOG[name](n)
    except KeyError:
        raise SeedError(f"unknown catalog seed {name!r}; choose from {sorted(CATALOG)}") from None
    if seed.n != n:
        raise SeedError(f"seed {name!r} is only available for n = {seed.n}")
    return seed


def certify_seed(seed: SeedMap, grid=None, tol: float = CERTIFY_TOL, step: float = CERTIFY_STEP) -> dict:
    """Constraint, Legendrian (or Lagrangian) and minimality residuals on a grid."""
    grid = seed.default_grid() if grid is None else np.atleast_2d(np.asarray(grid, float))
    if grid.size == 0:
        raise SeedError("empty certification grid")
    sig = seed.signature
    j = jet2(seed.evaluator, grid, step, order=4)
    phi, D, DD = j.value, j.first, j.second
    g = real_inner(D[:, :, None, :], D[:, None, :, :], sig)
    cond = np.linalg.cond(g)
    if np.any(cond > 1e8):
        raise SeedError(f"degenerate induced metric (condition number {np.max(cond):.3e})")
    ginv = np.linalg.inv(g)

    if seed.norm_target is None:
        constraint = np.zeros(len(grid))
        contact = np.max(np.abs(symplectic_form(D[:, :, None, :], D[:, None, :, :], sig)), axis=(1, 2))
    else:
        constraint = np.abs(real_inner(phi, phi, sig) - seed.norm_target)
        contact = np.max(np.abs(real_inner(1j * D, phi[:, None, :], sig)), axis=1)

    # mean curvature vector of phi inside its target
    trace = np.einsum("pab,pabk->pk", ginv, DD)
    tang = real_inner(trace[:, None, :], D, sig)
    trace = trace - np.einsum("pa,pab,pbk->pk", tang, ginv, D)
    if seed.norm_target is not None:
        coef = real_inner(trace, phi, sig) / real_inner(phi, phi, sig)
        trace = trace - coef[:, None] * phi
    minimality = np.linalg.norm(trace, axis=-1)

    rep = {
        "constraint": float(np.max(constraint)),
        "legendrian": float(np.max(contact)),
        "minimality": float(np.max(minimality)),
    }
    rep["certified"] = all(v <= tol for v in rep.values())
    seed.certified = rep["certified"]
    seed.report = rep
    return rep


def lagrangian_curl(seed: SeedMap, grid) -> tuple:
    """Largest |d(rhs)| = 2|omega(d_a phi, d_b phi)| over the grid, with the worst (a, b)."""
    j = jet2(seed.evaluator, np.atleast_2d(grid), order=4)
    om = 2 * np.abs(symplectic_form(j.first[:, :, None, :], j.first[:, None, :, :], None))
    worst = np.unravel_index(np.argmax(om), om.shape)
    return float(om.max()) if om.size else 0.0, (int(worst[1]) + 2, int(worst[2]) + 2)


def solve_w(seed: SeedMap, path_grid=None, base_point=None, w0: float = 0.0,
            axis_order=None, curl_tol: float = 1e-6) -> WPotential:
    """Integrate dw/du_a = Re<i d_a phi, phi> along axis-aligned paths from base_point."""
    if seed.target != "flat":
        raise SeedError("solve_w needs a flat (C^{n-1}) seed")
    grid = seed.default_grid() if path_grid is None else np.atleast_2d(np.asarray(path_grid, float))
    if seed.chart_dim > 1:
        curl, pair = lagrangian_curl(seed, grid)
        if curl > curl_tol:
            raise CompatibilityError(
                f"w-system not integrable: curl {curl:.3e} at pair (u{pair[0]}, u{pair[1]}); phi is not Lagrangian")
    base = tuple(np.zeros(seed.chart_dim)) if base_point is None else tuple(base_point)
    w = WPotential(seed, base, w0, axis_order)
    w.residual = w_gradient_residual(w, grid)
    return w


def w_gradient_residual(w: WPotential, grid, step: float = 1e-3) -> float:
    grid = np.atleast_2d(np.asarray(grid, float))
    j = jet2(lambda u: w(u)[:, None].astype(complex), grid, step, order=4)
    fd = np.real(j.first[..., 0])
    return float(np.max(np.abs(fd - w.gradient_rhs(grid))))
