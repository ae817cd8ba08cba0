"""Complex / indefinite Hermitian linear algebra and finite-difference jets.

Vectors are plain numpy complex arrays whose last axis is the ambient
coordinate index; every inner product broadcasts over leading axes so the
verifier can work on whole stencils at once.
"""
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

DEFAULT_STEP = 1e-4


class DimensionError(ValueError):
    pass


@dataclass(frozen=True)
class AmbientSpace:
    """Complex coordinate space with a diagonal (possibly Lorentzian) Hermitian form.

    ``curvature_c`` is the holomorphic curvature parameter of the space form the
    vectors describe (0 flat, +1 projective, -1 hyperbolic); ``dim`` is the
    number of complex slots actually stored, which is ``n + 1`` for lift
    targets and ``n`` for the flat model.
    """

    curvature_c: int
    complex_dim_n: int
    signature: tuple = field(default=())

    def __post_init__(self):
        if self.curvature_c not in (-1, 0, 1):
            raise ValueError(f"curvature_c must be -1, 0 or 1, got {self.curvature_c}")
        if self.complex_dim_n < 1:
            raise ValueError("complex_dim_n must be positive")
        sig = tuple(int(s) for s in self.signature)
        if not sig:
            dim = self.complex_dim_n + (0 if self.curvature_c == 0 else 1)
            sig = (1,) * dim
            if self.curvature_c == -1:
                sig = (-1,) + sig[1:]
        if any(s not in (-1, 1) for s in sig):
            raise ValueError("signature entries must be +1 or -1")
        if sig.count(-1) > 1:
            raise ValueError("at most one timelike slot is supported")
        object.__setattr__(self, "signature", sig)

    @property
    def dim(self) -> int:
        return len(self.signature)

    @property
    def is_lorentzian(self) -> bool:
        return -1 in self.signature

    @property
    def sig(self) -> np.ndarray:
        return np.asarray(self.signature, dtype=float)

    @classmethod
    def flat(cls, n: int) -> "AmbientSpace":
        return cls(0, n, (1,) * n)

    @classmethod
    def sphere_lift(cls, n: int) -> "AmbientSpace":
        return cls(1, n, (1,) * (n + 1))

    @classmethod
    def ads_lift(cls, n: int, timelike_slot: int = 0) -> "AmbientSpace":
        sig = [1] * (n + 1)
        sig[timelike_slot] = -1
        return cls(-1, n, tuple(sig))


def _signature(space, dim: int) -> np.ndarray:
    if space is None:
        return np.ones(dim)
    if isinstance(space, AmbientSpace):
        sig = space.sig
    else:
        sig = np.asarray(space, dtype=float)
    if sig.shape[-1] != dim:
        raise DimensionError(f"vector dimension {dim} does not match space dimension {sig.shape[-1]}")
    return sig


def hermitian_inner(a, b, space=None):
    """sum_j sigma_j a_j conj(b_j) over the last axis (broadcasting)."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape[-1] != b.shape[-1]:
        raise DimensionError(f"dimension mismatch: {a.shape[-1]} vs {b.shape[-1]}")
    sig = _signature(space, a.shape[-1])
    return np.sum(sig * a * np.conj(b), axis=-1)


def real_inner(a, b, space=None):
    return np.real(hermitian_inner(a, b, space))


def symplectic_form(a, b, space=None):
    """omega(a, b) = Re<i a, b>; vanishes on Lagrangian tangent planes.

    Written out in real products so that swapping the arguments negates
    the result bit for bit.
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape[-1] != b.shape[-1]:
        raise DimensionError(f"dimension mismatch: {a.shape[-1]} vs {b.shape[-1]}")
    sig = _signature(space, a.shape[-1])
    return np.sum(sig * (a.real * b.imag - a.imag * b.real), axis=-1)


def gram(vectors, space=None) -> np.ndarray:
    """Real Gram matrix of a stack of vectors of shape (..., k, N)."""
    v = np.asarray(vectors, dtype=complex)
    return real_inner(v[..., :, None, :], v[..., None, :, :], space)


@dataclass
class Jet2:
    """Value, first and second derivatives of a vector-valued map.

    Arrays carry the batch axes of the evaluation points first:
    ``value`` (..., N), ``first`` (..., m, N), ``second`` (..., m, m, N).
    """

    value: np.ndarray
    first: np.ndarray
    second: np.ndarray
    step_used: float


def jet2(f: Callable[[np.ndarray], np.ndarray], point, step: float = DEFAULT_STEP,
         order: int = 2) -> Jet2:
    """Central-difference jet of ``f`` at ``point``.

    ``f`` maps an array of chart points (k, m) to values (k, N). ``point`` may
    be a single chart point (m,) or a batch (p, m). ``order`` selects the
    accuracy of the stencil (2 or 4).
    """
    if not step > 0:
        raise ValueError("step must be positive")
    if order not in (2, 4):
        raise ValueError("order must be 2 or 4")
    pts = np.asarray(point, dtype=float)
    single = pts.ndim == 1
    pts = np.atleast_2d(pts)
    p, m = pts.shape
    h = step

    if order == 2:
        offs1 = [(-1, -0.5), (1, 0.5)]
        offs2 = [(-1, 1.0), (0, -2.0), (1, 1.0)]
        mixed = [(1, 1, 0.25), (1, -1, -0.25), (-1, 1, -0.25), (-1, -1, 0.25)]
    else:
        offs1 = [(-2, 1 / 12), (-1, -8 / 12), (1, 8 / 12), (2, -1 / 12)]
        offs2 = [(-2, -1 / 12), (-1, 16 / 12), (0, -30 / 12), (1, 16 / 12), (2, -1 / 12)]
        c1 = dict(offs1)
        mixed = [(a, b, c1[a] * c1[b]) for a in c1 for b in c1]

    # assemble one batch of stencil points so f is called once
    shifts = [np.zeros(m)]
    eye = np.eye(m)
    index = {}
    for j in range(m):
        for s, _ in offs2:
            if s:
                index[(j, s)] = len(shifts)
                shifts.append(s * h * eye[j])
    for j in range(m):
        for k in range(j + 1, m):
            for a, b, _ in mixed:
                index[(j, k, a, b)] = len(shifts)
                shifts.append(a * h * eye[j] + b * h * eye[k])
    shifts = np.asarray(shifts)
    stencil = (pts[:, None, :] + shifts[None, :, :]).reshape(-1, m)
    try:
        vals = np.asarray(f(stencil))
    except Exception as exc:  # propagate with context
        raise RuntimeError(f"evaluation failed on stencil around {pts.tolist()}: {exc}") from exc
    vals = vals.reshape(p, len(shifts), -1)
    if not np.all(np.isfinite(vals)):
        bad = np.argwhere(~np.isfinite(vals).all(axis=-1))[0]
        raise FloatingPointError(f"non-finite value at stencil point {stencil[bad[0] * len(shifts) + bad[1]].tolist()}")

    value = vals[:, 0]
    n_out = vals.shape[-1]
    first = np.zeros((p, m, n_out), dtype=vals.dtype)
    second = np.zeros((p, m, m, n_out), dtype=vals.dtype)
    for j in range(m):
        first[:, j] = sum(w * vals[:, index[(j, s)]] for s, w in offs1) / h
        second[:, j, j] = sum(w * (vals[:, index[(j, s)]] if s else value) for s, w in offs2) / h**2
        for k in range(j + 1, m):
            mix = sum(w * vals[:, index[(j, k, a, b)]] for a, b, w in mixed) / h**2
            second[:, j, k] = mix
            second[:, k, j] = mix
    if single:
        value, first, second = value[0], first[0], second[0]
    return Jet2(value, first, second, h)


def gram_schmidt(vectors: Sequence[np.ndarray], space=None, pivot_tol: float = 1e-8):
    """Modified Gram-Schmidt with one re-orthogonalisation pass.

    Returns (orthonormal vectors, lower-triangular coefficient matrix E) with
    e_i = sum_a E[i, a] v_a.
    """
    v = [np.asarray(x, dtype=complex) for x in vectors]
    k = len(v)
    E = np.zeros((k, k))
    out = []
    for i in range(k):
        w = v[i].copy()
        coeff = np.zeros(k)
        coeff[i] = 1.0
        for _ in range(2):
            for j, e in enumerate(out):
                r = real_inner(w, e, space)
                w = w - r * e
                coeff = coeff - r * E[j]
        nrm2 = real_inner(w, w, space)
        if not nrm2 > pivot_tol**2:
            raise np.linalg.LinAlgError(f"degenerate tangent frame (pivot {np.sqrt(max(nrm2, 0.0)):.3e})")
        nrm = np.sqrt(nrm2)
        out.append(w / nrm)
        E[i] = coeff / nrm
    return out, E
