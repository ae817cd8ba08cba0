import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lagforge.linalg import (AmbientSpace, DimensionError, gram_schmidt, hermitian_inner, jet2, real_inner,
                             symplectic_form)

finite = st.floats(-10, 10, allow_nan=False)
cvec = st.lists(st.tuples(finite, finite), min_size=3, max_size=3).map(
    lambda xs: np.array([complex(a, b) for a, b in xs]))


def test_hermitian_examples():
    assert hermitian_inner([1, 0], [1, 0]) == 1
    assert hermitian_inner([1, 0], [0, 1], AmbientSpace(-1, 1)) == 0
    assert hermitian_inner([1, 0, 0], [1, 0, 0], AmbientSpace.ads_lift(2)) == -1


def test_real_and_symplectic_examples():
    a, b = np.array([1j, 0]), np.array([1, 0])
    assert real_inner(a, b) == 0
    assert symplectic_form(b, a) == 1
    assert symplectic_form(b, b) == 0
    assert real_inner([1, 0], [0, 1]) == 0 and symplectic_form([1, 0], [0, 1]) == 0


def test_dimension_mismatch():
    with pytest.raises(DimensionError):
        hermitian_inner([1, 0], [1, 0, 0])
    with pytest.raises(DimensionError):
        hermitian_inner([1, 0], [1, 0], AmbientSpace.sphere_lift(2))


def test_ambient_signature_rules():
    assert AmbientSpace.ads_lift(3).signature == (-1, 1, 1, 1)
    assert not AmbientSpace.sphere_lift(3).is_lorentzian
    assert AmbientSpace.flat(3).dim == 3
    with pytest.raises(ValueError):
        AmbientSpace(2, 3)
    with pytest.raises(ValueError):
        AmbientSpace(-1, 2, (-1, -1, 1))


@given(cvec, cvec, st.sampled_from([None, AmbientSpace.ads_lift(2)]))
def test_conjugate_symmetry(a, b, space):
    assert abs(hermitian_inner(a, b, space) - np.conj(hermitian_inner(b, a, space))) <= 1e-15 * (
        1 + np.linalg.norm(a) * np.linalg.norm(b))


@given(cvec, cvec)
def test_symplectic_antisymmetry(a, b):
    assert symplectic_form(a, b) == -symplectic_form(b, a)


@given(cvec)
def test_symplectic_of_j(a):
    assert symplectic_form(a, 1j * a) == pytest.approx(real_inner(a, a), rel=1e-14, abs=1e-12)


def test_jet_examples():
    j = jet2(lambda x: np.exp(1j * x[:, :1]), [0.0], 1e-3)
    assert abs(j.first[0, 0] - 1j) < 1e-6
    j = jet2(lambda x: (x[:, :1] ** 2).astype(complex), [1.0], 1e-3)
    assert abs(j.second[0, 0, 0] - 2) < 1e-6
    j = jet2(lambda x: np.ones((len(x), 2), complex), [0.3, 0.2])
    assert np.max(np.abs(j.first)) < 1e-12 and np.max(np.abs(j.second)) < 1e-12
    assert j.step_used > 0


@given(st.floats(-2, 2), st.floats(-2, 2), st.floats(-3, 3), st.floats(-3, 3), st.floats(-3, 3))
def test_jet_quadratic_exact(x0, y0, a, b, c):
    def f(p):
        x, y = p[:, 0], p[:, 1]
        return (a * x * x + b * x * y + c * y * y + x)[:, None].astype(complex)
    step = 1e-3
    j = jet2(f, [x0, y0], step)
    scale = 1 + abs(a) + abs(b) + abs(c)
    tol = 10 * np.finfo(float).eps / step**2 * scale * (1 + x0 * x0 + y0 * y0)
    assert abs(j.second[0, 0, 0] - 2 * a) <= tol
    assert abs(j.second[1, 1, 0] - 2 * c) <= tol
    assert abs(j.second[0, 1, 0] - b) <= tol
    assert abs(j.first[0, 0] - (2 * a * x0 + b * y0 + 1)) <= tol * step
    assert np.array_equal(j.second[0, 1], j.second[1, 0])


def test_jet_errors():
    with pytest.raises(ValueError):
        jet2(lambda x: x, [0.0], step=0)

    def bad(x):
        raise ZeroDivisionError("boom")
    with pytest.raises(RuntimeError, match="stencil"):
        jet2(bad, [0.5])
    with pytest.raises(FloatingPointError):
        jet2(lambda x: np.full((len(x), 1), np.nan, complex), [0.0])


def test_gram_schmidt():
    v = [np.array([1, 1, 0], complex), np.array([0, 1, 1j])]
    e, _ = gram_schmidt(v)
    g = np.array([[real_inner(x, y) for y in e] for x in e])
    assert np.allclose(g, np.eye(2), atol=1e-14)
    with pytest.raises(np.linalg.LinAlgError):
        gram_schmidt([v[0], 2 * v[0]])
