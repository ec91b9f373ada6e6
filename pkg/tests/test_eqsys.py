import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from grp4fv import eqsys as E

positive = st.floats(0.05, 20.0)
velocity = st.floats(-5.0, 5.0)


def test_prim_cons_roundtrip_1d():
    s = E.euler1d()
    w = np.array([[1.0, 0.125], [0.5, -1.0], [1.0, 0.1]])
    u = E.prim_to_cons(s, w)
    assert np.allclose(u[:, 0], [1.0, 0.5, 1.0 / 0.4 + 0.125])
    assert np.allclose(E.cons_to_prim(s, u), w, rtol=1e-14)


@given(positive, velocity, velocity, positive)
def test_prim_cons_roundtrip_2d(rho, u, v, p):
    s = E.euler2d()
    w = np.array([rho, u, v, p])
    assert np.allclose(E.cons_to_prim(s, E.prim_to_cons(s, w)), w, rtol=1e-11, atol=1e-12)


def test_non_physical_state_raises():
    s = E.euler1d()
    with pytest.raises(E.DomainError):
        E.cons_to_prim(s, np.array([1.0, 0.0, -1.0]))
    with pytest.raises(E.DomainError):
        E.prim_to_cons(s, np.array([-1.0, 0.0, 1.0]))


def test_flux_values():
    s = E.euler1d()
    u = E.prim_to_cons(s, np.array([1.0, 2.0, 1.0]))
    assert np.allclose(E.flux_x(s, u), [2.0, 5.0, 2.0 * (u[2] + 1.0)])
    assert np.allclose(E.flux_x(E.burgers(), np.array([3.0])), [4.5])
    assert np.allclose(E.flux_x(E.advection(2.0), np.array([3.0])), [6.0])


@given(positive, velocity, velocity, positive, st.integers(0, 1))
@settings(max_examples=50)
def test_jacobian_matches_finite_difference(rho, u, v, p, axis):
    s = E.euler2d()
    q = E.prim_to_cons(s, np.array([rho, u, v, p]))
    f = E.flux_x if axis == 0 else E.flux_y
    h = 1e-6 * np.maximum(np.abs(q), 1.0)
    fd = np.column_stack([(f(s, q + h[k] * np.eye(4)[k]) - f(s, q - h[k] * np.eye(4)[k])) / (2 * h[k]) for k in range(4)])
    A = E.jacobian(s, q, axis)
    assert np.allclose(A, fd, rtol=1e-5, atol=1e-5 * np.abs(A).max())


@given(positive, velocity, velocity, positive, st.integers(0, 1))
@settings(max_examples=50)
def test_eigen_decomposition_reconstructs_jacobian(rho, u, v, p, axis):
    s = E.euler2d()
    q = E.prim_to_cons(s, np.array([rho, u, v, p]))
    e = E.eigen(s, q, axis)
    assert np.allclose(e.left @ e.right, np.eye(4), atol=1e-10)
    A = E.jacobian(s, q, axis)
    assert np.allclose(e.right @ np.diag(e.lambdas) @ e.left, A, atol=1e-9 * max(1.0, np.abs(A).max()))
    assert np.allclose(np.linalg.norm(e.right, axis=0), 1.0)


def test_eigenvalues_sorted_with_sound_speed():
    s = E.euler1d()
    q = E.prim_to_cons(s, np.array([1.0, 0.3, 1.0]))
    c = np.sqrt(1.4)
    assert np.allclose(E.eigen(s, q).lambdas, [0.3 - c, 0.3, 0.3 + c])


def test_nb_eigen_inverse():
    s = E.euler1d()
    q = E.prim_to_cons(s, np.array([0.7, -0.4, 2.0]))
    lam, r, l = np.empty(3), np.empty((3, 3)), np.empty((3, 3))
    assert E.nb_eigen_x(s.kind, s.gamma, q, lam, r, l)
    assert np.allclose(l @ r, np.eye(3), atol=1e-13)
    assert not E.nb_eigen_x(s.kind, s.gamma, np.array([1.0, 0.0, -1.0]), lam, r, l)


def test_max_wavespeed():
    s = E.euler2d()
    w = np.array([[1.0, 1.0], [0.0, 2.0], [-3.0, 0.0], [1.4, 1.4]])
    assert E.max_wavespeed(s, E.prim_to_cons(s, w)) == pytest.approx(3.0 + np.sqrt(1.4 * 1.4))
    assert E.max_wavespeed(E.advection(-2.0), np.zeros((1, 4))) == 2.0
