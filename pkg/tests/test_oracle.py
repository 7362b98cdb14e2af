import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hepta import HeptaSpec, build_H_hat, lambda_spectrum
from hepta.errors import ConvergenceError, SingularMatrixError
from hepta.oracle import DenseSym, inverse_iteration, jacobi_eigen, lu_det, lu_solve

seeds = st.integers(0, 2**32 - 1)


def _sym(rng, n):
    m = rng.standard_normal((n, n))
    return m + m.T


def test_densesym_symmetrizes():
    m = DenseSym([[1.0, 2.0], [0.0, 1.0]])
    assert np.array_equal(m.entries, [[1.0, 1.0], [1.0, 1.0]])
    with pytest.raises(ValueError):
        DenseSym(np.ones((2, 3)))


def test_jacobi_diagonal():
    ev, v = jacobi_eigen(np.diag([3.0, 1.0, 2.0, 4.0, 5.0]))
    np.testing.assert_array_equal(ev, [1, 2, 3, 4, 5])
    assert np.array_equal(np.abs(v), np.eye(5)[:, [1, 2, 0, 3, 4]])


def test_jacobi_sine_diagonalizable():
    spec = HeptaSpec(17, 1.0, -2.0, 0.5, 1.5, 0, 0)
    ev, _ = jacobi_eigen(build_H_hat(spec))
    np.testing.assert_allclose(ev, np.sort(lambda_spectrum(spec)), atol=1e-10)


@settings(max_examples=25, deadline=None)
@given(seeds, st.integers(1, 40))
def test_jacobi_self_check(seed, n):
    m = _sym(np.random.default_rng(seed), n)
    ev, v = jacobi_eigen(m)
    assert np.all(np.diff(ev) >= 0)
    np.testing.assert_allclose(v.T @ v, np.eye(n), atol=1e-10)
    assert np.max(np.linalg.norm(m @ v - v * ev, axis=0)) <= 1e-9 * np.linalg.norm(m)


@settings(max_examples=25, deadline=None)
@given(seeds, st.integers(2, 40))
def test_jacobi_product_is_lu_det(seed, n):
    m = _sym(np.random.default_rng(seed), n)
    ev, _ = jacobi_eigen(m)
    assert lu_det(m).value == pytest.approx(np.prod(ev), rel=1e-7)


def test_lu_det_simple():
    assert lu_det(np.eye(4)).value == 1.0
    assert lu_det(2 * np.eye(5)).value == 32.0
    assert lu_det(np.zeros((3, 3))).value == 0.0
    assert lu_det(np.array([[0.0, 1.0], [1.0, 0.0]])).value == -1.0


def _cofactor(m):
    if m.shape[0] == 1:
        return m[0, 0]
    return sum((-1) ** j * m[0, j] * _cofactor(np.delete(m[1:], j, axis=1)) for j in range(m.shape[0]))


@given(seeds)
def test_lu_det_vs_cofactor(seed):
    m = np.random.default_rng(seed).standard_normal((4, 4))
    assert lu_det(m).value == pytest.approx(_cofactor(m), rel=1e-10, abs=1e-12)


def test_lu_det_extreme_scale():
    det = lu_det(1e200 * np.eye(4))
    assert det.value == np.inf and det.log2_abs == pytest.approx(800 * np.log2(10))


def test_lu_solve_simple():
    b = np.arange(1.0, 6.0)
    np.testing.assert_array_equal(lu_solve(np.eye(5), b), b)
    np.testing.assert_array_equal(lu_solve(2 * np.eye(5), b), b / 2)
    with pytest.raises(SingularMatrixError):
        lu_solve(np.zeros((3, 3)), np.ones(3))
    with pytest.raises(ValueError):
        lu_solve(np.eye(3), np.ones(4))


@given(seeds, st.integers(1, 30))
def test_lu_solve_roundtrip(seed, n):
    rng = np.random.default_rng(seed)
    m = rng.standard_normal((n, n)) + n * np.eye(n)
    x0 = rng.standard_normal(n)
    x = lu_solve(m, m @ x0)
    rhs = m @ x0
    assert np.max(np.abs(m @ x - rhs)) <= 1e-9 * np.abs(m).max() * np.abs(x).max()


def test_inverse_iteration_isolated():
    m = np.diag([1.0, 2.0, 3.0, 10.0])
    m[0, 1] = m[1, 0] = 0.1
    ev = np.linalg.eigvalsh(m)[-1]
    x = inverse_iteration(m, ev)
    assert abs(abs(x[3]) - 1) < 1e-10


def test_inverse_iteration_double_eigenvalue():
    m = np.diag([1.0, 1.0, 4.0, 5.0, 6.0])
    x = inverse_iteration(m, 1.0)
    assert np.linalg.norm(m @ x - x) <= 1e-7 * np.linalg.norm(m)
    assert abs(np.linalg.norm(x) - 1) < 1e-12


def test_inverse_iteration_identity():
    x = inverse_iteration(np.eye(5), 1.0)
    assert np.linalg.norm(np.eye(5) @ x - x) == 0 and abs(np.linalg.norm(x) - 1) < 1e-12


def test_inverse_iteration_gives_up():
    # one step from a shift midway between eigenvalues cannot converge
    m = np.diag([1.0, -1.0, 2.0, -2.0, 3.0])
    with pytest.raises(ConvergenceError):
        inverse_iteration(m, 0.0, max_iter=1)
