import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from melab import _kernels, spectral
from melab.catalog import Power, StandardEntropy
from melab.errors import (
    DimensionError,
    DomainError,
    EighConvergenceError,
    NotHermitianError,
    SingularDifferentialError,
)
from melab.sampling import random_unitary, trial_rng
from melab.spectral import (
    ScalarFunction,
    Superoperator,
    apply_univariate,
    bivariate_calculus,
    divided_difference,
    eigh,
    eigvalsh,
    frechet_diff,
    frechet_diff_inverse,
    left_right_superops,
    loewner_matrix,
    matrix_from_json,
    matrix_to_json,
    min_eigenvalue,
    trace_pairing,
    unvec,
    vec,
)

from conftest import herm, pd_matrix

seeds = st.integers(min_value=0, max_value=2**32 - 1)
dims = st.integers(min_value=1, max_value=5)

SQUARE = ScalarFunction(lambda t: t * t, lambda t: 2 * t, name="square")
EXP = ScalarFunction(np.exp, np.exp, name="exp")


def fd_frechet(f, x, h, eps=1e-5):
    return (apply_univariate(f, x + eps * h) - apply_univariate(f, x - eps * h)) / (2 * eps)


# -- eigensolver -------------------------------------------------------------


@pytest.mark.parametrize("backend", sorted(_kernels.available_backends()))
@pytest.mark.parametrize("n", [1, 2, 3, 5, 8, 16])
def test_backends_match_lapack(backend, n):
    kernel = _kernels.available_backends()[backend]
    a = herm(n, 11, n)
    w, v, sweeps, off = kernel(a.copy(), 1e-13, 100, True)
    order = np.argsort(w)
    np.testing.assert_allclose(w[order], np.linalg.eigvalsh(a), atol=1e-12)
    np.testing.assert_allclose(v @ np.diag(w) @ v.conj().T, a, atol=1e-12)
    np.testing.assert_allclose(v.conj().T @ v, np.eye(n), atol=1e-12)
    assert sweeps <= 100 and off <= 1e-13 * max(np.linalg.norm(a), 1e-300)


@pytest.mark.parametrize("backend", sorted(_kernels.available_backends()))
def test_backend_without_vectors(backend):
    kernel = _kernels.available_backends()[backend]
    a = herm(4, 3, 1)
    w, _, _, _ = kernel(a.copy(), 1e-13, 100, False)
    np.testing.assert_allclose(np.sort(w), np.linalg.eigvalsh(a), atol=1e-12)


@given(seeds, dims)
@settings(max_examples=40, deadline=None)
def test_eigh_reconstructs(seed, n):
    a = herm(n, seed)
    dec = eigh(a)
    assert np.all(np.diff(dec.eigenvalues) >= 0)
    np.testing.assert_allclose(dec.reconstruct(), a, atol=1e-12)
    np.testing.assert_allclose(dec.eigenvectors.conj().T @ dec.eigenvectors, np.eye(n), atol=1e-12)


def test_eigh_degenerate_spectrum():
    u = random_unitary(4, trial_rng(5))
    a = u @ np.diag([1.0, 1.0, 1.0, 3.0]) @ u.conj().T
    dec = eigh(a)
    np.testing.assert_allclose(dec.eigenvalues, [1, 1, 1, 3], atol=1e-12)
    np.testing.assert_allclose(dec.reconstruct(), a, atol=1e-12)
    np.testing.assert_allclose(eigvalsh(np.eye(3)), np.ones(3))


def test_eigh_zero_matrix():
    dec = eigh(np.zeros((3, 3)))
    np.testing.assert_array_equal(dec.eigenvalues, np.zeros(3))


def test_eigh_sweep_cap(monkeypatch):
    monkeypatch.setattr(spectral, "JACOBI_MAX_SWEEPS", 1)
    with pytest.raises(EighConvergenceError) as info:
        eigh(herm(8, 2))
    assert info.value.sweeps == 1


def test_hermitian_validation():
    with pytest.raises(NotHermitianError):
        eigh(np.array([[1.0, 2.0], [0.0, 1.0]]))
    with pytest.raises(DimensionError):
        eigh(np.ones((2, 3)))
    with pytest.raises(DomainError):
        eigh(np.array([[np.nan]]))


def test_min_eigenvalue():
    a = np.diag([3.0, -2.0, 5.0])
    assert min_eigenvalue(a) == pytest.approx(-2.0)
    with pytest.raises(NotHermitianError):
        min_eigenvalue(np.array([[0.0, 1.0], [0.0, 0.0]]))


# -- divided differences and univariate calculus ------------------------------


def test_divided_difference_examples():
    assert divided_difference(SQUARE, 1.0, 3.0) == pytest.approx(4.0)
    assert divided_difference(SQUARE, 2.0, 2.0) == pytest.approx(4.0)
    log = ScalarFunction(np.log, lambda t: 1 / t)
    assert divided_difference(log, 1.0, np.e) == pytest.approx(1 / (np.e - 1))
    with pytest.raises(DomainError):
        divided_difference(SQUARE, -1.0, 1.0)


def test_divided_difference_coincidence_threshold():
    t = 5.0
    near = t * (1 + 5e-8)
    assert divided_difference(EXP, t, near) == np.exp((t + near) / 2)
    np.testing.assert_allclose(loewner_matrix(SQUARE, [1.0, 1.0, 2.0]), [[2, 2, 3], [2, 2, 3], [3, 3, 4]])


def test_apply_univariate():
    x = pd_matrix(3, 4)
    root = apply_univariate(np.sqrt, x)
    np.testing.assert_allclose(root @ root, x, atol=1e-12)
    np.testing.assert_allclose(apply_univariate(SQUARE, x), x @ x, atol=1e-12)
    with pytest.raises(DomainError):
        apply_univariate(np.sqrt, np.diag([1.0, -1.0]))


def test_frechet_diff_square_is_anticommutator():
    x = np.array([[2.0, 1 + 0.5j], [1 - 0.5j, 3.0]])
    h = np.array([[1.0, 0.0], [0.0, -1.0]])
    np.testing.assert_allclose(frechet_diff(SQUARE, x, h), x @ h + h @ x, atol=1e-12)


@pytest.mark.parametrize("fn", [Power(2.5).derivative, StandardEntropy().derivative, EXP], ids=["power", "log", "exp"])
def test_frechet_diff_matches_finite_differences(fn):
    for k in range(10):
        x, h = pd_matrix(3, 9, k), herm(3, 9, k, 1)
        exact = frechet_diff(fn, x, h)
        assert np.linalg.norm(exact - fd_frechet(fn, x, h)) <= 1e-6 * np.linalg.norm(exact)


@given(seeds, dims, st.floats(-3, 3), st.floats(-3, 3))
@settings(max_examples=40, deadline=None)
def test_frechet_diff_is_linear(seed, n, a, b):
    f = StandardEntropy().derivative
    x, h1, h2 = pd_matrix(n, seed), herm(n, seed, 1), herm(n, seed, 2)
    lhs = frechet_diff(f, x, a * h1 + b * h2)
    rhs = a * frechet_diff(f, x, h1) + b * frechet_diff(f, x, h2)
    np.testing.assert_allclose(lhs, rhs, atol=1e-10)


@given(seeds, dims)
@settings(max_examples=40, deadline=None)
def test_frechet_inverse_round_trip(seed, n):
    f = Power(1.5).derivative
    x, h = pd_matrix(n, seed), herm(n, seed, 1)
    back = frechet_diff(f, x, frechet_diff_inverse(f, x, h))
    assert np.linalg.norm(back - h) <= 1e-10 * max(1.0, np.linalg.norm(h))


@given(seeds, dims)
@settings(max_examples=30, deadline=None)
def test_frechet_unitary_covariance(seed, n):
    f = StandardEntropy().derivative
    x, h = pd_matrix(n, seed), herm(n, seed, 1)
    u = random_unitary(n, trial_rng(seed, 2))
    lhs = frechet_diff(f, u @ x @ u.conj().T, u @ h @ u.conj().T)
    np.testing.assert_allclose(lhs, u @ frechet_diff(f, x, h) @ u.conj().T, atol=1e-10)


@given(seeds, dims)
@settings(max_examples=30, deadline=None)
def test_frechet_diff_self_adjoint_in_trace_pairing(seed, n):
    f = Power(2.5).derivative
    x, h, k = pd_matrix(n, seed), herm(n, seed, 1), herm(n, seed, 2)
    assert trace_pairing(k, frechet_diff(f, x, h)) == pytest.approx(trace_pairing(frechet_diff(f, x, k), h), abs=1e-10)


def test_frechet_inverse_singular():
    constant = ScalarFunction(lambda t: np.ones_like(t), lambda t: np.zeros_like(t))
    with pytest.raises(SingularDifferentialError):
        frechet_diff_inverse(constant, np.eye(2), np.eye(2))


# -- superoperators -------------------------------------------------------------


def test_vec_round_trip_and_column_order():
    h = np.arange(4.0).reshape(2, 2)
    np.testing.assert_array_equal(vec(h), [0, 2, 1, 3])
    np.testing.assert_array_equal(unvec(vec(h), 2), h)


def test_left_right_superops_commute():
    x = pd_matrix(3, 1)
    left, right = left_right_superops(x)
    h = herm(3, 1, 1)
    np.testing.assert_allclose(left(h), x @ h, atol=1e-12)
    np.testing.assert_allclose(right(h), h @ x, atol=1e-12)
    np.testing.assert_allclose((left @ right).matrix, (right @ left).matrix, atol=1e-12)


def test_bivariate_calculus_reduces_to_multiplications():
    x, y = pd_matrix(3, 2), pd_matrix(3, 2, 1)
    h = herm(3, 2, 2)
    np.testing.assert_allclose(bivariate_calculus(lambda t, s: t + 0 * s, x, y)(h), x @ h, atol=1e-12)
    np.testing.assert_allclose(bivariate_calculus(lambda t, s: s + 0 * t, x, y)(h), h @ y, atol=1e-12)
    prod = bivariate_calculus(lambda t, s: t * s, x, y)
    np.testing.assert_allclose(prod(h), x @ h @ y, atol=1e-11)


def test_bivariate_loewner_kernel_is_frechet_diff():
    f = StandardEntropy().derivative
    x, h = pd_matrix(3, 6), herm(3, 6, 1)
    sup = bivariate_calculus(lambda t, s: spectral.divided_differences(f, t, s), x)
    np.testing.assert_allclose(sup(h), frechet_diff(f, x, h), atol=1e-12)
    assert sup.is_self_adjoint()


def test_superoperator_algebra():
    n = 2
    ident = Superoperator.identity(n)
    trans = Superoperator.from_map(n, lambda h: h.T)
    h = herm(n, 4)
    np.testing.assert_allclose((trans @ trans).matrix, ident.matrix)
    np.testing.assert_allclose((2 * ident - ident)(h), h)
    assert ident.quadratic_form(h) == pytest.approx(np.linalg.norm(h) ** 2)
    with pytest.raises(DimensionError):
        Superoperator(2, np.eye(3))


# -- serialization -----------------------------------------------------------------


def test_matrix_json_round_trip():
    a = herm(3, 8)
    obj = json.loads(json.dumps(matrix_to_json(a)))
    np.testing.assert_array_equal(matrix_from_json(obj), a)
    np.testing.assert_array_equal(matrix_from_json([[1.0, 2.0], [2.0, 1.0]]), [[1, 2], [2, 1]])


def test_matrix_json_errors():
    with pytest.raises(DimensionError):
        matrix_from_json({"n": 3, "re": [[1.0]]})
    with pytest.raises(DimensionError):
        matrix_from_json({"re": [[1.0]]})
    with pytest.raises(NotHermitianError):
        matrix_from_json({"n": 2, "re": [[1.0, 1.0], [0.0, 1.0]]})
