"""
Tests for the dense matrix layer.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from numpy.testing import assert_allclose

from core.matrix_core import (
    adjoint,
    as_complex_matrix,
    complexify,
    conj,
    det_sign_lu,
    expi_sym,
    frobenius_dist,
    is_unitary,
    mat_mul,
    matrix_from_json,
    matrix_to_json,
    orthonormalize,
    random_orthogonal,
    random_symmetric,
    random_unitary,
    realify,
    sym_eig,
    transpose,
)
from utils.errors import DimensionMismatchError, InvariantViolationError


def symmetric_matrices(max_n=6):
    """Real symmetric matrices with moderate entries."""
    return st.integers(min_value=1, max_value=max_n).flatmap(
        lambda n: arrays(
            np.float64,
            (n, n),
            elements=st.floats(-10.0, 10.0, allow_nan=False, allow_infinity=False),
        ).map(lambda m: 0.5 * (m + m.T))
    )


def _cofactor_det(m):
    """Exact integer determinant of a 3x3 matrix by expansion along the first row."""
    m = [[int(x) for x in row] for row in m]
    return (
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    )


class TestBasicOps:
    def test_identity_product(self, rng):
        m = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        assert_allclose(mat_mul(np.eye(3), m), m)

    def test_i_squared(self):
        d = np.diag([1j, 1j])
        assert_allclose(mat_mul(d, d), -np.eye(2))

    def test_swap_is_involution(self):
        swap = np.array([[0, 1], [1, 0]])
        assert_allclose(mat_mul(swap, swap), np.eye(2))

    def test_mat_mul_shape_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            mat_mul(np.eye(2), np.eye(3))

    def test_conj_and_transpose(self, rng):
        assert_allclose(conj(np.diag([1j])), np.diag([-1j]))
        m = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        assert_allclose(transpose(transpose(m)), m)

    def test_adjoint_of_unitary(self, rng):
        u = random_unitary(4, rng)
        assert frobenius_dist(adjoint(u) @ u, np.eye(4)) < 1e-12

    def test_frobenius_dist_values(self, rng):
        m = rng.standard_normal((3, 3))
        assert frobenius_dist(m, m) == 0.0
        assert frobenius_dist(np.eye(2), np.zeros((2, 2))) == pytest.approx(math.sqrt(2))
        assert frobenius_dist(np.diag([1.0]), np.diag([-1.0])) == pytest.approx(2.0)

    def test_frobenius_dist_shape_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            frobenius_dist(np.eye(2), np.eye(3))

    def test_rejects_non_square_and_non_finite(self):
        with pytest.raises(DimensionMismatchError):
            as_complex_matrix(np.ones((2, 3)))
        with pytest.raises(InvariantViolationError):
            as_complex_matrix(np.array([[np.nan]]))


class TestRandomSampling:
    def test_scalar_unitary_has_unit_modulus(self, rng):
        u = random_unitary(1, rng)
        assert abs(abs(u[0, 0]) - 1.0) < 1e-14

    @pytest.mark.parametrize("n", [1, 2, 3, 5, 8])
    def test_unitary_contract(self, n, rng):
        u = random_unitary(n, rng)
        assert frobenius_dist(u @ u.conj().T, np.eye(n)) < 1e-12
        assert is_unitary(u)

    def test_same_seed_same_matrix(self):
        first = random_unitary(4, np.random.default_rng(7))
        second = random_unitary(4, np.random.default_rng(7))
        assert np.array_equal(first, second)

    def test_random_orthogonal_is_real_orthogonal(self, rng):
        o = random_orthogonal(5, rng)
        assert o.dtype == np.float64
        assert frobenius_dist(o.T @ o, np.eye(5)) < 1e-12

    def test_orthonormalize_keeps_unitary_fixed(self, rng):
        u = random_unitary(4, rng)
        assert frobenius_dist(orthonormalize(u), u) < 1e-12

    def test_orthonormalize_repairs_drift(self, rng):
        u = random_unitary(3, rng)
        drifted = u + 1e-7 * rng.standard_normal((3, 3))
        assert is_unitary(orthonormalize(drifted), 1e-12)

    def test_random_symmetric_scale(self, rng):
        q = random_symmetric(4, rng, scale=0.5)
        assert_allclose(q, q.T)
        assert np.linalg.norm(q) == pytest.approx(0.5)


class TestSymEig:
    def test_diagonal(self):
        w, v = sym_eig(np.diag([3.0, 1.0]))
        assert_allclose(w, [1.0, 3.0])
        assert_allclose(np.abs(v), np.array([[0.0, 1.0], [1.0, 0.0]]))

    def test_swap(self):
        w, _ = sym_eig(np.array([[0.0, 1.0], [1.0, 0.0]]))
        assert_allclose(w, [-1.0, 1.0], atol=1e-14)

    def test_zero_matrix(self):
        w, v = sym_eig(np.zeros((3, 3)))
        assert_allclose(w, 0.0)
        assert_allclose(v, np.eye(3))

    def test_rejects_non_symmetric(self):
        with pytest.raises(InvariantViolationError):
            sym_eig(np.array([[0.0, 1.0], [0.0, 0.0]]))

    @settings(max_examples=60, deadline=None)
    @given(symmetric_matrices())
    def test_reconstruction(self, q):
        w, v = sym_eig(q)
        scale = max(1.0, float(np.linalg.norm(q)))
        assert np.linalg.norm(v @ np.diag(w) @ v.T - q) < 1e-10 * scale
        assert np.linalg.norm(v.T @ v - np.eye(q.shape[0])) < 1e-12
        assert np.all(np.diff(w) >= 0)

    def test_matches_lapack(self, rng):
        q = random_symmetric(7, rng, scale=5.0)
        w, _ = sym_eig(q)
        assert_allclose(w, np.linalg.eigvalsh(q), atol=1e-12)

    @pytest.mark.parametrize("tiny", [5e-324, 1e-300, 1e-160])
    def test_tiny_off_diagonal_entry(self, tiny):
        q = np.array([[0.0, tiny, 1.0], [tiny, 1.0, 0.0], [1.0, 0.0, 2.0]])
        with np.errstate(over="raise", invalid="raise", divide="raise"):
            w, v = sym_eig(q)
        assert_allclose(w, np.linalg.eigvalsh(q), atol=1e-12)
        assert np.linalg.norm(v.T @ v - np.eye(3)) < 1e-12


class TestExpiSym:
    def test_zero_is_identity(self):
        assert_allclose(expi_sym(np.zeros((3, 3))), np.eye(3))

    def test_euler(self):
        assert_allclose(expi_sym(np.array([[math.pi]])), [[-1.0]], atol=1e-15)

    def test_inverse(self, rng):
        for _ in range(20):
            q = random_symmetric(4, rng, scale=rng.uniform(0.1, 5.0))
            assert frobenius_dist(expi_sym(q) @ expi_sym(-q), np.eye(4)) < 1e-10

    def test_unitary_and_symmetric(self, rng):
        e = expi_sym(random_symmetric(5, rng, scale=3.0))
        assert is_unitary(e)
        assert frobenius_dist(e, e.T) < 1e-12


class TestDetSignLu:
    def test_identity(self):
        assert det_sign_lu(np.eye(4)) == (1, 0.0)

    def test_one_swap(self):
        sign, log_abs = det_sign_lu(np.array([[0.0, 1.0], [1.0, 0.0]]))
        assert sign == -1
        assert log_abs == pytest.approx(0.0, abs=1e-15)

    def test_diagonal(self):
        sign, log_abs = det_sign_lu(np.diag([2.0, -3.0]))
        assert sign == -1
        assert log_abs == pytest.approx(math.log(6.0))

    def test_singular(self):
        sign, _ = det_sign_lu(np.array([[1.0, 2.0], [2.0, 4.0]]))
        assert sign == 0

    def test_zero_matrix(self):
        assert det_sign_lu(np.zeros((2, 2)))[0] == 0

    def test_matches_slogdet(self, rng):
        for _ in range(20):
            m = rng.standard_normal((6, 6))
            sign, log_abs = det_sign_lu(m)
            ref_sign, ref_log = np.linalg.slogdet(m)
            assert sign == int(ref_sign)
            assert log_abs == pytest.approx(ref_log)

    def test_matches_cofactor_on_integer_matrices(self, rng):
        singular = 0
        for _ in range(500):
            m = rng.integers(-2, 3, size=(3, 3))
            det = _cofactor_det(m)
            sign, log_abs = det_sign_lu(m.astype(np.float64))
            assert sign == (det > 0) - (det < 0)
            if det:
                assert log_abs == pytest.approx(math.log(abs(det)))
            else:
                singular += 1
        assert singular > 0


class TestRealification:
    def test_multiplication_by_i(self):
        assert_allclose(realify(np.array([[1j]])), [[0.0, -1.0], [1.0, 0.0]])

    def test_round_trip(self, rng):
        a = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        assert_allclose(complexify(realify(a)), a)

    def test_homomorphism(self, rng):
        a = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        b = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        assert_allclose(realify(a @ b), realify(a) @ realify(b), atol=1e-12)


class TestMatrixJson:
    def test_complex_layout(self):
        data = matrix_to_json(np.array([[1j, 0], [0, -1j]]))
        assert data["n"] == 2
        assert data["entries"][0][0] == [0.0, 1.0]
        assert_allclose(matrix_from_json(data), np.diag([1j, -1j]))

    def test_real_layout(self):
        data = matrix_to_json(np.eye(2))
        assert data["entries"] == [[1.0, 0.0], [0.0, 1.0]]
        assert matrix_from_json(data).dtype == np.float64

    @pytest.mark.parametrize(
        "data",
        [
            {"entries": [[1.0]]},
            {"n": 2, "entries": [[1.0]]},
            {"n": 1, "entries": [[[1.0, 0.0, 0.0]]]},
            {"n": 1, "entries": "oops"},
        ],
    )
    def test_rejects_bad_layout(self, data):
        with pytest.raises(InvariantViolationError):
            matrix_from_json(data)
