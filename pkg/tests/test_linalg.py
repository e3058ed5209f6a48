"""Matrix helper tests: validated arithmetic, the ones-plus-epsilon family,
Gram-Schmidt QR invariants, Hadamard construction, and CSV round trips."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from epsortho.linalg import (
    DegenerateInputError,
    DimensionError,
    as_matrix,
    gram_schmidt_qr,
    hadamard,
    j_epsilon,
    load_matrix_csv,
    matmul,
    save_matrix_csv,
)


class TestAsMatrix:
    def test_converts_nested_lists(self):
        m = as_matrix([[1, 2], [3, 4]])
        assert m.dtype == np.float64
        assert m.shape == (2, 2)

    def test_rejects_vectors_and_empties(self):
        with pytest.raises(DimensionError):
            as_matrix([1.0, 2.0])
        with pytest.raises(DimensionError):
            as_matrix(np.zeros((0, 3)))

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            as_matrix([[1.0, np.nan]])


class TestMatmul:
    def test_matches_triple_loop(self):
        rng = np.random.default_rng(7)
        a = rng.normal(size=(3, 4))
        b = rng.normal(size=(4, 2))
        expected = np.zeros((3, 2))
        for i in range(3):
            for j in range(2):
                for k in range(4):
                    expected[i, j] += a[i, k] * b[k, j]
        assert np.allclose(matmul(a, b), expected, atol=1e-14)

    def test_inner_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            matmul(np.ones((2, 3)), np.ones((2, 3)))

    def test_identity_is_neutral(self):
        a = np.arange(6.0).reshape(2, 3)
        assert np.array_equal(matmul(np.eye(2), a), a)
        assert np.array_equal(matmul(a, np.eye(3)), a)


class TestJEpsilon:
    def test_small_case_entries(self):
        expected = np.array([[3.0, 1.0], [1.0, 3.0]])
        assert np.array_equal(j_epsilon(2, 2.0), expected)

    def test_eigenvalues_are_m_plus_eps_and_eps(self):
        eig = np.sort(np.linalg.eigvalsh(j_epsilon(4, 0.1)))
        assert np.allclose(eig, [0.1, 0.1, 0.1, 4.1], atol=1e-12)

    def test_one_by_one(self):
        assert np.array_equal(j_epsilon(1, 0.5), [[1.5]])

    def test_rejects_bad_args(self):
        with pytest.raises(DimensionError):
            j_epsilon(0, 0.1)
        with pytest.raises(ValueError):
            j_epsilon(3, 0.0)


class TestGramSchmidtQr:
    def test_identity_fixed_point(self):
        qr = gram_schmidt_qr(np.eye(4))
        assert np.array_equal(qr.q, np.eye(4))
        assert np.array_equal(qr.r, np.eye(4))

    def test_hand_computed_two_by_two(self):
        # first column of [[2,1],[1,2]] normalizes to (2,1)/sqrt(5)
        qr = gram_schmidt_qr(j_epsilon(2, 1.0))
        assert np.allclose(qr.q[:, 0], np.array([2.0, 1.0]) / np.sqrt(5.0), atol=1e-14)
        assert np.allclose(qr.q[:, 1], np.array([-1.0, 2.0]) / np.sqrt(5.0), atol=1e-14)

    @pytest.mark.parametrize("eps", [1e-4, 1e-2, 0.1, 1.0])
    @pytest.mark.parametrize("m", [1, 2, 3, 5, 8, 13, 21, 34, 55, 64])
    def test_qr_invariants_on_ones_family(self, m, eps):
        a = j_epsilon(m, eps)
        qr = gram_schmidt_qr(a)
        assert np.max(np.abs(qr.q.T @ qr.q - np.eye(m))) <= 1e-10
        assert np.max(np.abs(qr.q @ qr.r - a)) <= 1e-10
        assert np.all(np.diag(qr.r) > 0)
        assert np.array_equal(np.tril(qr.r, -1), np.zeros((m, m)))

    def test_first_column_of_size_eight(self):
        # nearly-constant first column: per-entry value approaches 1/sqrt(8)
        q = gram_schmidt_qr(j_epsilon(8, 1e-4)).q
        assert np.allclose(q[:, 0], 0.3536, atol=5e-4)

    def test_rank_deficient_raises(self):
        with pytest.raises(DegenerateInputError):
            gram_schmidt_qr(np.ones((3, 3)))

    def test_rectangular_rejected(self):
        with pytest.raises(DimensionError):
            gram_schmidt_qr(np.ones((3, 2)))

    @settings(max_examples=30, deadline=None)
    @given(st.integers(2, 20), st.integers(0, 2**31 - 1))
    def test_random_spd_inputs_satisfy_invariants(self, m, seed):
        rng = np.random.default_rng(seed)
        g = rng.normal(size=(m, m))
        a = g @ g.T + m * np.eye(m)  # well-conditioned SPD
        qr = gram_schmidt_qr(a)
        assert np.max(np.abs(qr.q.T @ qr.q - np.eye(m))) <= 1e-10
        assert np.max(np.abs(qr.q @ qr.r - a)) <= 1e-8 * np.max(np.abs(a))
        assert np.all(np.diag(qr.r) > 0)


class TestHadamard:
    def test_base_cases(self):
        assert np.array_equal(hadamard(0), [[1.0]])
        assert np.array_equal(hadamard(1), [[1.0, 1.0], [1.0, -1.0]])

    def test_kronecker_recursion(self):
        base = np.array([[1.0, 1.0], [1.0, -1.0]])
        assert np.array_equal(hadamard(3), np.kron(base, hadamard(2)))

    @pytest.mark.parametrize("p", [0, 1, 2, 5, 8])
    def test_rows_orthogonal_exactly(self, p):
        h = hadamard(p)
        assert np.array_equal(h @ h.T, (2**p) * np.eye(2**p))

    def test_order_cap(self):
        with pytest.raises(DimensionError):
            hadamard(15)
        with pytest.raises(ValueError):
            hadamard(-1)


class TestCsvRoundTrip:
    def test_exact_round_trip(self, tmp_path):
        rng = np.random.default_rng(3)
        a = rng.normal(size=(5, 7)) * 10.0 ** rng.integers(-8, 8, size=(5, 7))
        path = tmp_path / "m.csv"
        save_matrix_csv(a, path)
        assert np.array_equal(load_matrix_csv(path), a)

    def test_single_entry(self, tmp_path):
        path = tmp_path / "one.csv"
        save_matrix_csv(np.array([[np.pi]]), path)
        assert load_matrix_csv(path)[0, 0] == np.pi
