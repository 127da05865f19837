import numpy as np
import pytest

from ilr_approx.errors import DimensionMismatchError, EigenConvergenceError
from ilr_approx.linalg import SymmetricMatrix, quadratic_form, sym_eigen


def random_symmetric(rng, n):
    a = rng.normal(size=(n, n))
    return SymmetricMatrix((a + a.T) / 2.0)


class TestSymmetricMatrix:

    def test_rejects_non_square(self):
        with pytest.raises(DimensionMismatchError):
            SymmetricMatrix(np.zeros((2, 3)))

    def test_rejects_asymmetric(self):
        with pytest.raises(ValueError):
            SymmetricMatrix(np.array([[1.0, 2.0], [0.0, 1.0]]))

    def test_roundoff_asymmetry_is_symmetrised(self):
        m = SymmetricMatrix(np.array([[1.0, 0.5 + 1e-12], [0.5, 2.0]]))
        assert m.entries[0, 1] == m.entries[1, 0]
        assert m.dim == 2

    def test_entries_are_read_only(self):
        m = SymmetricMatrix(np.eye(2))
        with pytest.raises(ValueError):
            m.entries[0, 0] = 5.0


class TestSymEigen:

    def test_two_by_two(self):
        result = sym_eigen(SymmetricMatrix([[2.0, 1.0], [1.0, 2.0]]))
        np.testing.assert_allclose(result.eigenvalues, [3.0, 1.0], atol=1e-14)

    def test_diagonal_input_is_sorted_descending(self):
        result = sym_eigen(SymmetricMatrix(np.diag([3.0, 1.0, 2.0])))
        np.testing.assert_array_equal(result.eigenvalues, [3.0, 2.0, 1.0])
        np.testing.assert_array_equal(np.abs(result.eigenvectors[:, 0]), [1.0, 0.0, 0.0])

    def test_zero_matrix(self):
        result = sym_eigen(SymmetricMatrix(np.zeros((3, 3))))
        np.testing.assert_array_equal(result.eigenvalues, np.zeros(3))

    def test_matches_lapack_and_reconstructs(self):
        rng = np.random.default_rng(7)
        for n in (1, 2, 5, 12):
            s = random_symmetric(rng, n)
            result = sym_eigen(s)
            scale = np.linalg.norm(s.entries)
            expected = np.sort(np.linalg.eigvalsh(s.entries))[::-1]
            np.testing.assert_allclose(result.eigenvalues, expected, atol=1e-10 * max(scale, 1.0))
            q = result.eigenvectors
            np.testing.assert_allclose(q.T @ q, np.eye(n), atol=1e-10)
            np.testing.assert_allclose(q @ np.diag(result.eigenvalues) @ q.T, s.entries, atol=1e-10 * max(scale, 1.0))
            assert np.all(np.diff(result.eigenvalues) <= 0)

    def test_thousand_random_four_by_four(self):
        rng = np.random.default_rng(2024)
        for _ in range(1000):
            upper = np.triu(rng.uniform(-1.0, 1.0, size=(4, 4)))
            s = SymmetricMatrix(upper + np.triu(upper, 1).T)
            result = sym_eigen(s)
            q = result.eigenvectors
            assert np.max(np.abs(q @ np.diag(result.eigenvalues) @ q.T - s.entries)) < 1e-10
            assert np.max(np.abs(q.T @ q - np.eye(4))) < 1e-10

    def test_psd_input_has_no_negative_eigenvalues(self):
        rng = np.random.default_rng(5)
        for rank in (1, 2, 4):
            b = rng.uniform(-1.0, 1.0, size=(4, rank))
            assert sym_eigen(SymmetricMatrix(b @ b.T)).eigenvalues[-1] >= -1e-12

    def test_identical_input_identical_output(self):
        s = random_symmetric(np.random.default_rng(3), 6)
        first, second = sym_eigen(s), sym_eigen(SymmetricMatrix(s.entries.copy()))
        assert first.eigenvalues.tobytes() == second.eigenvalues.tobytes()
        assert first.eigenvectors.tobytes() == second.eigenvectors.tobytes()

    def test_tiny_variances_keep_relative_accuracy(self):
        s = SymmetricMatrix(1e-9 * np.array([[2.0, 1.0], [1.0, 2.0]]))
        np.testing.assert_allclose(sym_eigen(s).eigenvalues, [3e-9, 1e-9], rtol=1e-10)

    def test_sweep_limit_raises(self):
        with pytest.raises(EigenConvergenceError) as excinfo:
            sym_eigen(SymmetricMatrix([[2.0, 1.0], [1.0, 2.0]]), max_sweeps=0)
        assert excinfo.value.sweeps == 0

    def test_non_finite_entries_rejected(self):
        with pytest.raises(ValueError):
            sym_eigen(SymmetricMatrix([[np.nan, 0.0], [0.0, 1.0]]))


class TestQuadraticForm:

    def test_plain_form(self):
        rng = np.random.default_rng(3)
        a = rng.normal(size=(4, 3))
        d = rng.uniform(0.5, 2.0, size=4)
        np.testing.assert_allclose(quadratic_form(a, d).entries, a.T @ np.diag(d) @ a, atol=1e-12)

    def test_sandwich_form(self):
        rng = np.random.default_rng(4)
        a = rng.normal(size=(4, 3))
        d = rng.uniform(0.5, 2.0, size=4)
        m = random_symmetric(rng, 4).entries
        expected = a.T @ np.diag(d) @ m @ np.diag(d) @ a
        np.testing.assert_allclose(quadratic_form(a, d, middle=m).entries, expected, atol=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            quadratic_form(np.ones((4, 3)), np.ones(3))
        with pytest.raises(DimensionMismatchError):
            quadratic_form(np.ones((4, 3)), np.ones(4), middle=np.eye(3))
