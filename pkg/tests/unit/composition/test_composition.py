import numpy as np
import pytest

from ilr_approx.composition import (
    Composition,
    ContrastMatrix,
    IlrVector,
    SbpMatrix,
    ZeroPolicy,
    close,
    contrast_matrix,
    ilr,
    ilr_balances,
    ilr_batch,
    inverse_ilr,
    pivotal_sbp,
    replace_zeros,
    validate_sbp,
)
from ilr_approx.errors import CompositionUnderflowError, DimensionMismatchError, InvalidSbpError
from ilr_approx.sampling import CountVector


def random_sbp(rng, n_parts):
    """Random sequential binary partition built by recursively splitting groups."""
    psi = np.zeros((n_parts, n_parts - 1), dtype=np.int8)
    pending = [np.arange(n_parts)]
    column = 0
    while pending:
        group = pending.pop(0)
        if group.size < 2:
            continue
        shuffled = rng.permutation(group)
        cut = rng.integers(1, group.size)
        plus, minus = shuffled[:cut], shuffled[cut:]
        psi[plus, column] = 1
        psi[minus, column] = -1
        column += 1
        pending.extend([plus, minus])
    return SbpMatrix(psi)


class TestComposition:

    def test_rejects_zero_part(self):
        with pytest.raises(ValueError):
            Composition([0.0, 1.0])

    def test_rejects_unclosed(self):
        with pytest.raises(ValueError):
            Composition([0.5, 0.6])

    def test_from_positive_closes(self):
        np.testing.assert_allclose(Composition.from_positive([1.0, 3.0]).parts, [0.25, 0.75])


class TestClosure:

    def test_zero_replacement_example(self):
        p = close(CountVector.of([2, 0]), 0.5)
        np.testing.assert_allclose(p.parts, [0.8, 0.2])

    def test_three_part_zero_replacement(self):
        p = close(CountVector.of([0, 5, 5]), 0.5)
        np.testing.assert_allclose(p.parts, np.array([0.5, 5.0, 5.0]) / 10.5)
        np.testing.assert_allclose(p.parts, [0.047619, 0.476190, 0.476190], atol=1e-6)

    def test_no_zeros_is_plain_closure(self):
        np.testing.assert_allclose(close(CountVector.of([1, 1, 2])).parts, [0.25, 0.25, 0.5])

    def test_zero_without_replacement_fails(self):
        with pytest.raises(ValueError):
            close(CountVector.of([3, 0]), 0.0)

    def test_replace_zeros_policies(self):
        counts = np.array([[2, 0], [1, 1]])
        renormalized = replace_zeros(counts, 0.5, ZeroPolicy.RENORMALIZE)
        original = replace_zeros(counts, 0.5, ZeroPolicy.DIVIDE_BY_ORIGINAL_TOTAL)
        np.testing.assert_allclose(renormalized, [[0.8, 0.2], [0.5, 0.5]])
        np.testing.assert_allclose(original, [[1.0, 0.25], [0.5, 0.5]])

    def test_ilr_identical_under_both_policies(self):
        counts = np.array([[5, 0, 3], [0, 0, 9], [2, 2, 2]])
        v = contrast_matrix(pivotal_sbp(3))
        np.testing.assert_allclose(
            ilr_batch(replace_zeros(counts, 0.5, "renormalize"), v),
            ilr_batch(replace_zeros(counts, 0.5, "divide_by_original_total"), v),
            atol=1e-12,
        )


class TestSbp:

    def test_pivotal_layout(self):
        np.testing.assert_array_equal(pivotal_sbp(3).psi, [[1, 0], [-1, 1], [-1, -1]])

    def test_pivotal_needs_two_parts(self):
        with pytest.raises(ValueError):
            pivotal_sbp(1)

    @pytest.mark.parametrize(
        "psi, column, reason",
        [
            (np.zeros((3, 3)), None, "shape"),
            ([[2], [-1]], None, "entries"),
            ([[1, 0], [0, 1], [-1, -1]], 0, "first column has zeros"),
            ([[1, 1], [1, -1], [1, 0]], 0, "column lacks -1"),
            ([[1, 1], [-1, 0], [-1, -1]], 1, "not sequential"),
            ([[1, 1, -1], [1, -1, 1], [-1, 0, 0], [-1, 0, 0]], 2, "group already split"),
        ],
    )
    def test_invalid_partitions(self, psi, column, reason):
        report = validate_sbp(psi)
        assert not report.ok
        assert report.column == column
        assert reason in report.reason

    def test_invalid_sbp_error_carries_report(self):
        with pytest.raises(InvalidSbpError) as excinfo:
            SbpMatrix([[1, 0], [0, 1], [-1, -1]])
        assert excinfo.value.report.column == 0
        assert "column 1" in str(excinfo.value)

    def test_random_partitions_are_valid(self):
        rng = np.random.default_rng(11)
        for n_parts in range(2, 12):
            assert validate_sbp(random_sbp(rng, n_parts).psi).ok


class TestContrastMatrix:

    def test_two_parts(self):
        v = contrast_matrix(pivotal_sbp(2)).v
        np.testing.assert_allclose(v, [[np.sqrt(0.5)], [-np.sqrt(0.5)]])

    def test_random_partitions_orthonormal_with_zero_sums(self):
        rng = np.random.default_rng(2024)
        worst_orth, worst_sum = 0.0, 0.0
        for _ in range(500):
            v = contrast_matrix(random_sbp(rng, int(rng.integers(2, 21)))).v
            worst_orth = max(worst_orth, np.max(np.abs(v.T @ v - np.eye(v.shape[1]))))
            worst_sum = max(worst_sum, np.max(np.abs(v.sum(axis=0))))
        assert worst_orth < 1e-10
        assert worst_sum < 1e-12

    def test_rejects_non_orthonormal(self):
        with pytest.raises(ValueError):
            ContrastMatrix(np.array([[1.0], [-1.0]]))

    def test_rejects_wrong_shape(self):
        with pytest.raises(DimensionMismatchError):
            ContrastMatrix(np.zeros((3, 3)))


class TestIlr:

    def test_two_part_value(self):
        p = Composition([0.8, 0.2])
        coords = ilr(p, contrast_matrix(pivotal_sbp(2))).coords
        np.testing.assert_allclose(coords, [np.sqrt(0.5) * np.log(4.0)])

    def test_center_maps_to_origin(self):
        coords = ilr(Composition(np.full(5, 0.2)), contrast_matrix(pivotal_sbp(5))).coords
        np.testing.assert_allclose(coords, np.zeros(4), atol=1e-13)

    def test_matrix_and_balance_forms_agree(self):
        rng = np.random.default_rng(99)
        worst = 0.0
        for _ in range(200):
            n_parts = int(rng.integers(2, 11))
            sbp = random_sbp(rng, n_parts)
            v = contrast_matrix(sbp)
            for parts in rng.dirichlet(np.ones(n_parts), size=50):
                p = Composition.from_positive(parts)
                worst = max(worst, np.max(np.abs(ilr(p, v).coords - ilr_balances(p, sbp).coords)))
        assert worst < 1e-12

    def test_batch_matches_single(self):
        rng = np.random.default_rng(5)
        props = rng.dirichlet(np.ones(4), size=10)
        v = contrast_matrix(pivotal_sbp(4))
        expected = np.array([ilr(Composition.from_positive(p), v).coords for p in props])
        np.testing.assert_allclose(ilr_batch(props, v), expected, atol=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            ilr(Composition([0.5, 0.5]), contrast_matrix(pivotal_sbp(3)))


class TestInverseIlr:

    def test_round_trip(self):
        p = Composition([0.01, 0.04, 0.15, 0.30, 0.50])
        v = contrast_matrix(pivotal_sbp(5))
        np.testing.assert_allclose(inverse_ilr(ilr(p, v), v).parts, p.parts, rtol=1e-12)

    def test_two_part_value(self):
        p = inverse_ilr(IlrVector([0.98026]), contrast_matrix(pivotal_sbp(2)))
        np.testing.assert_allclose(p.parts, [0.8, 0.2], atol=1e-5)

    def test_origin_maps_to_uniform(self):
        p = inverse_ilr(IlrVector(np.zeros(4)), contrast_matrix(pivotal_sbp(5)))
        np.testing.assert_allclose(p.parts, np.full(5, 0.2), rtol=1e-14)

    def test_extreme_coordinates_underflow(self):
        v = contrast_matrix(pivotal_sbp(2))
        with pytest.raises(CompositionUnderflowError):
            inverse_ilr(IlrVector([2000.0]), v)
