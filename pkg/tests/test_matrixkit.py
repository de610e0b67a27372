import cmath

import numpy as np
import pytest

from starce.matrixkit import (
    DegenerateInputError,
    SingularMatrixError,
    UnsupportedOrderError,
    dft_matrix,
    gram_orthogonality_defect,
    hadamard_matrix,
    numerical_rank,
    pseudo_inverse,
    trace_inverse_gram,
)


def normal_equation_pinv(a):
    """Independent oracle: solve the normal equations directly."""
    a = np.asarray(a, dtype=complex)
    return np.linalg.solve(a.conj().T @ a, a.conj().T)


def random_complex(rng, rows, cols):
    return rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))


# ---------------------------------------------------------------- dft


def test_dft_order_one_and_two():
    np.testing.assert_allclose(dft_matrix(1), [[1.0]])
    np.testing.assert_allclose(dft_matrix(2), [[1, 1], [1, -1]], atol=1e-12)


def test_dft_order_four_second_row():
    np.testing.assert_allclose(dft_matrix(4)[1], [1, -1j, -1, 1j], atol=1e-12)


def test_dft_entries_match_direct_evaluation():
    n = 7
    mat = dft_matrix(n)
    for r in range(n):
        for c in range(n):
            expected = cmath.exp(-2j * cmath.pi * r * c / n)
            assert abs(mat[r, c] - expected) < 1e-12


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 8, 16, 21, 42])
def test_dft_columns_orthogonal(n):
    mat = dft_matrix(n)
    gram = mat.conj().T @ mat
    np.testing.assert_allclose(gram, n * np.eye(n), atol=1e-9)


def test_dft_rejects_nonpositive_order():
    with pytest.raises(ValueError):
        dft_matrix(0)


# ---------------------------------------------------------------- hadamard


def test_hadamard_small_orders():
    np.testing.assert_array_equal(hadamard_matrix(1).real, [[1]])
    np.testing.assert_array_equal(hadamard_matrix(2).real, [[1, 1], [1, -1]])


def test_hadamard_sylvester_doubling():
    h2 = hadamard_matrix(2)
    h4 = hadamard_matrix(4)
    top = np.hstack([h2, h2])
    bottom = np.hstack([h2, -h2])
    np.testing.assert_array_equal(h4, np.vstack([top, bottom]))


@pytest.mark.parametrize("n", [1, 2, 4, 8, 16, 32])
def test_hadamard_gram(n):
    h = hadamard_matrix(n)
    np.testing.assert_allclose(h.conj().T @ h, n * np.eye(n), atol=1e-12)


@pytest.mark.parametrize("n", [0, 3, 6, 12, 42, -4])
def test_hadamard_rejects_unsupported_orders(n):
    with pytest.raises(UnsupportedOrderError):
        hadamard_matrix(n)


# ---------------------------------------------------------------- pseudo inverse


def test_pinv_identity():
    np.testing.assert_allclose(pseudo_inverse(np.eye(3)), np.eye(3), atol=1e-12)


@pytest.mark.parametrize("n", [2, 5, 8])
def test_pinv_dft_is_scaled_adjoint(n):
    mat = dft_matrix(n)
    np.testing.assert_allclose(pseudo_inverse(mat), mat.conj().T / n, atol=1e-10)


def test_pinv_matches_normal_equation_oracle():
    rng = np.random.default_rng(42)
    a = random_complex(rng, 8, 4)
    got = pseudo_inverse(a)
    np.testing.assert_allclose(got, normal_equation_pinv(a), atol=1e-9)


def test_pinv_moore_penrose_properties():
    rng = np.random.default_rng(7)
    a = random_complex(rng, 10, 6)
    pin = pseudo_inverse(a)
    np.testing.assert_allclose(pin @ a, np.eye(6), atol=1e-9)
    np.testing.assert_allclose(a @ pin @ a, a, atol=1e-8)


def test_pinv_rejects_rank_deficiency():
    rng = np.random.default_rng(3)
    a = random_complex(rng, 6, 3)
    a[:, 2] = a[:, 0]
    with pytest.raises(SingularMatrixError):
        pseudo_inverse(a)


def test_pinv_rejects_wide_matrix():
    with pytest.raises(SingularMatrixError):
        pseudo_inverse(np.ones((2, 4)))


def test_pinv_rejects_nonfinite():
    a = np.eye(3, dtype=complex)
    a[0, 0] = np.nan
    with pytest.raises(ValueError):
        pseudo_inverse(a)


# ---------------------------------------------------------------- trace of inverse gram


def test_trace_inverse_gram_dft_is_one():
    for n in (2, 5, 21):
        assert abs(trace_inverse_gram(dft_matrix(n)) - 1.0) < 1e-10


def test_trace_inverse_gram_orthogonal_column_norms():
    # orthogonal columns with squared norms 4, 2, 4, 2 sum to 1/4+1/2+1/4+1/2
    base = dft_matrix(4)  # columns have squared norm 4
    scale = np.array([1.0, np.sqrt(0.5), 1.0, np.sqrt(0.5)])
    mat = base * scale
    assert abs(trace_inverse_gram(mat) - 1.5) < 1e-10


def test_trace_inverse_gram_scaled_identity():
    assert abs(trace_inverse_gram(2.0 * np.eye(2)) - 0.5) < 1e-12


def test_trace_inverse_gram_matches_normal_equations():
    rng = np.random.default_rng(11)
    a = random_complex(rng, 9, 5)
    expected = np.trace(np.linalg.inv(a.conj().T @ a)).real
    assert abs(trace_inverse_gram(a) - expected) < 1e-9


def test_trace_inverse_gram_equals_inverse_norms_when_orthogonal():
    rng = np.random.default_rng(5)
    q, _ = np.linalg.qr(random_complex(rng, 8, 4))
    scales = np.array([0.5, 1.5, 2.0, 3.0])
    mat = q * scales
    assert gram_orthogonality_defect(mat) < 1e-12
    expected = float(np.sum(1.0 / scales**2))
    assert abs(trace_inverse_gram(mat) - expected) < 1e-10


def test_trace_inverse_gram_unitary_left_invariance():
    rng = np.random.default_rng(19)
    a = random_complex(rng, 7, 3)
    q, _ = np.linalg.qr(random_complex(rng, 7, 7))
    assert abs(trace_inverse_gram(q @ a) - trace_inverse_gram(a)) < 1e-9


def test_trace_inverse_gram_singular_raises():
    with pytest.raises(SingularMatrixError):
        trace_inverse_gram(np.ones((4, 2)))


# ---------------------------------------------------------------- orthogonality defect


def test_defect_zero_for_orthogonal_columns():
    assert gram_orthogonality_defect(dft_matrix(4)) < 1e-12


def test_defect_known_pair():
    mat = np.array([[1.0, 1.0], [0.0, 1.0]])
    assert abs(gram_orthogonality_defect(mat) - 1.0 / np.sqrt(2.0)) < 1e-12


def test_defect_parallel_columns_is_one():
    mat = np.array([[1.0, 2.0], [1.0, 2.0]])
    assert abs(gram_orthogonality_defect(mat) - 1.0) < 1e-12


def test_defect_single_column_is_zero():
    assert gram_orthogonality_defect(np.array([[1.0], [2.0]])) == 0.0


def test_defect_zero_column_raises():
    with pytest.raises(DegenerateInputError):
        gram_orthogonality_defect(np.array([[1.0, 0.0], [1.0, 0.0]]))


# ---------------------------------------------------------------- numerical rank


def test_rank_identity():
    assert numerical_rank(np.eye(5)) == 5


def test_rank_duplicate_column():
    rng = np.random.default_rng(2)
    a = random_complex(rng, 6, 4)
    a[:, 3] = a[:, 1]
    assert numerical_rank(a) == 3


def test_rank_respects_tolerance():
    a = np.diag([1.0, 1e-6, 1e-12])
    assert numerical_rank(a, tol=1e-9) == 2
    assert numerical_rank(a, tol=1e-15) == 3


def test_rank_zero_matrix():
    assert numerical_rank(np.zeros((3, 3))) == 0
