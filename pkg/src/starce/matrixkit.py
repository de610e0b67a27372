"""Complex matrix helpers for training design and least-squares analysis.

Everything operates on plain 2-D numpy arrays (complex128). Rank decisions
use a single relative tolerance so that design feasibility checks and the
pseudo-inverse agree on what counts as rank deficient.
"""

import numpy as np
from scipy.linalg import hadamard as _sylvester

__all__ = [
    "SingularMatrixError",
    "UnsupportedOrderError",
    "DegenerateInputError",
    "RANK_RTOL",
    "dft_matrix",
    "hadamard_matrix",
    "pseudo_inverse",
    "trace_inverse_gram",
    "gram_orthogonality_defect",
    "numerical_rank",
]

# Relative singular-value cutoff shared by every rank decision in the package.
RANK_RTOL = 1e-9


class SingularMatrixError(ValueError):
    """A matrix that must have full column rank does not."""


class UnsupportedOrderError(ValueError):
    """The requested order cannot be produced by this construction."""


class DegenerateInputError(ValueError):
    """An input column is identically zero and has no direction."""


def _as_matrix(a, name="matrix"):
    arr = np.asarray(a, dtype=np.complex128)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got ndim={arr.ndim}")
    if arr.size and not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must contain only finite entries")
    return arr


def dft_matrix(order):
    """Square discrete Fourier transform matrix.

    Parameters
    ----------
    order : int
        Matrix order, at least 1.

    Returns
    -------
    numpy.ndarray
        ``order x order`` complex matrix with entry ``exp(-2j*pi*r*c/order)``
        at (0-indexed) row ``r``, column ``c``. Columns are mutually
        orthogonal with squared norm ``order``.
    """
    if order < 1:
        raise ValueError(f"order must be at least 1, got {order}")
    k = np.arange(order)
    return np.exp(-2j * np.pi * np.outer(k, k) / order)


def hadamard_matrix(order):
    """Sylvester Hadamard matrix of the given order.

    Only powers of two exist in this construction; any other order raises
    UnsupportedOrderError.
    """
    if order < 1 or order & (order - 1):
        raise UnsupportedOrderError(
            f"Sylvester construction needs a power-of-two order, got {order}"
        )
    return _sylvester(order).astype(np.complex128)


def pseudo_inverse(matrix):
    """Moore-Penrose pseudo-inverse of a full-column-rank matrix.

    Parameters
    ----------
    matrix : array_like
        Tall or square complex matrix expected to have full column rank.

    Returns
    -------
    numpy.ndarray
        The pseudo-inverse, computed from a singular value decomposition.

    Raises
    ------
    SingularMatrixError
        If the numerical rank (relative tolerance ``RANK_RTOL``) is below
        the column count. No least-norm fallback is returned: a rank
        deficient training design is a bug, not a degenerate solution.
    """
    m = _as_matrix(matrix)
    rows, cols = m.shape
    if rows < cols:
        raise SingularMatrixError(
            f"{rows}x{cols} matrix cannot have full column rank"
        )
    u, s, vh = np.linalg.svd(m, full_matrices=False)
    if s[0] == 0 or int(np.sum(s > RANK_RTOL * s[0])) < cols:
        raise SingularMatrixError(
            f"rank deficient at relative tolerance {RANK_RTOL:g}"
        )
    return (vh.conj().T / s) @ u.conj().T


def trace_inverse_gram(matrix):
    """Trace of ``inv(A^H A)``, the LS noise amplification of a design.

    Equals the sum of inverse squared singular values; for a matrix with
    orthogonal columns this is the sum of inverse squared column norms.
    """
    m = _as_matrix(matrix)
    rows, cols = m.shape
    s = np.linalg.svd(m, compute_uv=False)
    if rows < cols or s[0] == 0 or int(np.sum(s > RANK_RTOL * s[0])) < cols:
        raise SingularMatrixError("gram matrix is singular")
    return float(np.sum(1.0 / s**2))


def gram_orthogonality_defect(matrix):
    """Worst normalized off-diagonal magnitude of the gram matrix.

    Returns ``max_{i != j} |<c_i, c_j>| / (||c_i|| ||c_j||)`` over column
    pairs: 0 for mutually orthogonal columns, 1 for parallel ones. A single
    column has no pairs and yields 0. Zero columns raise
    DegenerateInputError.
    """
    m = _as_matrix(matrix)
    norms = np.linalg.norm(m, axis=0)
    if np.any(norms == 0):
        raise DegenerateInputError("zero column has no direction")
    g = np.abs(m.conj().T @ m) / np.outer(norms, norms)
    np.fill_diagonal(g, 0.0)
    return float(g.max()) if g.size else 0.0


def numerical_rank(matrix, tol=RANK_RTOL):
    """Count singular values above ``tol`` times the largest one."""
    m = _as_matrix(matrix)
    if m.size == 0:
        return 0
    s = np.linalg.svd(m, compute_uv=False)
    if s[0] == 0:
        return 0
    return int(np.sum(s > tol * s[0]))
