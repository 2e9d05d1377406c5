"""Dense complex matrix kernel sized for two-copy (up to 16x16) problems.

Thin validating wrappers over numpy/LAPACK. Everything here is a pure
function of plain complex ndarrays; results are freshly allocated.
"""

from __future__ import annotations

import numpy as np

HERMITIAN_ATOL = 1e-10  # max entrywise |A - A^dag| accepted as Hermitian


class ShapeError(ValueError):
    """Operands have incompatible or non-square dimensions."""


class HermiticityError(ValueError):
    """Input required to be Hermitian deviates beyond HERMITIAN_ATOL."""


def as_matrix(a) -> np.ndarray:
    """Coerce to a 2-d complex array, rejecting NaN/Inf entries."""
    arr = np.asarray(a, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ShapeError(f"expected a 2-d matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("matrix entries must be finite (no NaN/Inf)")
    return arr


def _require_square(a: np.ndarray) -> None:
    if a.shape[0] != a.shape[1]:
        raise ShapeError(f"matrix must be square, got shape {a.shape}")


def matmul(a, b) -> np.ndarray:
    """Matrix product a @ b."""
    a, b = as_matrix(a), as_matrix(b)
    if a.shape[1] != b.shape[0]:
        raise ShapeError(f"cannot multiply {a.shape} by {b.shape}")
    return a @ b


def kron(a, b) -> np.ndarray:
    """Kronecker product with (i*rows_b + k, j*cols_b + l) indexing."""
    return np.kron(as_matrix(a), as_matrix(b))


def adjoint(a) -> np.ndarray:
    """Conjugate transpose."""
    return as_matrix(a).conj().T.copy()


def is_hermitian(a, atol: float = HERMITIAN_ATOL) -> bool:
    a = as_matrix(a)
    if a.shape[0] != a.shape[1]:
        return False
    return float(np.max(np.abs(a - a.conj().T))) <= atol


def determinant(a) -> complex:
    """Determinant via pivoted LU (LAPACK)."""
    a = as_matrix(a)
    _require_square(a)
    return complex(np.linalg.det(a))


def hermitian_eigen(a, atol: float = HERMITIAN_ATOL) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix.

    Returns (eigenvalues ascending, eigenvectors as columns). The input is
    symmetrized to (A + A^dag)/2 after passing the Hermiticity check, so
    roundoff-level asymmetry never leaks into the decomposition.
    """
    a = as_matrix(a)
    _require_square(a)
    dev = float(np.max(np.abs(a - a.conj().T)))
    if dev > atol:
        raise HermiticityError(f"matrix deviates from Hermitian by {dev:.3e}")
    sym = (a + a.conj().T) / 2
    eigenvalues, eigenvectors = np.linalg.eigh(sym)
    return eigenvalues, eigenvectors


def hermitian_eigenvalues(a, atol: float = HERMITIAN_ATOL) -> np.ndarray:
    """Ascending eigenvalues of a Hermitian matrix."""
    return hermitian_eigen(a, atol=atol)[0]


def trace_norm(a) -> float:
    """Sum of singular values; for Hermitian input, sum of |eigenvalues|."""
    a = as_matrix(a)
    _require_square(a)
    if is_hermitian(a):
        return float(np.sum(np.abs(hermitian_eigenvalues(a))))
    gram = a.conj().T @ a
    w = np.linalg.eigvalsh((gram + gram.conj().T) / 2)
    return float(np.sum(np.sqrt(np.clip(w, 0.0, None))))


def expm_hermitian(a, scale: complex) -> np.ndarray:
    """exp(scale * A) for Hermitian A, via eigendecomposition.

    Unitary to roundoff whenever scale is purely imaginary.
    """
    w, v = hermitian_eigen(a)
    return (v * np.exp(complex(scale) * w)) @ v.conj().T
