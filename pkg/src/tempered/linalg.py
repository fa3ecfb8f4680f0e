"""Small dense linear-algebra helpers shared across the package.

Everything here works on plain numpy arrays; the fiberwise structure lives
one level up in :mod:`tempered.core`.  Conventions: matrices are complex and
row-major, ``vec`` means ``A.reshape(-1)`` (row-major flattening), and the
map ``A -> U A V`` acts on ``vec(A)`` as ``kron(U, V.T)``.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "opnorm",
    "hermitize",
    "row_basis",
    "rank_of_rows",
    "nullspace",
    "conjugation_matrix",
    "sandwich_matrix",
    "random_complex",
    "random_unitary",
    "as_int",
    "psd_sqrt",
]


def opnorm(mat: np.ndarray) -> float:
    """Largest singular value, with the convention that a zero-size matrix has norm 0."""
    m = np.asarray(mat)
    if m.size == 0:
        return 0.0
    return float(np.linalg.norm(m, 2))


def hermitize(mat: np.ndarray) -> np.ndarray:
    """Nearest Hermitian matrix, (A + A*)/2."""
    m = np.asarray(mat, dtype=complex)
    return 0.5 * (m + m.conj().T)


def row_basis(rows: np.ndarray, rtol: float = 1e-9) -> np.ndarray:
    """Orthonormal basis of the row space of a stacked matrix.

    Parameters
    ----------
    rows : (k, n) array
        Spanning vectors, one per row.
    rtol : float
        Relative singular-value cutoff: directions with singular value
        below ``rtol * s_max`` are treated as zero.

    Returns
    -------
    (r, n) array with orthonormal rows spanning the same space.
    """
    a = np.asarray(rows, dtype=complex)
    if a.ndim != 2:
        raise ValueError(f"expected a 2-d stack of rows, got shape {a.shape}")
    if a.shape[0] == 0 or a.shape[1] == 0:
        return np.zeros((0, a.shape[1]), dtype=complex)
    _, s, vh = np.linalg.svd(a, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return np.zeros((0, a.shape[1]), dtype=complex)
    r = int(np.sum(s > rtol * s[0]))
    return vh[:r]


def rank_of_rows(rows: np.ndarray, rtol: float = 1e-9) -> int:
    """Numerical rank of a stack of row vectors (same cutoff as :func:`row_basis`)."""
    return row_basis(rows, rtol).shape[0]


def nullspace(a: np.ndarray, rtol: float = 1e-9, atol: float = 1e-12) -> np.ndarray:
    """Orthonormal basis of the (right) nullspace of ``a``, as columns.

    Singular values below ``max(rtol * s_max, atol)`` count as zero.  The
    absolute floor matters for systems that are numerically zero overall
    (for example commutator conditions on a commutative algebra), where a
    purely relative cutoff would keep roundoff directions; it assumes the
    input rows are on an O(1) scale.  For an empty system (no rows) the
    whole space is returned.
    """
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-d matrix, got shape {m.shape}")
    if m.shape[0] == 0:
        return np.eye(m.shape[1], dtype=complex)
    # economy SVD still returns all n right-singular vectors when m >= n;
    # only a wide system needs the full Vh for its trailing rows
    _, s, vh = np.linalg.svd(m, full_matrices=m.shape[0] < m.shape[1])
    if s.size == 0 or s[0] == 0.0:
        return vh.conj().T
    r = int(np.sum(s > max(rtol * s[0], atol)))
    return vh[r:].conj().T


def conjugation_matrix(u: np.ndarray) -> np.ndarray:
    """Matrix of ``A -> U A U*`` on row-major vec'd square matrices."""
    u = np.asarray(u, dtype=complex)
    return np.kron(u, u.conj())


def sandwich_matrix(left: np.ndarray, right: np.ndarray) -> np.ndarray:
    """Matrix of ``S -> left @ S @ right*`` on row-major vec'd rectangular matrices."""
    return np.kron(np.asarray(left, dtype=complex), np.asarray(right, dtype=complex).conj())


def random_complex(rng: np.random.Generator, shape) -> np.ndarray:
    """Standard complex Gaussian array."""
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    """Haar-distributed n x n unitary (QR of a complex Gaussian, phases fixed)."""
    if n == 0:
        return np.zeros((0, 0), dtype=complex)
    z = random_complex(rng, (n, n))
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    phases = d / np.abs(d)
    return q * phases.conj()


def as_int(x: float, tol: float = 1e-6, what: str = "value") -> int:
    """Round to the nearest integer, insisting the input is within ``tol`` of it."""
    n = int(round(float(np.real(x))))
    if abs(x - n) > tol:
        raise ValueError(f"{what} = {x!r} is not within {tol} of an integer")
    return n


def psd_sqrt(mat: np.ndarray) -> np.ndarray:
    """Positive square root of a Hermitian PSD matrix (tiny negatives clipped)."""
    m = np.asarray(mat, dtype=complex)
    if m.size == 0:
        return m.copy()
    vals, vecs = np.linalg.eigh(hermitize(m))
    return (vecs * np.sqrt(np.clip(vals, 0.0, None))) @ vecs.conj().T
