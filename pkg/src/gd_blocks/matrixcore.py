"""Dense complex-matrix arithmetic, factorizations and 2x2 block assembly.

Everything in this package works on validated complex128 ndarrays.  A valid
matrix is 2-D, non-empty, finite and read-only; :func:`as_matrix` is the
single entry point that enforces those invariants.  All functions return
frozen (non-writeable) arrays so values can be shared freely between threads.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .exceptions import NumericFailure, ShapeError

#: Default relative tolerance for every rank decision in the package.
DEFAULT_RANK_RTOL = 1e-10


def _freeze(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def as_matrix(a) -> np.ndarray:
    """Validate *a* as a dense complex matrix.

    Accepts anything array-like, returns a read-only complex128 2-D array.
    Rejects empty (zero-dimensional) matrices and non-finite entries.
    """
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2:
        raise ShapeError(f"expected a 2-D matrix, got ndim={m.ndim}")
    rows, cols = m.shape
    if rows < 1 or cols < 1:
        raise ShapeError("empty matrices are rejected: need rows >= 1 and cols >= 1")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix entries must be finite (no NaN/Inf)")
    if m is a and not m.flags.writeable:
        return m
    return _freeze(m.copy())


def require_square(a: np.ndarray, what: str = "matrix") -> np.ndarray:
    a = as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise ShapeError(f"{what} must be square, got shape {a.shape}")
    return a


def eye(n: int) -> np.ndarray:
    return _freeze(np.eye(n, dtype=np.complex128))


def zeros(rows: int, cols: int | None = None) -> np.ndarray:
    if cols is None:
        cols = rows
    return _freeze(np.zeros((rows, cols), dtype=np.complex128))


def fnorm(a) -> float:
    """Frobenius norm."""
    return float(np.linalg.norm(np.asarray(a)))


def multiply(a, b) -> np.ndarray:
    """Matrix product ``a @ b`` with shape validation."""
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape[1] != b.shape[0]:
        raise ShapeError(f"cannot multiply {a.shape} by {b.shape}")
    return _freeze(a @ b)


def power(a, k: int) -> np.ndarray:
    """k-th power of a square matrix; ``power(a, 0)`` is the identity."""
    a = require_square(a)
    if k < 0 or int(k) != k:
        raise ValueError(f"exponent must be a nonnegative integer, got {k!r}")
    return _freeze(np.linalg.matrix_power(a, int(k)))


def frobenius_distance(a, b) -> float:
    """Relative Frobenius distance ``|a - b|_F / max(1, |b|_F)``.

    The second argument is the reference: the denominator uses its norm only.
    """
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape != b.shape:
        raise ShapeError(f"shape mismatch: {a.shape} vs {b.shape}")
    return fnorm(a - b) / max(1.0, fnorm(b))


def rel_residual(x, *refs) -> float:
    """Frobenius norm of *x* relative to the product of reference norms.

    ``|x|_F / max(1, prod |ref_i|_F)`` -- the uniform residual normalisation
    used by hypothesis gates and axiom checks.
    """
    scale = 1.0
    for r in refs:
        scale *= fnorm(r)
    return fnorm(x) / max(1.0, scale)


class SvdResult(NamedTuple):
    """Thin SVD ``a = left @ diag(singular_values) @ right*``."""

    singular_values: np.ndarray
    left_factors: np.ndarray
    right_factors: np.ndarray


def svd(a) -> SvdResult:
    """Singular value decomposition with orthonormal factor columns."""
    a = as_matrix(a)
    try:
        u, s, vh = np.linalg.svd(a, full_matrices=False)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK hiccup
        raise NumericFailure(f"SVD did not converge: {exc}") from exc
    return SvdResult(_freeze(s), _freeze(u), _freeze(vh.conj().T))


def numerical_rank(a, rank_rtol: float = DEFAULT_RANK_RTOL) -> int:
    """Number of singular values above ``rank_rtol * sigma_1 * max(rows, cols)``."""
    if rank_rtol <= 0:
        raise ValueError("rank_rtol must be positive")
    a = as_matrix(a)
    s = svd(a).singular_values
    if s.size == 0 or s[0] == 0.0:
        return 0
    cutoff = rank_rtol * float(s[0]) * max(a.shape)
    return int(np.count_nonzero(s > cutoff))


def pseudoinverse(a, rank_rtol: float = DEFAULT_RANK_RTOL, scale: float | None = None) -> np.ndarray:
    """Moore-Penrose pseudoinverse via SVD truncation.

    Singular values at or below ``rank_rtol * max(sigma_1, scale) * max(rows, cols)``
    are treated as zero.  *scale* lets callers that know the natural magnitude
    of *a* (e.g. a high power of another matrix) keep the cutoff meaningful
    when the whole spectrum has collapsed into rounding noise.
    """
    if rank_rtol <= 0:
        raise ValueError("rank_rtol must be positive")
    a = as_matrix(a)
    s, u, v = svd(a)
    top = float(s[0]) if s.size else 0.0
    if scale is not None:
        top = max(top, scale)
    cutoff = rank_rtol * top * max(a.shape)
    keep = s > cutoff
    inv = np.zeros_like(s)
    inv[keep] = 1.0 / s[keep]
    return _freeze((v * inv) @ u.conj().T)


class Block2x2(NamedTuple):
    """A 2x2 block partition (a11: m x m, a12: m x n, a21: n x m, a22: n x n)."""

    a11: np.ndarray
    a12: np.ndarray
    a21: np.ndarray
    a22: np.ndarray


def _check_block_shapes(b: Block2x2) -> tuple[int, int]:
    m, m2 = b.a11.shape
    n, n2 = b.a22.shape
    if m != m2 or n != n2:
        raise ShapeError("diagonal blocks must be square")
    if b.a12.shape != (m, n) or b.a21.shape != (n, m):
        raise ShapeError(
            f"off-diagonal blocks must be {m}x{n} and {n}x{m}, "
            f"got {b.a12.shape} and {b.a21.shape}"
        )
    return m, n


def block_compose(b: Block2x2) -> np.ndarray:
    """Assemble the four blocks into one (m+n) x (m+n) matrix."""
    b = Block2x2(*(as_matrix(x) for x in b))
    _check_block_shapes(b)
    return _freeze(np.block([[b.a11, b.a12], [b.a21, b.a22]]))


def block_extract(x, m: int) -> Block2x2:
    """Partition a square matrix at row/column *m*; inverse of :func:`block_compose`."""
    x = require_square(x)
    n = x.shape[0]
    if not 0 < m < n:
        raise ShapeError(f"split point must satisfy 0 < m < {n}, got {m}")
    return Block2x2(
        _freeze(x[:m, :m].copy()),
        _freeze(x[:m, m:].copy()),
        _freeze(x[m:, :m].copy()),
        _freeze(x[m:, m:].copy()),
    )


def block_swap_top(b: Block2x2) -> Block2x2:
    """Exchange the two off-diagonal blocks: (a11, a12, a21, a22) -> (a11, a21, a12, a22).

    Blocks are moved, never entrywise-transposed, so the swap is only
    conformable when a12 and a21 have mirrored shapes (m x n and n x m with
    m = n, or both square).
    """
    b = Block2x2(*(as_matrix(x) for x in b))
    m, n = _check_block_shapes(b)
    if b.a21.shape != b.a12.shape:
        raise ShapeError(
            f"block swap needs interchangeable off-diagonal shapes, "
            f"got {b.a12.shape} and {b.a21.shape}"
        )
    return Block2x2(b.a11, b.a21, b.a12, b.a22)
