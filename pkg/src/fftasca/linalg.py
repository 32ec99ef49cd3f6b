"""Dense complex matrix core.

All higher-level machinery operates on ``numpy`` arrays of dtype
``complex128``; real data embeds as the zero-imaginary-part special case.
This module pins down the handful of operations whose exact semantics the
rest of the package relies on: the Hermitian transpose, the real-valued sum
of squares computed through the trace of ``X X^H``, a thin SVD with a fixed
orientation, and a pseudoinverse with an explicit singular-value cutoff.

Every function is pure; inputs are never mutated.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NonConvergence

__all__ = [
    "SvdResult",
    "as_complex_matrix",
    "hermitian",
    "ssq",
    "svd",
    "pinv",
    "matmul",
    "add",
    "sub",
    "scale",
    "mean_center_columns",
]

# Relative singular-value cutoff used when no tolerance is given: values
# below 1e-12 * max(rows, cols) * s_max are treated as exact zeros.
DEFAULT_RANK_TOL_SCALE = 1e-12


def as_complex_matrix(a, name="matrix"):
    """Validate and return ``a`` as a dense 2-D complex128 array.

    Raises
    ------
    DimensionMismatch
        If ``a`` is not two-dimensional.
    ValueError
        If any entry is NaN or infinite.
    """
    arr = np.asarray(a)
    if arr.ndim != 2:
        raise DimensionMismatch(f"{name} must be 2-D, got shape {arr.shape}")
    arr = arr.astype(np.complex128, copy=False)
    if not np.all(np.isfinite(arr.real)) or not np.all(np.isfinite(arr.imag)):
        raise ValueError(f"{name} contains non-finite entries")
    return arr


def hermitian(x):
    """Conjugate transpose: ``result[j, i] == conj(x[i, j])``."""
    x = as_complex_matrix(x)
    return x.conj().T.copy()


def ssq(x):
    """Real-valued sum of squares of a complex matrix.

    Computes the trace of ``X X^H`` by accumulating ``x * conj(x)`` in
    complex arithmetic, asserts that the imaginary residue of the trace is
    below ``1e-12`` of the magnitude, and returns the real part.  Equals
    ``sum(|x_ij|^2)``.
    """
    x = as_complex_matrix(x)
    trace = np.einsum("ij,ij->", x, x.conj())
    magnitude = abs(trace.real)
    if abs(trace.imag) > 1e-12 * max(magnitude, 1.0):
        raise ArithmeticError(
            f"imaginary residue {trace.imag!r} of the squared norm is not negligible"
        )
    return float(trace.real)


@dataclass(frozen=True)
class SvdResult:
    """Thin singular value decomposition ``X = U diag(S) V^H``.

    ``u`` is n-by-r, ``s`` a descending nonnegative real vector of length
    ``r = min(n, m)``, and ``v`` is m-by-r with orthonormal columns.
    """

    u: np.ndarray
    s: np.ndarray
    v: np.ndarray

    def reconstruct(self):
        return (self.u * self.s) @ self.v.conj().T


def svd(x):
    """Thin SVD of a complex matrix.

    Raises
    ------
    NonConvergence
        If the underlying iteration fails to converge.
    """
    x = as_complex_matrix(x)
    try:
        u, s, vh = np.linalg.svd(x, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise NonConvergence(f"SVD did not converge for shape {x.shape}") from exc
    return SvdResult(u=u, s=s, v=vh.conj().T)


def numerical_rank(x, tol=None):
    """Rank of ``x`` with singular values <= tol * s_max counted as zero."""
    x = as_complex_matrix(x)
    s = svd(x).s
    if s.size == 0 or s[0] == 0.0:
        return 0
    if tol is None:
        tol = DEFAULT_RANK_TOL_SCALE * max(x.shape)
    return int(np.count_nonzero(s > tol * s[0]))


def pinv(x, tol=None):
    """Moore-Penrose pseudoinverse via SVD.

    Singular values at or below ``tol * s_max`` are treated as zero.  The
    default tolerance is ``1e-12 * max(rows, cols)``.
    """
    x = as_complex_matrix(x)
    if tol is None:
        tol = DEFAULT_RANK_TOL_SCALE * max(x.shape)
    res = svd(x)
    if res.s.size == 0 or res.s[0] == 0.0:
        return np.zeros((x.shape[1], x.shape[0]), dtype=np.complex128)
    keep = res.s > tol * res.s[0]
    u, s, v = res.u[:, keep], res.s[keep], res.v[:, keep]
    return (v / s) @ u.conj().T


def matmul(a, b):
    a = as_complex_matrix(a, "left operand")
    b = as_complex_matrix(b, "right operand")
    if a.shape[1] != b.shape[0]:
        raise DimensionMismatch(f"cannot multiply {a.shape} by {b.shape}")
    return a @ b


def add(a, b):
    a = as_complex_matrix(a, "left operand")
    b = as_complex_matrix(b, "right operand")
    if a.shape != b.shape:
        raise DimensionMismatch(f"cannot add {a.shape} and {b.shape}")
    return a + b


def sub(a, b):
    a = as_complex_matrix(a, "left operand")
    b = as_complex_matrix(b, "right operand")
    if a.shape != b.shape:
        raise DimensionMismatch(f"cannot subtract {b.shape} from {a.shape}")
    return a - b


def scale(a, c):
    return as_complex_matrix(a) * complex(c)


def mean_center_columns(x):
    """Subtract the column mean from every column.

    Column means of the result are zero to within accumulation error; the
    operation is idempotent.
    """
    x = as_complex_matrix(x)
    return x - x.mean(axis=0, keepdims=True)
