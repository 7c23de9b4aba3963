"""
Matrix Core Module
Dense real/complex linear algebra at small sizes used by every other module.

Complex matrices are numpy complex128 arrays, real matrices float64 arrays.
All randomness is drawn from an explicit numpy Generator.
"""

import logging
import warnings
from typing import Any, Dict, List, Tuple

import numpy as np
from numpy.typing import NDArray
from scipy.linalg import LinAlgWarning, lu_factor

from utils.errors import DimensionMismatchError, InvariantViolationError

logger = logging.getLogger(__name__)

ComplexMatrix = NDArray[np.complex128]
RealMatrix = NDArray[np.float64]

SYMMETRY_TOL = 1e-10
PIVOT_RTOL = 1e-12
JACOBI_MAX_SWEEPS = 50
# Sweeps stop well below the 1e-11 relative off-diagonal contract
JACOBI_RTOL = 1e-15


def as_complex_matrix(a: Any) -> ComplexMatrix:
    """
    Validate and convert to a square complex matrix.

    Args:
        a: Array-like

    Returns:
        complex128 array of shape (n, n)
    """
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise DimensionMismatchError(f"Expected a non-empty square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InvariantViolationError("finite entries", detail="matrix contains NaN or Inf")
    return m


def as_real_matrix(a: Any) -> RealMatrix:
    """
    Validate and convert to a real matrix.

    Args:
        a: Array-like

    Returns:
        float64 array of shape (rows, cols)
    """
    m = np.asarray(a)
    if np.iscomplexobj(m):
        if np.any(m.imag != 0):
            raise InvariantViolationError("real entries", detail="matrix has imaginary parts")
        m = m.real
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2 or 0 in m.shape:
        raise DimensionMismatchError(f"Expected a non-empty 2-D matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InvariantViolationError("finite entries", detail="matrix contains NaN or Inf")
    return m


def _check_same_shape(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise DimensionMismatchError(f"Dimension mismatch: {a.shape} vs {b.shape}")


def mat_mul(a: ComplexMatrix, b: ComplexMatrix) -> ComplexMatrix:
    """Standard product of two square matrices of equal dimension."""
    a = as_complex_matrix(a)
    b = as_complex_matrix(b)
    _check_same_shape(a, b)
    return a @ b


def conj(a: ComplexMatrix) -> ComplexMatrix:
    return np.conj(as_complex_matrix(a))


def transpose(a: ComplexMatrix) -> ComplexMatrix:
    return as_complex_matrix(a).T.copy()


def adjoint(a: ComplexMatrix) -> ComplexMatrix:
    return np.conj(as_complex_matrix(a)).T.copy()


def frobenius_dist(a: np.ndarray, b: np.ndarray) -> float:
    """
    Frobenius distance sqrt(sum |a - b|^2).

    Args:
        a: First matrix
        b: Second matrix of the same shape

    Returns:
        Non-negative distance
    """
    a = np.asarray(a)
    b = np.asarray(b)
    _check_same_shape(a, b)
    return float(np.linalg.norm(a - b))


def is_unitary(u: ComplexMatrix, tol: float = 1e-10) -> bool:
    u = np.asarray(u)
    return frobenius_dist(u.conj().T @ u, np.eye(u.shape[0])) < tol


def orthonormalize(m: np.ndarray) -> np.ndarray:
    """
    Orthonormalize the columns of a square matrix by Householder QR.

    The diagonal of R is made positive real, so the Q factor is unique and
    close to m whenever m is already close to unitary.

    Args:
        m: Square real or complex matrix of full rank

    Returns:
        Unitary (orthogonal for real input) matrix
    """
    q, r = np.linalg.qr(m)
    d = np.diagonal(r)
    phases = np.where(np.abs(d) > 0, d / np.where(np.abs(d) > 0, np.abs(d), 1.0), 1.0)
    return q * phases[np.newaxis, :]


def random_unitary(n: int, rng: np.random.Generator) -> ComplexMatrix:
    """
    Sample a Haar-distributed unitary matrix.

    Args:
        n: Dimension (>= 1)
        rng: Random stream

    Returns:
        n x n unitary matrix
    """
    if n < 1:
        raise ValueError(f"Dimension must be positive, got {n}")
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0)
    return orthonormalize(z).astype(np.complex128)


def random_orthogonal(n: int, rng: np.random.Generator) -> RealMatrix:
    """Real analogue of random_unitary: a Haar-distributed orthogonal matrix."""
    if n < 1:
        raise ValueError(f"Dimension must be positive, got {n}")
    return orthonormalize(rng.standard_normal((n, n))).astype(np.float64)


def random_symmetric(n: int, rng: np.random.Generator, scale: float = 1.0) -> RealMatrix:
    """Random real symmetric matrix with Frobenius norm `scale`."""
    g = rng.standard_normal((n, n))
    q = g + g.T
    norm = np.linalg.norm(q)
    return q * (scale / norm) if norm > 0 else q


def _check_symmetric(q: RealMatrix) -> RealMatrix:
    q = as_real_matrix(q)
    if q.shape[0] != q.shape[1]:
        raise DimensionMismatchError(f"Expected a square matrix, got shape {q.shape}")
    deviation = float(np.max(np.abs(q - q.T)))
    if deviation > SYMMETRY_TOL * max(1.0, float(np.max(np.abs(q)))):
        raise InvariantViolationError("symmetric input", deviation)
    return q


def sym_eig(q: RealMatrix) -> Tuple[NDArray[np.float64], RealMatrix]:
    """
    Eigen-decomposition of a real symmetric matrix by cyclic Jacobi rotations.

    Args:
        q: Real symmetric matrix

    Returns:
        Tuple of (eigenvalues ascending, orthogonal matrix of eigenvectors in columns)
        with q = V diag(w) V^T
    """
    q = _check_symmetric(q)
    n = q.shape[0]
    a = 0.5 * (q + q.T)
    v = np.eye(n)

    scale = float(np.linalg.norm(a))
    if scale == 0.0:
        return np.zeros(n), v

    for sweep in range(JACOBI_MAX_SWEEPS):
        off = float(np.linalg.norm(a - np.diag(np.diagonal(a))))
        if off <= JACOBI_RTOL * scale:
            break

        for p in range(n - 1):
            for r in range(p + 1, n):
                apr = a[p, r]
                if apr == 0.0:
                    continue
                h = a[r, r] - a[p, p]
                if abs(h) + 100.0 * abs(apr) == abs(h):
                    t = apr / h
                else:
                    theta = 0.5 * h / apr
                    t = (1.0 if theta >= 0 else -1.0) / (abs(theta) + np.hypot(1.0, theta))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c

                col_p = a[:, p].copy()
                col_r = a[:, r].copy()
                a[:, p] = c * col_p - s * col_r
                a[:, r] = s * col_p + c * col_r

                row_p = a[p, :].copy()
                row_r = a[r, :].copy()
                a[p, :] = c * row_p - s * row_r
                a[r, :] = s * row_p + c * row_r
                a[p, r] = a[r, p] = 0.0

                vec_p = v[:, p].copy()
                vec_r = v[:, r].copy()
                v[:, p] = c * vec_p - s * vec_r
                v[:, r] = s * vec_p + c * vec_r
    else:
        logger.warning(f"Jacobi iteration hit {JACOBI_MAX_SWEEPS} sweeps (n={n})")

    eigenvalues = np.diagonal(a).copy()
    order = np.argsort(eigenvalues, kind="stable")
    return eigenvalues[order], v[:, order]


def expi_sym(q: RealMatrix) -> ComplexMatrix:
    """
    Matrix exponential e^{iQ} of a real symmetric Q.

    Args:
        q: Real symmetric matrix

    Returns:
        Unitary, complex-symmetric matrix V diag(e^{i lambda}) V^T
    """
    w, v = sym_eig(q)
    return (v * np.exp(1j * w)[np.newaxis, :]) @ v.T


def det_sign_lu(m: RealMatrix) -> Tuple[int, float]:
    """
    Sign and log-magnitude of a determinant via LU with partial pivoting.

    A pivot below 1e-12 * max|m| is treated as zero and reported as sign 0,
    which callers read as a non-regular point.

    Args:
        m: Real square matrix

    Returns:
        Tuple of (sign in {-1, 0, +1}, log|det|)
    """
    m = as_real_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise DimensionMismatchError(f"Expected a square matrix, got shape {m.shape}")

    scale = float(np.max(np.abs(m)))
    if scale == 0.0:
        return 0, float("-inf")

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", LinAlgWarning)
        lu, piv = lu_factor(m, check_finite=False)

    pivots = np.diagonal(lu)
    abs_pivots = np.abs(pivots)
    if np.any(abs_pivots < PIVOT_RTOL * scale):
        with np.errstate(divide="ignore"):
            return 0, float(np.sum(np.log(abs_pivots)))

    swaps = int(np.count_nonzero(piv != np.arange(len(piv))))
    sign = -1 if (swaps + int(np.count_nonzero(pivots < 0))) % 2 else 1
    return sign, float(np.sum(np.log(abs_pivots)))


def realify(a: ComplexMatrix) -> RealMatrix:
    """
    Real 2n x 2n matrix of a complex-linear map under x + iy <-> (x, y).

    Args:
        a: Complex n x n matrix X + iY

    Returns:
        Block matrix [[X, -Y], [Y, X]]
    """
    a = as_complex_matrix(a)
    x, y = a.real, a.imag
    return np.block([[x, -y], [y, x]])


def complexify(r: RealMatrix) -> ComplexMatrix:
    """
    Inverse of realify, reading X and Y from the first block column.

    Args:
        r: Real 2n x 2n matrix

    Returns:
        Complex n x n matrix X + iY
    """
    r = as_real_matrix(r)
    if r.shape[0] != r.shape[1] or r.shape[0] % 2:
        raise DimensionMismatchError(f"Expected a 2n x 2n matrix, got shape {r.shape}")
    n = r.shape[0] // 2
    return (r[:n, :n] + 1j * r[n:, :n]).astype(np.complex128)


def matrix_to_json(m: np.ndarray) -> Dict[str, Any]:
    """
    Encode a matrix in the shared JSON layout.

    Complex matrices store [re, im] pairs, real matrices plain numbers.

    Args:
        m: Square real or complex matrix

    Returns:
        Dictionary {"n": int, "entries": [...]}
    """
    m = np.asarray(m)
    if np.iscomplexobj(m):
        entries: List[List[Any]] = [
            [[float(z.real), float(z.imag)] for z in row] for row in m
        ]
    else:
        entries = [[float(x) for x in row] for row in m]
    return {"n": int(m.shape[0]), "entries": entries}


def matrix_from_json(data: Dict[str, Any]) -> np.ndarray:
    """
    Decode the shared JSON layout.

    Args:
        data: Dictionary with "n" and row-major "entries"

    Returns:
        complex128 array when entries are [re, im] pairs, float64 otherwise
    """
    try:
        n = int(data["n"])
        raw = np.asarray(data["entries"], dtype=np.float64)
    except (KeyError, TypeError, ValueError) as e:
        raise InvariantViolationError("matrix JSON layout", detail=str(e)) from e

    if raw.ndim == 3 and raw.shape[2] == 2:
        m = raw[..., 0] + 1j * raw[..., 1]
    elif raw.ndim == 2:
        m = raw
    else:
        raise InvariantViolationError("matrix JSON layout", detail=f"entries have shape {raw.shape}")

    if m.shape[0] != m.shape[1] or m.shape[0] != n:
        raise InvariantViolationError(
            "matrix JSON layout", detail=f"declared n={n} but entries have shape {m.shape[:2]}"
        )
    if not np.all(np.isfinite(m)):
        raise InvariantViolationError("finite entries", detail="matrix contains NaN or Inf")
    return m
