"""Dense linear-algebra primitives used by the estimators.

Matrices are plain 2-D float64 ndarrays. Vectorization is column-stacking
throughout the package, so ``vec`` is a zero-copy Fortran-order reshape.
"""

from dataclasses import dataclass

import numpy as np


def as_matrix(a, name="matrix") -> np.ndarray:
    """Coerce to a 2-D float64 array and reject non-finite entries."""
    a = np.asarray(a, dtype=float)
    if a.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got ndim={a.ndim}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} contains NaN or Inf entries")
    return a


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product: block (i, j) of the result is a[i, j] * b."""
    return np.kron(a, b)


def vec(a: np.ndarray) -> np.ndarray:
    """Column-stacking vectorization, returned as an (m*n, 1) column."""
    a = np.asarray(a, dtype=float)
    return a.reshape(-1, 1, order="F")


def unvec(v: np.ndarray, rows: int, cols: int) -> np.ndarray:
    """Inverse of :func:`vec`: reshape a length rows*cols vector to rows x cols."""
    v = np.asarray(v, dtype=float)
    if v.size != rows * cols:
        raise ValueError(f"cannot unvec {v.size} entries into {rows}x{cols}")
    return v.reshape(rows, cols, order="F")


def spectral_radius(a: np.ndarray) -> float:
    """Largest eigenvalue magnitude of a square matrix."""
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"spectral radius needs a square matrix, got {a.shape}")
    if a.size == 0:
        return 0.0
    return float(np.max(np.abs(np.linalg.eigvals(a))))


def pinv(a: np.ndarray) -> np.ndarray:
    """Moore-Penrose pseudo-inverse via SVD.

    Singular values below max(m, n) * sigma_max * 1e-12 are treated as zero.
    """
    a = np.asarray(a, dtype=float)
    return np.linalg.pinv(a, rcond=max(a.shape) * 1e-12)


def make_psd(a: np.ndarray) -> np.ndarray:
    """Symmetrize and clip negative eigenvalues to zero.

    Used on moment-based noise-covariance estimates, which can pick up small
    negative eigenvalues in finite samples.
    """
    s = (a + a.T) / 2.0
    w, q = np.linalg.eigh(s)
    if w[0] >= 0.0:
        return s
    out = (q * np.maximum(w, 0.0)) @ q.T
    return (out + out.T) / 2.0


@dataclass(frozen=True)
class NkpResult:
    """Best Kronecker factorization x ~ left (x) right.

    ``right`` is the m x m factor with unit Frobenius norm (scale absorbed
    into the n x n ``left``); ``residual_fro`` is the Frobenius distance
    between x and the reconstruction.
    """

    left: np.ndarray
    right: np.ndarray
    residual_fro: float


def nkp(x: np.ndarray, m: int, n: int) -> NkpResult:
    """Nearest Kronecker product: minimize ||x - left (x) right||_F.

    Solved exactly by rearranging x into an n^2 x m^2 matrix whose best
    rank-1 approximation (dominant singular pair) yields vec(left) and
    vec(right). Sign convention: the entry of ``right`` with the largest
    absolute value (first in row-major scan on ties) is nonnegative.
    """
    x = as_matrix(x, "nkp input")
    d = m * n
    if x.shape != (d, d):
        raise ValueError(f"nkp input must be {d}x{d} for m={m}, n={n}, got {x.shape}")
    # R[c*n + r, d*m + a] = x[r*m + a, c*m + d] so that R = vec(left) vec(right)^T
    # for an exact Kronecker input.
    r = x.reshape(n, m, n, m).transpose(2, 0, 3, 1).reshape(n * n, m * m)
    u, s, vt = np.linalg.svd(r, full_matrices=False)
    right = unvec(vt[0], m, m)
    left = unvec(u[:, 0], n, n) * s[0]
    peak = np.unravel_index(np.argmax(np.abs(right)), right.shape)
    if right[peak] < 0.0:
        right = -right
        left = -left
    residual = float(np.linalg.norm(x - np.kron(left, right)))
    return NkpResult(left=left, right=right, residual_fro=residual)
