"""Sample autocovariances of matrix series, in vec and Kronecker orderings.

For an m x n matrix series the lag-k autocovariance can be laid out two
ways: as the mn x mn covariance of the vectorized observations, or as the
mn x mn average of X_t (x) X_{t-k}^T. The two hold the same numbers and are
related by a pure index permutation (:func:`gamma_kron`); the Kronecker
ordering is the one the matrix-AR Yule-Walker equations are written in.
"""

from dataclasses import dataclass, field

import numpy as np

from .linalg import as_matrix


@dataclass(frozen=True)
class MatrixSeries:
    """An ordered sequence of T real m x n matrices, stored as (T, m, n)."""

    data: np.ndarray

    def __post_init__(self):
        data = np.asarray(self.data, dtype=float)
        if data.ndim != 3:
            raise ValueError(f"series data must be (T, m, n), got shape {data.shape}")
        if data.shape[0] < 1:
            raise ValueError("series must contain at least one observation")
        if not np.all(np.isfinite(data)):
            raise ValueError("series contains NaN or Inf entries")
        object.__setattr__(self, "data", data)

    @property
    def T(self) -> int:
        return self.data.shape[0]

    @property
    def m(self) -> int:
        return self.data.shape[1]

    @property
    def n(self) -> int:
        return self.data.shape[2]

    def __len__(self) -> int:
        return self.T

    def __getitem__(self, t):
        return self.data[t]

    def vecs(self) -> np.ndarray:
        """Column-stacked observations as a (T, m*n) array."""
        return self.data.transpose(0, 2, 1).reshape(self.T, self.m * self.n)

    def mean(self) -> np.ndarray:
        return self.data.mean(axis=0)

    @classmethod
    def from_vecs(cls, v: np.ndarray, m: int, n: int) -> "MatrixSeries":
        """Build a series from (T, m*n) rows in column-stacking order."""
        v = np.asarray(v, dtype=float)
        if v.ndim != 2 or v.shape[1] != m * n:
            raise ValueError(f"expected (T, {m * n}) rows, got {v.shape}")
        return cls(v.reshape(-1, n, m).transpose(0, 2, 1))

    @classmethod
    def from_matrices(cls, mats) -> "MatrixSeries":
        return cls(np.stack([as_matrix(x, "series element") for x in mats]))


def sample_gamma_vec(s: MatrixSeries, k: int) -> np.ndarray:
    """Lag-k autocovariance of the vectorized, mean-centered series.

    Biased convention (divisor T) so the lag-0 matrix stays positive
    semi-definite; Gamma_{-k} = Gamma_k^T holds by construction.
    """
    if abs(k) >= s.T:
        raise ValueError(f"lag |k|={abs(k)} out of range for series of length {s.T}")
    if k < 0:
        return sample_gamma_vec(s, -k).T
    v = s.vecs()
    v = v - v.mean(axis=0)
    return v[k:].T @ v[: s.T - k] / s.T


def gamma_kron(gamma_vec: np.ndarray, m: int, n: int) -> np.ndarray:
    """Permute a vec-ordered covariance into the Kronecker ordering.

    Pure index moves: if gamma_vec = sum_t vec(X_t) vec(Y_t)^T for m x n
    matrices X_t, Y_t, the result is sum_t X_t (x) Y_t^T. Indices are 0-based:
    out[i, j] = in[m*(j // m) + i // n, m*(i % n) + j % m].
    """
    d = m * n
    gamma_vec = np.asarray(gamma_vec, dtype=float)
    if gamma_vec.shape != (d, d):
        raise ValueError(f"expected a {d}x{d} matrix for m={m}, n={n}, got {gamma_vec.shape}")
    i, j = np.indices((d, d))
    return gamma_vec[m * (j // m) + i // n, m * (i % n) + j % m]


def gamma_vec_from_kron(gamma_k: np.ndarray, m: int, n: int) -> np.ndarray:
    """Inverse permutation of :func:`gamma_kron` (exact round trip)."""
    d = m * n
    gamma_k = np.asarray(gamma_k, dtype=float)
    if gamma_k.shape != (d, d):
        raise ValueError(f"expected a {d}x{d} matrix for m={m}, n={n}, got {gamma_k.shape}")
    i, j = np.indices((d, d))
    return gamma_k[(i % m) * n + j // m, (i // m) * m + j % m]


def sample_gamma_kron(s: MatrixSeries, k: int) -> np.ndarray:
    """Kronecker-ordered lag-k autocovariance: (1/T) sum X~_t (x) X~_{t-k}^T."""
    return gamma_kron(sample_gamma_vec(s, k), s.m, s.n)


@dataclass(frozen=True)
class KronCovariance:
    """Lag-indexed family of Kronecker-ordered autocovariances.

    Holds the data side of the matrix-AR Yule-Walker system of a given
    order; negative lags satisfy Gamma_{-k}^kron = perm(Gamma_k^T).
    """

    m: int
    n: int
    lags: dict = field(default_factory=dict)

    def __getitem__(self, k: int) -> np.ndarray:
        return self.lags[k]

    def __contains__(self, k: int) -> bool:
        return k in self.lags

    @classmethod
    def from_series(cls, s: MatrixSeries, max_lag: int) -> "KronCovariance":
        """Estimate lags -max_lag..max_lag from a series."""
        lags = {k: sample_gamma_kron(s, k) for k in range(-max_lag, max_lag + 1)}
        return cls(m=s.m, n=s.n, lags=lags)


def yule_walker_system(s: MatrixSeries, p: int) -> KronCovariance:
    """Autocovariance data entering the order-p Yule-Walker equations.

    Returns lags -p..p; no solver is attached for p > 1.
    """
    if p < 1:
        raise ValueError("order must be >= 1")
    return KronCovariance.from_series(s, p)
