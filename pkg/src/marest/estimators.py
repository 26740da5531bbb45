"""Model fitting for matrix and vector autoregressions.

Estimators for the bilinear matrix-AR model X_t = A X_{t-1} B^T + Z_t and its
vectorized VAR counterpart:

* ``fit_mar1_yw``   -- moment matching on the Kronecker-ordered Yule-Walker
                       equation, solved as a smooth minimization with an
                       analytic gradient (L-BFGS-B).
* ``fit_mar_burg``  -- order-recursive Burg estimation with closed-form
                       alternating updates of (A, B).
* ``fit_mar1_lse``  -- alternating least squares baseline.
* ``fit_var1_yw``   -- classical vector Yule-Walker baseline.
* ``fit_var1_burg`` -- single-coefficient multivariate Burg baseline.
* ``fit_vecmar_nkp``-- VAR fit followed by a nearest-Kronecker-product
                       factorization of the coefficient.

All estimators center the data by the sample mean, report the mean on the
fitted model, and normalize each A-coefficient to unit Frobenius norm with
the scale absorbed into B (the Kronecker product B (x) A is the identifiable
quantity). Sign convention: the largest-magnitude entry of A is nonnegative.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.optimize

from .covariance import MatrixSeries, gamma_kron, gamma_vec_from_kron, sample_gamma_vec
from .errors import SingularCovarianceError
from .linalg import as_matrix, make_psd, nkp, pinv, spectral_radius, vec, unvec


@dataclass(frozen=True)
class FitOptions:
    """Iteration controls shared by the iterative estimators.

    ``tol`` is a relative tolerance on the objective change (and the gradient
    norm for the Yule-Walker fit); ``seed`` switches the Burg inner loop from
    its deterministic start to a seeded random one; ``normalize`` controls the
    final unit-norm/sign normalization of (A, B); ``use_minus_b_update``
    selects an alternative B-update with a minus sign between the two
    quadratic terms (kept for comparison, not used by default).
    """

    max_iter: int = 500
    tol: float = 1e-10
    seed: int | None = None
    normalize: bool = True
    use_minus_b_update: bool = False

    def __post_init__(self):
        if self.tol <= 0:
            raise ValueError("tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")


@dataclass
class MarModel:
    """Matrix AR(p) model: coefficient pairs (A_i, B_i), noise covariance
    in vec coordinates, and the sample mean the data was centered by."""

    coeffs: list
    sigma: np.ndarray
    mean: np.ndarray = None
    converged: bool = True

    def __post_init__(self):
        if not self.coeffs:
            raise ValueError("MAR model needs at least one coefficient pair")
        self.coeffs = [(as_matrix(a, "A"), as_matrix(b, "B")) for a, b in self.coeffs]
        m, n = self.coeffs[0][0].shape[0], self.coeffs[0][1].shape[0]
        for a, b in self.coeffs:
            if a.shape != (m, m) or b.shape != (n, n):
                raise ValueError("inconsistent coefficient shapes")
        self.sigma = as_matrix(self.sigma, "sigma")
        if self.sigma.shape != (m * n, m * n):
            raise ValueError(f"sigma must be {m * n}x{m * n}")
        if self.mean is None:
            self.mean = np.zeros((m, n))
        self.mean = as_matrix(self.mean, "mean")

    @property
    def p(self) -> int:
        return len(self.coeffs)

    @property
    def m(self) -> int:
        return self.coeffs[0][0].shape[0]

    @property
    def n(self) -> int:
        return self.coeffs[0][1].shape[0]

    def phi(self, i: int = 0) -> np.ndarray:
        """Vectorized coefficient B_i (x) A_i of lag i+1."""
        a, b = self.coeffs[i]
        return np.kron(b, a)


@dataclass
class VarModel:
    """Vector AR(1) model on d-dimensional observations."""

    phi: np.ndarray
    sigma: np.ndarray
    mean: np.ndarray = None
    converged: bool = True

    def __post_init__(self):
        self.phi = as_matrix(self.phi, "phi")
        d = self.phi.shape[0]
        if self.phi.shape != (d, d):
            raise ValueError("phi must be square")
        self.sigma = as_matrix(self.sigma, "sigma")
        if self.sigma.shape != (d, d):
            raise ValueError("sigma shape does not match phi")
        if self.mean is None:
            self.mean = np.zeros(d)
        self.mean = np.asarray(self.mean, dtype=float).reshape(d)

    @property
    def d(self) -> int:
        return self.phi.shape[0]


@dataclass
class BurgState:
    """Forward/backward prediction residuals at the current recursion order.

    At order k the arrays are aligned so that ``forward[i]`` and
    ``backward[i]`` are the residuals at time t = k + 1 + i (1-based); both
    shrink by one usable index per order increment. At order 0 they equal the
    (centered) data.
    """

    k: int
    forward: np.ndarray
    backward: np.ndarray
    coeffs: list = field(default_factory=list)


def normalize_pair(a: np.ndarray, b: np.ndarray):
    """Rescale (A, B) so ||A||_F = 1 with the scale moved into B, then flip
    signs so A's largest-magnitude entry is nonnegative."""
    c = float(np.linalg.norm(a))
    if c > 0.0:
        a = a / c
        b = b * c
    peak = np.unravel_index(np.argmax(np.abs(a)), a.shape)
    if a[peak] < 0.0:
        a, b = -a, -b
    return a, b


def _as_vec_series(s) -> np.ndarray:
    if isinstance(s, MatrixSeries):
        return s.vecs()
    v = np.asarray(s, dtype=float)
    if v.ndim == 1:
        v = v[:, None]
    if v.ndim != 2:
        raise ValueError("expected a (T, d) vector series")
    return v


def _centered_or_raise(v: np.ndarray) -> np.ndarray:
    c = v - v.mean(axis=0)
    scale = max(1.0, float(np.max(np.abs(v))))
    if np.max(np.abs(c)) <= 8 * np.finfo(float).eps * scale:
        raise SingularCovarianceError("series is constant; covariance carries no signal")
    return c


# ---------------------------------------------------------------------------
# VAR baselines
# ---------------------------------------------------------------------------

def fit_var1_yw(s) -> VarModel:
    """Classical VAR(1) Yule-Walker fit: Phi = Gamma_1 Gamma_0^+.

    Accepts a MatrixSeries (vectorized internally) or a (T, d) array. The
    noise covariance comes from the second Yule-Walker line
    Sigma = Gamma_0 - Phi Gamma_{-1}, symmetrized and clipped to the PSD cone.
    """
    v = _as_vec_series(s)
    t_len = v.shape[0]
    if t_len < 3:
        raise ValueError("need at least 3 observations")
    mean = v.mean(axis=0)
    c = _centered_or_raise(v)
    g0 = c.T @ c / t_len
    g1 = c[1:].T @ c[:-1] / t_len
    phi = g1 @ pinv(g0)
    sigma = make_psd(g0 - phi @ g1.T)
    return VarModel(phi=phi, sigma=sigma, mean=mean)


def fit_var1_burg(s) -> VarModel:
    """Order-1 multivariate Burg fit of a vector series.

    Convention: a single coefficient Phi is shared by the forward and
    backward predictors, minimizing
    sum_t ||f_t - Phi b_{t-1}||^2 + ||b_{t-1} - Phi f_t||^2, which gives
    Phi = (C + C^T)(F + G)^+ with C = sum f_t b_{t-1}^T, F = sum f_t f_t^T,
    G = sum b_{t-1} b_{t-1}^T. This mirrors the matrix-Burg treatment where
    the same (A, B) pair enters both residual recursions; for d = 1 it
    reduces to the scalar Burg reflection coefficient.
    """
    v = _as_vec_series(s)
    if v.shape[0] < 3:
        raise ValueError("need at least 3 observations")
    mean = v.mean(axis=0)
    c = _centered_or_raise(v)
    f, b = c[1:], c[:-1]
    cross = f.T @ b
    phi = (cross + cross.T) @ pinv(f.T @ f + b.T @ b)
    resid = f - b @ phi.T
    sigma = resid.T @ resid / resid.shape[0]
    return VarModel(phi=phi, sigma=sigma, mean=mean)


# ---------------------------------------------------------------------------
# MAR(1) Yule-Walker
# ---------------------------------------------------------------------------

def _yw_objective_grad(x, g0k, g1k, m, n):
    """Squared moment-matching objective and its analytic gradient.

    F(A, B) = || G1 - (A (x) I_n) G0 (B^T (x) I_m) ||_F^2 over the
    Kronecker-ordered covariances, differentiated directly in (A, B).
    """
    a = x[: m * m].reshape(m, m)
    b = x[m * m:].reshape(n, n)
    p = np.kron(a, np.eye(n))
    q = np.kron(b.T, np.eye(m))
    w = g0k @ q
    v = p @ g0k
    r = g1k - p @ w
    fval = float(np.sum(r * r))
    d = m * n
    grad_a = -2.0 * np.einsum("irc,jrc->ij", r.reshape(m, n, d), w.reshape(m, n, d))
    grad_b = -2.0 * np.einsum("ruc,rvc->uv", r.reshape(d, n, m), v.reshape(d, n, m))
    return fval, np.concatenate([grad_a.ravel(), grad_b.ravel()])


def fit_mar1_yw(s: MatrixSeries, opts: FitOptions = FitOptions()) -> MarModel:
    """MAR(1) Yule-Walker estimator.

    Minimizes the Frobenius mismatch of the Kronecker-ordered lag-1
    Yule-Walker equation over (A, B) with L-BFGS-B and the analytic gradient,
    warm-started from the nearest Kronecker factorization of the VAR(1)
    coefficient. The objective is invariant along (cA, B/c), so the search is
    unconstrained and the pair is renormalized after convergence. Sigma comes
    from the second Yule-Walker line mapped back to vec coordinates.
    """
    if s.T < 3:
        raise ValueError("need at least 3 observations")
    m, n = s.m, s.n
    mean = s.mean()
    g0v = sample_gamma_vec(s, 0)
    g1v = sample_gamma_vec(s, 1)
    if np.linalg.matrix_rank(g0v) < g0v.shape[0]:
        warnings.warn("lag-0 covariance is singular; using its pseudo-inverse", stacklevel=2)
    g0k = gamma_kron(g0v, m, n)
    g1k = gamma_kron(g1v, m, n)

    start = nkp(g1v @ pinv(g0v), m, n)
    x0 = np.concatenate([start.right.ravel(), start.left.ravel()])

    dim = np.sqrt(m * m + n * n)
    res = scipy.optimize.minimize(
        _yw_objective_grad,
        x0,
        args=(g0k, g1k, m, n),
        jac=True,
        method="L-BFGS-B",
        options={"maxiter": opts.max_iter, "ftol": 1e-15, "gtol": opts.tol / (1.0 + dim)},
    )
    fval, grad = _yw_objective_grad(res.x, g0k, g1k, m, n)
    converged = bool(res.status == 0 or np.linalg.norm(grad) <= opts.tol * (1.0 + abs(fval)))

    a = res.x[: m * m].reshape(m, m)
    b = res.x[m * m:].reshape(n, n)
    if opts.normalize:
        a, b = normalize_pair(a, b)
    # moment matching alone does not confine (A, B) to the causal region the
    # way the classical vector Yule-Walker solution is; shrink the scale of B
    # when the unconstrained optimum is unstable so the fitted model stays
    # usable for forecasting
    rho = spectral_radius(a) * spectral_radius(b)
    if rho >= 1.0:
        b = b * (0.99 / rho)

    gm1k = gamma_kron(g1v.T, m, n)
    sigma_k = g0k - np.kron(a, np.eye(n)) @ gm1k @ np.kron(b.T, np.eye(m))
    sigma = make_psd(gamma_vec_from_kron(sigma_k, m, n))
    return MarModel(coeffs=[(a, b)], sigma=sigma, mean=mean, converged=converged)


# ---------------------------------------------------------------------------
# Burg recursion
# ---------------------------------------------------------------------------

def _burg_pair(f, b, opts: FitOptions):
    """Alternate the closed-form (A, B) updates on one pair of residual sets.

    Minimizes E = sum_t ||f_t - A b_t B^T||_F^2 + ||b_t - A f_t B^T||_F^2,
    normalizing A each sweep. Returns (A, B, energies, converged) with one
    energy value per sweep, measured after both updates.
    """
    m, n = f.shape[1], f.shape[2]
    if f.shape[0] < 1:
        raise ValueError("need at least one usable residual pair")
    if not (np.any(f) or np.any(b)):
        return np.eye(m) / np.sqrt(m), np.zeros((n, n)), [0.0], True

    if opts.seed is None:
        a = np.eye(m) / np.sqrt(m)
        bmat = np.eye(n)
    else:
        rng = np.random.default_rng(opts.seed)
        a = rng.standard_normal((m, m))
        a /= np.linalg.norm(a)
        bmat = rng.standard_normal((n, n))

    f_sign = -1.0 if opts.use_minus_b_update else 1.0
    energies = []
    converged = False
    for _ in range(opts.max_iter):
        cb = bmat.T @ bmat
        r_a = np.einsum("tij,jk,tlk->il", f, bmat, b) + np.einsum("tij,jk,tlk->il", b, bmat, f)
        m_a = np.einsum("tij,jk,tlk->il", b, cb, b) + np.einsum("tij,jk,tlk->il", f, cb, f)
        a = r_a @ pinv(m_a)
        norm_a = np.linalg.norm(a)
        if norm_a == 0.0:
            a = np.eye(m) / np.sqrt(m)
        else:
            a = a / norm_a

        d = a.T @ a
        m_b = np.einsum("tji,jk,tkl->il", b, d, b) + f_sign * np.einsum("tji,jk,tkl->il", f, d, f)
        r_b = np.einsum("tji,kj,tkl->il", b, a, f) + np.einsum("tji,kj,tkl->il", f, a, b)
        bmat = (pinv(m_b) @ r_b).T

        pred_f = np.einsum("ij,tjk,lk->til", a, b, bmat)
        pred_b = np.einsum("ij,tjk,lk->til", a, f, bmat)
        energy = float(np.sum((f - pred_f) ** 2) + np.sum((b - pred_b) ** 2))
        if energies and abs(energies[-1] - energy) <= opts.tol * (1.0 + energies[-1]):
            energies.append(energy)
            converged = True
            break
        energies.append(energy)

    if opts.normalize:
        peak = np.unravel_index(np.argmax(np.abs(a)), a.shape)
        if a[peak] < 0.0:
            a, bmat = -a, -bmat
    return a, bmat, energies, converged


def burg_order_step(state: BurgState, opts: FitOptions = FitOptions()):
    """Solve for the next-order coefficient pair from the current residuals."""
    if state.forward.shape[0] < 2:
        raise ValueError("need at least 2 usable time indices")
    a, b, _, _ = _burg_pair(state.forward[1:], state.backward[:-1], opts)
    return a, b


def burg_residual_update(state: BurgState, a: np.ndarray, b: np.ndarray) -> BurgState:
    """Advance the residual recursion one order with coefficient pair (a, b).

    f_t^(k) = f_t^(k-1) - A b_{t-1}^(k-1) B^T and
    b_t^(k) = b_{t-1}^(k-1) - A f_t^(k-1) B^T, applied in vec coordinates with
    the single matrix B (x) A so the update agrees entry-exactly with the
    vectorized recursion. The caller refreshes ``coeffs`` separately.
    """
    m, n = state.forward.shape[1], state.forward.shape[2]
    kmat = np.kron(b, a)
    f_old, b_old = state.forward, state.backward
    count = f_old.shape[0] - 1
    new_f = np.empty((count, m, n))
    new_b = np.empty((count, m, n))
    for i in range(count):
        new_f[i] = f_old[1 + i] - unvec(kmat @ vec(b_old[i]), m, n)
        new_b[i] = b_old[i] - unvec(kmat @ vec(f_old[1 + i]), m, n)
    return BurgState(k=state.k + 1, forward=new_f, backward=new_b, coeffs=list(state.coeffs))


def update_lower_coeffs(prev, a_k: np.ndarray, b_k: np.ndarray):
    """Downdate the lower-lag coefficients when the order grows from k-1 to k.

    For each i = 1..k-1 forms
    B_{k-1}(i) (x) A_{k-1}(i) - [B_k(k) (x) A_k(k)][B_{k-1}(k-i) (x) A_{k-1}(k-i)]
    and factors it back into a pair by the nearest Kronecker product, with
    ||A_k(i)||_F = 1. Returns (pairs, nkp_residuals); the residuals measure
    how far each downdated matrix is from exact Kronecker structure.
    """
    m, n = a_k.shape[0], b_k.shape[0]
    k = len(prev) + 1
    k_new = np.kron(b_k, a_k)
    prev_kron = [np.kron(bi, ai) for ai, bi in prev]
    pairs = []
    residuals = []
    for i in range(1, k):
        rhs = prev_kron[i - 1] - k_new @ prev_kron[k - i - 1]
        res = nkp(rhs, m, n)
        pairs.append((res.right, res.left))
        residuals.append(res.residual_fro)
    return pairs, residuals


def fit_mar_burg(s: MatrixSeries, p: int = 1, opts: FitOptions = FitOptions()) -> MarModel:
    """Order-recursive Burg estimator for the matrix AR(p) model.

    Starting from f_t = b_t = centered data, each order solves the
    closed-form alternating minimization for (A_k, B_k), downdates the
    lower-lag pairs through the nearest Kronecker product, and advances the
    residual recursion. Sigma is the sample covariance of the vectorized
    final forward residuals.
    """
    if p < 1:
        raise ValueError("order must be >= 1")
    if s.T <= p + 1:
        raise ValueError(f"series too short for order {p}")
    mean = s.mean()
    centered = s.data - mean
    state = BurgState(k=0, forward=centered.copy(), backward=centered.copy())
    converged = True
    for _ in range(p):
        a, b, _, conv = _burg_pair(state.forward[1:], state.backward[:-1], opts)
        converged = converged and conv
        pairs, _ = update_lower_coeffs(state.coeffs, a, b)
        state = burg_residual_update(state, a, b)
        state.coeffs = pairs + [(a, b)]

    resid = state.forward.transpose(0, 2, 1).reshape(state.forward.shape[0], s.m * s.n)
    resid = resid - resid.mean(axis=0)
    sigma = resid.T @ resid / resid.shape[0]
    return MarModel(coeffs=state.coeffs, sigma=sigma, mean=mean, converged=converged)


# ---------------------------------------------------------------------------
# Alternating least squares baseline
# ---------------------------------------------------------------------------

def fit_mar1_lse(s: MatrixSeries, opts: FitOptions = FitOptions()) -> MarModel:
    """Iterated least squares for MAR(1).

    Alternates the exact normal-equation solutions for A (fixing B) and B
    (fixing A) on sum_t ||X_t - A X_{t-1} B^T||_F^2; the objective is
    non-increasing across sweeps. Deterministic start: B = I, A from one
    least-squares step.
    """
    if s.T < 3:
        raise ValueError("need at least 3 observations")
    m, n = s.m, s.n
    mean = s.mean()
    c = s.data - mean
    x, xl = c[1:], c[:-1]

    bmat = np.eye(n)
    prev_obj = None
    converged = False
    for _ in range(opts.max_iter):
        cb = bmat.T @ bmat
        num_a = np.einsum("tij,jk,tlk->il", x, bmat, xl)
        den_a = np.einsum("tij,jk,tlk->il", xl, cb, xl)
        a = num_a @ pinv(den_a)

        d = a.T @ a
        num_b = np.einsum("tji,jk,tkl->il", x, a, xl)
        den_b = np.einsum("tji,jk,tkl->il", xl, d, xl)
        bmat = num_b @ pinv(den_b)

        pred = np.einsum("ij,tjk,lk->til", a, xl, bmat)
        obj = float(np.sum((x - pred) ** 2))
        if prev_obj is not None and abs(prev_obj - obj) <= opts.tol * (1.0 + prev_obj):
            converged = True
            break
        prev_obj = obj

    if opts.normalize:
        a, bmat = normalize_pair(a, bmat)
    resid = x - np.einsum("ij,tjk,lk->til", a, xl, bmat)
    rv = resid.transpose(0, 2, 1).reshape(resid.shape[0], m * n)
    rv = rv - rv.mean(axis=0)
    sigma = rv.T @ rv / rv.shape[0]
    return MarModel(coeffs=[(a, bmat)], sigma=sigma, mean=mean, converged=converged)


# ---------------------------------------------------------------------------
# Vectorized MAR via NKP
# ---------------------------------------------------------------------------

def fit_vecmar_nkp(s: MatrixSeries, method: str = "yw") -> MarModel:
    """Fit a VAR(1) on the vectorized series, then factor the coefficient.

    The nearest Kronecker product of the estimated Phi gives (A, B); Sigma is
    the sample covariance of the VAR one-step residuals.
    """
    if method == "yw":
        var = fit_var1_yw(s)
    elif method == "burg":
        var = fit_var1_burg(s)
    else:
        raise ValueError(f"unknown VAR method {method!r} (expected 'yw' or 'burg')")
    m, n = s.m, s.n
    res = nkp(var.phi, m, n)
    c = s.vecs() - var.mean
    resid = c[1:] - c[:-1] @ var.phi.T
    sigma = resid.T @ resid / resid.shape[0]
    return MarModel(
        coeffs=[(res.right, res.left)],
        sigma=sigma,
        mean=unvec(var.mean, m, n),
        converged=var.converged,
    )


# ---------------------------------------------------------------------------
# Prediction and causality
# ---------------------------------------------------------------------------

def predict(model, history, horizon: int = 1):
    """Iterated linear forecasts.

    For a MAR model, X^_t = mean + sum_i A_i (X_{t-i} - mean) B_i^T computed
    in vec coordinates via B_i (x) A_i, so forecasts agree entry-exactly with
    the vectorized VAR forecasts. Multi-step forecasts substitute earlier
    predictions for unavailable history. Returns a MatrixSeries (MAR) or a
    (horizon, d) array (VAR).
    """
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    if isinstance(model, MarModel):
        if not isinstance(history, MatrixSeries):
            history = MatrixSeries(np.asarray(history, dtype=float))
        if history.T < model.p:
            raise ValueError(f"need at least {model.p} observations of history")
        phis = [model.phi(i) for i in range(model.p)]
        vbar = model.mean.reshape(-1, order="F")
        hist = [history.vecs()[-(i + 1)] - vbar for i in range(model.p)]
        preds = np.empty((horizon, model.m * model.n))
        for h in range(horizon):
            step = np.zeros(model.m * model.n)
            for i, phi in enumerate(phis):
                step = step + phi @ hist[i]
            preds[h] = step + vbar
            hist = [step] + hist[: model.p - 1]
        return MatrixSeries.from_vecs(preds, model.m, model.n)

    if isinstance(model, VarModel):
        v = _as_vec_series(history)
        if v.shape[0] < 1:
            raise ValueError("need at least 1 observation of history")
        prev = v[-1] - model.mean
        preds = np.empty((horizon, model.d))
        for h in range(horizon):
            prev = model.phi @ prev
            preds[h] = prev + model.mean
        return preds

    raise TypeError(f"cannot predict with {type(model).__name__}")


def companion_matrix(phis) -> np.ndarray:
    """Companion form of a VAR(p) coefficient list."""
    p = len(phis)
    d = phis[0].shape[0]
    comp = np.zeros((p * d, p * d))
    for i, phi in enumerate(phis):
        comp[:d, i * d : (i + 1) * d] = phi
    if p > 1:
        comp[d:, : (p - 1) * d] = np.eye((p - 1) * d)
    return comp


def is_causal(model):
    """Stationarity check: (flag, spectral margin).

    For MAR(1) the margin is rho(A) * rho(B) = rho(B (x) A); for p > 1 it is
    the spectral radius of the vectorized companion matrix; for a VAR it is
    rho(Phi). The flag is margin < 1.
    """
    if isinstance(model, MarModel):
        if model.p == 1:
            a, b = model.coeffs[0]
            rho = spectral_radius(a) * spectral_radius(b)
        else:
            rho = spectral_radius(companion_matrix([model.phi(i) for i in range(model.p)]))
    elif isinstance(model, VarModel):
        rho = spectral_radius(model.phi)
    else:
        raise TypeError(f"cannot assess causality of {type(model).__name__}")
    return bool(rho < 1.0), float(rho)
