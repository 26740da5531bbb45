"""Forecast-accuracy metrics, Mardia's normality test, and model evaluation."""

import warnings
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .covariance import MatrixSeries
from .estimators import MarModel, VarModel, is_causal, predict


@dataclass
class EvalReport:
    """Per-fit evaluation record.

    Mardia p-values are NaN when the residual sample is too small for the
    test (fewer than d + 2 points in d dimensions).
    """

    mae: float
    mse: float
    rmse: float
    smape: float
    mardia_skew_p: float
    mardia_kurt_p: float
    mardia_joint_p: float
    causal: bool
    rho: float
    fit_seconds: float = 0.0


def _paired_entries(actual: MatrixSeries, pred: MatrixSeries):
    if actual.data.shape != pred.data.shape:
        raise ValueError(f"shape mismatch: {actual.data.shape} vs {pred.data.shape}")
    return actual.data, pred.data


def mae(actual: MatrixSeries, pred: MatrixSeries) -> float:
    """Mean absolute entrywise error, averaged over time and entries."""
    a, p = _paired_entries(actual, pred)
    return float(np.mean(np.abs(a - p)))


def mse(actual: MatrixSeries, pred: MatrixSeries) -> float:
    """Mean squared entrywise error."""
    a, p = _paired_entries(actual, pred)
    return float(np.mean((a - p) ** 2))


def rmse(actual: MatrixSeries, pred: MatrixSeries) -> float:
    """Root of :func:`mse`."""
    return float(np.sqrt(mse(actual, pred)))


def smape(actual: MatrixSeries, pred: MatrixSeries) -> float:
    """Symmetric mean absolute percentage error, in [0, 200].

    Entries where |actual| + |pred| = 0 contribute 0 (the ratio is otherwise
    undefined there) but still count toward the averaging denominator.
    """
    a, p = _paired_entries(actual, pred)
    denom = (np.abs(a) + np.abs(p)) / 2.0
    terms = np.zeros_like(denom)
    mask = denom > 0.0
    terms[mask] = np.abs(a - p)[mask] / denom[mask]
    return float(100.0 * np.mean(terms))


def mardia_test(residuals: np.ndarray):
    """Mardia's multivariate skewness and kurtosis tests.

    Parameters
    ----------
    residuals : (N, d) array
        Sample of d-dimensional vectors, N > d + 1.

    Returns
    -------
    (skew_p, kurt_p, joint_p) : tuple of float
        Skewness: N b_1 / 6 against chi^2 with d(d+1)(d+2)/6 dof. Kurtosis:
        b_2 centered at its finite-sample null mean d(d+2)(N-1)/(N+1) and
        scaled by sqrt(8 d (d+2) / N), against a standard normal, two-sided
        (the asymptotic centering d(d+2) is biased by several sigma once d
        is large relative to N). The joint p-value is the Bonferroni
        combination min(1, 2 min(skew_p, kurt_p)).
    """
    r = np.asarray(residuals, dtype=float)
    if r.ndim == 1:
        r = r[:, None]
    n_obs, d = r.shape
    if n_obs <= d + 1:
        raise ValueError(f"need more than d + 1 = {d + 1} observations, got {n_obs}")
    c = r - r.mean(axis=0)
    cov = c.T @ c / n_obs
    if np.linalg.matrix_rank(cov) < d:
        warnings.warn("singular residual covariance; using its pseudo-inverse", stacklevel=2)
    # whiten instead of forming the N x N pairwise matrix:
    # b1 = sum over index triples of the squared third moments of z,
    # b2 = mean ||z_i||^4, with z = centered @ cov^(-1/2)
    w, q = np.linalg.eigh(cov)
    tol = max(d, 1) * 1e-12 * max(float(w[-1]), 0.0)
    inv_sqrt = np.where(w > tol, 1.0 / np.sqrt(np.where(w > tol, w, 1.0)), 0.0)
    z = c @ (q * inv_sqrt)
    third = np.einsum("ip,iq,ir->pqr", z, z, z) / n_obs
    b1 = float(np.sum(third**2))
    sq = np.sum(z * z, axis=1)
    b2 = float(np.mean(sq**2))

    skew_stat = n_obs * b1 / 6.0
    skew_dof = d * (d + 1) * (d + 2) / 6.0
    skew_p = float(stats.chi2.sf(skew_stat, skew_dof))

    null_kurt = d * (d + 2) * (n_obs - 1.0) / (n_obs + 1.0)
    kurt_z = (b2 - null_kurt) / np.sqrt(8.0 * d * (d + 2) / n_obs)
    kurt_p = float(2.0 * stats.norm.sf(abs(kurt_z)))

    joint_p = min(1.0, 2.0 * min(skew_p, kurt_p))
    return skew_p, kurt_p, joint_p


def _one_step_predictions(model, train: MatrixSeries, test: MatrixSeries) -> np.ndarray:
    """Rolling one-step forecasts over the test span using true history."""
    full = np.concatenate([train.vecs(), test.vecs()], axis=0)
    t0 = train.T
    if isinstance(model, MarModel):
        phis = [model.phi(i) for i in range(model.p)]
        vbar = model.mean.reshape(-1, order="F")
        p = model.p
    else:
        phis = [model.phi]
        vbar = model.mean
        p = 1
    preds = np.empty((test.T, full.shape[1]))
    for idx in range(test.T):
        t = t0 + idx
        step = np.zeros(full.shape[1])
        for i, phi in enumerate(phis):
            step = step + phi @ (full[t - 1 - i] - vbar)
        preds[idx] = step + vbar
    if t0 < p:
        raise ValueError(f"need at least {p} training observations")
    return preds


def evaluate(model, train: MatrixSeries, test: MatrixSeries, scheme: str = "one_step") -> EvalReport:
    """Score a fitted model on held-out data.

    ``scheme="one_step"`` makes rolling one-step-ahead predictions, each using
    the true history up to t-1; ``scheme="free_run"`` forecasts the whole test
    span from the end of the training data. Error metrics and Mardia's test
    are computed on the test-span prediction residuals.
    """
    if test.T < 1:
        raise ValueError("test span is empty")
    if scheme == "one_step":
        pred_vecs = _one_step_predictions(model, train, test)
    elif scheme == "free_run":
        fc = predict(model, train if isinstance(model, MarModel) else train.vecs(), horizon=test.T)
        pred_vecs = fc.vecs() if isinstance(fc, MatrixSeries) else fc
    else:
        raise ValueError(f"unknown evaluation scheme {scheme!r}")

    preds = MatrixSeries.from_vecs(pred_vecs, test.m, test.n)
    resid = test.vecs() - pred_vecs
    try:
        skew_p, kurt_p, joint_p = mardia_test(resid)
    except ValueError:
        skew_p = kurt_p = joint_p = float("nan")
    causal, rho = is_causal(model)
    mse_val = mse(test, preds)
    return EvalReport(
        mae=mae(test, preds),
        mse=mse_val,
        rmse=float(np.sqrt(mse_val)),
        smape=smape(test, preds),
        mardia_skew_p=skew_p,
        mardia_kurt_p=kurt_p,
        mardia_joint_p=joint_p,
        causal=causal,
        rho=rho,
    )
