"""Estimation of matrix autoregressive models.

Yule-Walker and Burg-type estimators for the bilinear matrix AR model,
iterated-least-squares and vector-AR baselines, a seeded simulation
generator, forecast diagnostics, and a benchmark harness.
"""

from .covariance import (
    KronCovariance,
    MatrixSeries,
    gamma_kron,
    gamma_vec_from_kron,
    sample_gamma_kron,
    sample_gamma_vec,
    yule_walker_system,
)
from .diagnostics import EvalReport, evaluate, mae, mardia_test, mse, rmse, smape
from .errors import DataError, SingularCovarianceError
from .estimators import (
    BurgState,
    FitOptions,
    MarModel,
    VarModel,
    burg_order_step,
    burg_residual_update,
    fit_mar1_lse,
    fit_mar1_yw,
    fit_mar_burg,
    fit_var1_burg,
    fit_var1_yw,
    fit_vecmar_nkp,
    is_causal,
    normalize_pair,
    predict,
    update_lower_coeffs,
)
from .linalg import NkpResult, kron, make_psd, nkp, pinv, spectral_radius, unvec, vec
from .simulation import (
    SimConfig,
    generate,
    generate_mar1,
    generate_var1,
    random_psd_sigma,
    random_stable_phi,
)

__version__ = "0.1.0"

__all__ = [
    "BurgState",
    "DataError",
    "EvalReport",
    "FitOptions",
    "KronCovariance",
    "MarModel",
    "MatrixSeries",
    "NkpResult",
    "SimConfig",
    "SingularCovarianceError",
    "VarModel",
    "burg_order_step",
    "burg_residual_update",
    "evaluate",
    "fit_mar1_lse",
    "fit_mar1_yw",
    "fit_mar_burg",
    "fit_var1_burg",
    "fit_var1_yw",
    "fit_vecmar_nkp",
    "gamma_kron",
    "gamma_vec_from_kron",
    "generate",
    "generate_mar1",
    "generate_var1",
    "is_causal",
    "kron",
    "mae",
    "make_psd",
    "mardia_test",
    "mse",
    "nkp",
    "normalize_pair",
    "pinv",
    "predict",
    "random_psd_sigma",
    "random_stable_phi",
    "rmse",
    "sample_gamma_kron",
    "sample_gamma_vec",
    "smape",
    "spectral_radius",
    "unvec",
    "update_lower_coeffs",
    "vec",
    "yule_walker_system",
]
