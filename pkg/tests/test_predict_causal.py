import numpy as np
import pytest

from marest import MarModel, MatrixSeries, VarModel, is_causal, predict
from marest.estimators import companion_matrix


def make_mar(a_list, b_list, mean=None):
    m = a_list[0].shape[0]
    n = b_list[0].shape[0]
    return MarModel(
        coeffs=list(zip(a_list, b_list)), sigma=np.eye(m * n), mean=mean
    )


def test_zero_model_forecasts_the_mean():
    model = make_mar([np.zeros((2, 2))], [np.zeros((2, 2))])
    history = MatrixSeries(np.random.default_rng(0).standard_normal((5, 2, 2)))
    fc = predict(model, history, horizon=4)
    assert np.allclose(fc.data, 0.0)

    mean = np.full((2, 2), 1.5)
    model2 = make_mar([np.zeros((2, 2))], [np.zeros((2, 2))], mean=mean)
    fc2 = predict(model2, history, horizon=2)
    assert np.allclose(fc2.data, 1.5)


def test_two_step_forecast_is_iterated_substitution():
    rng = np.random.default_rng(1)
    a = rng.standard_normal((2, 2))
    b = rng.standard_normal((2, 2))
    model = make_mar([a], [b])
    x_last = rng.standard_normal((2, 2))
    history = MatrixSeries(x_last[None])
    fc = predict(model, history, horizon=2)
    step1 = a @ x_last @ b.T
    step2 = a @ step1 @ b.T
    assert np.allclose(fc.data[0], step1, atol=1e-12)
    assert np.allclose(fc.data[1], step2, atol=1e-12)


def test_forecast_matches_vectorized_var_entry_exact():
    rng = np.random.default_rng(2)
    a = rng.standard_normal((2, 2))
    b = rng.standard_normal((3, 3))
    model = make_mar([a], [b])
    x_last = rng.standard_normal((2, 3))
    history = MatrixSeries(x_last[None])
    horizon = 5
    fc = predict(model, history, horizon=horizon)
    kmat = np.kron(b, a)
    v = x_last.reshape(-1, order="F")
    for h in range(horizon):
        v = kmat @ v
        assert np.array_equal(fc.data[h].reshape(-1, order="F"), v)


def test_mar_p2_forecast_uses_both_lags():
    rng = np.random.default_rng(3)
    a1, b1 = rng.standard_normal((2, 2)), rng.standard_normal((2, 2))
    a2, b2 = rng.standard_normal((2, 2)), rng.standard_normal((2, 2))
    model = make_mar([a1, a2], [b1, b2])
    hist = rng.standard_normal((2, 2, 2))
    fc = predict(model, MatrixSeries(hist), horizon=1)
    k1, k2 = np.kron(b1, a1), np.kron(b2, a2)
    v1 = hist[1].reshape(-1, order="F")
    v0 = hist[0].reshape(-1, order="F")
    assert np.allclose(fc.data[0].reshape(-1, order="F"), k1 @ v1 + k2 @ v0, atol=1e-14)


def test_predict_requires_enough_history():
    model = make_mar(
        [np.eye(2), np.eye(2) * 0.1], [np.eye(2) * 0.5, np.eye(2) * 0.2]
    )
    with pytest.raises(ValueError):
        predict(model, MatrixSeries(np.ones((1, 2, 2))), horizon=1)


def test_mar_and_vectorized_var_forecasts_agree_entry_exact():
    rng = np.random.default_rng(6)
    a = rng.standard_normal((2, 2)) * 0.5
    b = rng.standard_normal((3, 3)) * 0.5
    mar = make_mar([a], [b])
    var = VarModel(phi=np.kron(b, a), sigma=np.eye(6))
    hist = rng.standard_normal((4, 2, 3))
    mar_fc = predict(mar, MatrixSeries(hist), horizon=6)
    var_fc = predict(var, MatrixSeries(hist).vecs(), horizon=6)
    assert np.array_equal(mar_fc.vecs(), var_fc)


def test_var_predict_iterates_phi():
    rng = np.random.default_rng(4)
    phi = rng.standard_normal((3, 3)) * 0.3
    model = VarModel(phi=phi, sigma=np.eye(3))
    hist = rng.standard_normal((4, 3))
    fc = predict(model, hist, horizon=3)
    v = hist[-1]
    for h in range(3):
        v = phi @ v
        assert np.array_equal(fc[h], v)


def test_is_causal_diagonal_margin():
    m = 3
    model = make_mar([np.eye(m) / np.sqrt(m)], [0.5 * np.eye(m) * np.sqrt(m)])
    causal, rho = is_causal(model)
    assert causal
    assert rho == pytest.approx(0.5, abs=1e-12)


def test_is_causal_boundary_not_causal():
    model = make_mar([np.eye(2)], [np.eye(2)])
    causal, rho = is_causal(model)
    assert rho == pytest.approx(1.0, abs=1e-12)
    assert not causal


def test_companion_radius_matches_direct_product_for_p1():
    rng = np.random.default_rng(5)
    for _ in range(5):
        a = rng.standard_normal((2, 2))
        b = rng.standard_normal((2, 2))
        model = make_mar([a], [b])
        _, rho = is_causal(model)
        comp_rho = np.max(np.abs(np.linalg.eigvals(companion_matrix([np.kron(b, a)]))))
        assert rho == pytest.approx(comp_rho, abs=1e-8)


def test_var_causality_uses_phi_radius():
    model = VarModel(phi=np.diag([0.3, -0.8]), sigma=np.eye(2))
    causal, rho = is_causal(model)
    assert causal and rho == pytest.approx(0.8, abs=1e-12)
