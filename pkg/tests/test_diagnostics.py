import numpy as np
import pytest

from marest import (
    MarModel,
    MatrixSeries,
    evaluate,
    mae,
    mardia_test,
    mse,
    rmse,
    smape,
)


def series_of(values):
    return MatrixSeries(np.asarray(values, dtype=float))


def test_metrics_zero_for_identical_series():
    rng = np.random.default_rng(0)
    s = series_of(rng.standard_normal((10, 2, 3)))
    assert mae(s, s) == 0.0
    assert mse(s, s) == 0.0
    assert rmse(s, s) == 0.0
    assert smape(s, s) == 0.0


def test_metrics_hand_values():
    actual = series_of([[[3.0]]])
    pred = series_of([[[1.0]]])
    assert mae(actual, pred) == pytest.approx(2.0)
    assert mse(actual, pred) == pytest.approx(4.0)
    assert rmse(actual, pred) == pytest.approx(2.0)
    assert smape(actual, pred) == pytest.approx(100.0)  # 100 * 2 / 2


def test_metrics_match_double_loop_oracle():
    rng = np.random.default_rng(1)
    a = rng.standard_normal((7, 3, 2))
    p = rng.standard_normal((7, 3, 2))
    total_abs = total_sq = 0.0
    for t in range(7):
        for i in range(3):
            for j in range(2):
                total_abs += abs(a[t, i, j] - p[t, i, j])
                total_sq += (a[t, i, j] - p[t, i, j]) ** 2
    count = 7 * 3 * 2
    assert mae(series_of(a), series_of(p)) == pytest.approx(total_abs / count, abs=1e-12)
    assert mse(series_of(a), series_of(p)) == pytest.approx(total_sq / count, abs=1e-12)


def test_rmse_dominates_mae():
    rng = np.random.default_rng(2)
    for _ in range(20):
        a = series_of(rng.standard_normal((5, 2, 2)))
        p = series_of(rng.standard_normal((5, 2, 2)))
        assert rmse(a, p) >= mae(a, p)


def test_smape_extremes_and_bounds():
    assert smape(series_of([[[1.0]]]), series_of([[[0.0]]])) == pytest.approx(200.0)
    assert smape(series_of([[[0.0]]]), series_of([[[0.0]]])) == 0.0
    rng = np.random.default_rng(3)
    for _ in range(20):
        a = series_of(rng.standard_normal((4, 2, 2)))
        p = series_of(rng.standard_normal((4, 2, 2)))
        assert 0.0 <= smape(a, p) <= 200.0


def test_metrics_invariant_under_joint_time_reorder():
    rng = np.random.default_rng(4)
    a = rng.standard_normal((9, 2, 2))
    p = rng.standard_normal((9, 2, 2))
    perm = rng.permutation(9)
    assert mae(series_of(a), series_of(p)) == pytest.approx(
        mae(series_of(a[perm]), series_of(p[perm])), abs=1e-14
    )
    assert smape(series_of(a), series_of(p)) == pytest.approx(
        smape(series_of(a[perm]), series_of(p[perm])), abs=1e-12
    )


def test_metrics_reject_shape_mismatch():
    with pytest.raises(ValueError):
        mae(series_of(np.ones((3, 2, 2))), series_of(np.ones((3, 2, 3))))


def test_mardia_size_monte_carlo():
    # under multivariate normality, both component tests should reject at
    # roughly the nominal 5% rate
    rejections_skew = 0
    rejections_kurt = 0
    reps = 200
    for seed in range(reps):
        sample = np.random.default_rng(seed).standard_normal((2000, 4))
        skew_p, kurt_p, _ = mardia_test(sample)
        rejections_skew += skew_p < 0.05
        rejections_kurt += kurt_p < 0.05
    assert 0.01 <= rejections_skew / reps <= 0.10
    assert 0.01 <= rejections_kurt / reps <= 0.10


def test_mardia_detects_skewed_sample():
    sample = np.random.default_rng(0).exponential(size=(2000, 4))
    skew_p, _, joint_p = mardia_test(sample)
    assert skew_p < 0.01
    assert joint_p < 0.02


def test_mardia_univariate_matches_hand_moments():
    from scipy import stats

    x = np.array([0.0, 1.0, 2.0, 3.0, 10.0])
    n = len(x)
    c = x - x.mean()
    m2 = np.mean(c**2)
    m3 = np.mean(c**3)
    m4 = np.mean(c**4)
    b1 = (m3 / m2**1.5) ** 2
    b2 = m4 / m2**2
    skew_stat = n * b1 / 6.0
    kurt_z = (b2 - 3.0 * (n - 1.0) / (n + 1.0)) / np.sqrt(24.0 / n)
    expected_skew_p = stats.chi2.sf(skew_stat, 1)
    expected_kurt_p = 2 * stats.norm.sf(abs(kurt_z))
    skew_p, kurt_p, joint_p = mardia_test(x[:, None])
    assert skew_p == pytest.approx(expected_skew_p, abs=1e-12)
    assert kurt_p == pytest.approx(expected_kurt_p, abs=1e-12)
    assert joint_p == pytest.approx(min(1.0, 2 * min(skew_p, kurt_p)), abs=1e-15)


def test_mardia_scale_invariance():
    sample = np.random.default_rng(5).standard_normal((300, 3))
    base = mardia_test(sample)
    scaled = mardia_test(37.5 * sample)
    assert base[0] == pytest.approx(scaled[0], abs=1e-8)
    assert base[1] == pytest.approx(scaled[1], abs=1e-8)


def test_mardia_rejects_tiny_samples():
    with pytest.raises(ValueError):
        mardia_test(np.random.default_rng(6).standard_normal((5, 4)))


def test_mardia_warns_on_singular_covariance():
    rng = np.random.default_rng(7)
    base = rng.standard_normal((100, 2))
    degenerate = np.column_stack([base, base[:, 0]])  # third column duplicates the first
    with pytest.warns(UserWarning, match="singular"):
        out = mardia_test(degenerate)
    for p in out:
        assert 0.0 <= p <= 1.0


def test_mardia_pvalues_in_unit_interval():
    for seed in range(10):
        sample = np.random.default_rng(seed).standard_normal((100, 3))
        for p in mardia_test(sample):
            assert 0.0 <= p <= 1.0


def make_mar1(a, b, mean=None):
    m, n = a.shape[0], b.shape[0]
    return MarModel(coeffs=[(a, b)], sigma=np.eye(m * n), mean=mean)


def test_evaluate_perfect_model_on_noiseless_data():
    def rot(t):
        return np.array([[np.cos(t), -np.sin(t)], [np.sin(t), np.cos(t)]])

    a = rot(np.pi / 4) / np.sqrt(2)
    b = np.sqrt(2) * rot(np.pi / 8)
    rng = np.random.default_rng(7)
    data = [rng.standard_normal((2, 2))]
    for _ in range(63):
        data.append(a @ data[-1] @ b.T)
    full = np.stack(data)
    model = make_mar1(a, b)
    report = evaluate(model, MatrixSeries(full[:32]), MatrixSeries(full[32:]))
    assert report.mae < 1e-12
    assert report.rmse < 1e-12
    assert report.mse < 1e-12


def test_evaluate_zero_model_rmse_is_second_moment_root():
    rng = np.random.default_rng(8)
    train = MatrixSeries(rng.standard_normal((20, 2, 2)))
    test = MatrixSeries(rng.standard_normal((30, 2, 2)))
    model = make_mar1(np.zeros((2, 2)), np.zeros((2, 2)))
    report = evaluate(model, train, test)
    assert report.rmse == pytest.approx(np.sqrt(np.mean(test.data**2)), abs=1e-12)


def test_evaluate_report_invariants():
    rng = np.random.default_rng(9)
    train = MatrixSeries(rng.standard_normal((50, 2, 2)))
    test = MatrixSeries(rng.standard_normal((40, 2, 2)))
    model = make_mar1(np.eye(2) / np.sqrt(2), 0.4 * np.eye(2))
    report = evaluate(model, train, test)
    assert report.rmse == pytest.approx(np.sqrt(report.mse), abs=1e-12)
    assert 0.0 <= report.smape <= 200.0
    assert report.causal and report.rho == pytest.approx(0.4 / np.sqrt(2) * 1, abs=1e-10)
    assert 0.0 <= report.mardia_joint_p <= 1.0


def test_evaluate_free_run_scheme_differs_from_rolling():
    rng = np.random.default_rng(10)
    a = np.eye(2) / np.sqrt(2)
    b = 0.9 * np.eye(2)
    from marest import generate_mar1

    s = generate_mar1(a, b, np.eye(4), 2, 2, 120, seed=11)
    train = MatrixSeries(s.data[:100])
    test = MatrixSeries(s.data[100:])
    model = make_mar1(a, b)
    rolling = evaluate(model, train, test, scheme="one_step")
    free = evaluate(model, train, test, scheme="free_run")
    assert rolling.rmse < free.rmse  # true history beats compounding forecasts
    with pytest.raises(ValueError):
        evaluate(model, train, test, scheme="interpolate")


def test_evaluate_small_test_span_gives_nan_pvalues():
    rng = np.random.default_rng(11)
    train = MatrixSeries(rng.standard_normal((30, 2, 2)))
    test = MatrixSeries(rng.standard_normal((3, 2, 2)))  # 3 <= d + 1 = 5
    model = make_mar1(np.eye(2) / np.sqrt(2), 0.1 * np.eye(2))
    report = evaluate(model, train, test)
    assert np.isnan(report.mardia_joint_p)
    assert np.isfinite(report.rmse)
