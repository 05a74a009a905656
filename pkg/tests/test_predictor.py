import numpy as np
import pytest

from tubecast import (ArimaSpec, DimensionError, Forecaster, SeriesWindow, UnivariateArmaSpec,
                      VarmaSpec, compute_y_series, forecast_mean, forecast_mean_arima, ma_acvf,
                      simulate_paths, solve_blp, vma_acvf)
from tubecast.predictor import predictor_for

from conftest import GRID, grid_id, grid_spec


def test_white_noise_coefficients_are_zero():
    c = solve_blp(ma_acvf([], 1.0, 5), 1, 5)
    assert np.array_equal(c.coeffs, np.zeros((5, 1)))


def test_ma1_one_step():
    c = solve_blp(ma_acvf([0.5], 1.0, 1), 1, 1)
    assert c.coeffs[0, 0] == pytest.approx(0.4, abs=1e-15)


def test_ma1_two_step_is_zero():
    c = solve_blp(ma_acvf([0.5], 1.0, 3), 2, 2)
    assert np.allclose(c.coeffs[1], 0.0, atol=1e-15)


def test_table_too_short():
    with pytest.raises(DimensionError):
        solve_blp(ma_acvf([0.5], 1.0, 1), 3, 2)


@pytest.mark.parametrize("theta", [[0.5], [0.4, 0.2], [0.9, -0.5, 0.3]])
@pytest.mark.parametrize("n_eff,h", [(1, 1), (5, 3), (40, 4)])
def test_solve_residual(theta, n_eff, h):
    t = ma_acvf(theta, 1.3, n_eff + h)
    c = solve_blp(t, n_eff, h)
    G = t.toeplitz(n_eff)
    for i in range(h):
        target = np.array([t.lag(i + 1 + k) for k in range(n_eff)])
        res = np.linalg.norm(G @ c.coeffs[i] - target) / max(1.0, np.linalg.norm(target))
        assert res <= 1e-9


def test_singular_system_uses_fallback():
    # theta = 1 gives a non-invertible MA whose Toeplitz matrices are still PD;
    # a degenerate table (all zero) forces the minimum-norm path
    from tubecast import AcvfTable
    c = solve_blp(AcvfTable(np.zeros(6)), 3, 2)
    assert c.method == "lstsq"
    assert np.array_equal(c.coeffs, np.zeros((2, 3)))


def test_block_m1_equals_scalar():
    theta = [0.4, 0.2]
    a = solve_blp(ma_acvf(theta, 1.0, 30), 25, 4).coeffs
    b = solve_blp(vma_acvf([[[c]] for c in theta], [[1.0]], 30), 25, 4).coeffs
    assert np.max(np.abs(a - b.reshape(a.shape))) <= 1e-12


def test_block_residual_m2():
    Theta = [np.array([[0.4, 0.2], [0.0, 0.3]])]
    S = np.array([[1.0, 0.3], [0.3, 0.5]])
    N, h = 8, 3
    t = vma_acvf(Theta, S, N + h)
    A = solve_blp(t, N, h).as_blocks()
    for i in range(h):
        for r in range(N):
            # sum_k A_k Gamma(r - k) equals Gamma(r + i + 1)
            lhs = sum(A[i, k] @ t.lag(r - k) for k in range(N))
            assert np.allclose(lhs, t.lag(r + i + 1), atol=1e-10)


def test_compute_y_series_examples():
    assert compute_y_series(SeriesWindow([2.0, 3.0, 4.0]), UnivariateArmaSpec()).values.tolist() == [2, 3, 4]
    y = compute_y_series(SeriesWindow([2.0, 3.0, 4.0]), UnivariateArmaSpec([0.5]))
    assert y.values.tolist() == [2.0, 2.5]
    y = compute_y_series(SeriesWindow([1.0] * 4), UnivariateArmaSpec([0.5, -0.2]))
    assert y.values == pytest.approx([0.7, 0.7])
    with pytest.raises(DimensionError):
        compute_y_series(SeriesWindow([1.0]), UnivariateArmaSpec([0.5]))


def test_white_noise_forecast_is_zero(rng):
    w = SeriesWindow(rng.standard_normal(10))
    assert np.array_equal(forecast_mean(w, UnivariateArmaSpec(), 3).values, np.zeros(3))


def test_white_noise_forecast_is_mean(rng):
    w = SeriesWindow(rng.standard_normal(10))
    assert forecast_mean(w, UnivariateArmaSpec(mean=2.5), 2).values.tolist() == [2.5, 2.5]


def test_ar1_forecast():
    x = np.zeros(200)
    x[-1] = 2.0
    fc = forecast_mean(SeriesWindow(x), UnivariateArmaSpec([0.5]), 2).values
    assert fc == pytest.approx([1.0, 0.5], abs=1e-6)


def test_one_step_uses_observed_term(rng):
    spec = UnivariateArmaSpec([0.6], [0.3])
    x = rng.standard_normal(30)
    c = predictor_for(spec, 30, 1)
    y = compute_y_series(SeriesWindow(x), spec).values
    py = sum(c.coeffs[0, k - 1] * y[-k] for k in range(1, c.n_eff + 1))
    fc = forecast_mean(SeriesWindow(x), spec, 1).values[0]
    assert fc == pytest.approx(py + 0.6 * x[-1], abs=1e-12)


def test_forecast_mean_rejects_integrated():
    with pytest.raises(DimensionError):
        forecast_mean(SeriesWindow(np.arange(5.0)), ArimaSpec(UnivariateArmaSpec(), 1), 2)


def test_arima_d0_matches_arma(rng):
    arma = UnivariateArmaSpec([0.5, -0.3], [0.4], 1.0, 0.7)
    w = SeriesWindow(rng.standard_normal(40))
    a = forecast_mean(w, arma, 4).values
    b = forecast_mean_arima(w, ArimaSpec(arma, 0), 4).values
    assert np.array_equal(a, b)


def test_random_walk_forecast_is_last_value(rng):
    x = np.cumsum(rng.standard_normal(20))
    fc = forecast_mean_arima(SeriesWindow(x), ArimaSpec(UnivariateArmaSpec(), 1), 5).values
    assert np.allclose(fc, x[-1], atol=1e-12)


def test_double_integrated_noise_extrapolates_linearly(rng):
    x = np.cumsum(np.cumsum(rng.standard_normal(20)))
    fc = forecast_mean_arima(SeriesWindow(x), ArimaSpec(UnivariateArmaSpec(), 2), 4).values
    slope = x[-1] - x[-2]
    assert np.allclose(fc, x[-1] + np.arange(1, 5) * slope, atol=1e-9)


def test_window_too_short_for_arima():
    spec = ArimaSpec(UnivariateArmaSpec([0.5], [0.3]), 2)
    with pytest.raises(DimensionError):
        forecast_mean_arima(SeriesWindow(np.arange(4.0)), spec, 2)


def test_forecast_ignores_horizon_for_earlier_steps(rng):
    spec = grid_spec(2, 2, 1, 2)
    X = rng.standard_normal((3, 30, 2)).cumsum(axis=1)
    a = Forecaster(spec, 30, 4)(X)
    b = Forecaster(spec, 30, 2)(X)
    assert np.allclose(a[:, :2], b, atol=1e-12)


def test_batch_forecaster_matches_single_window(rng):
    spec = grid_spec(1, 2, 2, 1)
    X = rng.standard_normal((4, 25)).cumsum(axis=1)
    batch = Forecaster(spec, 25, 3)(X)
    for b in range(4):
        single = forecast_mean_arima(SeriesWindow(X[b]), spec, 3).values
        assert np.allclose(batch[b].reshape(-1), single, atol=1e-12)


@pytest.mark.parametrize("case", [c for c in GRID if c[0] + c[1] > 0 and c[2] == 0][:6], ids=grid_id)
def test_varma_m1_forecast_matches_scalar(case, rng):
    from conftest import grid_spec_as_varma
    p, q, d, _ = case
    spec = grid_spec(p, q, d, 1)
    v = grid_spec_as_varma(p, q, d)
    x = rng.standard_normal(30)
    a = forecast_mean(SeriesWindow(x), spec, 3).values
    b = forecast_mean(SeriesWindow(x[:, None]), v, 3).values[:, 0]
    assert np.max(np.abs(a - b)) <= 1e-12


def test_projection_orthogonality():
    # ARMA(1,1): Err(Y_{n+1}) = Err(X_{n+1}), Err(Y_{n+2}) = Err(X_{n+2}) - phi Err(X_{n+1})
    phi = 0.5
    spec = UnivariateArmaSpec([phi], [0.4], 1.0)
    n, paths = 30, 100_000
    ens = simulate_paths(spec, n, 2, paths, seed=2024, keep_paths=True)
    E = ens.errors
    ey = np.column_stack([E[:, 0], E[:, 1] - phi * E[:, 0]])
    X = ens.observed[:, :, 0]
    Y = X[:, 1:] - phi * X[:, :-1]
    for j in range(2):
        prod = ey[:, j:j + 1] * (Y - Y.mean(axis=0))
        z = prod.mean(axis=0) / (prod.std(axis=0, ddof=1) / np.sqrt(paths))
        assert np.max(np.abs(z)) <= 4.0
