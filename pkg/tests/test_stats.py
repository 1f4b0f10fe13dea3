"""
Tests for the stats module.
"""

import pytest
import numpy as np
from scipy import stats as scipy_stats

from utils.exceptions import DegenerateDistributionError
from utils.resources import magic
from utils.statevector import entanglement_entropy, random_state
from utils.stats import (BootstrapCI, EnsembleTask, LongTimeErrorMeasure, SampleStatistics, SHatMeasure,
                         bootstrap_ci, chunk_rng, ensemble_samples, estimate_s_hat, monte_carlo, sample_ensemble,
                         summarize, summary_row, tail_frequency, trend_statistics)
from utils.trotter import leading_error_pf1, pf1, s_e, true_error_long


def test_summary_matches_population_moments(rng):
    """Test mean, variance, skewness and kurtosis against scipy's biased estimators."""
    values = rng.gamma(2.0, size=500)
    summary = summarize(values)
    assert summary.n == 500
    assert summary.mean == pytest.approx(values.mean())
    assert summary.variance == pytest.approx(values.var())
    assert summary.skewness == pytest.approx(scipy_stats.skew(values))
    assert summary.kurtosis == pytest.approx(scipy_stats.kurtosis(values, fisher=False))
    assert summary.kurtosis_defined


def test_summary_edge_cases():
    """Test tiny and constant samples."""
    with pytest.raises(ValueError):
        summarize([1.0])
    small = summarize([1.0, 2.0, 3.0])
    assert not small.kurtosis_defined
    assert np.isnan(small.kurtosis)
    constant = summarize([2.0] * 10)
    assert constant.variance == 0.0
    assert not constant.kurtosis_defined


def test_statistics_dispatch(rng):
    """Test row-wise evaluation and unknown names."""
    values = rng.normal(size=(3, 50))
    np.testing.assert_allclose(SampleStatistics.evaluate(values, 'variance'), values.var(axis=1))
    with pytest.raises(ValueError):
        SampleStatistics.evaluate(values, 'median')


def test_quantiles_are_keyed_by_level(rng):
    """Test the quantile keys and the median."""
    values = rng.normal(size=101)
    quantiles = SampleStatistics.quantiles(values)
    assert set(quantiles) == {'q0.01', 'q0.05', 'q0.25', 'q0.5', 'q0.75', 'q0.95', 'q0.99'}
    assert quantiles['q0.5'] == pytest.approx(np.median(values))


def test_bootstrap_interval_is_reproducible_and_ordered(rng):
    """Test that equal seeds give equal intervals around the point estimate."""
    values = rng.normal(size=400)
    first = bootstrap_ci(values, 'variance', 500, rng=np.random.default_rng(1))
    second = bootstrap_ci(values, 'variance', 500, rng=np.random.default_rng(1))
    assert first == second
    assert first.lower < first.upper
    assert first.point == pytest.approx(values.var())
    assert first.to_dict()['resamples'] == 500


def test_bootstrap_mean_interval_coverage():
    """Test that 95% intervals for a Gaussian mean cover the true mean in 90-99% of repetitions."""
    data_rng = np.random.default_rng(3)
    resample_rng = np.random.default_rng(4)
    hits = 0
    for _ in range(500):
        values = data_rng.normal(loc=1.5, scale=2.0, size=1000)
        hits += bootstrap_ci(values, 'mean', 400, level=0.95, rng=resample_rng).covers(1.5)
    assert 0.90 <= hits / 500 <= 0.99


def test_bootstrap_preconditions(rng):
    """Test sample size, resample count, statistic and level checks."""
    values = rng.normal(size=50)
    with pytest.raises(ValueError):
        bootstrap_ci(values, 'variance', 99)
    with pytest.raises(ValueError):
        bootstrap_ci(values[:9], 'variance', 100)
    with pytest.raises(ValueError):
        bootstrap_ci(values, 'median', 100)
    with pytest.raises(ValueError):
        bootstrap_ci(values, 'mean', 100, level=1.0)
    with pytest.raises(DegenerateDistributionError):
        bootstrap_ci(np.ones(20), 'kurtosis', 100)


def test_bootstrap_warns_when_point_is_excluded(mocker):
    """Test the warning path for an interval that misses the point estimate."""
    warning = mocker.patch('utils.stats.logger.warning')
    mocker.patch('utils.stats.BootstrapCI.contains_point', new_callable=mocker.PropertyMock, return_value=False)
    bootstrap_ci(np.arange(20.0), 'mean', 100, rng=np.random.default_rng(0))
    warning.assert_called_once()


def test_interval_helpers():
    """Test covers and contains_point."""
    interval = BootstrapCI('variance', 1.0, 0.5, 1.5)
    assert interval.contains_point
    assert interval.covers(1.4)
    assert not interval.covers(2.0)


def test_sample_ensemble_validation(rng):
    """Test that bad arguments fail before any draw."""
    psi = random_state(2, rng)
    with pytest.raises(ValueError):
        sample_ensemble(psi, 'XX', 5, rng)
    with pytest.raises(ValueError):
        sample_ensemble(psi, 'LU', 0, rng)


@pytest.mark.parametrize("kind", ["LU", "LC"])
def test_local_ensembles_preserve_entanglement(kind, rng):
    """Test that LU and LC draws keep every marginal entropy."""
    psi = random_state(4, rng)
    for state in sample_ensemble(psi, kind, 5, rng):
        assert entanglement_entropy(state, [0, 1]) == pytest.approx(entanglement_entropy(psi, [0, 1]), abs=1e-9)


def test_global_cliffords_preserve_magic(rng):
    """Test that GC draws keep the stabilizer entropy."""
    psi = random_state(3, rng)
    for state in sample_ensemble(psi, 'GC', 5, rng):
        assert magic(state) == pytest.approx(magic(psi), abs=1e-10)


def test_s_hat_estimates_s_e(qimf3, rng):
    """Test that the rescaled one-step error approaches s_E at small dt."""
    psi = random_state(3, rng)
    expected = s_e(psi, leading_error_pf1(qimf3))
    assert estimate_s_hat(psi, qimf3, pf1(), 1e-3) == pytest.approx(expected, rel=5e-2)
    assert SHatMeasure(qimf3, pf1(), 1e-3)(psi) == estimate_s_hat(psi, qimf3, pf1(), 1e-3)
    with pytest.raises(ValueError):
        estimate_s_hat(psi, qimf3, pf1(), 0.0)


def test_s_hat_follows_the_convention(qimf3, rng):
    """Test that the full convention rescales the estimate onto s_E of the doubled operator."""
    psi = random_state(3, rng)
    half = estimate_s_hat(psi, qimf3, pf1(), 1e-3)
    full = estimate_s_hat(psi, qimf3, pf1(), 1e-3, "full")
    assert full == pytest.approx(4.0 * half)
    assert full == pytest.approx(s_e(psi, leading_error_pf1(qimf3, "full")), rel=5e-2)
    assert SHatMeasure(qimf3, pf1(), 1e-3, "full")(psi) == full
    with pytest.raises(ValueError):
        estimate_s_hat(psi, qimf3, pf1(), 1e-3, "quarter")


def test_long_time_measure(qimf3, rng):
    """Test the long-time error callable."""
    psi = random_state(3, rng)
    measure = LongTimeErrorMeasure(qimf3, pf1(), 0.05, 4)
    assert measure(psi) == true_error_long(psi, qimf3, pf1(), 0.05, 4)


def test_chunk_streams_are_independent():
    """Test that different streams and chunks give different draws."""
    base = chunk_rng(7, 0, 0).random(4)
    np.testing.assert_array_equal(base, chunk_rng(7, 0, 0).random(4))
    assert not np.array_equal(base, chunk_rng(7, 1, 0).random(4))
    assert not np.array_equal(base, chunk_rng(7, 0, 1).random(4))


def test_monte_carlo_is_independent_of_workers(qimf3, rng):
    """Test that process fan-out reproduces the serial samples."""
    task = EnsembleTask(random_state(3, rng), 'LU', SHatMeasure(qimf3, pf1(), 0.01))
    serial = monte_carlo(task, 20, seed=11, stream=2, workers=1, chunk_size=6)
    parallel = monte_carlo(task, 20, seed=11, stream=2, workers=2, chunk_size=6)
    assert serial.shape == (20,)
    np.testing.assert_array_equal(serial, parallel)


def test_monte_carlo_validation():
    """Test sample and chunk size checks."""
    with pytest.raises(ValueError):
        monte_carlo(lambda rng, count: np.zeros(count), 0, seed=1)
    with pytest.raises(ValueError):
        monte_carlo(lambda rng, count: np.zeros(count), 5, seed=1, chunk_size=0)


def test_ensemble_samples_seeded(qimf3, rng):
    """Test that equal seeds and streams give equal samples."""
    psi = random_state(3, rng)
    measure = SHatMeasure(qimf3, pf1(), 0.01)
    first = ensemble_samples(psi, 'LC', measure, 12, seed=5, stream=1)
    second = ensemble_samples(psi, 'LC', measure, 12, seed=5, stream=1)
    np.testing.assert_array_equal(first, second)
    assert not np.array_equal(first, ensemble_samples(psi, 'LC', measure, 12, seed=5, stream=2))


def test_trend_statistics():
    """Test rank correlation and slope on a monotone series."""
    trend = trend_statistics([0.0, 1.0, 2.0, 3.0], [1.0, 3.0, 5.0, 7.0])
    assert trend['spearman_rho'] == pytest.approx(1.0)
    assert trend['slope'] == pytest.approx(2.0)
    assert trend['intercept'] == pytest.approx(1.0)
    with pytest.raises(ValueError):
        trend_statistics([0.0, 1.0], [1.0, 2.0])


def test_tail_frequency():
    """Test the standardized tail fraction."""
    values = np.array([0.0] * 99 + [100.0])
    assert tail_frequency(values, 3.0) == pytest.approx(0.01)
    with pytest.raises(DegenerateDistributionError):
        tail_frequency(np.ones(5), 1.0)


def test_summary_row_prefix(rng):
    """Test the flattened CSV record."""
    row = summary_row(rng.normal(size=30), prefix="lc_")
    assert 'lc_variance' in row
    assert 'lc_q0.99' in row
