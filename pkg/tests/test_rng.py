import math

import numpy as np
import pytest
from scipy import stats as sps

from epspy import rng as rng_core
from epspy.errors import ParameterError
from epspy.rng import RngStream


@pytest.mark.parametrize("seed", [-1, 2**64, True, 1.5, "7"])
def test_invalid_seed_rejected(seed):
    with pytest.raises(ParameterError):
        RngStream(seed)


def test_seed_range_endpoints_accepted():
    RngStream(0)
    RngStream(2**64 - 1)


def test_same_seed_same_stream():
    a = rng_core.uniform(RngStream(11), 100)
    b = rng_core.uniform(RngStream(11), 100)
    np.testing.assert_array_equal(a, b)


def test_children_are_distinct_and_reproducible():
    parent = RngStream(11)
    first, second = parent.spawn(2)
    assert first.key == (0,) and second.key == (1,)
    x = rng_core.uniform(first, 50)
    y = rng_core.uniform(second, 50)
    assert not np.array_equal(x, y)
    np.testing.assert_array_equal(x, rng_core.uniform(parent.child(0), 50))


def test_uniform_open_interval(rng):
    u = rng_core.uniform(rng, 100_000)
    assert u.min() > 0.0
    assert u.max() < 1.0
    assert isinstance(rng_core.uniform(rng), float)


def test_exponential_mean(rng, within_se):
    within_se(rng_core.exponential(rng, 20_000), 1.0)


@pytest.mark.parametrize("shape", [0.05, 0.3, 1.0, 2.5, 40.0])
def test_gamma_mean(make_rng, within_se, shape):
    draws = rng_core.gamma(shape, make_rng(int(shape * 100)), 20_000)
    assert np.all(draws >= 0)
    within_se(draws, shape)


@pytest.mark.parametrize("shape", [0.3, 1.0, 2.5, 40.0])
def test_gamma_variance(make_rng, within_se, shape):
    draws = rng_core.gamma(shape, make_rng(7, int(shape * 100)), 50_000)
    within_se((draws - shape) ** 2, shape)


def test_unit_gamma_is_exponential(make_rng):
    draws = rng_core.gamma(1.0, make_rng(8), 10_000)
    assert sps.kstest(draws, "expon").pvalue > 1e-3


def test_flat_beta_is_uniform(make_rng):
    draws = rng_core.beta(1.0, 1.0, make_rng(9), 10_000)
    assert sps.kstest(draws, "uniform").pvalue > 1e-3


def test_log_gamma_tiny_shape_stays_finite(rng):
    logs = rng_core.log_gamma(1e-4, rng, 10_000)
    assert np.all(np.isfinite(logs))


def test_log_gamma_scalar_returns_float(rng):
    assert isinstance(rng_core.log_gamma(2.0, rng), float)


@pytest.mark.parametrize("shape", [0.0, -1.0, np.inf])
def test_gamma_rejects_bad_shape(rng, shape):
    with pytest.raises(ParameterError):
        rng_core.gamma(shape, rng)


@pytest.mark.parametrize("a,b", [(0.5, 10.0), (1.0, 1.0), (0.05, 2.0), (0.9, 1000.0)])
def test_beta_mean(make_rng, within_se, a, b):
    draws = rng_core.beta(a, b, make_rng(1), 20_000)
    assert np.all((draws > 0) & (draws < 1))
    within_se(draws, a / (a + b))


def test_log_beta_pair_complements(rng):
    log_v, log_w = rng_core.log_beta_pair(0.5, np.arange(1, 1001) * 0.5 + 1.0, rng)
    assert log_v.shape == (1000,)
    np.testing.assert_allclose(np.exp(log_v) + np.exp(log_w), 1.0, atol=1e-12)


def test_log_beta_pair_small_a_has_no_infinities(rng):
    log_v, log_w = rng_core.log_beta_pair(1e-4, 5.0, rng, 10_000)
    assert np.all(np.isfinite(log_v))
    assert np.all(np.isfinite(log_w))


def test_dirichlet_on_simplex(make_rng):
    conc = np.array([2.5, 0.5, 1.0])
    draws = np.array([rng_core.dirichlet(conc, make_rng(3, i)) for i in range(4000)])
    np.testing.assert_allclose(draws.sum(axis=1), 1.0, atol=1e-12)
    assert np.all(draws >= 0)
    # Each mean within 4 standard errors of conc / sum(conc)
    expected = conc / conc.sum()
    se = draws.std(axis=0, ddof=1) / math.sqrt(draws.shape[0])
    assert np.all(np.abs(draws.mean(axis=0) - expected) <= 4 * se)


def test_normal_moments(rng, within_se):
    z = rng_core.normal(rng, 20_000)
    within_se(z, 0.0)
    within_se(z**2, 1.0)
