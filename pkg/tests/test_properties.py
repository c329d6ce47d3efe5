"""Invariants checked over randomly drawn (alpha, theta, epsilon)."""

import math

import numpy as np
import pytest

from epspy.epsilon_py import PYParams, UniformBase, sample_approx, sample_exact
from epspy.functionals import cdf_eval, mean_functional

BASE = UniformBase()
GRID = np.linspace(0.0, 1.0, 101)


def _random_params(g: np.random.Generator) -> PYParams:
    alpha = 0.0 if g.uniform() < 0.2 else g.uniform(0.0, 0.7)
    theta = -alpha + (20.0 + alpha) * g.uniform(1e-3, 1.0)
    epsilon = math.exp(g.uniform(math.log(0.01), math.log(0.5)))
    return PYParams(alpha, theta, epsilon)


def test_exact_sampler_invariants(make_rng):
    rng = make_rng(101)
    g = make_rng(102).generator
    for _ in range(1000):
        params = _random_params(g)
        real = sample_exact(params, BASE, rng)

        assert real.tau >= 1
        assert abs(real.weights.sum() + real.remainder - 1.0) < 1e-12
        # tau is the first index whose remainder drops below epsilon
        log_eps = math.log(params.epsilon)
        assert real.log_remainders[-1] < log_eps
        assert np.all(real.log_remainders[:-1] >= log_eps)

        values = cdf_eval(real, GRID)
        assert np.all(np.diff(values) >= 0)
        assert values[-1] == pytest.approx(1.0, abs=1e-12)
        assert 0.0 <= mean_functional(real) <= 1.0


def test_approx_sampler_invariants(make_rng):
    rng = make_rng(103)
    g = make_rng(104).generator
    for _ in range(300):
        params = _random_params(g)
        if params.alpha == 0.0:
            continue
        real = sample_approx(params, BASE, rng)
        assert real.tau >= 1
        assert not real.exact
        assert abs(real.weights.sum() + real.remainder - 1.0) < 1e-12
        assert np.all(np.diff(cdf_eval(real, GRID)) >= 0)
