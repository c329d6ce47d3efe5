"""Shared fixtures for the epspy test-suite."""

import math

import numpy as np
import pytest

from epspy.rng import RngStream


@pytest.fixture
def rng() -> RngStream:
    return RngStream(20240601)


@pytest.fixture
def make_rng():
    """Factory for independent seeded streams, keyed per call site."""

    def _make(*key: int) -> RngStream:
        return RngStream(987654321, key)

    return _make


@pytest.fixture
def within_se():
    """Assert a sample mean lies within ``k`` standard errors of ``expected``."""

    def _check(values, expected: float, k: float = 4.0) -> None:
        values = np.asarray(values, dtype=float)
        se = values.std(ddof=1) / math.sqrt(values.size)
        mean = values.mean()
        assert abs(mean - expected) <= k * se + 1e-12, (
            f"mean {mean:.6f} vs expected {expected:.6f} (se {se:.2e}, k={k})"
        )

    return _check
