"""Seedable random variate primitives.

Every sampler in the package draws through an ``RngStream``: a PCG64
``numpy.random.Generator`` tied to a 64-bit seed and a spawn key, so
replications can be given independent sub-streams without coordination.

Gamma variates use the Marsaglia-Tsang squeeze for shape >= 1 and the
uniform-power boost ``G_a = G_{a+1} U^{1/a}`` for shape < 1. The boost is
carried out in log space, which keeps Beta(1 - alpha, .) sticks away from 0
and 1 even when alpha is close to 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .config import REJECTION_CAP, SEED_LIMIT
from .errors import NumericalFailure, ParameterError

_OPEN_SCALE = 2.0**-53


@dataclass
class RngStream:
    """A single-owner random stream derived from ``seed`` and ``key``."""

    seed: int
    key: tuple[int, ...] = ()
    generator: np.random.Generator = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if isinstance(self.seed, bool) or not isinstance(self.seed, (int, np.integer)):
            raise ParameterError(f"Seed must be an integer, got {self.seed!r}")
        if not 0 <= int(self.seed) < SEED_LIMIT:
            raise ParameterError(
                f"Seed {self.seed} is outside the 64-bit unsigned range [0, 2^64)."
            )
        self.seed = int(self.seed)
        self.key = tuple(int(k) for k in self.key)
        sequence = np.random.SeedSequence(self.seed, spawn_key=self.key)
        self.generator = np.random.Generator(np.random.PCG64(sequence))

    def child(self, *key: int) -> RngStream:
        """Deterministically derive the sub-stream named by ``key``."""
        return RngStream(self.seed, self.key + tuple(key))

    def spawn(self, n: int) -> list[RngStream]:
        """Return ``n`` independent sub-streams (children 0..n-1)."""
        return [self.child(i) for i in range(n)]


def uniform(rng: RngStream, size=None):
    """Uniform variate(s) on the open interval (0, 1)."""
    k = rng.generator.integers(0, 2**53, size=size)
    return (k + 0.5) * _OPEN_SCALE


def exponential(rng: RngStream, size=None):
    """Unit-rate exponential variate(s)."""
    return -np.log(uniform(rng, size))


def normal(rng: RngStream, size=None):
    """Standard normal variate(s)."""
    return rng.generator.standard_normal(size)


def _check_positive(name: str, value) -> np.ndarray:
    arr = np.asarray(value, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0):
        raise ParameterError(f"{name} must be positive and finite, got {value!r}")
    return arr


def _log_marsaglia_tsang(shape: np.ndarray, rng: RngStream) -> np.ndarray:
    """log G for every entry of ``shape`` (all entries >= 1)."""
    d = shape - 1.0 / 3.0
    c = 1.0 / np.sqrt(9.0 * d)
    out = np.empty_like(d)
    pending = np.arange(d.size)

    for _ in range(REJECTION_CAP):
        if pending.size == 0:
            return out
        x = normal(rng, pending.size)
        u = uniform(rng, pending.size)
        t = 1.0 + c[pending] * x
        ok = t > 0
        v = np.where(ok, t, 1.0) ** 3
        log_v = np.log(v)
        dp = d[pending]
        squeeze = u < 1.0 - 0.0331 * x**4
        accept = ok & (squeeze | (np.log(u) < 0.5 * x**2 + dp * (1.0 - v + log_v)))
        out[pending[accept]] = np.log(dp[accept]) + log_v[accept]
        pending = pending[~accept]

    raise NumericalFailure(
        f"Gamma rejection loop exceeded {REJECTION_CAP} rounds "
        f"with {pending.size} draws still pending."
    )


def log_gamma(shape, rng: RngStream, size=None):
    """
    Logarithm of unit-rate gamma variate(s).

    Args:
        shape: Positive shape (scalar or array, broadcast against ``size``).
        rng: Stream to draw from.
        size: Output shape; defaults to the shape of ``shape``.

    Returns:
        log G_shape, as a float for scalar requests and an array otherwise.

    Raises:
        ParameterError: If any shape is nonpositive.
    """
    a = _check_positive("Gamma shape", shape)
    out_shape = np.shape(a) if size is None else size
    a = np.broadcast_to(a, out_shape).ravel()

    small = a < 1.0
    logs = _log_marsaglia_tsang(np.where(small, a + 1.0, a), rng)
    if np.any(small):
        # G_a = G_{a+1} * U^{1/a}
        logs[small] += np.log(uniform(rng, int(small.sum()))) / a[small]

    logs = logs.reshape(out_shape)
    return float(logs) if logs.ndim == 0 else logs


def gamma(shape, rng: RngStream, size=None):
    """Unit-rate gamma variate(s) with the given shape."""
    return np.exp(log_gamma(shape, rng, size))


def log_beta_pair(a, b, rng: RngStream, size=None):
    """
    Draw V ~ Beta(a, b) and return (log V, log(1 - V)).

    V is formed as G_a / (G_a + G_b) from two independent gammas, entirely in
    log space, so neither log is ever -inf.
    """
    a = _check_positive("Beta parameter a", a)
    b = _check_positive("Beta parameter b", b)
    if size is None:
        size = np.broadcast_shapes(np.shape(a), np.shape(b))
    log_ga = np.asarray(log_gamma(a, rng, size))
    log_gb = np.asarray(log_gamma(b, rng, size))
    log_total = np.logaddexp(log_ga, log_gb)
    log_v = log_ga - log_total
    log_w = log_gb - log_total
    if log_v.ndim == 0:
        return float(log_v), float(log_w)
    return log_v, log_w


def beta(a, b, rng: RngStream, size=None):
    """Beta(a, b) variate(s), strictly inside (0, 1)."""
    log_v, _ = log_beta_pair(a, b, rng, size)
    v = np.clip(np.exp(log_v), np.finfo(float).tiny, 1.0 - np.finfo(float).epsneg)
    return float(v) if np.ndim(v) == 0 else v


def dirichlet(concentrations, rng: RngStream) -> np.ndarray:
    """Dirichlet vector from normalized gammas."""
    logs = np.asarray(log_gamma(np.asarray(concentrations, dtype=float), rng))
    logs = np.atleast_1d(logs)
    weights = np.exp(logs - np.logaddexp.reduce(logs))
    return weights / weights.sum()
