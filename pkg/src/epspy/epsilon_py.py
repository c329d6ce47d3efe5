"""Samplers for the epsilon-truncated Pitman-Yor process.

An epsilon-PY draw is the stick-breaking series

    P_eps = sum_{i <= tau} p_i delta_{xi_i} + R_tau delta_{xi_0},

truncated at tau(eps) = min{n >= 1 : R_n < eps}, where
p_i = V_i prod_{j<i} (1 - V_j), V_j ~ Beta(1 - alpha, theta + j alpha) and
R_n = prod_{j<=n} (1 - V_j).

``sample_exact`` runs the stopping rule; ``sample_approx`` draws tau from
its asymptotic law 1 + floor((eps T/alpha)^{-alpha/(1-alpha)}), T ~ T_{alpha,theta},
and then breaks exactly that many sticks.
"""

from __future__ import annotations

import math
import warnings
from collections.abc import Sequence
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Protocol

import numpy as np

from . import rng as rng_core
from .config import REFERENCE_MAX_STICKS, REFERENCE_TOLERANCE, STICK_CAP
from .errors import NumericalFailure, ParameterError
from .rng import RngStream
from .tilted_stable import StableParams, sample_tilted_stable

# First block of sticks drawn by the stopping-rule loop; doubles up to MAX_BLOCK
FIRST_BLOCK = 32
MAX_BLOCK = 8192


@dataclass(frozen=True)
class PYParams:
    """Discount ``alpha``, concentration ``theta`` and truncation level ``epsilon``."""

    alpha: float
    theta: float
    epsilon: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.alpha < 1.0:
            raise ParameterError(f"Discount alpha must satisfy 0 <= alpha < 1, got {self.alpha}.")
        if not self.theta > -self.alpha:
            raise ParameterError(
                f"Concentration theta must satisfy theta > -alpha = {-self.alpha}, got {self.theta}."
            )
        if not 0.0 < self.epsilon < 1.0:
            raise ParameterError(
                f"Truncation level epsilon must satisfy 0 < epsilon < 1, got {self.epsilon}."
            )

    @property
    def is_dirichlet(self) -> bool:
        return self.alpha == 0.0

    def stable(self) -> StableParams:
        return StableParams(self.alpha, self.theta)

    def with_theta(self, theta: float) -> PYParams:
        return replace(self, theta=theta)


class BaseMeasure(Protocol):
    """Atom-generating distribution P0."""

    def sample(self, rng: RngStream, size: int) -> np.ndarray: ...


@dataclass(frozen=True)
class UniformBase:
    """Uniform P0 on [low, high]."""

    low: float = 0.0
    high: float = 1.0

    def sample(self, rng: RngStream, size: int) -> np.ndarray:
        return self.low + (self.high - self.low) * rng_core.uniform(rng, size)


@dataclass(frozen=True, eq=False)
class EpsilonPYRealization:
    """
    One draw of the epsilon-PY process.

    ``weights[i]`` sits on ``atoms[i]``; the remainder R_tau sits on
    ``extra_atom``. ``exact`` records whether the stopping rule was run.
    """

    weights: np.ndarray
    remainder: float
    atoms: np.ndarray
    extra_atom: float
    exact: bool
    log_remainders: np.ndarray = field(repr=False)

    @property
    def tau(self) -> int:
        return int(self.weights.size)

    def support(self) -> tuple[np.ndarray, np.ndarray]:
        """All (locations, masses), the remainder atom last."""
        return (
            np.append(self.atoms, self.extra_atom),
            np.append(self.weights, self.remainder),
        )

    @cached_property
    def _sorted_cdf(self) -> tuple[np.ndarray, np.ndarray]:
        locations, masses = self.support()
        order = np.argsort(locations, kind="stable")
        return locations[order], np.concatenate([[0.0], np.cumsum(masses[order])])

    def with_extra_atom(self, atom: float) -> EpsilonPYRealization:
        """Same weights with the remainder moved to ``atom``."""
        return replace(self, extra_atom=float(atom))


@dataclass(frozen=True, eq=False)
class ClusterSummary:
    """Unique latent values X*_1..X*_k and their positive counts."""

    unique_values: np.ndarray
    counts: np.ndarray

    def __post_init__(self) -> None:
        values = np.asarray(self.unique_values, dtype=float).ravel()
        counts = np.asarray(self.counts).ravel()
        if values.size != counts.size:
            raise ParameterError(
                f"Got {values.size} unique values but {counts.size} counts."
            )
        if counts.size and (np.any(counts <= 0) or np.any(counts != np.round(counts))):
            raise ParameterError(f"Cluster counts must be positive integers, got {counts!r}")
        object.__setattr__(self, "unique_values", values)
        object.__setattr__(self, "counts", counts.astype(int))

    @property
    def k(self) -> int:
        return int(self.counts.size)

    @property
    def n(self) -> int:
        return int(self.counts.sum())

    @classmethod
    def from_sample(cls, latent: Sequence[float]) -> ClusterSummary:
        values, counts = np.unique(np.asarray(latent, dtype=float), return_counts=True)
        return cls(values, counts)


@dataclass(frozen=True, eq=False)
class PosteriorRealization:
    """sum_j q_j delta_{X*_j} + q_{k+1} P*_eps."""

    fixed_atoms: np.ndarray
    fixed_weights: np.ndarray
    scale: float
    inner: EpsilonPYRealization

    @property
    def tau(self) -> int:
        return self.inner.tau

    def support(self) -> tuple[np.ndarray, np.ndarray]:
        locations, masses = self.inner.support()
        return (
            np.concatenate([self.fixed_atoms, locations]),
            np.concatenate([self.fixed_weights, self.scale * masses]),
        )

    @cached_property
    def _sorted_cdf(self) -> tuple[np.ndarray, np.ndarray]:
        locations, masses = self.support()
        order = np.argsort(locations, kind="stable")
        return locations[order], np.concatenate([[0.0], np.cumsum(masses[order])])


def _realization(
    log_v: np.ndarray,
    log_w: np.ndarray,
    base: BaseMeasure,
    rng: RngStream,
    exact: bool,
) -> EpsilonPYRealization:
    """Assemble weights from stick logs and draw tau + 1 atoms (xi_0 first)."""
    log_r = np.cumsum(log_w)
    log_prev = np.concatenate([[0.0], log_r[:-1]])
    weights = np.exp(log_v + log_prev)
    atoms = np.asarray(base.sample(rng, weights.size + 1), dtype=float)
    return EpsilonPYRealization(
        weights=weights,
        remainder=float(np.exp(log_r[-1])),
        atoms=atoms[1:],
        extra_atom=float(atoms[0]),
        exact=exact,
        log_remainders=log_r,
    )


def _break_until(
    params: PYParams,
    rng: RngStream,
    max_sticks: int = STICK_CAP,
    strict: bool = True,
):
    """
    Break sticks until R < epsilon; return (log V, log(1-V)) up to tau.

    With ``strict=False`` hitting ``max_sticks`` returns the sticks drawn so
    far instead of raising.
    """
    a, th = params.alpha, params.theta
    log_eps = math.log(params.epsilon)
    log_r = 0.0
    vs: list[np.ndarray] = []
    ws: list[np.ndarray] = []
    start, block = 1, FIRST_BLOCK

    while start <= max_sticks:
        size = min(block, max_sticks - start + 1)
        j = np.arange(start, start + size)
        log_v, log_w = rng_core.log_beta_pair(1.0 - a, th + j * a, rng, size)
        path = log_r + np.cumsum(log_w)
        # Continue while R >= eps; stop at the first R < eps
        hit = np.flatnonzero(path < log_eps)
        if hit.size:
            stop = hit[0] + 1
            vs.append(log_v[:stop])
            ws.append(log_w[:stop])
            return np.concatenate(vs), np.concatenate(ws)
        vs.append(log_v)
        ws.append(log_w)
        log_r = float(path[-1])
        start += size
        block = min(2 * block, MAX_BLOCK)

    if not strict:
        return np.concatenate(vs), np.concatenate(ws)
    raise NumericalFailure(
        f"Stopping rule did not trigger within {max_sticks} sticks "
        f"(alpha={a}, theta={th}, epsilon={params.epsilon})."
    )


def sample_exact(params: PYParams, base: BaseMeasure, rng: RngStream) -> EpsilonPYRealization:
    """
    Exact epsilon-PY sampler (stopping rule).

    Draws V_i ~ Beta(1-alpha, theta+i alpha) while R >= epsilon, accumulating
    log R so tiny epsilon never underflows, then draws tau + 1 atoms.

    Returns:
        Realization with remainder < epsilon and, for tau >= 2,
        R_{tau-1} >= epsilon.
    """
    if params.is_dirichlet:
        return sample_dirichlet_exact(params, base, rng)
    log_v, log_w = _break_until(params, rng)
    return _realization(log_v, log_w, base, rng, exact=True)


def sample_dirichlet_exact(params: PYParams, base: BaseMeasure, rng: RngStream) -> EpsilonPYRealization:
    """
    Exact epsilon-DP sampler: sticks V_i ~ Beta(1, theta).

    tau - 1 is Poisson(theta log(1/epsilon)) in law.
    """
    if not params.is_dirichlet:
        raise ParameterError(f"Dirichlet sampler needs alpha = 0, got alpha = {params.alpha}.")
    if params.theta <= 0:
        raise ParameterError(f"Dirichlet process needs theta > 0, got theta = {params.theta}.")
    log_v, log_w = _break_until(params, rng)
    return _realization(log_v, log_w, base, rng, exact=True)


def sample_tau_exact(params: PYParams, rng: RngStream) -> int:
    """tau(epsilon) from the stopping rule, without drawing atoms."""
    _, log_w = _break_until(params, rng)
    return int(log_w.size)


def tau_from_stable(t, params: PYParams, max_sticks: int = STICK_CAP):
    """
    tau = 1 + floor((epsilon T / alpha)^{-alpha/(1-alpha)}).

    Raises:
        NumericalFailure: If the implied tau exceeds ``max_sticks``.
    """
    a = params.alpha
    t = np.asarray(t, dtype=float)
    log_power = -(a / (1.0 - a)) * (np.log(params.epsilon) + np.log(t) - math.log(a))
    if np.any(log_power > math.log(max_sticks)):
        raise NumericalFailure(
            f"Asymptotic tau exceeds the stick cap {max_sticks} "
            f"(alpha={a}, theta={params.theta}, epsilon={params.epsilon})."
        )
    # Floor the direct power; exp(log_power) can land just below an integer
    power = (params.epsilon * t / a) ** (-a / (1.0 - a))
    tau = 1 + np.floor(power).astype(np.int64)
    return int(tau) if tau.ndim == 0 else tau


def sample_tau_asymptotic(params: PYParams, rng: RngStream, size=None):
    """
    Draw tau from its asymptotic law (steps 1-2 of the approximate sampler).

    Returns:
        Integer(s) >= 1.
    """
    if params.is_dirichlet:
        raise ParameterError("The asymptotic law of tau needs alpha > 0.")
    t = sample_tilted_stable(params.stable(), rng, size)
    return tau_from_stable(t, params)


def sample_approx(
    params: PYParams,
    base: BaseMeasure,
    rng: RngStream,
    t_value: float | None = None,
) -> EpsilonPYRealization:
    """
    Approximate epsilon-PY sampler.

    Draws T ~ T_{alpha,theta} (or uses ``t_value``), sets tau from the
    asymptotic law, then breaks tau sticks unconditionally into preallocated
    buffers. The remainder is not guaranteed to be below epsilon.
    """
    if params.is_dirichlet:
        warnings.warn(
            "alpha = 0: the asymptotic law of tau degenerates; "
            "using the exact Dirichlet sampler instead.",
            stacklevel=2,
        )
        return sample_dirichlet_exact(params, base, rng)

    if t_value is None:
        t_value = sample_tilted_stable(params.stable(), rng)
    tau = tau_from_stable(t_value, params)
    j = np.arange(1, tau + 1)
    log_v, log_w = rng_core.log_beta_pair(1.0 - params.alpha, params.theta + j * params.alpha, rng, tau)
    return _realization(log_v, log_w, base, rng, exact=False)


def posterior_sample(
    params: PYParams,
    clusters: ClusterSummary,
    base: BaseMeasure,
    rng: RngStream,
    method: str = "exact",
) -> PosteriorRealization:
    """
    Conditional draw of P given latent values summarized by ``clusters``.

    (q_1..q_k, q_{k+1}) ~ Dirichlet(n*_1 - alpha, .., n*_k - alpha, theta + alpha k)
    and P*_eps is an epsilon-PY with parameters (alpha, theta + alpha k),
    drawn with ``method`` "exact" or "approx".

    Raises:
        ParameterError: If ``method`` is unknown. Counts are positive integers
            (checked by ClusterSummary), so every n*_j - alpha is positive.
    """
    samplers = {"exact": sample_exact, "approx": sample_approx}
    if method not in samplers:
        raise ParameterError(f"Unknown method {method!r}; use 'exact' or 'approx'.")

    k = clusters.k
    inner_params = params.with_theta(params.theta + params.alpha * k)
    if k == 0:
        q = np.array([1.0])
    else:
        q = rng_core.dirichlet(np.append(clusters.counts - params.alpha, inner_params.theta), rng)
    inner = samplers[method](inner_params, base, rng)
    return PosteriorRealization(
        fixed_atoms=clusters.unique_values.copy(),
        fixed_weights=q[:-1],
        scale=float(q[-1]),
        inner=inner,
    )


def sample_reference(
    alpha: float,
    theta: float,
    base: BaseMeasure,
    rng: RngStream,
    tolerance: float = REFERENCE_TOLERANCE,
    max_sticks: int = REFERENCE_MAX_STICKS,
) -> EpsilonPYRealization:
    """
    High deterministic truncation of the full Pitman-Yor process.

    Breaks sticks until R_n < tolerance or n = max_sticks, whichever comes
    first, leaving R_n on a fresh atom. Used as the Pitman-Yor reference
    sample for functionals without a closed-form law.
    """
    log_v, log_w = _break_until(PYParams(alpha, theta, tolerance), rng, max_sticks, strict=False)
    return _realization(log_v, log_w, base, rng, exact=False)


def renewal_epochs(realization: EpsilonPYRealization) -> np.ndarray:
    """T_n = -log R_n for n = 1..tau."""
    return -realization.log_remainders


def renewal_count(realization: EpsilonPYRealization, t: float) -> int:
    """N(t) = max{n : T_n <= t} over the epochs available in ``realization``."""
    return int(np.searchsorted(renewal_epochs(realization), t, side="right"))
