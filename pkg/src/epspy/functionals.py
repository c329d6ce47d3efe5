"""Functionals of a realization and closed-form reference laws at alpha = 1/2.

Under the Pitman-Yor process with alpha = 1/2 and a uniform base measure on
[0, 1], F(1/2) ~ Beta(theta + 1/2, theta + 1/2) and F(1/3) has density

    f(w) = (2/sqrt(pi)) 9^theta Gamma(theta+1)/Gamma(theta+1/2)
           (w(1-w))^(theta-1/2) / (1+3w)^(theta+1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from scipy import integrate, optimize, stats
from scipy.special import gammaln

from .epsilon_py import EpsilonPYRealization, PosteriorRealization
from .errors import DomainError, ParameterError

Realization = EpsilonPYRealization | PosteriorRealization

QUAD_TOL = 1e-10


def cdf_eval(realization: Realization, x):
    """
    F_eps(x) = sum_{xi_i <= x} p_i + R_tau 1{xi_0 <= x}.

    Atoms are sorted once per realization and prefix sums cached, so grids of
    queries cost one binary search each.
    """
    locations, prefix = realization._sorted_cdf
    idx = np.searchsorted(locations, np.asarray(x, dtype=float), side="right")
    values = np.clip(prefix[idx], 0.0, 1.0)
    return float(values) if values.ndim == 0 else values


def mean_functional(realization: Realization) -> float:
    """mu_eps = sum_i p_i xi_i + R_tau xi_0."""
    locations, masses = realization.support()
    return float(np.dot(masses, locations))


def mittag_leffler_moment(p: float, alpha: float) -> float:
    """E(T_alpha^{-alpha p}) = Gamma(p+1)/Gamma(p alpha+1), for p > -1."""
    return float(np.exp(gammaln(p + 1.0) - gammaln(p * alpha + 1.0)))


@dataclass(frozen=True)
class ReferenceLaw:
    """Law of F(1/2) or F(1/3) under the Pitman-Yor process with alpha = 1/2."""

    kind: Literal["F_half_beta", "F_third_density"]
    theta: float
    _beta: object = field(default=None, repr=False, compare=False)

    def __post_init__(self) -> None:
        if not self.theta > -0.5:
            raise ParameterError(
                f"Reference laws need theta > -1/2 (alpha = 1/2), got theta = {self.theta}."
            )
        if self.kind == "F_half_beta":
            object.__setattr__(self, "_beta", stats.beta(self.theta + 0.5, self.theta + 0.5))
        elif self.kind != "F_third_density":
            raise ParameterError(f"Unknown reference law {self.kind!r}.")

    def pdf(self, w):
        if self.kind == "F_half_beta":
            return self._beta.pdf(w)
        w = np.asarray(w, dtype=float)
        out = np.zeros_like(w)
        inside = (w > 0) & (w < 1)
        out[inside] = np.exp(_log_third_density(self.theta, w[inside]))
        return float(out) if out.ndim == 0 else out

    def cdf(self, w):
        if self.kind == "F_half_beta":
            return self._beta.cdf(w)
        return _third_cdf(self.theta, w)

    def mean(self) -> float:
        if self.kind == "F_half_beta":
            return 0.5
        value, _ = integrate.quad(
            lambda u: math.sin(u) ** 2 * _third_integrand(self.theta, u),
            0.0, math.pi / 2, epsabs=QUAD_TOL, epsrel=QUAD_TOL, limit=200,
        )
        return value

    def quantile(self, p: float) -> float:
        if not 0.0 <= p <= 1.0:
            raise DomainError(f"Quantile level must lie in [0, 1], got {p}.")
        if self.kind == "F_half_beta":
            return float(self._beta.ppf(p))
        if p in (0.0, 1.0):
            return p
        return optimize.brentq(lambda w: _third_cdf(self.theta, w) - p, 0.0, 1.0, xtol=1e-12)


def ref_F_half(theta: float) -> ReferenceLaw:
    """Beta(theta + 1/2, theta + 1/2), the law of F(1/2)."""
    return ReferenceLaw("F_half_beta", theta)


def ref_F_third(theta: float) -> ReferenceLaw:
    """Law of F(1/3), with the CDF computed by quadrature."""
    return ReferenceLaw("F_third_density", theta)


def _log_third_norm(theta: float) -> float:
    return (
        math.log(2.0) - 0.5 * math.log(math.pi) + theta * math.log(9.0)
        + gammaln(theta + 1.0) - gammaln(theta + 0.5)
    )


def _log_third_density(theta: float, w):
    w = np.asarray(w, dtype=float)
    return (
        _log_third_norm(theta)
        + (theta - 0.5) * np.log(w * (1.0 - w))
        - (theta + 1.0) * np.log1p(3.0 * w)
    )


def ref_F_third_density(theta: float, w):
    """
    Density of F(1/3) at w in (0, 1).

    Raises:
        DomainError: If any w lies outside (0, 1).
    """
    if not theta > -0.5:
        raise ParameterError(f"Reference laws need theta > -1/2, got theta = {theta}.")
    arr = np.asarray(w, dtype=float)
    if np.any(arr <= 0) or np.any(arr >= 1):
        raise DomainError(f"The F(1/3) density is defined on (0, 1), got w = {w!r}.")
    out = np.exp(_log_third_density(theta, arr))
    return float(out) if out.ndim == 0 else out


def _third_integrand(theta: float, u: float) -> float:
    """Density after w = sin^2(u): 2 C (sin u cos u)^(2 theta) / (1 + 3 sin^2 u)^(theta+1)."""
    s, c = math.sin(u), math.cos(u)
    if s <= 0.0 or c <= 0.0:
        if theta > 0:
            return 0.0
        if theta == 0:
            return 2.0 * math.exp(_log_third_norm(theta)) / (1.0 + 3.0 * s * s)
        return math.inf
    return 2.0 * math.exp(
        _log_third_norm(theta) + 2.0 * theta * math.log(s * c) - (theta + 1.0) * math.log1p(3.0 * s * s)
    )


def _third_cdf(theta: float, w):
    """CDF of F(1/3), integrating consecutive segments of the sorted queries."""
    arr = np.asarray(w, dtype=float)
    flat = np.clip(arr.ravel(), 0.0, 1.0)
    order = np.argsort(flat)
    u_points = np.arcsin(np.sqrt(flat[order]))

    out = np.empty(flat.size)
    total, last = 0.0, 0.0
    for i, u in zip(order, u_points):
        if u > last:
            piece, _ = integrate.quad(
                lambda t: _third_integrand(theta, t),
                last, u, epsabs=QUAD_TOL, epsrel=QUAD_TOL, limit=200,
            )
            total += piece
            last = u
        out[i] = min(total, 1.0)
    out = out.reshape(arr.shape)
    return float(out) if out.ndim == 0 else out


def beta_reference_grid(theta: float, points: int = 2001) -> tuple[np.ndarray, np.ndarray]:
    """
    Grid on [0, 1] and the Beta(theta+1/2, theta+1/2) density on it.

    Points are sin^2 of a uniform grid on [0, pi/2], so they cluster where the
    density has square-root behavior at the endpoints.
    """
    grid = np.sin(np.linspace(0.0, math.pi / 2.0, points)) ** 2
    with np.errstate(divide="ignore"):
        density = ref_F_half(theta).pdf(grid)
    return grid, density
