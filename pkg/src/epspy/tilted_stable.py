"""Positive stable and polynomially tilted positive stable variates.

T_alpha is the positive stable variable with E exp(-s T_alpha) = exp(-s^alpha).
T_{alpha,theta} has density proportional to t^{-theta} f_alpha(t). Both are
generated through Zolotarev's integral representation

    T_{alpha,theta} = (A(Z) / G)^{(1-alpha)/alpha},

with Z a Zolotarev variate of parameter b = theta/alpha (density proportional
to B(x)^b on [0, pi]) and G ~ Gamma(1 + theta(1-alpha)/alpha).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.special import gammaln

from . import rng as rng_core
from .config import REJECTION_CAP
from .errors import DomainError, InfiniteMomentError, NumericalFailure, ParameterError
from .rng import RngStream

# Below this x, A(x) and B(x) use their analytic limits at 0
SMALL_X = 1e-10
SQRT_2PI = math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class StableParams:
    """Exponent ``alpha`` in (0, 1) and tilting ``theta`` > -alpha."""

    alpha: float
    theta: float = 0.0

    def __post_init__(self) -> None:
        if not 0.0 < self.alpha < 1.0:
            raise ParameterError(
                f"Stable exponent alpha must satisfy 0 < alpha < 1, got {self.alpha}.\n"
                "alpha = 0 is the Dirichlet case and never reaches the stable sampler."
            )
        if not self.theta > -self.alpha:
            raise ParameterError(
                f"Tilting theta must satisfy theta > -alpha = {-self.alpha}, got {self.theta}."
            )

    @property
    def b(self) -> float:
        return self.theta / self.alpha

    @property
    def gamma_shape(self) -> float:
        return 1.0 + self.theta * (1.0 - self.alpha) / self.alpha


def _check_x(x) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0) or np.any(arr >= math.pi):
        raise DomainError(
            f"Zolotarev functions are defined on [0, pi); got x outside it: {x!r}"
        )
    return arr


def zolotarev_log_B(x, alpha: float):
    """log B(x) = log sin x - alpha log sin(alpha x) - (1-alpha) log sin((1-alpha) x)."""
    arr = _check_x(x)
    small = arr < SMALL_X
    xs = np.where(small, 1.0, arr)
    with np.errstate(divide="ignore"):
        val = (
            np.log(np.sin(xs))
            - alpha * np.log(np.sin(alpha * xs))
            - (1.0 - alpha) * np.log(np.sin((1.0 - alpha) * xs))
        )
    limit = -alpha * math.log(alpha) - (1.0 - alpha) * math.log1p(-alpha)
    val = np.where(small, limit, val)
    return float(val) if val.ndim == 0 else val


def zolotarev_B(x, alpha: float):
    """
    B(x) = A(x)^{-(1-alpha)}, decreasing on [0, pi) from B(0).

    B(0) = alpha^{-alpha} (1-alpha)^{-(1-alpha)} is the dominating constant of
    the rejection sampler.
    """
    return np.exp(zolotarev_log_B(x, alpha))


def zolotarev_A(x, alpha: float):
    """
    Zolotarev's function on [0, pi).

    Args:
        x: Point(s) in [0, pi).
        alpha: Stable exponent in (0, 1).

    Returns:
        (sin(alpha x)^alpha sin((1-alpha) x)^(1-alpha) / sin x)^(1/(1-alpha)),
        with the limit alpha^(alpha/(1-alpha)) (1-alpha) at x = 0.

    Raises:
        DomainError: If x >= pi (A diverges there) or x < 0.
    """
    return np.exp(-np.asarray(zolotarev_log_B(x, alpha)) / (1.0 - alpha))


@dataclass(frozen=True)
class ZolotarevEnvelope:
    """Constants of the Zolotarev density C B(x)^b and its Gaussian bound."""

    alpha: float
    b: float
    sigma: float
    B0: float
    log_C: float

    @classmethod
    def from_params(cls, params: StableParams) -> ZolotarevEnvelope:
        a, b = params.alpha, params.b
        sigma = math.inf if b <= 0 else 1.0 / math.sqrt(b * a * (1.0 - a))
        B0 = a**-a * (1.0 - a) ** -(1.0 - a)
        log_C = gammaln(1.0 + b * a) + gammaln(1.0 + b * (1.0 - a)) - math.log(math.pi) - gammaln(1.0 + b)
        return cls(alpha=a, b=b, sigma=sigma, B0=B0, log_C=float(log_C))

    def density(self, x):
        """Zolotarev density C B(x)^b on [0, pi)."""
        return np.exp(self.log_C + self.b * np.asarray(zolotarev_log_B(x, self.alpha)))

    def gaussian_bound(self, x):
        """C B(0)^b exp(-x^2 / (2 sigma^2)); dominates the density when b > 0."""
        x = np.asarray(x, dtype=float)
        return np.exp(self.log_C + self.b * math.log(self.B0) - x**2 / (2.0 * self.sigma**2))


def _log_B_from_gap(y: np.ndarray, alpha: float) -> np.ndarray:
    """log B(pi - y), accurate for tiny gaps y."""
    x = math.pi - y
    with np.errstate(divide="ignore", invalid="ignore"):
        return (
            np.log(np.sin(y))
            - alpha * np.log(np.sin(alpha * x))
            - (1.0 - alpha) * np.log(np.sin((1.0 - alpha) * x))
        )


@lru_cache(maxsize=64)
def _min_log_gap_ratio(alpha: float) -> float:
    """min over (0, pi] of log(B(pi - y) / y), less a small safety margin."""
    grid = np.concatenate([np.geomspace(1e-9, 1e-2, 200), np.linspace(1e-2, math.pi - 1e-9, 2000)])
    values = _log_B_from_gap(grid, alpha) - np.log(grid)
    # Endpoint limits: y -> 0 gives 1/sin(alpha pi), y = pi gives B(0)/pi
    ends = (
        -math.log(math.sin(alpha * math.pi)),
        -alpha * math.log(alpha) - (1.0 - alpha) * math.log1p(-alpha) - math.log(math.pi),
    )
    best = float(min(values.min(), *ends))
    i = int(values.argmin())
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, grid.size - 1)]
    if hi > lo:
        res = minimize_scalar(
            lambda y: float(_log_B_from_gap(np.asarray(y), alpha) - math.log(y)),
            bounds=(lo, hi),
            method="bounded",
            options={"xatol": 1e-12},
        )
        best = min(best, float(res.fun))
    return best - 1e-9


def _sample_zolotarev_logB(params: StableParams, rng: RngStream, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Draw n Zolotarev variates; return (x, log B(x))."""
    a, b = params.alpha, params.b
    out_x = np.empty(n)
    out_logw = np.empty(n)

    if b == 0.0:
        x = math.pi * rng_core.uniform(rng, n)
        return x, np.asarray(zolotarev_log_B(np.minimum(x, np.nextafter(math.pi, 0)), a))

    env = ZolotarevEnvelope.from_params(params)
    log_B0 = math.log(env.B0)
    log_m = _min_log_gap_ratio(a) if b < 0 else 0.0
    pending = np.arange(n)

    for _ in range(REJECTION_CAP):
        if pending.size == 0:
            return out_x, out_logw
        k = pending.size
        v = rng_core.uniform(rng, k)

        if b < 0:
            # Proposal density proportional to (pi - x)^b
            y = math.pi * rng_core.uniform(rng, k) ** (1.0 / (1.0 + b))
            log_w = _log_B_from_gap(y, a)
            x = math.pi - y
            accept = np.log(v) <= b * (log_w - np.log(y) - log_m)
        elif env.sigma >= SQRT_2PI:
            x = math.pi * rng_core.uniform(rng, k)
            x = np.minimum(x, np.nextafter(math.pi, 0))
            log_w = np.asarray(zolotarev_log_B(x, a))
            accept = np.log(v) <= b * (log_w - log_B0)
        else:
            z = rng_core.normal(rng, k)
            x = env.sigma * np.abs(z)
            inside = x < math.pi
            log_w = np.full(k, -np.inf)
            log_w[inside] = zolotarev_log_B(x[inside], a)
            accept = inside & (np.log(v) - 0.5 * z**2 <= b * (log_w - log_B0))

        out_x[pending[accept]] = x[accept]
        out_logw[pending[accept]] = log_w[accept]
        pending = pending[~accept]

    raise NumericalFailure(
        f"Zolotarev rejection exceeded {REJECTION_CAP} rounds at alpha={a}, theta={params.theta}."
    )


def sample_zolotarev(params: StableParams, rng: RngStream, size=None):
    """
    Zolotarev variate(s) with density proportional to B(x)^b on [0, pi].

    Uses a uniform proposal when sigma >= sqrt(2 pi), the half-normal
    proposal X = sigma |N| otherwise, and returns Uniform(0, pi) directly when
    b = 0. For -1 < b < 0 the density grows toward pi and the proposal is
    proportional to (pi - x)^b.
    """
    n = 1 if size is None else int(np.prod(size))
    x, _ = _sample_zolotarev_logB(params, rng, n)
    return float(x[0]) if size is None else x.reshape(size)


def sample_tilted_stable(params: StableParams, rng: RngStream, size=None):
    """
    Draw T_{alpha,theta}.

    T = 1 / (W G^{1-alpha})^{1/alpha} with W = B(Z), Z a Zolotarev variate
    of parameter theta/alpha and G ~ Gamma(1 + theta(1-alpha)/alpha).

    Args:
        params: Stable exponent and tilting.
        rng: Stream to draw from.
        size: Number (or shape) of draws; a float is returned when None.

    Returns:
        Positive variate(s) with density proportional to t^{-theta} f_alpha(t).
    """
    n = 1 if size is None else int(np.prod(size))
    _, log_w = _sample_zolotarev_logB(params, rng, n)
    log_g = np.asarray(rng_core.log_gamma(params.gamma_shape, rng, n))
    a = params.alpha
    t = np.exp(-(log_w + (1.0 - a) * log_g) / a)
    return float(t[0]) if size is None else t.reshape(size)


def tilted_stable_moment(params: StableParams, r: float) -> float:
    """
    Closed-form E(T_{alpha,theta}^r).

    E(T_alpha^r) = Gamma(1 - r/alpha) / Gamma(1 - r), so
    E(T_{alpha,theta}^r) = [Gamma(theta+1)/Gamma(theta/alpha+1)]
                           * Gamma(1 - (r-theta)/alpha) / Gamma(1 - (r-theta)).

    Raises:
        InfiniteMomentError: If r - theta >= alpha.
    """
    a, th = params.alpha, params.theta
    s = r - th
    if s >= a:
        raise InfiniteMomentError(
            f"E(T^r) is infinite for r - theta >= alpha (r={r}, theta={th}, alpha={a})."
        )
    log_m = gammaln(th + 1.0) - gammaln(th / a + 1.0) + gammaln(1.0 - s / a) - gammaln(1.0 - s)
    return float(np.exp(log_m))


def laplace_transform_stable(s, alpha: float):
    """E exp(-s T_alpha) = exp(-s^alpha)."""
    return np.exp(-np.asarray(s, dtype=float) ** alpha)
