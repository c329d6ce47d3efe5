"""Empirical distributions, Kolmogorov distances and summary rows."""

from __future__ import annotations

import math
from collections.abc import Callable, Mapping
from dataclasses import dataclass, field
from typing import Protocol, runtime_checkable

import numpy as np

from .errors import DomainError, ParameterError


@runtime_checkable
class Law(Protocol):
    """A distribution known through its CDF, mean and quantiles."""

    def cdf(self, w): ...

    def mean(self) -> float: ...

    def quantile(self, p: float) -> float: ...


@dataclass(frozen=True, eq=False)
class EmpiricalDistribution:
    """A nonempty sample held in nondecreasing order."""

    sorted_values: np.ndarray

    def __post_init__(self) -> None:
        values = np.asarray(self.sorted_values, dtype=float).ravel()
        if values.size == 0:
            raise ParameterError("An empirical distribution needs at least one value.")
        if np.any(np.isnan(values)):
            raise ParameterError("Sample contains NaN values.")
        if np.any(np.diff(values) < 0):
            values = np.sort(values)
        object.__setattr__(self, "sorted_values", values)

    @classmethod
    def from_sample(cls, values) -> EmpiricalDistribution:
        return cls(np.sort(np.asarray(values, dtype=float).ravel()))

    @property
    def n(self) -> int:
        return int(self.sorted_values.size)

    def ecdf(self, x):
        """Fraction of the sample that is <= x."""
        counts = np.searchsorted(self.sorted_values, np.asarray(x, dtype=float), side="right")
        out = counts / self.n
        return float(out) if np.ndim(out) == 0 else out

    def quantile(self, p: float) -> float:
        return quantile(self, p)

    def mean(self) -> float:
        return float(np.mean(self.sorted_values))

    def std_error(self) -> float:
        """Standard error of the sample mean (0 for a single value)."""
        if self.n < 2:
            return 0.0
        return float(np.std(self.sorted_values, ddof=1) / math.sqrt(self.n))


def _as_empirical(sample) -> EmpiricalDistribution:
    if isinstance(sample, EmpiricalDistribution):
        return sample
    return EmpiricalDistribution.from_sample(sample)


def quantile(a, p: float) -> float:
    """
    Linear-interpolation quantile (type 7); p = 0 and p = 1 give the
    minimum and the maximum.

    Raises:
        DomainError: If p is outside [0, 1].
    """
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"Quantile level must lie in [0, 1], got {p}.")
    return float(np.quantile(_as_empirical(a).sorted_values, p, method="linear"))


def ks_two_sample(a, b) -> float:
    """
    sup_x |F_a(x) - F_b(x)| over the union of both samples.

    Both ECDFs are read with side='right', so every copy of a tied value is
    counted before the gap is taken.
    """
    a, b = _as_empirical(a), _as_empirical(b)
    union = np.concatenate([a.sorted_values, b.sorted_values])
    cdf_a = np.searchsorted(a.sorted_values, union, side="right") / a.n
    cdf_b = np.searchsorted(b.sorted_values, union, side="right") / b.n
    return float(np.max(np.abs(cdf_a - cdf_b)))


def ks_one_sample(a, cdf: Callable) -> float:
    """max_i max(|i/n - F(x_i)|, |(i-1)/n - F(x_i)|)."""
    a = _as_empirical(a)
    f = np.asarray(cdf(a.sorted_values), dtype=float)
    i = np.arange(1, a.n + 1)
    upper = np.abs(i / a.n - f)
    lower = np.abs((i - 1) / a.n - f)
    return float(max(upper.max(), lower.max()))


@dataclass(frozen=True)
class SampleSummary:
    """Mean and quartiles of one column of a summary row."""

    mean: float
    q25: float
    median: float
    q75: float

    def __post_init__(self) -> None:
        if not self.q25 <= self.median <= self.q75:
            raise ParameterError(
                f"Quartiles out of order: q25={self.q25}, median={self.median}, q75={self.q75}"
            )

    @classmethod
    def of(cls, source) -> SampleSummary:
        """Summarize a sample, an EmpiricalDistribution or a Law."""
        if isinstance(source, Law):
            return cls(
                mean=float(source.mean()),
                q25=float(source.quantile(0.25)),
                median=float(source.quantile(0.5)),
                q75=float(source.quantile(0.75)),
            )
        emp = _as_empirical(source)
        return cls(
            mean=emp.mean(),
            q25=quantile(emp, 0.25),
            median=quantile(emp, 0.5),
            q75=quantile(emp, 0.75),
        )


@dataclass(frozen=True)
class SummaryRow:
    """
    One (theta, epsilon) row of a table.

    ``d_k`` maps a column name to a Kolmogorov distance stored at full
    precision; the x100 scaling is applied only when printing.
    ``summaries`` maps a sample label (As, Ex, Al1, Al2, PY) to its summary.
    """

    theta: float
    epsilon: float
    d_k: dict[str, float] = field(default_factory=dict)
    summaries: dict[str, SampleSummary] = field(default_factory=dict)

    def columns(self) -> list[str]:
        cols = ["theta", "epsilon", *self.d_k]
        for label in self.summaries:
            cols += [f"{label}_{stat}" for stat in ("mean", "q25", "median", "q75")]
        return cols

    def as_dict(self) -> dict[str, float]:
        row: dict[str, float] = {"theta": self.theta, "epsilon": self.epsilon}
        row.update(self.d_k)
        for label, s in self.summaries.items():
            row.update({
                f"{label}_mean": s.mean,
                f"{label}_q25": s.q25,
                f"{label}_median": s.median,
                f"{label}_q75": s.q75,
            })
        return row


def summarize(
    theta: float,
    epsilon: float,
    samples: Mapping[str, object],
    comparisons: Mapping[str, tuple[str, str]],
) -> SummaryRow:
    """
    Build a SummaryRow from labelled samples.

    Args:
        theta: Concentration of the row.
        epsilon: Truncation level of the row.
        samples: Label -> sample values, EmpiricalDistribution or Law.
        comparisons: Column name -> (label, label) pair to compare. A pair
            with a Law on one side uses the one-sample distance against its CDF.

    Returns:
        Row with one summary per sample and one distance per comparison.
    """
    prepared = {
        label: s if isinstance(s, Law) else _as_empirical(s)
        for label, s in samples.items()
    }
    d_k: dict[str, float] = {}
    for column, (left, right) in comparisons.items():
        a, b = prepared[left], prepared[right]
        if isinstance(b, EmpiricalDistribution) and isinstance(a, EmpiricalDistribution):
            d_k[column] = ks_two_sample(a, b)
        elif isinstance(a, EmpiricalDistribution):
            d_k[column] = ks_one_sample(a, b.cdf)
        elif isinstance(b, EmpiricalDistribution):
            d_k[column] = ks_one_sample(b, a.cdf)
        else:
            raise ParameterError(f"Comparison {column!r} needs at least one sample side.")
    summaries = {label: SampleSummary.of(s) for label, s in prepared.items()}
    return SummaryRow(theta=float(theta), epsilon=float(epsilon), d_k=d_k, summaries=summaries)


def histogram(values, bins: int | str = "fd") -> tuple[np.ndarray, np.ndarray]:
    """Bin edges and density values; Freedman-Diaconis binning by default."""
    values = np.asarray(values, dtype=float).ravel()
    if values.size == 0:
        raise ParameterError("Cannot build a histogram of an empty sample.")
    if isinstance(bins, str) and bins.strip().isdigit():
        bins = int(bins)
    if isinstance(bins, int) and bins < 1:
        raise ParameterError(f"Need at least one histogram bin, got {bins}.")
    density, edges = np.histogram(values, bins=bins, density=True)
    return edges, density
