"""Seeded, config-driven reproductions of the tables and figures.

Every (theta, epsilon) cell draws from its own sub-stream of the master seed,
keyed by the experiment group and the cell index, so results do not depend on
the number of worker processes or on the order in which cells finish.
"""

from __future__ import annotations

from collections.abc import Callable, Sequence
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any

import numpy as np
from joblib import Parallel, delayed

from .config import (
    DEFAULT_SEED,
    FIG1_PANELS,
    OUTPUT_DIR,
    REFERENCE_MAX_STICKS,
    REFERENCE_TOLERANCE,
    REPLICATIONS,
    SEED_LIMIT,
    TABLE_ALPHA,
    TABLE_EPSILONS,
    TABLE_THETAS,
)
from .epsilon_py import (
    PYParams,
    UniformBase,
    sample_approx,
    sample_exact,
    sample_reference,
    sample_tau_asymptotic,
    sample_tau_exact,
)
from .errors import ConfigError, ParameterError
from .functionals import beta_reference_grid, cdf_eval, mean_functional, ref_F_third
from .report import realization_rows
from .rng import RngStream
from .stats import SummaryRow, histogram, summarize
from .tilted_stable import StableParams, sample_tilted_stable

EXPERIMENTS = (
    "table1",
    "table2",
    "table3",
    "fig1",
    "fig2",
    "tilted-stable",
    "sample-exact",
    "sample-approx",
    "tau-dist",
    "functional",
)
FUNCTIONALS = ("F12", "F13", "mean")
METHODS = ("exact", "approx")
BIN_RULES = ("fd", "auto", "sturges", "scott")

# First spawn-key component of each group of streams; table2 and table3 share
# realizations, so they share a key
STREAM_KEYS = {
    "table1": 1,
    "table2": 2,
    "table3": 2,
    "reference": 3,
    "fig1": 4,
    "fig2": 5,
    "tilted-stable": 6,
    "sample-exact": 7,
    "sample-approx": 8,
    "tau-dist": 9,
    "functional": 10,
}

# Experiments that draw from the asymptotic law of tau, hence need alpha > 0
NEEDS_STABLE = ("table1", "table2", "table3", "tilted-stable")

Progress = Callable[[str], None] | None


@dataclass
class ExperimentConfig:
    """Everything an experiment run depends on."""

    experiment: str
    alpha: float = TABLE_ALPHA
    thetas: tuple[float, ...] = TABLE_THETAS
    epsilons: tuple[float, ...] = TABLE_EPSILONS
    replications: int = REPLICATIONS
    seed: int = DEFAULT_SEED
    out: Path | str | None = None
    fmt: str = "csv"
    workers: int = 1
    bins: int | str = "fd"
    which: str = "F13"
    method: str = "exact"
    reference_tolerance: float = REFERENCE_TOLERANCE
    reference_max_sticks: int = REFERENCE_MAX_STICKS

    @classmethod
    def from_settings(cls, experiment: str, settings: dict[str, Any], **overrides: Any) -> ExperimentConfig:
        """
        Build a config from a settings dict, then apply overrides.

        Overrides set to None are ignored, so unset CLI flags fall through
        to the settings file.

        Raises:
            ConfigError: If a value has the wrong type or the result is invalid.
        """
        names = {f.name for f in fields(cls)}
        values: dict[str, Any] = {"experiment": experiment}
        for key, value in settings.items():
            key = {"format": "fmt"}.get(key, key)
            if key in names and key != "experiment":
                values[key] = value
        values.update({k: v for k, v in overrides.items() if v is not None})

        try:
            values["alpha"] = float(values.get("alpha", TABLE_ALPHA))
            values["thetas"] = tuple(float(t) for t in _as_list(values.get("thetas", TABLE_THETAS)))
            values["epsilons"] = tuple(float(e) for e in _as_list(values.get("epsilons", TABLE_EPSILONS)))
            values["replications"] = _as_int(values.get("replications", REPLICATIONS), "replications")
            values["seed"] = _as_int(values.get("seed", DEFAULT_SEED), "seed")
            values["workers"] = _as_int(values.get("workers", 1), "workers")
            values["reference_tolerance"] = float(values.get("reference_tolerance", REFERENCE_TOLERANCE))
            values["reference_max_sticks"] = _as_int(
                values.get("reference_max_sticks", REFERENCE_MAX_STICKS), "reference_max_sticks"
            )
        except (TypeError, ValueError) as e:
            raise ConfigError(f"Invalid setting: {e}") from e

        config = cls(**values)
        config.validate()
        return config

    def validate(self) -> None:
        """
        Check the configuration as a whole.

        Raises:
            ConfigError: Naming the first offending field.
        """
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(
                f"Unknown experiment {self.experiment!r}.\nChoose one of: {', '.join(EXPERIMENTS)}"
            )
        if self.replications < 1:
            raise ConfigError(f"replications must be >= 1, got {self.replications}.")
        if not self.thetas or not self.epsilons:
            raise ConfigError("theta and epsilon lists must be nonempty.")
        if not 0 <= self.seed < SEED_LIMIT:
            raise ConfigError(f"seed must be an integer in [0, 2^64), got {self.seed}.")
        if self.fmt not in ("csv", "json"):
            raise ConfigError(f"format must be csv or json, got {self.fmt!r}.")
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}.")
        if self.which not in FUNCTIONALS:
            raise ConfigError(f"--which must be one of {', '.join(FUNCTIONALS)}, got {self.which!r}.")
        if self.method not in METHODS:
            raise ConfigError(f"--method must be exact or approx, got {self.method!r}.")
        if not _valid_bins(self.bins):
            raise ConfigError(f"bins must be a positive integer or a numpy rule such as 'fd', got {self.bins!r}.")
        if self.reference_max_sticks < 1:
            raise ConfigError(f"reference_max_sticks must be >= 1, got {self.reference_max_sticks}.")

        if self.experiment == "fig1":
            return
        uses_stable = self.experiment in NEEDS_STABLE or (self.experiment == "tau-dist" and self.method == "approx")
        if uses_stable and self.alpha == 0.0:
            raise ConfigError(
                f"{self.experiment} draws from the asymptotic law of tau, which needs alpha > 0.\n"
                "Use --method exact for the Dirichlet case alpha = 0."
            )
        if self.experiment in ("table2", "fig2") and self.alpha != 0.5:
            raise ConfigError(
                f"{self.experiment} compares against a closed-form law that exists only for alpha = 0.5, "
                f"got alpha = {self.alpha}."
            )
        try:
            if self.experiment == "tilted-stable":
                for theta in self.thetas:
                    StableParams(self.alpha, theta)
            else:
                for theta in self.thetas:
                    for eps in self.epsilons:
                        PYParams(self.alpha, theta, eps)
            if self.experiment == "table3":
                PYParams(self.alpha, min(self.thetas), self.reference_tolerance)
        except ParameterError as e:
            raise ConfigError(str(e)) from e

    def output_path(self) -> Path | str:
        if self.out is not None:
            return self.out
        return OUTPUT_DIR / f"{self.experiment}.{self.fmt}"


def _as_list(value) -> list:
    if isinstance(value, str):
        return [v for v in value.split(",") if v.strip()]
    if isinstance(value, (int, float)):
        return [value]
    return list(value)


def _valid_bins(bins) -> bool:
    """A numpy binning rule or a positive bin count, given as an int or a digit string."""
    if isinstance(bins, (bool, float)):
        return False
    if isinstance(bins, str) and not bins.strip().isdigit():
        return bins in BIN_RULES
    try:
        return int(bins) >= 1
    except (TypeError, ValueError):
        return False


def _as_int(value, name: str) -> int:
    if isinstance(value, bool):
        raise ValueError(f"{name} must be an integer, got {value!r}")
    if isinstance(value, float):
        if not value.is_integer():
            raise ValueError(f"{name} must be an integer, got {value!r}")
        return int(value)
    return int(str(value).strip())


@dataclass(frozen=True)
class Cell:
    """One (alpha, theta, epsilon) configuration and its position in the sweep."""

    index: int
    alpha: float
    theta: float
    epsilon: float

    def params(self) -> PYParams:
        return PYParams(self.alpha, self.theta, self.epsilon)


@dataclass
class ExperimentResult:
    """Rows to write, and summary rows when the experiment is a table."""

    experiment: str
    rows: list[dict] = field(default_factory=list)
    columns: list[str] = field(default_factory=list)
    summary_rows: list[SummaryRow] = field(default_factory=list)


def _cells(config: ExperimentConfig) -> list[Cell]:
    """Cells in deterministic theta-major order."""
    return [
        Cell(i, config.alpha, theta, eps)
        for i, (theta, eps) in enumerate((t, e) for t in config.thetas for e in config.epsilons)
    ]


def _stream(config: ExperimentConfig, group: str, index: int) -> RngStream:
    return RngStream(config.seed, (STREAM_KEYS[group], index))


def _map_cells(fn: Callable, tasks: Sequence, workers: int) -> list:
    """Apply ``fn`` to each task, in worker processes when workers > 1; order is kept."""
    if workers > 1 and len(tasks) > 1:
        return Parallel(n_jobs=workers)(delayed(fn)(task) for task in tasks)
    return [fn(task) for task in tasks]


def alpha_diversity_statistic(tau, alpha: float, epsilon: float):
    """(epsilon/alpha)^alpha (tau - 1)^(1-alpha), the tau statistic at the alpha-diversity scale."""
    tau = np.asarray(tau, dtype=float)
    return (epsilon / alpha) ** alpha * (tau - 1.0) ** (1.0 - alpha)


# --- Table 1 ---


def _table1_cell(task: tuple[ExperimentConfig, Cell]) -> tuple[np.ndarray, np.ndarray]:
    config, cell = task
    params = cell.params()
    rng = _stream(config, "table1", cell.index)
    exact = np.array([sample_tau_exact(params, rng) for _ in range(config.replications)])
    asymptotic = np.asarray(sample_tau_asymptotic(params, rng, config.replications))
    return exact, asymptotic


def run_table1(config: ExperimentConfig, progress: Progress = None) -> list[SummaryRow]:
    """
    Exact versus asymptotic tau(epsilon) at the alpha-diversity scale.

    For each cell, ``replications`` draws of (epsilon/alpha)^alpha (tau-1)^(1-alpha)
    under the stopping rule (Ex) and under the asymptotic law (As), with the
    two-sample Kolmogorov distance between them.
    """
    cells = _cells(config)
    results = _map_cells(_table1_cell, [(config, c) for c in cells], config.workers)

    rows = []
    for cell, (exact, asymptotic) in zip(cells, results):
        row = summarize(
            cell.theta,
            cell.epsilon,
            {
                "As": alpha_diversity_statistic(asymptotic, cell.alpha, cell.epsilon),
                "Ex": alpha_diversity_statistic(exact, cell.alpha, cell.epsilon),
            },
            {"dK": ("Ex", "As")},
        )
        rows.append(row)
        _report(progress, f"table1: theta={cell.theta:g} epsilon={cell.epsilon:g} dK={row.d_k['dK']:.4f}")
    return rows


# --- Tables 2 and 3 ---


def _functionals_cell(task: tuple[ExperimentConfig, Cell]) -> dict[str, np.ndarray]:
    """F_eps(1/3) and mu_eps from the same exact and approximate realizations."""
    config, cell = task
    params = cell.params()
    base = UniformBase()
    rng = _stream(config, "table2", cell.index)
    out = {key: np.empty(config.replications) for key in ("F13_Al1", "F13_Al2", "mean_Al1", "mean_Al2")}
    for r in range(config.replications):
        exact = sample_exact(params, base, rng)
        approx = sample_approx(params, base, rng)
        out["F13_Al1"][r] = cdf_eval(exact, 1.0 / 3.0)
        out["F13_Al2"][r] = cdf_eval(approx, 1.0 / 3.0)
        out["mean_Al1"][r] = mean_functional(exact)
        out["mean_Al2"][r] = mean_functional(approx)
    return out


def _reference_task(task: tuple[ExperimentConfig, int, float]) -> np.ndarray:
    """Means of the high-truncation Pitman-Yor reference, drawn once per theta."""
    config, index, theta = task
    rng = _stream(config, "reference", index)
    base = UniformBase()
    return np.array([
        mean_functional(
            sample_reference(
                config.alpha, theta, base, rng,
                tolerance=config.reference_tolerance,
                max_sticks=config.reference_max_sticks,
            )
        )
        for _ in range(config.replications)
    ])


def run_table2_table3(
    config: ExperimentConfig,
    tables: Sequence[str] = ("table2", "table3"),
    progress: Progress = None,
) -> tuple[list[SummaryRow], list[SummaryRow]]:
    """
    Functionals of the exact (Al1) and approximate (Al2) samplers.

    Table 2 compares F_eps(1/3) with its closed-form law at alpha = 1/2;
    Table 3 compares mu_eps with a high-truncation Pitman-Yor sample. Both
    tables read the same realizations.

    Returns:
        (table2 rows, table3 rows); a table not requested comes back empty.
    """
    cells = _cells(config)
    results = _map_cells(_functionals_cell, [(config, c) for c in cells], config.workers)

    references: dict[float, np.ndarray] = {}
    if "table3" in tables:
        tasks = [(config, i, theta) for i, theta in enumerate(config.thetas)]
        for theta, sample in zip(config.thetas, _map_cells(_reference_task, tasks, config.workers)):
            references[theta] = sample
            _report(progress, f"table3: Pitman-Yor reference ready for theta={theta:g}")

    laws = {theta: ref_F_third(theta) for theta in config.thetas} if "table2" in tables else {}
    comparisons = {"dK_Al1": ("Al1", "PY"), "dK_Al2": ("Al2", "PY")}

    table2, table3 = [], []
    for cell, values in zip(cells, results):
        if "table2" in tables:
            row = summarize(
                cell.theta, cell.epsilon,
                {"Al2": values["F13_Al2"], "Al1": values["F13_Al1"], "PY": laws[cell.theta]},
                comparisons,
            )
            table2.append(row)
            _report(progress, _cell_line("table2", row))
        if "table3" in tables:
            row = summarize(
                cell.theta, cell.epsilon,
                {"Al2": values["mean_Al2"], "Al1": values["mean_Al1"], "PY": references[cell.theta]},
                comparisons,
            )
            table3.append(row)
            _report(progress, _cell_line("table3", row))
    return table2, table3


def _cell_line(name: str, row: SummaryRow) -> str:
    return (
        f"{name}: theta={row.theta:g} epsilon={row.epsilon:g} "
        f"dK_Al1={row.d_k['dK_Al1']:.4f} dK_Al2={row.d_k['dK_Al2']:.4f}"
    )


# --- Figures ---

FIG1_COLUMNS = ["panel", "alpha", "theta", "epsilon", "bin_left", "bin_right", "density"]
FIG2_COLUMNS = ["series", "theta", "epsilon", "bin_left", "bin_right", "density"]


def _fig1_cells() -> list[tuple[str, Cell]]:
    cells = []
    for panel, _, grid in FIG1_PANELS:
        for alpha in grid["alpha"]:
            for theta in grid["theta"]:
                for eps in grid["epsilon"]:
                    cells.append((panel, Cell(len(cells), alpha, theta, eps)))
    return cells


def _fig1_task(task: tuple[ExperimentConfig, Cell]) -> np.ndarray:
    config, cell = task
    rng = _stream(config, "fig1", cell.index)
    return np.asarray(sample_tau_asymptotic(cell.params(), rng, config.replications))


def _fig2_task(task: tuple[ExperimentConfig, Cell]) -> dict[str, np.ndarray]:
    """F_eps(1/2) under the exact (Al1) and approximate (Al2) samplers, one stream per cell."""
    config, cell = task
    rng = _stream(config, "fig2", cell.index)
    params = cell.params()
    base = UniformBase()
    out = {label: np.empty(config.replications) for label in ("Al1", "Al2")}
    for r in range(config.replications):
        out["Al1"][r] = cdf_eval(sample_exact(params, base, rng), 0.5)
        out["Al2"][r] = cdf_eval(sample_approx(params, base, rng), 0.5)
    return out


def _histogram_rows(values: np.ndarray, bins, **labels) -> list[dict]:
    edges, density = histogram(values, bins)
    return [
        {**labels, "bin_left": float(lo), "bin_right": float(hi), "density": float(d)}
        for lo, hi, d in zip(edges[:-1], edges[1:], density)
    ]


def run_fig_density(config: ExperimentConfig, progress: Progress = None) -> list[dict]:
    """
    Histogram density data for the figures.

    fig1: asymptotic tau(epsilon) draws over the three parameter sweeps.
    fig2: F_eps(1/2) draws under the exact (series "Al1") and approximate
    (series "Al2") samplers, followed by the Beta(theta+1/2, theta+1/2)
    density sampled on a grid (series "reference").
    """
    rows: list[dict] = []
    if config.experiment == "fig1":
        panels = _fig1_cells()
        samples = _map_cells(_fig1_task, [(config, c) for _, c in panels], config.workers)
        for (panel, cell), tau in zip(panels, samples):
            rows += _histogram_rows(
                tau, config.bins, panel=panel, alpha=cell.alpha, theta=cell.theta, epsilon=cell.epsilon
            )
            _report(progress, f"fig1 {panel}: alpha={cell.alpha:g} theta={cell.theta:g} "
                              f"epsilon={cell.epsilon:g} median tau={np.median(tau):g}")
        return rows

    cells = _cells(config)
    samples = _map_cells(_fig2_task, [(config, c) for c in cells], config.workers)
    for cell, values in zip(cells, samples):
        for series in ("Al1", "Al2"):
            rows += _histogram_rows(values[series], config.bins, series=series, theta=cell.theta, epsilon=cell.epsilon)
        _report(progress, f"fig2: theta={cell.theta:g} epsilon={cell.epsilon:g} done")
    for theta in config.thetas:
        grid, density = beta_reference_grid(theta)
        rows += [
            {"series": "reference", "theta": theta, "epsilon": None,
             "bin_left": float(x), "bin_right": float(x), "density": float(d)}
            for x, d in zip(grid, density)
        ]
    return rows


# --- Single-sampler experiments ---


def _tilted_stable_rows(config: ExperimentConfig) -> list[dict]:
    rows = []
    for i, theta in enumerate(config.thetas):
        rng = _stream(config, "tilted-stable", i)
        draws = np.asarray(sample_tilted_stable(StableParams(config.alpha, theta), rng, config.replications))
        rows += [
            {"alpha": config.alpha, "theta": theta, "replication": r, "t": float(t)}
            for r, t in enumerate(draws)
        ]
    return rows


def _realization_task(task: tuple[ExperimentConfig, Cell]) -> list[dict]:
    config, cell = task
    sampler = sample_exact if config.experiment == "sample-exact" else sample_approx
    rng = _stream(config, config.experiment, cell.index)
    base = UniformBase()
    labels = {"alpha": cell.alpha, "theta": cell.theta, "epsilon": cell.epsilon}
    rows = []
    for r in range(config.replications):
        rows += [{**labels, **row} for row in realization_rows(r, sampler(cell.params(), base, rng))]
    return rows


def _tau_task(task: tuple[ExperimentConfig, Cell]) -> list[dict]:
    config, cell = task
    rng = _stream(config, "tau-dist", cell.index)
    params = cell.params()
    if config.method == "exact":
        taus = [sample_tau_exact(params, rng) for _ in range(config.replications)]
    else:
        taus = np.asarray(sample_tau_asymptotic(params, rng, config.replications)).tolist()
    return [
        {"alpha": cell.alpha, "theta": cell.theta, "epsilon": cell.epsilon, "replication": r, "tau": int(t)}
        for r, t in enumerate(taus)
    ]


def _functional_task(task: tuple[ExperimentConfig, Cell]) -> list[dict]:
    config, cell = task
    sampler = sample_exact if config.method == "exact" else sample_approx
    rng = _stream(config, "functional", cell.index)
    params = cell.params()
    base = UniformBase()
    evaluate = {
        "F12": lambda p: cdf_eval(p, 0.5),
        "F13": lambda p: cdf_eval(p, 1.0 / 3.0),
        "mean": mean_functional,
    }[config.which]
    return [
        {"alpha": cell.alpha, "theta": cell.theta, "epsilon": cell.epsilon,
         "replication": r, "value": float(evaluate(sampler(params, base, rng)))}
        for r in range(config.replications)
    ]


def _flatten(chunks: list[list[dict]]) -> list[dict]:
    return [row for chunk in chunks for row in chunk]


def _report(progress: Progress, message: str) -> None:
    if progress is not None:
        progress(message)


def run_experiment(config: ExperimentConfig, progress: Progress = None) -> ExperimentResult:
    """Dispatch ``config.experiment`` and collect its output rows."""
    config.validate()
    name = config.experiment
    result = ExperimentResult(name)

    if name == "table1":
        result.summary_rows = run_table1(config, progress)
    elif name in ("table2", "table3"):
        table2, table3 = run_table2_table3(config, tables=(name,), progress=progress)
        result.summary_rows = table2 if name == "table2" else table3
    elif name in ("fig1", "fig2"):
        result.rows = run_fig_density(config, progress)
        result.columns = FIG1_COLUMNS if name == "fig1" else FIG2_COLUMNS
        return result
    elif name == "tilted-stable":
        result.rows = _tilted_stable_rows(config)
        result.columns = ["alpha", "theta", "replication", "t"]
        return result
    else:
        task = {"sample-exact": _realization_task, "sample-approx": _realization_task,
                "tau-dist": _tau_task, "functional": _functional_task}[name]
        chunks = _map_cells(task, [(config, c) for c in _cells(config)], config.workers)
        result.rows = _flatten(chunks)
        result.columns = list(result.rows[0].keys()) if result.rows else []
        return result

    result.rows = [row.as_dict() for row in result.summary_rows]
    result.columns = result.summary_rows[0].columns() if result.summary_rows else []
    return result

