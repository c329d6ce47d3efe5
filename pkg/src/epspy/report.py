"""Write, read back and print experiment results."""

import csv
import json
import sys
from collections.abc import Iterable, Sequence
from pathlib import Path

import numpy as np

from .epsilon_py import EpsilonPYRealization
from .errors import ConfigError
from .stats import SampleSummary, SummaryRow

SUMMARY_STATS = ("mean", "q25", "median", "q75")


def summary_row_to_dict(row: SummaryRow) -> dict[str, float]:
    return row.as_dict()


def realization_rows(replication: int, realization: EpsilonPYRealization) -> list[dict]:
    """One row per atom, then index -1 carrying the remainder and xi_0."""
    rows = [
        {"replication": replication, "index": i + 1, "weight": float(w), "atom": float(x)}
        for i, (w, x) in enumerate(zip(realization.weights, realization.atoms))
    ]
    rows.append({
        "replication": replication,
        "index": -1,
        "weight": realization.remainder,
        "atom": realization.extra_atom,
    })
    return rows


def _format_value(value):
    # repr of a float round-trips exactly
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, np.integer):
        return int(value)
    return value


def _json_value(value):
    if isinstance(value, np.generic):
        return value.item()
    return value


def write_rows(rows: Sequence[dict], path: Path | str, fmt: str = "csv", columns: Sequence[str] | None = None) -> None:
    """
    Write rows as CSV (header row, full-precision floats) or JSON.

    Args:
        rows: Records sharing the same keys.
        path: Output file, or "-" for stdout.
        fmt: "csv" or "json".
        columns: Column order; defaults to the keys of the first row.
    """
    if fmt not in ("csv", "json"):
        raise ConfigError(f"Unknown output format {fmt!r}; use csv or json.")
    columns = list(columns or (rows[0].keys() if rows else []))

    to_stdout = str(path) == "-"
    if not to_stdout:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
    f = sys.stdout if to_stdout else open(path, "w", encoding="utf-8", newline="")

    try:
        if fmt == "json":
            json.dump([{c: _json_value(row[c]) for c in columns} for row in rows], f, indent=2)
            f.write("\n")
        else:
            writer = csv.DictWriter(f, fieldnames=columns, lineterminator="\n")
            writer.writeheader()
            for row in rows:
                writer.writerow({c: _format_value(row[c]) for c in columns})
    finally:
        if not to_stdout:
            f.close()


def write_summary_rows(rows: Sequence[SummaryRow], path: Path | str, fmt: str = "csv") -> None:
    columns = rows[0].columns() if rows else ["theta", "epsilon"]
    write_rows([summary_row_to_dict(r) for r in rows], path, fmt, columns)


def read_summary_csv(path: Path | str) -> list[SummaryRow]:
    """Parse a summary CSV written by ``write_summary_rows``."""
    with open(path, "r", encoding="utf-8", newline="") as f:
        reader = csv.DictReader(f)
        header = reader.fieldnames or []
        labels: list[str] = []
        for col in header:
            label, _, stat = col.rpartition("_")
            if stat in SUMMARY_STATS and label and label not in labels:
                labels.append(label)
        distance_cols = [c for c in header if c.startswith("dK")]

        rows = []
        for record in reader:
            rows.append(SummaryRow(
                theta=float(record["theta"]),
                epsilon=float(record["epsilon"]),
                d_k={c: float(record[c]) for c in distance_cols},
                summaries={
                    label: SampleSummary(*(float(record[f"{label}_{s}"]) for s in SUMMARY_STATS))
                    for label in labels
                },
            ))
    return rows


def format_summary_table(title: str, rows: Iterable[SummaryRow]) -> str:
    """Format summary rows as console text, distances multiplied by 100."""
    rows = list(rows)
    lines = []
    lines.append("=" * 50)
    lines.append(title)
    lines.append("=" * 50)
    lines.append("")

    for row in rows:
        lines.append("-" * 40)
        lines.append(f"theta = {row.theta:g}, epsilon = {row.epsilon:g}")
        for column, value in row.d_k.items():
            lines.append(f"  {column} (x100): {100.0 * value:.2f}")
        for label, s in row.summaries.items():
            lines.append(
                f"  {label:<4} mean {s.mean:.2f} | q25 {s.q25:.2f} | "
                f"median {s.median:.2f} | q75 {s.q75:.2f}"
            )
        lines.append("")

    return "\n".join(lines)
