"""Settings management for experiment configuration."""

import os
from pathlib import Path
from typing import Any

import yaml

from .config import (
    DEFAULT_SEED,
    REFERENCE_MAX_STICKS,
    REFERENCE_TOLERANCE,
    REPLICATIONS,
    SETTINGS_FILE,
    TABLE_ALPHA,
    TABLE_EPSILONS,
    TABLE_THETAS,
)
from .errors import ConfigError


def load_experiment_settings(
    path: Path | None = None, verbose: bool = True, strict: bool = False
) -> dict[str, Any]:
    """
    Load experiment settings from experiment_settings.yaml (or a JSON file).

    Args:
        path: Settings file to read. Defaults to experiment_settings.yaml in the
            project root.
        verbose: If True, print status messages about loading settings.
        strict: If True, a missing or unparsable file is an error instead of
            falling back to the defaults. Used for files named on the command line.

    Returns:
        Dictionary containing experiment configuration, merged over the defaults.
        Returns default settings if the file doesn't exist or can't be parsed.

    Raises:
        ConfigError: In strict mode, if the file is missing, unreadable or not
            a mapping.
    """
    settings_file = path or SETTINGS_FILE
    settings = get_default_settings()

    if not settings_file.exists():
        if strict:
            raise ConfigError(f"Settings file not found: {settings_file}")
        if verbose:
            print(f"Settings file not found: {settings_file}")
            print("Using default settings")
        return settings

    try:
        with open(settings_file, "r", encoding="utf-8") as f:
            loaded = yaml.safe_load(f)
    except (OSError, yaml.YAMLError) as e:
        if strict:
            raise ConfigError(f"Error loading settings from {settings_file}:\n{e}") from e
        if verbose:
            print(f"Error loading settings: {e}")
            print("Using default settings")
        return settings

    if verbose:
        print(f"Loaded settings from: {settings_file}")
    if isinstance(loaded, dict):
        settings.update(loaded)
    elif strict and loaded is not None:
        raise ConfigError(f"Settings file {settings_file} must hold a mapping of setting names to values.")
    return settings


def get_default_settings() -> dict[str, Any]:
    """Return default experiment settings, with environment overrides applied."""
    return {
        "alpha": TABLE_ALPHA,
        "thetas": list(TABLE_THETAS),
        "epsilons": list(TABLE_EPSILONS),
        "replications": REPLICATIONS,
        "seed": _env_seed(),
        "format": "csv",
        "workers": 1,
        "bins": "fd",
        "reference_tolerance": REFERENCE_TOLERANCE,
        "reference_max_sticks": REFERENCE_MAX_STICKS,
    }


def _env_seed() -> int:
    raw = os.environ.get("EPSPY_SEED")
    if raw is None:
        return DEFAULT_SEED
    try:
        return int(raw)
    except ValueError as e:
        raise ConfigError(f"EPSPY_SEED must be a decimal integer, got {raw!r}") from e


def save_default_settings(path: Path | None = None) -> None:
    """Save default settings to experiment_settings.yaml if it doesn't exist."""
    settings_file = path or SETTINGS_FILE

    if settings_file.exists():
        print(f"Settings file already exists: {settings_file}")
        return

    default_settings = get_default_settings()

    # Comments written by hand; PyYAML drops them on dump
    content = """# epspy Experiment Settings
#
# Defaults for every experiment run by `epspy`. Command-line flags override
# these values. EPSPY_SEED in the environment (or .env) supplies the seed
# while the seed line below stays commented out.

# Discount parameter used by the table experiments (0 <= alpha < 1)
alpha: {alpha}

# Concentration parameters swept by the tables (theta > -alpha)
thetas: {thetas}

# Truncation levels swept by the tables (0 < epsilon < 1)
epsilons: {epsilons}

# Monte Carlo replications per (theta, epsilon) cell
replications: {replications}

# Master seed, a decimal integer in [0, 2^64)
# seed: {seed}

# Output format: csv or json
format: {format}

# Worker processes for cell fan-out (output does not depend on this)
workers: {workers}

# Histogram binning for fig1/fig2: "fd" (Freedman-Diaconis) or a bin count
bins: {bins}

# Deterministic truncation of the Pitman-Yor reference sample (Table 3)
reference_tolerance: {reference_tolerance:.1e}
reference_max_sticks: {reference_max_sticks}
""".format(**default_settings)

    with open(settings_file, "w", encoding="utf-8") as f:
        f.write(content)

    print(f"Created default settings file: {settings_file}")


def main():
    """Write the commented experiment_settings.yaml template, then echo what it loads as."""
    save_default_settings()

    settings = load_experiment_settings()
    print("\nEffective experiment settings:")
    print(yaml.dump(settings, default_flow_style=False, sort_keys=False))


if __name__ == "__main__":
    main()
