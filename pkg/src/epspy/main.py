"""Command-line entry point for the epsilon-PY experiments.

Runs one experiment end to end:
1. Load settings (experiment_settings.yaml or --config), then apply CLI flags
2. Validate the resulting configuration
3. Run the experiment on seeded sub-streams
4. Write rows as CSV or JSON and print a summary table for the tables
"""

import argparse
import functools
import sys
from pathlib import Path

from dotenv import load_dotenv

from .errors import ConfigError, NumericalFailure, ParameterError
from .experiments import EXPERIMENTS, FUNCTIONALS, METHODS, ExperimentConfig, run_experiment
from .report import format_summary_table, write_rows
from .settings import load_experiment_settings

# Load environment variables from .env file
load_dotenv()

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

TABLE_TITLES = {
    "table1": "TABLE 1: TAU AT THE ALPHA-DIVERSITY SCALE (As vs Ex)",
    "table2": "TABLE 2: F(1/3) UNDER BOTH SAMPLERS (Al1, Al2 vs PY)",
    "table3": "TABLE 3: MEAN FUNCTIONAL UNDER BOTH SAMPLERS (Al1, Al2 vs PY)",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="epspy",
        description="Sample epsilon-truncated Pitman-Yor processes and reproduce the simulation study",
    )
    parser.add_argument("experiment", choices=EXPERIMENTS, help="Experiment to run")
    parser.add_argument("--alpha", type=float, metavar="A", help="Discount parameter (0 <= A < 1)")
    parser.add_argument(
        "--theta",
        metavar="T1,T2",
        help="Comma-separated concentration values (each > -alpha)",
    )
    parser.add_argument(
        "--eps",
        metavar="E1,E2",
        help="Comma-separated truncation levels (each in (0, 1))",
    )
    parser.add_argument("--n", type=int, metavar="N", help="Replications per configuration")
    parser.add_argument("--seed", type=int, metavar="S", help="Master seed in [0, 2^64)")
    parser.add_argument("--out", metavar="PATH", help="Output file, or - for stdout")
    parser.add_argument("--format", choices=("csv", "json"), help="Output format (default csv)")
    parser.add_argument("--config", metavar="PATH", help="YAML or JSON settings file")
    parser.add_argument("--workers", type=int, metavar="K", help="Worker processes for cell fan-out")
    parser.add_argument("--bins", metavar="RULE", help="Histogram bins for fig1/fig2: a count or 'fd'")
    parser.add_argument("--which", choices=FUNCTIONALS, help="Functional for the functional experiment")
    parser.add_argument("--method", choices=METHODS, help="Sampler for tau-dist and functional")
    parser.add_argument("--quiet", action="store_true", help="Suppress status output")
    return parser


def main(argv: list[str] | None = None) -> int:
    """Run one experiment.

    Returns:
        Exit code (0 for success, 2 for configuration errors, 3 for numerical failures).
    """
    args = build_parser().parse_args(argv)

    # Keep stdout clean when the data itself goes there
    status_stream = sys.stderr if args.out == "-" else sys.stdout
    say = (lambda *_, **__: None) if args.quiet else functools.partial(print, file=status_stream)

    try:
        if args.config:
            settings = load_experiment_settings(Path(args.config), verbose=False, strict=True)
        else:
            settings = load_experiment_settings(verbose=False)
        config = ExperimentConfig.from_settings(
            args.experiment,
            settings,
            alpha=args.alpha,
            thetas=args.theta,
            epsilons=args.eps,
            replications=args.n,
            seed=args.seed,
            out=args.out,
            fmt=args.format,
            workers=args.workers,
            bins=args.bins,
            which=args.which,
            method=args.method,
        )
    except (ConfigError, ParameterError) as e:
        print(f"ERROR: {e}", file=sys.stderr)
        return EXIT_CONFIG

    say("=" * 50)
    say(f"EPSPY {config.experiment.upper()}")
    say("=" * 50)
    say(f"alpha={config.alpha:g} thetas={list(config.thetas)} epsilons={list(config.epsilons)}")
    say(f"replications={config.replications} seed={config.seed} workers={config.workers}")
    say()

    try:
        result = run_experiment(config, progress=say)
    except NumericalFailure as e:
        print(f"ERROR: {e}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ConfigError as e:
        print(f"ERROR: {e}", file=sys.stderr)
        return EXIT_CONFIG

    output = config.output_path()
    write_rows(result.rows, output, config.fmt, result.columns)

    if result.summary_rows:
        say()
        say(format_summary_table(TABLE_TITLES[config.experiment], result.summary_rows))

    say(f"Wrote {len(result.rows)} rows to {output}")
    say()
    say("=" * 50)
    say("EXPERIMENT COMPLETE")
    say("=" * 50)

    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
