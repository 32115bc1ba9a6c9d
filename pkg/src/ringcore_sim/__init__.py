"""ringcore-sim - a seedable simulator of a bidirectional OAM ring-core fiber link.

Main components:
- txgen / fiberchan / rbnoise / rxdsp / metrics: transmitter, channel,
  backscatter noise, receiver DSP and measurements
- experiments: the named experiments behind the command verbs
- ChannelJobRunner: state-tracked per-group job execution
- ResultsViewerApp: textual browser for a results directory
"""

import argparse
import json
import logging
import sys
from typing import List, Optional

import jsonschema
from rich.console import Console

from .config import CONFIG_SCHEMA, EXPERIMENTS, default_config, load_config
from .constants import Direction, RunState
from .envelope import ComplexEnvelope, ModeId
from .errors import ConfigurationError, RingcoreSimError
from .experiments import EXPERIMENT_RUNNERS, run_experiment
from .report import LinkReport
from .runner import ChannelJobRunner
from .utils import configure_logging, summary_table

__version__ = "0.1.0"

__all__ = [
    "ChannelJobRunner",
    "ComplexEnvelope",
    "Direction",
    "LinkReport",
    "ModeId",
    "RunState",
    "create_parser",
    "main",
    "run_experiment",
]

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_ACCEPTANCE = 2
EXIT_RUNTIME = 3
EXIT_INTERRUPTED = 130


def create_parser() -> argparse.ArgumentParser:
    """Create and configure the argument parser."""
    parser = argparse.ArgumentParser(
        prog="ringcore-sim",
        description="Simulate a bidirectional OAM ring-core fiber SDM link",
        epilog="Example: ringcore-sim ber_grid --seed 7 --out results/grid",
    )
    parser.add_argument("--version", action="version", version="%(prog)s 0.1.0")
    parser.add_argument(
        "--log-level",
        default=None,
        help="Logging level (default: $RINGCORE_SIM_LOG_LEVEL or WARNING)",
    )
    verbs = parser.add_subparsers(dest="verb", required=True, metavar="verb")

    for name in EXPERIMENT_RUNNERS:
        verb = verbs.add_parser(name, help=f"run the {name} experiment")
        verb.add_argument("--config", help="JSON experiment config")
        verb.add_argument("--seed", type=int, help="RNG seed (overrides config)")
        verb.add_argument("--out", help="output directory (overrides config)")
        verb.add_argument("--symbols", type=int, help="symbols per block")
        verb.add_argument(
            "--parallel",
            type=int,
            help="worker processes; 0 uses one per physical core",
        )

    view = verbs.add_parser("view", help="browse a results directory")
    view.add_argument("out_dir", help="directory holding results.csv")

    verbs.add_parser("schema", help="print the config JSON schema")
    return parser


def _load(args: argparse.Namespace):
    overrides = {
        "experiment": args.verb,
        "seed": args.seed,
        "output_dir": args.out,
        "symbols": args.symbols,
        "parallel": args.parallel,
    }
    if args.config:
        return load_config(args.config, **overrides)
    if args.seed is None:
        raise ConfigurationError("a seed is required: pass --seed or --config")
    cfg = default_config(args.verb, args.seed)
    for key in ("output_dir", "symbols", "parallel"):
        if overrides[key] is not None:
            setattr(cfg, key, overrides[key])
    return cfg.validate()


def run_verb(args: argparse.Namespace, console: Console) -> int:
    cfg = _load(args)
    runner = ChannelJobRunner(cfg.parallel)
    report = run_experiment(cfg, runner)
    report.write(cfg.output_dir)
    console.print(summary_table(report.to_dict()))
    if not report.accepted:
        return EXIT_ACCEPTANCE
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    """Main CLI entry point."""
    parser = create_parser()
    args = parser.parse_args(argv)
    console = Console()

    try:
        try:
            configure_logging(args.log_level)
        except ValueError as e:
            raise ConfigurationError(str(e)) from None
        if args.verb == "schema":
            console.print_json(json.dumps(CONFIG_SCHEMA))
            return EXIT_OK
        if args.verb == "view":
            from .app import ResultsViewerApp

            ResultsViewerApp(args.out_dir).run()
            return EXIT_OK
        if args.verb not in EXPERIMENTS:
            raise ConfigurationError(f"unknown experiment {args.verb!r}")
        return run_verb(args, console)
    except KeyboardInterrupt:
        print("\nInterrupted by user", file=sys.stderr)
        return EXIT_INTERRUPTED
    except (ConfigurationError, jsonschema.ValidationError) as e:
        print(f"Configuration error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except RingcoreSimError as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
