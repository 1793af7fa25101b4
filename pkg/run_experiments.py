"""TrotterQPE - Command-line experiment runner.

    python run_experiments.py qpe --config experiments.cfg --set slices=1,2,5,10
"""

from __future__ import annotations

import argparse
import sys
from typing import Callable

from services.experiments import cmd_bench, cmd_qpe, cmd_ratio, cmd_spectrum
from utils.config import ExperimentConfig, load_config, parse_override
from utils.debug import log_error, log_info, set_debug_mode
from utils.errors import TrotterQpeError

COMMANDS: dict[str, Callable[[ExperimentConfig], object]] = {
    "spectrum": cmd_spectrum,
    "qpe": cmd_qpe,
    "ratio": cmd_ratio,
    "bench": cmd_bench,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="run_experiments",
        description="Trotterized QPE experiments on FCIDUMP fixtures.",
    )
    parser.add_argument("command", choices=sorted(COMMANDS), help="experiment to run")
    parser.add_argument("--config", help="key=value configuration file")
    parser.add_argument(
        "--set",
        dest="overrides",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="override one configuration key (repeatable)",
    )
    parser.add_argument(
        "--ancilla",
        type=int,
        help="ancilla count for every system (dimer default is 8; 10 on a 16-qubit dimer holds 2^26 amplitudes, about 1 GiB)",
    )
    parser.add_argument("--output-dir", help="directory for the CSV products")
    parser.add_argument("--workers", type=int, help="parallel grid workers")
    return parser


def collect_overrides(args: argparse.Namespace) -> dict[str, str]:
    overrides = dict(parse_override(item) for item in args.overrides)
    if args.ancilla is not None:
        overrides["n_ancilla"] = str(args.ancilla)
        overrides["dimer_n_ancilla"] = str(args.ancilla)
    if args.output_dir is not None:
        overrides["output_dir"] = args.output_dir
    if args.workers is not None:
        overrides["workers"] = str(args.workers)
    return overrides


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.config, collect_overrides(args))
        set_debug_mode(config.debug)
        result = COMMANDS[args.command](config)
    except TrotterQpeError as e:
        log_error("Experiment failed", command=args.command, error=str(e))
        return 1
    log_info("Done", command=args.command, output=result)
    return 0


if __name__ == "__main__":
    sys.exit(main())
