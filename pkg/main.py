"""
Batch entry point.

    python main.py <mode> [--config run.json] [--seed N] [--n N] [--t0 S] [--out DIR] [--td S] [--workers K]

Flags override values from the config file. Exit codes: 0 success, 2 invalid input,
3 numerical failure. Regime warnings never change the exit code; they are written into
the "warnings" array of the JSON artifacts.
"""
import argparse
import json
import logging
import os
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np
from pydantic import ValidationError

from commands import COMMANDS
from errors import DarkPeriodError, ValidationFailure
from models import RunConfig
from utils import TOOL_NAME, TOOL_VERSION, configure_logging, env_int, log_error, log_info

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3

FLAG_KEYS = ("seed", "n_intervals", "t0", "out", "td", "workers")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog=TOOL_NAME,
        description="Dark-period statistics of Lyman-alpha fluorescence from He+ in a static field",
    )
    parser.add_argument("mode", choices=list(COMMANDS), help="Subcommand to run")
    parser.add_argument("--config", type=Path, default=None, help="Path to a JSON run configuration")
    parser.add_argument("--seed", type=int, default=None, help="64-bit simulation seed")
    parser.add_argument("--n", dest="n_intervals", type=int, default=None, help="Number of photon intervals")
    parser.add_argument("--t0", type=float, default=None, help="Dark-period threshold override (s)")
    parser.add_argument("--out", type=Path, default=None, help="Output directory")
    parser.add_argument("--td", type=float, default=None, help="Measured mean dark-period duration for invert-lamb (s)")
    parser.add_argument("--workers", type=int, default=None, help="Concurrent simulation streams")
    parser.add_argument("--log-level", default=None, help="Logging level (default DARKPERIODS_LOG_LEVEL or INFO)")
    parser.add_argument("--version", action="version", version=f"%(prog)s {TOOL_VERSION}")
    return parser


def load_config(args: argparse.Namespace) -> RunConfig:
    """
    Merge the config file, environment defaults and CLI flags into a RunConfig.

    Raises:
        ValidationFailure: the file does not hold a JSON object
        pydantic.ValidationError: the merged document is invalid
    """
    data: Dict[str, Any] = {}
    if args.config is not None:
        data = json.loads(args.config.read_text(encoding="utf-8"))
        if not isinstance(data, dict):
            raise ValidationFailure(f"{args.config} must hold a JSON object")
    data["mode"] = args.mode

    data.setdefault("workers", env_int("DARKPERIODS_WORKERS", 1))
    out_dir = os.getenv("DARKPERIODS_OUT_DIR")
    if out_dir:
        data.setdefault("out", out_dir)

    for key in FLAG_KEYS:
        value = getattr(args, key)
        if value is not None:
            data[key] = value
    return RunConfig.model_validate(data)


def run(config: RunConfig) -> int:
    """Dispatch one configured run and map failures to exit codes."""
    logger.debug("=" * 50)
    logger.debug(f"RUN {config.mode.upper()}")
    logger.debug(f"Config: {config.model_dump_json()}")
    logger.debug("=" * 50)

    handler = COMMANDS[config.mode]
    try:
        artifacts = handler(config)
    except DarkPeriodError as e:
        log_error(f"{config.mode} failed", e, e.data)
        return e.exit_code
    except ValidationError as e:
        log_error(f"{config.mode} rejected its parameters", e)
        return EXIT_VALIDATION
    except (np.linalg.LinAlgError, FloatingPointError, ZeroDivisionError, OverflowError) as e:
        log_error(f"{config.mode} hit a numerical failure", e)
        return EXIT_NUMERICAL

    for path in artifacts.values():
        print(path)
    log_info(f"{config.mode} finished", {name: str(path) for name, path in artifacts.items()})
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level)
    try:
        config = load_config(args)
    except (ValidationError, ValidationFailure, json.JSONDecodeError, OSError) as e:
        log_error("Invalid run configuration", e)
        return EXIT_VALIDATION
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
