"""
This module contains utility functions used across the application:
logging setup, environment lookups and the CSV/JSON artifact writers.
"""
import csv
import json
import logging
import os
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence

import numpy as np
from dotenv import load_dotenv

# Load environment variables
load_dotenv()

TOOL_NAME = "lyman-dark-periods"
TOOL_VERSION = "0.3.0"

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - [%(filename)s:%(lineno)d] - %(message)s'

logger = logging.getLogger(__name__)


def configure_logging(level: Optional[str] = None) -> None:
    """
    Configure root logging with the project format.

    Args:
        level: Level name; falls back to DARKPERIODS_LOG_LEVEL, then INFO
    """
    level_name = (level or os.getenv("DARKPERIODS_LOG_LEVEL", "INFO")).upper()
    logging.basicConfig(level=getattr(logging, level_name, logging.INFO), format=LOG_FORMAT)
    logger.debug(f"Logging configured at level {level_name}")


def env_int(name: str, default: int) -> int:
    """Read an integer environment variable, falling back to `default` on absence or garbage."""
    raw = os.getenv(name)
    if raw is None:
        return default
    try:
        return int(raw)
    except (ValueError, TypeError):
        logger.warning(f"Ignoring non-integer {name}={raw!r}, using {default}")
        return default


def log_info(message: str, data: Optional[Dict[str, Any]] = None) -> None:
    """
    Log an informational message with optional data.
    """
    logger.debug("=" * 50)
    logger.debug(f"Message: {message}")
    if data:
        logger.debug("Additional data:")
        logger.debug(json.dumps(data, indent=2, cls=NumpyEncoder))
    logger.info(message)
    logger.debug("=" * 50)


def log_error(message: str, error: Exception, data: Optional[Dict[str, Any]] = None) -> None:
    """
    Log an error message with exception details and optional data.
    """
    logger.debug("=" * 50)
    logger.debug(f"Error type: {type(error).__name__}")
    logger.debug(f"Error message: {str(error)}")
    if data:
        logger.debug("Additional data:")
        logger.debug(json.dumps(data, indent=2, cls=NumpyEncoder))
    logger.error(f"{message}: {error}")
    logger.debug("=" * 50)


class NumpyEncoder(json.JSONEncoder):
    """JSON encoder that understands numpy scalars/arrays and complex numbers."""

    def default(self, obj):
        if isinstance(obj, np.integer):
            return int(obj)
        if isinstance(obj, np.floating):
            return float(obj)
        if isinstance(obj, np.ndarray):
            return obj.tolist()
        if isinstance(obj, complex):
            return {"real": obj.real, "imag": obj.imag}
        if isinstance(obj, Path):
            return str(obj)
        return super().default(obj)


def format_float(value: float) -> str:
    """Scientific notation with 17 significant digits, '.' decimal separator."""
    return format(float(value), ".16e")


def write_json(path: Path, payload: Dict[str, Any]) -> Path:
    """Write a JSON artifact (sorted keys, trailing newline) and return its path."""
    path.parent.mkdir(parents=True, exist_ok=True)
    text = json.dumps(payload, indent=2, sort_keys=True, cls=NumpyEncoder)
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(text + "\n")
    logger.debug(f"Wrote JSON artifact {path}")
    return path


def write_csv(
    path: Path,
    columns: Sequence[str],
    rows: Iterable[Sequence[float]],
    header_comments: Optional[List[str]] = None,
) -> Path:
    """
    Write a numeric CSV artifact.

    Args:
        path: Destination file
        columns: Column names written as the first non-comment line
        rows: Numeric rows, formatted with `format_float`
        header_comments: Lines written first, each prefixed with '# '

    Returns:
        Path: The written file
    """
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as handle:
        for comment in header_comments or []:
            handle.write(f"# {comment}\n")
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(columns)
        count = 0
        for row in rows:
            writer.writerow([format_float(v) for v in row])
            count += 1
    logger.debug(f"Wrote {count} CSV rows to {path}")
    return path
