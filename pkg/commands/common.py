"""
Helpers shared by the subcommand handlers: parameter resolution and the provenance
block every artifact carries.
"""
import json
import logging
from typing import Any, Dict, Iterable, List

from pydantic import BaseModel

from atom import HE4, from_physical
from errors import InvalidParameter
from models import AtomParams, KnownParams, RunConfig
from utils import TOOL_NAME, TOOL_VERSION

logger = logging.getLogger(__name__)


def resolve_params(config: RunConfig) -> AtomParams:
    """AtomParams from either the `physical` or the `params` block."""
    if config.physical is not None:
        physical = config.physical
        return from_physical(HE4, physical.field_v_per_m, physical.laser_field_v_per_m, physical.delta2)
    if config.params is None:
        raise InvalidParameter(f"mode '{config.mode}' needs 'params' or 'physical'")
    return config.params.resolve()


def resolve_known(config: RunConfig) -> KnownParams:
    """Everything but delta3, for the Lamb-shift inversion."""
    if config.physical is not None:
        return KnownParams.from_params(resolve_params(config))
    if config.params is None:
        raise InvalidParameter(f"mode '{config.mode}' needs 'params' or 'physical'")
    return config.params.resolve_known()


def unique(warnings: Iterable[str]) -> List[str]:
    return list(dict.fromkeys(warnings))


def base_payload(config: RunConfig, params: BaseModel, warnings: Iterable[str] = ()) -> Dict[str, Any]:
    """Provenance common to all JSON artifacts."""
    return {
        "tool": TOOL_NAME,
        "version": TOOL_VERSION,
        "mode": config.mode,
        "seed": config.seed,
        "params": params.model_dump(),
        "warnings": unique(warnings),
    }


def header_comments(config: RunConfig, params: BaseModel) -> List[str]:
    """Comment lines opening every CSV artifact."""
    return [
        f"{TOOL_NAME} {TOOL_VERSION}",
        f"mode={config.mode} seed={config.seed}",
        "params=" + json.dumps(params.model_dump(), sort_keys=True),
    ]
