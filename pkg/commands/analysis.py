"""
Handlers for the closed-form, exact-spectrum and inversion subcommands.
"""
import logging
from pathlib import Path
from typing import Dict, Optional

import numpy as np

import kato
import lambshift
from commands.common import base_payload, resolve_known, resolve_params
from errors import DegenerateRegime, InvalidParameter, NearDefective, ZeroDetuning
from matkernel import eigvals
from models import TWO_PI, RunConfig
from nophoton import build_cache
from utils import log_info, write_json

logger = logging.getLogger(__name__)


def _relative(approx: float, exact: float) -> Optional[float]:
    return (approx - exact) / exact if exact else None


def handle_predict(config: RunConfig) -> Dict[str, Path]:
    """Closed-form statistics -> predict.json"""
    logger.debug("=" * 50)
    logger.debug("PREDICT")
    params = resolve_params(config)
    prediction = kato.predictions(params, t0=config.t0)

    payload = base_payload(config, params, prediction.warnings)
    payload["in_regime"] = params.in_regime
    payload["predictions"] = prediction.model_dump()
    path = write_json(config.out / "predict.json", payload)
    log_info("Closed-form predictions written", {"t_dark": prediction.t_dark, "t_light": prediction.t_light, "path": path})
    return {"predict": path}


def handle_exact(config: RunConfig) -> Dict[str, Path]:
    """Eigenvalues of M, the exact slow eigenvalue and its perturbative deltas -> exact.json"""
    logger.debug("=" * 50)
    logger.debug("EXACT SPECTRUM")
    params = resolve_params(config)
    cache = build_cache(params)
    spectrum = eigvals(cache.matrix)
    lambda2 = kato.lambda2_exact(cache)
    warnings = params.regime_warnings()

    exact = {
        "eigenvalues": [complex(v) for v in spectrum],
        "lambda2_exact": lambda2,
        "spectral": cache.spectral,
    }
    try:
        _, slow_vector = cache.slow_mode()
        exact["slow_weight_exact"] = float(np.vdot(slow_vector, slow_vector).real)
    except NearDefective:
        warnings.append("near_defective: mode expansion unavailable, slow weight not reported")

    perturbative = {}
    deltas = {}
    try:
        re_lambda2 = kato.re_lambda2(params)
        resolvent = kato.lambda2_resolvent(params)
        weight = kato.slow_weight(params)
        lambda3 = kato.lambda3_zeroth(params)
        lambda3_exact = complex(spectrum[np.argmin(np.abs(spectrum - lambda3))])

        perturbative = {
            "re_lambda2": re_lambda2,
            "lambda2_resolvent": resolvent,
            "lambda3_zeroth": lambda3,
            "slow_weight": weight,
            "slow_weight_resolvent": kato.slow_weight_resolvent(params),
        }
        deltas = {
            "re_lambda2": _relative(re_lambda2, lambda2.real),
            "re_lambda2_resolvent": _relative(resolvent.real, lambda2.real),
            "lambda3_zeroth": abs(lambda3 - lambda3_exact) / abs(lambda3_exact),
        }
        if "slow_weight_exact" in exact:
            deltas["slow_weight"] = _relative(weight, exact["slow_weight_exact"])
    except (ZeroDetuning, DegenerateRegime) as exc:
        warnings.append(f"perturbative_skipped: {exc.detail}")

    payload = base_payload(config, params, warnings)
    payload.update({"exact": exact, "perturbative": perturbative, "relative_deltas": deltas})
    path = write_json(config.out / "exact.json", payload)
    log_info("Exact spectrum written", {"lambda2_exact": lambda2, "path": path})
    return {"exact": path}


def handle_invert_lamb(config: RunConfig) -> Dict[str, Path]:
    """delta3 candidates for a measured T_D -> inversion.json"""
    logger.debug("=" * 50)
    logger.debug("LAMB-SHIFT INVERSION")
    if config.td is None:
        raise InvalidParameter("invert-lamb needs a measured T_D ('td' or --td)")
    known = resolve_known(config)
    result = lambshift.invert_td(config.td, known)

    payload = base_payload(config, known)
    payload["inversion"] = result.model_dump()
    # delta3 = delta2 - 2*pi*L
    payload["lamb_shift_hz"] = [(known.delta2 - c.delta3) / TWO_PI for c in result.admissible]
    path = write_json(config.out / "inversion.json", payload)
    log_info("Inversion written", {"admissible": [c.delta3 for c in result.admissible], "path": path})
    return {"inversion": path}
