"""
Monte Carlo handler: simulate a photon trajectory, classify it into light and dark
periods and compare against the closed forms.
"""
import logging
from pathlib import Path
from typing import Dict

import jumps
import kato
from commands.common import base_payload, header_comments, resolve_params
from errors import DegenerateRegime, InvalidParameter, ZeroDetuning
from models import RunConfig
from nophoton import build_cache
from utils import log_info, write_csv, write_json

logger = logging.getLogger(__name__)

MIN_EXPECTED_DARK = 10.0


def handle_simulate(config: RunConfig) -> Dict[str, Path]:
    """intervals.csv + period_stats.json (stats, predictions, comparison report)"""
    logger.debug("=" * 50)
    logger.debug("SIMULATE")
    params = resolve_params(config)
    warnings = params.regime_warnings()

    prediction = None
    try:
        prediction = kato.predictions(params, t0=config.t0)
        warnings.extend(prediction.warnings)
        expected_dark = prediction.p_dark * config.n_intervals
        if expected_dark < MIN_EXPECTED_DARK:
            warnings.append(
                f"few_dark_periods: n*p = {expected_dark:.2f}; about {MIN_EXPECTED_DARK / prediction.p_dark:.3g} intervals needed"
            )
    except (ZeroDetuning, DegenerateRegime) as exc:
        if config.t0 is None:
            raise InvalidParameter(f"no default t0 without closed forms ({exc.detail}); pass --t0")
        warnings.append(f"predictions_unavailable: {exc.detail}")
    t0 = config.t0 if config.t0 is not None else prediction.t0

    cache = build_cache(params)
    trajectory = jumps.simulate(cache, config.n_intervals, config.seed, workers=config.workers)
    stats = jumps.classify(trajectory, t0)

    intervals_path = write_csv(
        config.out / "intervals.csv",
        ["interval_s"],
        ((value,) for value in trajectory.intervals),
        header_comments(config, params) + [f"n_intervals={config.n_intervals}"],
    )

    payload = base_payload(config, params, warnings)
    payload.update(
        {
            "n_intervals": config.n_intervals,
            "duration": trajectory.duration,
            "period_stats": stats.model_dump(),
            "predictions": prediction.model_dump() if prediction else None,
            "comparison": jumps.compare(stats, prediction).model_dump() if prediction else None,
        }
    )
    stats_path = write_json(config.out / "period_stats.json", payload)
    log_info(
        "Simulation written",
        {"n_dark": stats.n_dark, "n_light": stats.n_light, "p_hat": stats.p_hat, "path": stats_path},
    )
    return {"intervals": intervals_path, "period_stats": stats_path}
