"""
Handlers that tabulate curves: the no-photon probability and the rate-model populations.
"""
import logging
from pathlib import Path
from typing import Dict

import kato
import ratemodel
from commands.common import base_payload, header_comments, resolve_params
from errors import DegenerateRates
from models import RateParams, RunConfig
from nophoton import build_cache, p0_curve
from utils import log_info, write_csv, write_json

logger = logging.getLogger(__name__)

DEFAULT_T_MIN = 1e-2  # in units of 1/gamma
DEFAULT_SPAN = 10.0  # t_max = DEFAULT_SPAN / (2 Re lambda_2)


def handle_p0(config: RunConfig) -> Dict[str, Path]:
    """(t, P0, w) on a log grid -> p0.csv"""
    logger.debug("=" * 50)
    logger.debug("P0 CURVE")
    params = resolve_params(config)
    cache = build_cache(params)
    grid = config.grid

    t_min = grid.t_min if grid.t_min is not None else DEFAULT_T_MIN / params.gamma
    t_max = grid.t_max
    if t_max is None:
        slow_rate = 2.0 * kato.lambda2_exact(cache).real
        t_max = DEFAULT_SPAN / slow_rate if slow_rate > 0 else 100.0 / params.gamma
    times, probabilities, densities = p0_curve(cache, t_min, t_max, grid.n_points)

    path = write_csv(
        config.out / "p0.csv",
        ["t", "p0", "w"],
        zip(times, probabilities, densities),
        header_comments(config, params),
    )
    log_info("P0 curve written", {"points": grid.n_points, "t_max": t_max, "path": path})
    return {"p0": path}


def handle_ratemodel(config: RunConfig) -> Dict[str, Path]:
    """RK4 populations -> populations.csv, decay constants and crossing time -> ratemodel.json"""
    logger.debug("=" * 50)
    logger.debug("RATE MODEL")
    rate = config.rate
    rp = RateParams(gamma=rate.gamma, r_b=rate.r_b, r_r=rate.r_r)
    mu1, mu2, mu3 = ratemodel.mus(rp)
    t_end = rate.t_end if rate.t_end is not None else 20.0 / rp.gamma
    dt = rate.dt if rate.dt is not None else 0.05 / mu1

    trajectory = ratemodel.integrate(rp, t_end, dt, feedback=rate.feedback)
    populations = trajectory.populations
    rows = zip(trajectory.times, populations[:, 0], populations[:, 1], populations[:, 2], trajectory.totals)
    csv_path = write_csv(config.out / "populations.csv", ["t", "p1", "p2", "p3", "sum"], rows, header_comments(config, rp))

    warnings = rp.regime_warnings()
    max_deviation = None
    try:
        closed = ratemodel.closed_form_curve(rp, trajectory.times)
        max_deviation = float(abs(closed - populations).max())
    except DegenerateRates as exc:
        warnings.append(f"closed_form_skipped: {exc.detail}")
    crossing = ratemodel.crossing_time(trajectory)
    if crossing is None:
        warnings.append("no_crossing: P3 never exceeds both P1 and P2 before t_end")

    payload = base_payload(config, rp, warnings)
    payload.update(
        {
            "mus": [mu1, mu2, mu3],
            "t_end": t_end,
            "dt": float(trajectory.times[1] - trajectory.times[0]),
            "feedback": rate.feedback,
            "crossing_time": crossing,
            "closed_form_max_deviation": max_deviation,
            "final_conditional": ratemodel.conditional(trajectory.final).model_dump(),
        }
    )
    json_path = write_json(config.out / "ratemodel.json", payload)
    log_info("Rate model written", {"mus": [mu1, mu2, mu3], "crossing_time": crossing})
    return {"populations": csv_path, "ratemodel": json_path}
