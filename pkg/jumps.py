"""
Monte Carlo photon trajectories as a renewal process, and the light/dark-period
statistics extracted from them.

Random numbers follow one fixed contract so that any split of the work reproduces
a single run bit for bit: uniform number i of seed s is built from output word i
of numpy's Philox-4x64 bit generator keyed by s (see `uniforms`).
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from errors import DefectiveDistribution, InvalidParameter, NoPhotons
from models import AtomParams, ClosedFormPredictions, ComparisonEntry, ComparisonReport, PeriodStats
from nophoton import SpectralCache, sample_intervals

logger = logging.getLogger(__name__)

PHILOX_WORDS = 4  # 64-bit words per Philox-4x64 counter block
MANTISSA_SHIFT = 12
MANTISSA_SCALE = 2.0**52
BLOCK = 1 << 18  # uniforms drawn per sampling call
UPPER_BOUND_FACTOR = 3.0  # zero events in n trials: p < 3/n at 95%


@dataclass(frozen=True)
class Trajectory:
    """One realization: photon intervals and the cumulative photon times."""
    intervals: np.ndarray
    seed: int
    params: Optional[AtomParams] = None

    @property
    def times(self) -> np.ndarray:
        return np.cumsum(self.intervals)

    @property
    def duration(self) -> float:
        return float(self.intervals.sum())

    def __len__(self) -> int:
        return int(self.intervals.size)


def uniforms(seed: int, start: int, count: int) -> np.ndarray:
    """
    Uniforms u_start .. u_{start+count-1} of stream `seed`, each strictly inside (0, 1).

    u_i = ((w_i >> 12) + 0.5) / 2**52 where w_i is the i-th 64-bit word of
    Philox(key=seed). Word i lives in counter block i // 4, so a stream can be
    entered at any index without generating the words before it.
    """
    if start < 0 or count < 0:
        raise InvalidParameter(f"start and count must be >= 0, got {start}, {count}")
    block, offset = divmod(start, PHILOX_WORDS)
    bits = np.random.Philox(key=seed, counter=block)
    raw = bits.random_raw(offset + count)[offset:]
    return ((raw >> np.uint64(MANTISSA_SHIFT)).astype(np.float64) + 0.5) / MANTISSA_SCALE


def partition_bounds(n: int, parts: int) -> List[Tuple[int, int]]:
    """Split [0, n) into `parts` contiguous index ranges, the first ones one longer."""
    parts = max(1, min(parts, n))
    size, extra = divmod(n, parts)
    bounds = []
    start = 0
    for k in range(parts):
        stop = start + size + (1 if k < extra else 0)
        bounds.append((start, stop))
        start = stop
    return bounds


def _simulate_range(c: SpectralCache, seed: int, start: int, stop: int) -> np.ndarray:
    out = np.empty(stop - start)
    for offset in range(start, stop, BLOCK):
        end = min(offset + BLOCK, stop)
        out[offset - start:end - start] = sample_intervals(c, uniforms(seed, offset, end - offset))
    return out


def simulate(c: SpectralCache, n_intervals: int, seed: int, workers: int = 1) -> Trajectory:
    """
    Draw `n_intervals` i.i.d. photon intervals from the waiting density of `c`.

    Args:
        c: Spectral cache of the generator
        n_intervals: Number of intervals (>= 1)
        seed: 64-bit stream key
        workers: Concurrent streams; each owns a contiguous index range

    Raises:
        DefectiveDistribution: the ground state is not coupled (laser off), P0 never decays
    """
    if n_intervals < 1:
        raise InvalidParameter(f"n_intervals must be >= 1, got {n_intervals}")
    if not np.any(c.matrix[0, 1:] != 0):
        raise DefectiveDistribution("ground state is uncoupled; P0 stays at 1 and no photon is ever emitted")

    bounds = partition_bounds(n_intervals, workers)
    logger.debug("=" * 50)
    logger.debug(f"Simulating {n_intervals} intervals, seed={seed}, partitions={bounds}")
    if len(bounds) == 1:
        intervals = _simulate_range(c, seed, 0, n_intervals)
    else:
        with ThreadPoolExecutor(max_workers=len(bounds)) as pool:
            chunks = list(pool.map(lambda b: _simulate_range(c, seed, b[0], b[1]), bounds))
        intervals = np.concatenate(chunks)
    logger.debug(f"Simulated duration {intervals.sum():.4e} s")
    logger.debug("=" * 50)
    return Trajectory(intervals=intervals, seed=seed, params=c.params)


def _mean_and_stderr(values: np.ndarray) -> Tuple[Optional[float], Optional[float]]:
    if values.size == 0:
        return None, None
    mean = float(values.mean())
    if values.size < 2:
        return mean, None
    return mean, float(values.std(ddof=1) / math.sqrt(values.size))


def light_durations(intervals: np.ndarray, t0: float) -> np.ndarray:
    """Durations of the maximal runs of intervals <= t0, in order."""
    dark = intervals > t0
    labels = np.cumsum(dark)
    light = ~dark
    counts = np.bincount(labels[light], minlength=labels[-1] + 1 if labels.size else 0)
    sums = np.bincount(labels[light], weights=intervals[light], minlength=counts.size)
    return sums[counts > 0]


def classify(traj: Trajectory, t0: float) -> PeriodStats:
    """
    Split a trajectory into dark periods (single intervals longer than t0) and light
    periods (maximal runs of shorter intervals).

    Raises:
        NoPhotons: the trajectory is empty
    """
    if not t0 > 0:
        raise InvalidParameter(f"t0 must be > 0, got {t0}")
    intervals = np.asarray(traj.intervals, dtype=float)
    n = intervals.size
    if n == 0:
        raise NoPhotons("trajectory has no photon intervals")

    dark_intervals = intervals[intervals > t0]
    n_dark = int(dark_intervals.size)
    mean_dark, mean_dark_stderr = _mean_and_stderr(dark_intervals)

    tail_rate = tail_rate_stderr = None
    if n_dark:
        excess = float((dark_intervals - t0).mean())
        if excess > 0:
            tail_rate = 1.0 / excess
            tail_rate_stderr = tail_rate / math.sqrt(n_dark)

    durations = light_durations(intervals, t0)
    mean_light, mean_light_stderr = _mean_and_stderr(durations)
    p_hat = n_dark / n

    return PeriodStats(
        n_intervals=n,
        n_dark=n_dark,
        n_light=int(durations.size),
        t0=t0,
        mean_dark=mean_dark,
        mean_dark_stderr=mean_dark_stderr,
        mean_light=mean_light,
        mean_light_stderr=mean_light_stderr,
        p_hat=p_hat,
        p_hat_stderr=math.sqrt(p_hat * (1.0 - p_hat) / n),
        tail_rate=tail_rate,
        tail_rate_stderr=tail_rate_stderr,
    )


def _entry(quantity: str, observed: Optional[float], stderr: Optional[float], predicted: float,
           z_threshold: float, note: Optional[str] = None) -> ComparisonEntry:
    if observed is None:
        return ComparisonEntry(quantity=quantity, predicted=predicted, note=note or "no observations")
    deviation = (observed - predicted) / predicted if predicted else None
    z = (observed - predicted) / stderr if stderr else None
    return ComparisonEntry(
        quantity=quantity,
        observed=observed,
        predicted=predicted,
        relative_deviation=deviation,
        z_score=z,
        flagged=z is not None and abs(z) > z_threshold,
        note=note,
    )


def compare(stats: PeriodStats, pred: ClosedFormPredictions, z_threshold: float = 3.0) -> ComparisonReport:
    """Relative deviations and z-scores of the empirical statistics against the closed forms."""
    entries = [
        _entry("mean_light", stats.mean_light, stats.mean_light_stderr, pred.t_light, z_threshold),
        _entry("tail_rate", stats.tail_rate, stats.tail_rate_stderr, 2.0 * pred.re_lambda2, z_threshold),
    ]

    n = stats.n_intervals
    threshold_note = None
    if not math.isclose(stats.t0, pred.t0, rel_tol=1e-12):
        threshold_note = f"classified at t0={stats.t0:.4e} s, predicted at t0={pred.t0:.4e} s"
    if stats.n_dark == 0:
        bound = UPPER_BOUND_FACTOR / n
        entries.append(
            ComparisonEntry(
                quantity="p_hat",
                observed=0.0,
                predicted=pred.p_dark,
                flagged=pred.p_dark > bound,
                note=f"upper bound only: no dark periods, p < {bound:.3e} at 95%",
            )
        )
    else:
        # binomial error under the predicted p
        stderr = math.sqrt(pred.p_dark * (1.0 - pred.p_dark) / n)
        entries.append(_entry("p_hat", stats.p_hat, stderr, pred.p_dark, z_threshold, threshold_note))

    report = ComparisonReport(z_threshold=z_threshold, entries=entries)
    for entry in report.entries:
        if entry.flagged:
            logger.warning(f"Deviation in {entry.quantity}: observed={entry.observed}, predicted={entry.predicted}, z={entry.z_score}")
    return report
