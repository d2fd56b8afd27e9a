"""
Rate-equation model of the emission-free subensemble: ground state |1> (1s), short-lived
|2> (2p) and metastable |3> (2s), with stimulated rates R_B (1s<->2p) and R_R (2p<->2s).
P_j(t) is the probability of no photon until t and the atom in |j>.
"""
import logging
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from errors import DegenerateRates, InvalidParameter, NegativeTime, StepTooLarge
from models import RateParams, RateState

logger = logging.getLogger(__name__)

DEGENERACY_RTOL = 1e-12
MAX_STEP_FACTOR = 0.1  # dt <= MAX_STEP_FACTOR / mu_1


@dataclass(frozen=True)
class RateTrajectory:
    """Fixed-step solution: times (T,) and populations (T, 3) in the order P1, P2, P3."""
    times: np.ndarray
    populations: np.ndarray
    feedback: bool

    def __len__(self) -> int:
        return int(self.times.size)

    @property
    def totals(self) -> np.ndarray:
        return self.populations.sum(axis=1)

    def state(self, index: int) -> RateState:
        p1, p2, p3 = (float(v) for v in self.populations[index])
        return RateState(t=float(self.times[index]), p1=p1, p2=p2, p3=p3)

    @property
    def final(self) -> RateState:
        return self.state(-1)


def mus(rp: RateParams) -> Tuple[float, float, float]:
    """Decay constants mu_1 > mu_2 >= mu_3 of the closed-form populations (s^-1)."""
    total = rp.gamma + rp.r_r + 2.0 * rp.r_b
    root = math.sqrt((rp.gamma + rp.r_r) ** 2 + 4.0 * rp.r_b**2)
    mu1 = 0.5 * (total + root)
    # mu_1*mu_2 = R_B(gamma + R_R)
    mu2 = rp.r_b * (rp.gamma + rp.r_r) / mu1
    return mu1, mu2, rp.r_r


def rate_matrix(rp: RateParams, feedback: bool = True) -> np.ndarray:
    """A with dP/dt = A P. feedback=False drops the R_R*P3 return into P2."""
    return np.array(
        [
            [-rp.r_b, rp.r_b, 0.0],
            [rp.r_b, -(rp.gamma + rp.r_b + rp.r_r), rp.r_r if feedback else 0.0],
            [0.0, rp.r_r, -rp.r_r],
        ]
    )


def rhs(rp: RateParams, populations, feedback: bool = True) -> np.ndarray:
    return rate_matrix(rp, feedback) @ np.asarray(populations, dtype=float)


def _closed_form_arrays(rp: RateParams, times: np.ndarray) -> np.ndarray:
    mu1, mu2, mu3 = mus(rp)
    gap = mu1 - mu2
    if abs(gap) < DEGENERACY_RTOL * mu1:
        raise DegenerateRates(f"mu_1 - mu_2 = {gap:.3e} is too small for the closed forms")

    e1 = np.exp(-mu1 * times)
    e2 = np.exp(-mu2 * times)
    e3 = np.exp(-mu3 * times)
    p1 = e2 * (mu1 - rp.r_b) / gap - e1 * (mu2 - rp.r_b) / gap
    p2 = rp.r_b * (e2 - e1) / gap

    coupling = rp.r_r * rp.r_b
    if coupling == 0:
        p3 = np.zeros_like(times)
    else:
        d13, d23 = mu1 - mu3, mu2 - mu3
        if abs(d13) < DEGENERACY_RTOL * mu1 or abs(d23) < DEGENERACY_RTOL * mu1:
            raise DegenerateRates(f"mu_3 coincides with mu_1 or mu_2 (mu={mu1:.3e}, {mu2:.3e}, {mu3:.3e})")
        p3 = (
            coupling / gap * (e1 / d13 - e2 / d23)
            + e3 * (coupling / (d23 * gap) - coupling / (d13 * gap))
        )
    return np.stack([p1, p2, p3], axis=-1)


def closed_form(rp: RateParams, t: float) -> RateState:
    """
    Perturbative populations (R_R << R_B, gamma) as printed.

    Raises:
        DegenerateRates: |mu_1 - mu_2| < 1e-12 mu_1
    """
    if t < 0:
        raise NegativeTime(f"t must be >= 0, got {t}")
    p1, p2, p3 = (float(v) for v in _closed_form_arrays(rp, np.array([float(t)]))[0])
    return RateState(t=float(t), p1=p1, p2=p2, p3=p3)


def closed_form_curve(rp: RateParams, times) -> np.ndarray:
    """Closed-form populations on a time grid, shape (T, 3)."""
    grid = np.asarray(times, dtype=float)
    if np.any(grid < 0):
        raise NegativeTime("times must be >= 0")
    return _closed_form_arrays(rp, grid)


def integrate(rp: RateParams, t_end: float, dt: float, feedback: bool = True) -> RateTrajectory:
    """
    Classical RK4 from (1, 0, 0) on a uniform grid ending exactly at t_end.

    The step used is t_end / ceil(t_end / dt), never larger than `dt`.

    Raises:
        StepTooLarge: dt > 0.1 / mu_1
    """
    if not t_end > 0 or not dt > 0:
        raise InvalidParameter(f"t_end and dt must be > 0, got {t_end}, {dt}")
    mu1 = mus(rp)[0]
    if dt > MAX_STEP_FACTOR / mu1:
        raise StepTooLarge(f"dt={dt:.3e} exceeds {MAX_STEP_FACTOR}/mu_1 = {MAX_STEP_FACTOR / mu1:.3e}")

    n_steps = int(math.ceil(t_end / dt))
    h = t_end / n_steps
    a = rate_matrix(rp, feedback)
    times = np.linspace(0.0, t_end, n_steps + 1)
    populations = np.empty((n_steps + 1, 3))
    y = np.array([1.0, 0.0, 0.0])
    populations[0] = y
    for i in range(1, n_steps + 1):
        k1 = a @ y
        k2 = a @ (y + 0.5 * h * k1)
        k3 = a @ (y + 0.5 * h * k2)
        k4 = a @ (y + h * k3)
        y = y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        populations[i] = y

    logger.debug(f"RK4: {n_steps} steps of {h:.3e} s, final populations {y}")
    return RateTrajectory(times=times, populations=populations, feedback=feedback)


def conditional(state: RateState) -> RateState:
    """Populations of the emission-free subensemble normalized to one."""
    total = state.total
    if not total > 0:
        raise InvalidParameter("no weight left in the emission-free subensemble")
    return RateState(t=state.t, p1=state.p1 / total, p2=state.p2 / total, p3=state.p3 / total)


def crossing_time(traj: RateTrajectory) -> Optional[float]:
    """First grid time at which P3 exceeds both P1 and P2; None if it never does."""
    p1, p2, p3 = traj.populations.T
    dominant = np.flatnonzero((p3 > p1) & (p3 > p2))
    if dominant.size == 0:
        return None
    return float(traj.times[dominant[0]])
