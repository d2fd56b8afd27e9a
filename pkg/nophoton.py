"""
No-photon probability P0(t) = ||exp(-M t)|1>||^2, the photon waiting-time density
w(t) = -dP0/dt, and deterministic inverse-CDF sampling of photon intervals.

The amplitude is expanded once into modes, exp(-M t)|1> = sum_k exp(-lambda_k t) v_k,
so every later evaluation is a handful of exponentials. Randomness never enters here:
callers pass the uniforms.
"""
import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from atom import generator
from errors import InvalidParameter, NearDefective, NegativeTime, NoConvergence, NonFinite
from matkernel import as_matrix, eig, expm_action
from models import AtomParams

logger = logging.getLogger(__name__)

MAX_ITERATIONS = 200
TIME_RTOL = 1e-10
CHUNK = 1 << 16


@dataclass(frozen=True)
class SpectralCache:
    """
    Mode expansion of exp(-M t)|1>.

    When the eigenvector matrix is too ill-conditioned `spectral` is False, the
    eigen-fields are None and every evaluation goes through `expm_action`.
    """
    matrix: np.ndarray
    gamma: float
    spectral: bool
    eigenvalues: Optional[np.ndarray] = None
    modes: Optional[np.ndarray] = None  # row k is v_k
    params: Optional[AtomParams] = None

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]

    def slow_mode(self) -> Tuple[complex, np.ndarray]:
        """Eigenvalue with the smallest real part and its mode vector v_k."""
        if not self.spectral:
            raise NearDefective("no mode expansion available (fallback cache)")
        return complex(self.eigenvalues[0]), self.modes[0]


def build_cache(p: AtomParams) -> SpectralCache:
    """Mode expansion for the four-level generator of `p`."""
    return build_cache_from_matrix(generator(p), p.gamma, params=p)


def build_cache_from_matrix(matrix, gamma: float, params: Optional[AtomParams] = None) -> SpectralCache:
    """
    Mode expansion for any generator whose first basis state is the ground state.

    Args:
        matrix: n x n generator M
        gamma: Reference rate; sets the initial sampling bracket and the sign slack
        params: Parameters the matrix came from, kept for provenance
    """
    m = as_matrix(matrix)
    n = m.shape[0]
    initial = np.zeros(n, dtype=complex)
    initial[0] = 1.0

    try:
        system = eig(m)
    except NearDefective as exc:
        logger.warning(f"Falling back to expm_action: {exc.detail}")
        return SpectralCache(matrix=m, gamma=gamma, spectral=False, params=params)

    coefficients = np.linalg.solve(system.eigenvectors, initial)
    modes = (system.eigenvectors * coefficients).T
    if not np.all(np.isfinite(modes)):
        raise NonFinite("mode vectors are not finite")

    mismatch = float(np.max(np.abs(modes.sum(axis=0) - initial)))
    if mismatch > 1e-10:
        logger.warning(f"Mode expansion reproduces |1> only to {mismatch:.2e}")
    eigenvalues = system.eigenvalues.copy()
    lowest = float(np.min(eigenvalues.real))
    if lowest < -1e-12 * gamma:
        logger.warning(f"Generator has an eigenvalue with Re = {lowest:.3e} < 0")
    else:
        # rounding-level negative decay rates would make P0 grow at very large t
        eigenvalues.real = np.maximum(eigenvalues.real, 0.0)

    logger.debug(f"Spectral cache built: eigenvalues={eigenvalues}, condition={system.condition:.3e}")
    return SpectralCache(
        matrix=m,
        gamma=gamma,
        spectral=True,
        eigenvalues=eigenvalues,
        modes=modes,
        params=params,
    )


def _times(t) -> np.ndarray:
    times = np.asarray(t, dtype=float)
    if np.any(times < 0) or np.any(np.isnan(times)):
        raise NegativeTime("times must be >= 0")
    return times


def _amplitudes(c: SpectralCache, times: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """psi(t) and dpsi/dt as (len(times), n) arrays."""
    flat = times.reshape(-1)
    if c.spectral:
        factors = np.exp(-np.outer(flat, c.eigenvalues))
        psi = factors @ c.modes
        dpsi = -(factors * c.eigenvalues) @ c.modes
        return psi, dpsi

    initial = np.zeros(c.dimension, dtype=complex)
    initial[0] = 1.0
    psi = np.array([expm_action(c.matrix, initial, float(t)) for t in flat]).reshape(-1, c.dimension)
    dpsi = -psi @ c.matrix.T
    return psi, dpsi


def _p0_values(c: SpectralCache, times: np.ndarray) -> np.ndarray:
    psi, _ = _amplitudes(c, times)
    return np.sum(np.abs(psi) ** 2, axis=1)


def _density_values(c: SpectralCache, times: np.ndarray) -> np.ndarray:
    psi, dpsi = _amplitudes(c, times)
    return -2.0 * np.sum(np.real(np.conj(psi) * dpsi), axis=1)


def _shaped(values: np.ndarray, times: np.ndarray):
    if times.ndim == 0:
        return float(values[0])
    return values.reshape(times.shape)


def p0(c: SpectralCache, t):
    """No-photon probability at t (scalar or array of seconds)."""
    times = _times(t)
    return _shaped(_p0_values(c, times), times)


def waiting_density(c: SpectralCache, t):
    """w(t) = -dP0/dt from the analytic derivative of the mode sum (s^-1)."""
    times = _times(t)
    return _shaped(_density_values(c, times), times)


def p0_curve(c: SpectralCache, t_min: float, t_max: float, n_points: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(t, P0, w) on a log-spaced grid."""
    if not 0 < t_min < t_max:
        raise InvalidParameter(f"need 0 < t_min < t_max, got {t_min}, {t_max}")
    grid = np.geomspace(t_min, t_max, n_points)
    return grid, _p0_values(c, grid), _density_values(c, grid)


def _invert(c: SpectralCache, u: np.ndarray) -> np.ndarray:
    lo = np.zeros_like(u)
    hi = np.full_like(u, 1.0 / c.gamma)
    iterations = 0

    # bracket: double hi until P0(hi) <= u
    pending = _p0_values(c, hi) > u
    while pending.any():
        iterations += 1
        if iterations > MAX_ITERATIONS:
            raise NoConvergence(
                f"no bracket after {MAX_ITERATIONS} doublings; P0 does not fall to u",
                {"u_min": float(u[pending].min())},
            )
        lo[pending] = hi[pending]
        hi[pending] *= 2.0
        pending[pending] = _p0_values(c, hi[pending]) > u[pending]

    # bisect to a relative time tolerance
    active = (hi - lo) > TIME_RTOL * hi
    while active.any():
        iterations += 1
        if iterations > MAX_ITERATIONS:
            raise NoConvergence(f"bisection did not converge in {MAX_ITERATIONS} iterations")
        idx = np.flatnonzero(active)
        mid = 0.5 * (lo[idx] + hi[idx])
        above = _p0_values(c, mid) > u[idx]
        lo[idx[above]] = mid[above]
        hi[idx[~above]] = mid[~above]
        active[idx] = (hi[idx] - lo[idx]) > TIME_RTOL * hi[idx]

    # one Newton step, kept inside the final bracket
    t = 0.5 * (lo + hi)
    density = _density_values(c, t)
    residual = _p0_values(c, t) - u
    with np.errstate(divide="ignore", invalid="ignore"):
        candidate = t + residual / density
    accept = (density > 0) & (candidate >= lo) & (candidate <= hi)
    return np.where(accept, candidate, t)


def sample_intervals(c: SpectralCache, u) -> np.ndarray:
    """
    Invert P0 elementwise: return t with P0(t) = u for every u in (0, 1).

    Raises:
        NoConvergence: P0 never falls below u (e.g. laser off) or bisection stalls
    """
    uniforms = np.asarray(u, dtype=float).reshape(-1)
    if np.any(~((uniforms > 0) & (uniforms < 1))):
        raise InvalidParameter("uniforms must lie strictly inside (0, 1)")
    out = np.empty_like(uniforms)
    for start in range(0, uniforms.size, CHUNK):
        stop = start + CHUNK
        out[start:stop] = _invert(c, uniforms[start:stop])
    return out


def sample_interval(c: SpectralCache, u: float) -> float:
    """Scalar form of `sample_intervals`."""
    return float(sample_intervals(c, [u])[0])
