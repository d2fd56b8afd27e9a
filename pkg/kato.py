"""
Perturbative closed forms for the slow decay of P0(t) and the light/dark-period
statistics derived from it. Formulas are coded exactly as printed; the exact
eigensolve (`lambda2_exact`) and the numeric resolvent expressions serve as oracles.
"""
import logging
import math
import sys
from typing import Optional

import numpy as np

from atom import generator_perturbation, generator_unperturbed
from errors import DegenerateRegime, NegativeTime, NonFinite, TooEarly, ZeroDetuning
from matkernel import eigvals, expm_action
from models import AtomParams, ClosedFormPredictions
from nophoton import SpectralCache

logger = logging.getLogger(__name__)

LONGTIME_GATE = 10.0  # p0_longtime needs t >= LONGTIME_GATE / gamma
TRANSIENT_FRACTION = 0.01


def _require_detunings(p: AtomParams) -> None:
    if p.delta3 == 0 or p.delta4 == 0:
        raise ZeroDetuning(f"closed forms divide by delta3 and delta4 (got {p.delta3}, {p.delta4})")


def alpha(p: AtomParams) -> complex:
    _require_detunings(p)
    g, d2, d3, d4, wl = p.gamma, p.delta2, p.delta3, p.delta4, p.omega_l
    real = (
        1
        - d3 / d4
        - wl**2 / (4 * d3**2)
        - d2 / d3
        + 3 * wl**2 / (4 * d3 * d4)
        + g**2 / (4 * d3 * d4)
        + d2 / d4
        - wl**2 * d2 / (2 * d3**2 * d4)
    )
    imag = -(
        g / (2 * d3)
        - g / d4
        + 3 * wl**2 * g / (8 * d3**2 * d4)
        + g * d2 / (2 * d3 * d4)
    )
    return complex(real, imag)


def _dark_bracket(p: AtomParams) -> float:
    g, d2, d3, d4 = p.gamma, p.delta2, p.delta3, p.delta4
    return (
        1
        - 2 * d3 / d4
        + 3 * d3**2 / d4**2
        - 4 * d2 * d3 / d4**2
        + 3 * g**2 / (4 * d4**2)
        + 2 * d2**2 / d4**2
    )


def re_lambda2(p: AtomParams) -> float:
    """Real part of the slow eigenvalue, second order in omega/delta3 (s^-1)."""
    _require_detunings(p)
    prefactor = p.omega**2 * p.gamma / (2 * p.delta3**2)
    return prefactor * _dark_bracket(p) / abs(alpha(p)) ** 2


def lambda3_zeroth(p: AtomParams) -> complex:
    return complex(0.5 * p.gamma, -p.delta4)


def slow_weight(p: AtomParams) -> float:
    """||P_2|1>||^2: the prefactor of the long-time exponential."""
    _require_detunings(p)
    g, d2, d3, d4 = p.gamma, p.delta2, p.delta3, p.delta4
    prefactor = p.omega**2 * p.omega_l**2 / (4 * d3**4)
    bracket = (1 - 3 * d3 / d4 + 2 * d2 / d4) ** 2 + 9 * g**2 / (4 * d4**2)
    return prefactor * bracket / abs(alpha(p)) ** 2


def _longtime(p: AtomParams, t: float) -> float:
    return math.exp(-2.0 * re_lambda2(p) * t) * slow_weight(p)


def p0_longtime(p: AtomParams, t: float) -> float:
    """
    P0(t) for t >> 1/gamma.

    Raises:
        TooEarly: t < 10/gamma
    """
    if t < LONGTIME_GATE / p.gamma:
        raise TooEarly(f"long-time form needs t >= {LONGTIME_GATE}/gamma = {LONGTIME_GATE / p.gamma:.3e} s, got {t:.3e}")
    return _longtime(p, t)


def two_level_generator(p: AtomParams) -> np.ndarray:
    """Lambda_1^(0): the conditional generator of the driven 1s-2p two-level atom."""
    return np.array(
        [
            [0.0, 0.5j * p.omega_l],
            [0.5j * p.omega_l, 0.5 * p.gamma - 1j * p.delta2],
        ],
        dtype=complex,
    )


def p0_shorttime(p: AtomParams, t: float) -> float:
    """Zeroth-order P0(t) = ||exp(-Lambda_1^(0) t)|1>||^2."""
    if t < 0:
        raise NegativeTime(f"t must be >= 0, got {t}")
    psi = expm_action(two_level_generator(p), np.array([1.0, 0.0], dtype=complex), t)
    return float(np.sum(np.abs(psi) ** 2))


def tau_light(p: AtomParams) -> float:
    """Mean photon spacing in a light period (s)."""
    if p.omega_l == 0:
        raise DegenerateRegime("laser Rabi frequency is zero; no light periods")
    return (p.gamma**2 + 2 * p.omega_l**2 + 4 * p.delta2**2) / (p.gamma * p.omega_l**2)


def t_dark(p: AtomParams) -> float:
    """Mean dark-period duration T_D in its printed closed form; equals 1/(2 re_lambda2)."""
    _require_detunings(p)
    if p.omega == 0:
        raise DegenerateRegime("static field is zero; dark periods never end")
    return p.delta3**2 * abs(alpha(p)) ** 2 / (p.omega**2 * p.gamma * _dark_bracket(p))


def t_light_closed(p: AtomParams) -> float:
    """Printed T_L closed form (exp(-2 Re(lambda_2) T0) taken as 1)."""
    _require_detunings(p)
    if p.omega == 0 or p.omega_l == 0:
        raise DegenerateRegime("T_L needs both fields switched on")
    g, d2, d3, d4 = p.gamma, p.delta2, p.delta3, p.delta4
    numerator = 4 * d3**4 * abs(alpha(p)) ** 2 * (g**2 + 2 * p.omega_l**2 + 4 * d2**2)
    denominator = g * p.omega_l**4 * p.omega**2 * ((1 - 3 * d3 / d4 + 2 * d2 / d4) ** 2 + 9 * g**2 / (4 * d4**2))
    return numerator / denominator


def default_t0(p: AtomParams) -> float:
    """Geometric mean of 1/gamma and T_D."""
    return math.sqrt(t_dark(p) / p.gamma)


def _threshold_warnings(p: AtomParams, t0: float, dark: float, p_dark: float) -> list:
    warnings = []
    if not 1.0 / p.gamma < t0 < dark:
        warnings.append(f"t0_range: t0={t0:.3e} s outside (1/gamma, T_D) = ({1.0 / p.gamma:.3e}, {dark:.3e})")
    if t0 < LONGTIME_GATE / p.gamma:
        warnings.append(f"t0_early: t0 < {LONGTIME_GATE}/gamma; long-time form not valid there")
    slowest = 2.0 * float(np.min(eigvals(two_level_generator(p)).real))
    transient = math.exp(-slowest * t0)
    if transient > TRANSIENT_FRACTION * p_dark:
        warnings.append(
            f"t0_transient: two-level transient exp(-{slowest:.3e}*t0)={transient:.3e} "
            f"is not negligible against p={p_dark:.3e}"
        )
    return warnings


def predictions(p: AtomParams, t0: Optional[float] = None) -> ClosedFormPredictions:
    """
    All closed-form period statistics.

    Args:
        p: System parameters
        t0: Dark-period threshold; default sqrt(T_D / gamma)

    Raises:
        ZeroDetuning: delta3 or delta4 is zero
        DegenerateRegime: omega == 0 (T_D infinite) or omega_l == 0, or p underflows to 0 at t0
    """
    logger.debug("=" * 50)
    logger.debug("COMPUTING CLOSED-FORM PREDICTIONS")
    _require_detunings(p)
    if p.omega == 0:
        raise DegenerateRegime("static field is zero; T_D is infinite")

    a = alpha(p)
    rate = re_lambda2(p)
    dark = 1.0 / (2.0 * rate)
    threshold = default_t0(p) if t0 is None else t0
    p_dark = _longtime(p, threshold)
    if p_dark < sys.float_info.min:
        raise DegenerateRegime(
            f"p underflows at t0={threshold:.3e} s (T_D={dark:.3e} s)", {"t0": threshold, "t_dark": dark}
        )
    tau = tau_light(p)
    lam3 = lambda3_zeroth(p)

    warnings = p.regime_warnings() + _threshold_warnings(p, threshold, dark, p_dark)
    for warning in warnings:
        logger.warning(f"Regime: {warning}")

    result = ClosedFormPredictions(
        alpha_real=a.real,
        alpha_imag=a.imag,
        re_lambda2=rate,
        lambda3_zeroth_real=lam3.real,
        lambda3_zeroth_imag=lam3.imag,
        tau_l=tau,
        t_dark=dark,
        t_light=tau / p_dark,
        t_light_asymptotic=t_light_closed(p),
        p_dark=p_dark,
        t0=threshold,
        warnings=warnings,
    )
    logger.debug(f"T_D={result.t_dark:.4e} s, T_L={result.t_light:.4e} s, 1/p={1.0 / result.p_dark:.4e}")
    logger.debug("=" * 50)
    return result


def lambda2_exact(c: SpectralCache) -> complex:
    """Eigenvalue of the generator with the smallest real part."""
    if c.spectral:
        return complex(c.eigenvalues[0])
    return complex(eigvals(c.matrix)[0])


def _reduced_resolvent(p: AtomParams) -> np.ndarray:
    _require_detunings(p)
    lam2 = -1j * p.delta3
    complement = np.eye(4)
    complement[2, 2] = 0.0  # 1 - P_2^(0), P_2^(0) = |3><3|
    try:
        return np.linalg.inv(generator_unperturbed(p) - lam2 * complement)
    except np.linalg.LinAlgError as exc:
        raise NonFinite(f"reduced resolvent is singular: {exc}")


def lambda2_resolvent(p: AtomParams) -> complex:
    """lambda_2^(0) - <3|M1 R M1|3>, evaluated numerically."""
    resolvent = _reduced_resolvent(p)
    m1 = generator_perturbation(p)
    return complex(-1j * p.delta3 - (m1 @ resolvent @ m1)[2, 2])


def slow_weight_resolvent(p: AtomParams) -> float:
    """||P_2|1>||^2 with P_2|1> ~ -P_2^(0) M1 R |1>, evaluated numerically."""
    resolvent = _reduced_resolvent(p)
    m1 = generator_perturbation(p)
    amplitude = -(m1 @ resolvent)[2, 0]
    return float(abs(amplitude) ** 2)
