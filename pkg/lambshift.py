"""
Inverse problem: recover the detuning delta3 (and with it the Lamb shift) from a
measured mean dark-period duration T_D.

Clearing denominators in T_D(x) = x^2 |alpha(x)|^2 / (omega^2 gamma D(x)), x = delta3,
gives a real degree-6 polynomial whose real roots are the candidates. Coefficients are
built in units of gamma (x = delta3 / gamma) so they stay O(1) for any system.
"""
import logging

import numpy as np

from errors import InvalidParameter, NoAdmissibleRoot, ZeroDetuning, ZeroOmega
from kato import t_dark
from matkernel import polyroots
from models import InversionResult, KnownParams, RootCandidate

logger = logging.getLogger(__name__)

IMAG_RTOL = 1e-6
RESIDUAL_RTOL = 1e-6


def _scaled(known: KnownParams):
    g = known.gamma
    if known.delta4 == 0:
        raise ZeroDetuning("delta4 must be nonzero")
    if known.omega == 0:
        raise ZeroOmega("T_D does not depend on delta3 when the static field is off")
    return known.delta2 / g, known.delta4 / g, known.omega / g, known.omega_l / g


def td_polynomial(td: float, known: KnownParams) -> np.ndarray:
    """
    Real coefficients (highest degree first) of td*omega^2*gamma*x^2*D(x) - |x^2 alpha(x)|^2
    in the scaled variable x = delta3 / gamma.

    Raises:
        ZeroOmega: omega == 0
        InvalidParameter: td <= 0
    """
    if not td > 0:
        raise InvalidParameter(f"td must be > 0, got {td}")
    d2, d4, w, wl = _scaled(known)
    td_scaled = td * known.gamma

    # x^2 alpha(x), cubic, gamma == 1
    x2_alpha = np.array(
        [
            -1.0 / d4,
            1.0 + d2 / d4 + 1j / d4,
            -d2 + 3 * wl**2 / (4 * d4) + 1 / (4 * d4) - 0.5j - 0.5j * d2 / d4,
            -(wl**2) / 4 - wl**2 * d2 / (2 * d4) - 3j * wl**2 / (8 * d4),
        ]
    )
    numerator = np.polyadd(np.polymul(x2_alpha.real, x2_alpha.real), np.polymul(x2_alpha.imag, x2_alpha.imag))

    # D(x), quadratic
    bracket = np.array(
        [
            3.0 / d4**2,
            -2.0 / d4 - 4.0 * d2 / d4**2,
            1.0 + 3.0 / (4 * d4**2) + 2 * d2**2 / d4**2,
        ]
    )
    dark_term = td_scaled * w**2 * np.polymul([1.0, 0.0, 0.0], bracket)
    return np.polysub(dark_term, numerator)


def invert_td(td: float, known: KnownParams) -> InversionResult:
    """
    All real delta3 with T_D(delta3) = td, each tagged admissible when
    |omega_l| < |delta3| < |delta4|.

    Raises:
        NoAdmissibleRoot: td <= 0, or no real root inside the admissible window
    """
    if not td > 0:
        raise NoAdmissibleRoot(f"td must be > 0, got {td}")
    coefficients = td_polynomial(td, known)
    roots = polyroots(coefficients) * known.gamma
    logger.debug(f"T_D polynomial roots (rad/s): {roots}")

    candidates = []
    for root in roots:
        if abs(root.imag) > IMAG_RTOL * abs(root) or root.real == 0:
            continue
        delta3 = float(root.real)
        residual = abs(t_dark(known.with_delta3(delta3)) - td) / td
        if residual > RESIDUAL_RTOL:
            logger.debug(f"Dropping root {delta3:.6e}: forward residual {residual:.2e}")
            continue
        candidates.append(
            RootCandidate(
                delta3=delta3,
                residual=residual,
                admissible=abs(known.omega_l) < abs(delta3) < abs(known.delta4),
            )
        )

    result = InversionResult(td=td, known=known, candidates=candidates)
    if not result.admissible:
        raise NoAdmissibleRoot(
            f"no real root with |omega_l| < |delta3| < |delta4| for td={td:.4e} s",
            {"candidates": [c.delta3 for c in candidates]},
        )
    for candidate in result.admissible:
        logger.info(f"Admissible delta3 = {candidate.delta3:.6e} rad/s (residual {candidate.residual:.1e})")
    return result
