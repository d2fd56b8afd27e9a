"""
This module builds the reduced four-level system: field-strength calibration,
the conditional generator M = (i/hbar) H_c, and its variants.
"""
import logging
import math

import numpy as np

from errors import NegativeField
from models import TWO_PI, AtomParams, He4Preset

logger = logging.getLogger(__name__)

SQRT2 = math.sqrt(2.0)
HE4 = He4Preset()


def from_physical(preset: He4Preset, field: float, laser_field: float, delta2: float = 0.0) -> AtomParams:
    """
    Convert field strengths to Rabi frequencies and level splittings to detunings.

    Args:
        preset: Level data and calibration ratios
        field: Static field F (V/m)
        laser_field: Laser amplitude F_L (V/m)
        delta2: Laser detuning from |2> (rad/s)

    Returns:
        AtomParams: delta3/delta4 sit below delta2 by 2*pi times the Lamb shift / fine structure
    """
    if field < 0 or laser_field < 0:
        raise NegativeField(f"field strengths must be >= 0, got F={field}, F_L={laser_field}")

    params = AtomParams(
        gamma=preset.gamma,
        delta2=delta2,
        delta3=delta2 - TWO_PI * preset.lamb_shift_hz,
        delta4=delta2 - TWO_PI * preset.fine_structure_hz,
        omega=preset.rabi_per_field_static * field,
        omega_l=preset.rabi_per_field_laser * laser_field,
    )
    logger.debug(
        f"F={field:.4g} V/m, F_L={laser_field:.4g} V/m -> "
        f"omega={params.omega:.6g}, omega_l={params.omega_l:.6g} rad/s"
    )
    for warning in params.regime_warnings():
        logger.warning(f"Regime: {warning}")
    return params


def generator(p: AtomParams) -> np.ndarray:
    """M in the basis |1>, |2>, |3>, |4>. Complex symmetric."""
    m = np.zeros((4, 4), dtype=complex)
    m[0, 1] = m[1, 0] = 0.5j * p.omega_l
    m[0, 3] = m[3, 0] = -1j * p.omega_l / SQRT2
    m[1, 1] = 0.5 * p.gamma - 1j * p.delta2
    m[1, 2] = m[2, 1] = 1j * p.omega
    m[2, 2] = -1j * p.delta3
    m[2, 3] = m[3, 2] = -1j * SQRT2 * p.omega
    m[3, 3] = 0.5 * p.gamma - 1j * p.delta4
    return m


def generator_unperturbed(p: AtomParams) -> np.ndarray:
    """M^(0): the generator with the static field switched off."""
    return generator(p.model_copy(update={"omega": 0.0}))


def generator_perturbation(p: AtomParams) -> np.ndarray:
    """M^(1) = M - M^(0)."""
    return generator(p) - generator_unperturbed(p)


def dressed_hc3(p: AtomParams, lamb_terms: bool = True) -> np.ndarray:
    """
    (i/hbar) H_c without |4>, in the basis |1>, (|2>+|3>)/sqrt2, (|2>-|3>)/sqrt2.

    With lamb_terms=False the off-diagonal shifts (delta3 - delta2)/2 are dropped, which
    gives the three-level model with two parallel dipoles and no QED level shift.
    """
    coupling = p.omega_l / (2.0 * SQRT2)
    mean_detuning = 0.5 * (p.delta2 + p.delta3)
    shift = 0.5 * (p.delta3 - p.delta2) if lamb_terms else 0.0
    h = np.array(
        [
            [0.0, coupling, coupling],
            [coupling, p.omega - 0.25j * p.gamma - mean_detuning, -0.25j * p.gamma + shift],
            [coupling, -0.25j * p.gamma + shift, -p.omega - 0.25j * p.gamma - mean_detuning],
        ],
        dtype=complex,
    )
    return 1j * h
