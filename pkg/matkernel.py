"""
Dense complex small-matrix numerics: eigendecomposition, action of the matrix
exponential, and real-coefficient polynomial roots.

Matrices here are at most 8x8 (companion matrices of degree-8 polynomials), so
everything goes straight to LAPACK through numpy/scipy.
"""
import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.linalg import expm

from errors import DegreeZero, InvalidParameter, NearDefective, NegativeTime, NonFinite

logger = logging.getLogger(__name__)

CONDITION_LIMIT = 1e8
MAX_EIG_DIMENSION = 6
MAX_POLY_DEGREE = 8


@dataclass(frozen=True)
class EigenSystem:
    """Eigenvalues sorted by (real, imag); eigenvectors are unit-norm columns."""
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    condition: float


def as_matrix(a) -> np.ndarray:
    """Validate and convert to a finite square complex array."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise InvalidParameter(f"expected a non-empty square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise NonFinite("matrix has non-finite entries")
    return m


def _sorted(values: np.ndarray) -> np.ndarray:
    return np.lexsort((values.imag, values.real))


def eigvals(a) -> np.ndarray:
    """Eigenvalues only, sorted by ascending real part then imaginary part. No conditioning check."""
    m = as_matrix(a)
    values = np.linalg.eigvals(m)
    return values[_sorted(values)]


def eig(a) -> EigenSystem:
    """
    Full eigendecomposition of a matrix of dimension <= 6.

    Raises:
        NearDefective: eigenvector matrix condition exceeds CONDITION_LIMIT (or is infinite)
    """
    m = as_matrix(a)
    if m.shape[0] > MAX_EIG_DIMENSION:
        raise InvalidParameter(f"eig is limited to n <= {MAX_EIG_DIMENSION}, got {m.shape[0]}")

    values, vectors = np.linalg.eig(m)
    vectors = vectors / np.linalg.norm(vectors, axis=0)
    order = _sorted(values)
    values = values[order]
    vectors = vectors[:, order]

    with np.errstate(divide="ignore", invalid="ignore"):
        condition = float(np.linalg.cond(vectors))
    if not np.isfinite(condition) or condition > CONDITION_LIMIT:
        logger.debug(f"Eigenvector condition {condition:.3e} above limit {CONDITION_LIMIT:.0e}")
        raise NearDefective(
            f"eigenvector matrix condition {condition:.3e} exceeds {CONDITION_LIMIT:.0e}",
            {"condition": condition},
        )
    return EigenSystem(eigenvalues=values, eigenvectors=vectors, condition=condition)


def expm_action(a, v, t: float) -> np.ndarray:
    """
    Return exp(-A t) v using scaling and squaring (Pade) on the dense matrix.

    Raises:
        NegativeTime: t < 0
        NonFinite: the result overflowed
    """
    if t < 0:
        raise NegativeTime(f"t must be >= 0, got {t}")
    m = as_matrix(a)
    vec = np.asarray(v, dtype=complex)
    if vec.shape != (m.shape[0],):
        raise InvalidParameter(f"vector shape {vec.shape} does not match matrix {m.shape}")
    if t == 0:
        return vec.copy()
    with np.errstate(over="ignore", invalid="ignore"):
        result = expm(-m * t) @ vec
    if not np.all(np.isfinite(result)):
        raise NonFinite(f"exp(-A t) v overflowed at t={t}")
    return result


def polyroots(coeffs: Sequence[float]) -> np.ndarray:
    """
    All complex roots of a real polynomial, coefficients ordered highest degree first.

    Roots are the eigenvalues of the companion matrix, each polished by one Newton
    step (kept only if it lowers |p|). Sorted by (real, imag).
    """
    c = np.asarray(coeffs, dtype=float)
    if c.ndim != 1 or c.size < 1:
        raise InvalidParameter("coefficients must be a non-empty 1-d sequence")
    if not np.all(np.isfinite(c)):
        raise NonFinite("polynomial has non-finite coefficients")
    if c.size == 1 or np.all(c[:-1] == 0):
        raise DegreeZero("polynomial has no non-constant terms")
    if c[0] == 0:
        raise InvalidParameter("leading coefficient must be nonzero")
    degree = c.size - 1
    if degree > MAX_POLY_DEGREE:
        raise InvalidParameter(f"degree {degree} exceeds {MAX_POLY_DEGREE}")

    companion = np.zeros((degree, degree), dtype=complex)
    companion[0, :] = -c[1:] / c[0]
    companion[1:, :-1] = np.eye(degree - 1)
    roots = eigvals(companion)

    derivative = np.polyder(c)
    value = np.polyval(c, roots)
    slope = np.polyval(derivative, roots)
    with np.errstate(divide="ignore", invalid="ignore"):
        polished = np.where(slope != 0, roots - value / slope, roots)
    better = np.abs(np.polyval(c, polished)) < np.abs(value)
    roots = np.where(better, polished, roots)
    return roots[_sorted(roots)]
