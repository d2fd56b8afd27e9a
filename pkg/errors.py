"""
This module contains the exception hierarchy shared by the numerics and the CLI.
Every error carries a human-readable detail and the process exit code the CLI maps it to.
"""
from typing import Any, Dict, Optional


class DarkPeriodError(Exception):
    """Base error. `exit_code` is what `main.run` returns when it escapes a command."""

    exit_code: int = 3

    def __init__(self, detail: str, data: Optional[Dict[str, Any]] = None):
        super().__init__(detail)
        self.detail = detail
        self.data = data or {}


class ValidationFailure(DarkPeriodError):
    """Bad input: parameters, times, configuration."""

    exit_code = 2


class NumericalFailure(DarkPeriodError):
    """The input was acceptable but the computation could not deliver its contract."""

    exit_code = 3


# matkernel
class NearDefective(NumericalFailure):
    pass


class NonFinite(NumericalFailure):
    pass


class DegreeZero(ValidationFailure):
    pass


# atom / parameters
class InvalidParameter(ValidationFailure):
    pass


class NegativeField(ValidationFailure):
    pass


# nophoton
class NegativeTime(ValidationFailure):
    pass


class NoConvergence(NumericalFailure):
    pass


# kato
class ZeroDetuning(ValidationFailure):
    pass


class TooEarly(ValidationFailure):
    pass


class DegenerateRegime(ValidationFailure):
    pass


# jumps
class DefectiveDistribution(ValidationFailure):
    pass


class NoPhotons(ValidationFailure):
    pass


# ratemodel
class DegenerateRates(NumericalFailure):
    pass


class StepTooLarge(ValidationFailure):
    pass


# lambshift
class ZeroOmega(ValidationFailure):
    pass


class NoAdmissibleRoot(NumericalFailure):
    pass
