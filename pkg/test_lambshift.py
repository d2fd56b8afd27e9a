import math

import numpy as np
import pytest

import kato
from errors import InvalidParameter, NoAdmissibleRoot, ZeroOmega
from lambshift import invert_td, td_polynomial
from models import KnownParams


def recovered(result, delta3: float) -> bool:
    return any(c.delta3 == pytest.approx(delta3, rel=1e-6) for c in result.admissible)


def test_polynomial_vanishes_at_true_detuning(he_params):
    known = KnownParams.from_params(he_params)
    coefficients = td_polynomial(kato.t_dark(he_params), known)
    assert coefficients.shape == (7,)
    x = he_params.delta3 / he_params.gamma
    assert abs(np.polyval(coefficients, x)) <= 1e-8 * np.linalg.norm(coefficients)


def test_round_trip_he_reference(he_params):
    known = KnownParams.from_params(he_params)
    result = invert_td(kato.t_dark(he_params), known)
    assert recovered(result, he_params.delta3)
    assert all(c.residual <= 1e-6 for c in result.candidates)
    lamb_hz = [(known.delta2 - c.delta3) / (2 * math.pi) for c in result.admissible]
    assert any(value == pytest.approx(1.4e10, rel=1e-6) for value in lamb_hz)


@pytest.mark.parametrize("scale", ["he_params", "desk_params"])
def test_round_trip_sweep(request, scale):
    known = KnownParams.from_params(request.getfixturevalue(scale))
    for delta3 in np.linspace(-0.9 * abs(known.delta4), -5 * abs(known.omega_l), 50):
        truth = known.with_delta3(float(delta3))
        result = invert_td(kato.t_dark(truth), known)
        assert recovered(result, float(delta3))
        for candidate in result.admissible:
            assert abs(known.omega_l) < abs(candidate.delta3) < abs(known.delta4)


def test_round_trip_desk_scale_both_signs(desk_params):
    for p in (desk_params, desk_params.model_copy(update={"delta3": 10.0, "delta4": 100.0})):
        known = KnownParams.from_params(p)
        assert recovered(invert_td(kato.t_dark(p), known), p.delta3)


def test_inversion_errors(he_params):
    known = KnownParams.from_params(he_params)
    with pytest.raises(ZeroOmega):
        td_polynomial(1e-5, known.model_copy(update={"omega": 0.0}))
    with pytest.raises(InvalidParameter):
        td_polynomial(0.0, known)
    with pytest.raises(NoAdmissibleRoot):
        invert_td(-1.0, known)
    with pytest.raises(NoAdmissibleRoot):
        invert_td(1e6 * kato.t_dark(he_params), known)
