import math

import numpy as np
import pytest

import kato
from atom import generator_unperturbed
from errors import DegenerateRegime, NegativeTime, TooEarly, ZeroDetuning
from models import AtomParams
from nophoton import build_cache, p0


def test_alpha_he_reference(he_params):
    a = kato.alpha(he_params)
    assert a.real == pytest.approx(0.858871, rel=1e-5)
    assert a.imag == pytest.approx(0.0488483, rel=1e-4)
    assert abs(a) ** 2 == pytest.approx(0.740045, rel=1e-5)


def test_alpha_limits(desk_params):
    bare = AtomParams(gamma=1e-12, delta3=-3.0, delta4=-40.0, omega=0.1, omega_l=0.0)
    assert kato.alpha(bare) == pytest.approx(1 - 3.0 / 40.0, abs=1e-10)
    a = kato.alpha(desk_params)
    assert a.real == pytest.approx(0.8565, rel=1e-12)
    assert a.imag == pytest.approx(0.0409375, rel=1e-12)
    with pytest.raises(ZeroDetuning):
        kato.alpha(desk_params.model_copy(update={"delta3": 0.0}))
    with pytest.raises(ZeroDetuning):
        kato.alpha(desk_params.model_copy(update={"delta4": 0.0}))


def test_re_lambda2(he_params, desk_params):
    assert kato.re_lambda2(he_params) == pytest.approx(4.6892e4, rel=1e-4)
    assert kato.re_lambda2(desk_params) == pytest.approx(1.41118e-3, rel=1e-4)
    assert kato.re_lambda2(he_params.model_copy(update={"omega": 0.0})) == 0.0
    doubled = he_params.model_copy(update={"omega": 2 * he_params.omega})
    assert kato.re_lambda2(doubled) == pytest.approx(4 * kato.re_lambda2(he_params), rel=1e-12)


def test_t_dark_closed_form_matches_rate(he_params, desk_params):
    for p in (he_params, desk_params):
        assert kato.t_dark(p) == pytest.approx(1 / (2 * kato.re_lambda2(p)), rel=1e-12)
    assert kato.t_dark(he_params) == pytest.approx(1.0663e-5, rel=1e-4)
    with pytest.raises(DegenerateRegime):
        kato.t_dark(he_params.model_copy(update={"omega": 0.0}))


def test_lambda3_zeroth(he_params):
    assert kato.lambda3_zeroth(he_params) == pytest.approx(5e9 - 1j * he_params.delta4)
    assert kato.lambda3_zeroth(he_params).imag == pytest.approx(1.0996e12, rel=1e-4)
    assert kato.lambda3_zeroth(he_params.model_copy(update={"delta4": 0.0})) == 0.5 * he_params.gamma


def test_lambda3_zeroth_is_an_unperturbed_eigenvalue(he_params, desk_params):
    for p in (he_params, desk_params):
        spectrum = np.linalg.eigvals(generator_unperturbed(p))
        target = kato.lambda3_zeroth(p)
        nearest = spectrum[np.argmin(np.abs(spectrum - target))]
        assert abs(nearest - target) / abs(target) <= abs(p.omega_l / p.delta4)


def test_p0_longtime(he_params):
    t = 1e-6
    assert kato.p0_longtime(he_params, 2 * t) / kato.p0_longtime(he_params, t) == pytest.approx(
        math.exp(-2 * kato.re_lambda2(he_params) * t), rel=1e-12
    )
    coefficient = kato.p0_longtime(he_params, 10 / he_params.gamma) * math.exp(
        2 * kato.re_lambda2(he_params) * 10 / he_params.gamma
    )
    assert coefficient == pytest.approx(5.0937e-7, rel=1e-4)
    assert coefficient == pytest.approx(kato.slow_weight(he_params), rel=1e-12)
    assert kato.p0_longtime(he_params.model_copy(update={"omega": 0.0}), t) == 0.0
    with pytest.raises(TooEarly):
        kato.p0_longtime(he_params, 9.9 / he_params.gamma)


def test_p0_longtime_matches_exact_at_ten_t0(he_params):
    prediction = kato.predictions(he_params)
    t = 10 * prediction.t0
    assert p0(build_cache(he_params), t) == pytest.approx(kato.p0_longtime(he_params, t), rel=1e-2)


def test_p0_shorttime(he_params):
    assert kato.p0_shorttime(he_params, 0.0) == pytest.approx(1.0)
    assert kato.p0_shorttime(he_params.model_copy(update={"omega_l": 0.0}), 1e-6) == pytest.approx(1.0)
    cache = build_cache(he_params)
    for t in np.linspace(0.0, 10 / he_params.gamma, 41):
        assert kato.p0_shorttime(he_params, t) == pytest.approx(p0(cache, t), rel=2e-2)
    with pytest.raises(NegativeTime):
        kato.p0_shorttime(he_params, -1.0)


def test_tau_light(he_params):
    assert kato.tau_light(he_params) == pytest.approx(51 / (25 * he_params.gamma), rel=1e-12)
    strong = AtomParams(gamma=1.0, delta3=-1e5, delta4=-1e6, omega=1.0, omega_l=1e4)
    assert kato.tau_light(strong) == pytest.approx(2.0, rel=1e-6)
    base = he_params.model_copy(update={"delta2": 1e9})
    double = he_params.model_copy(update={"delta2": 2e9})
    extra = 4 * (2e9**2 - 1e9**2) / (he_params.gamma * he_params.omega_l**2)
    assert kato.tau_light(double) - kato.tau_light(base) == pytest.approx(extra, rel=1e-9)
    with pytest.raises(DegenerateRegime):
        kato.tau_light(he_params.model_copy(update={"omega_l": 0.0}))


def test_predictions_he_reference(he_params):
    prediction = kato.predictions(he_params)
    assert prediction.t_dark == pytest.approx(1.1e-5, rel=5e-2)
    assert prediction.t_light == pytest.approx(4e-4, rel=5e-2)
    assert 1 / prediction.p_dark == pytest.approx(2e6, rel=5e-2)

    assert prediction.t0 == pytest.approx(3.2654e-8, rel=1e-4)
    assert prediction.p_dark == pytest.approx(5.0781e-7, rel=1e-4)
    assert prediction.t_light == pytest.approx(4.0172e-4, rel=1e-4)
    assert prediction.tau_l == pytest.approx(2.04e-10, rel=1e-12)
    assert prediction.t_dark == pytest.approx(1 / (2 * prediction.re_lambda2), rel=1e-12)
    assert prediction.p_dark == kato.p0_longtime(he_params, prediction.t0)
    assert 1 / he_params.gamma < prediction.t0 < prediction.t_dark
    assert prediction.warnings == []


def test_predictions_desk_scale(desk_params):
    prediction = kato.predictions(desk_params)
    assert 2 * prediction.re_lambda2 == pytest.approx(2.8224e-3, rel=1e-4)
    assert prediction.t_dark == pytest.approx(354.31, rel=1e-4)
    assert prediction.t0 == pytest.approx(18.823, rel=1e-4)
    assert prediction.p_dark == pytest.approx(9.879e-5, rel=1e-3)
    # the two-level transient exp(-gamma T0/2) is comparable to p at the default threshold
    assert any(w.startswith("t0_transient") for w in prediction.warnings)

    late = kato.predictions(desk_params, t0=45.0)
    assert late.p_dark == pytest.approx(9.1752e-5, rel=1e-3)
    assert late.warnings == []

    early = kato.predictions(desk_params, t0=0.5)
    codes = [w.split(":")[0] for w in early.warnings]
    assert "t0_range" in codes and "t0_early" in codes


def test_predictions_threshold_beyond_underflow(desk_params):
    # exp(-2 Re(lambda_2) t0) underflows for t0 ~ 850 T_D
    with pytest.raises(DegenerateRegime):
        kato.predictions(desk_params, t0=3e5)
    assert kato.predictions(desk_params, t0=2e5).p_dark > 0


def test_predictions_errors(he_params):
    with pytest.raises(DegenerateRegime):
        kato.predictions(he_params.model_copy(update={"omega": 0.0}))
    with pytest.raises(ZeroDetuning):
        kato.predictions(he_params.model_copy(update={"delta3": 0.0}))


def test_predictions_field_scaling(he_params):
    base = kato.predictions(he_params)
    half = kato.predictions(he_params.model_copy(update={"omega": 0.5 * he_params.omega}))
    assert half.t_dark == pytest.approx(4 * base.t_dark, rel=1e-12)
    assert half.t_light == pytest.approx(4 * base.t_light, rel=5e-3)
    assert half.t_light_asymptotic / half.t_dark == pytest.approx(base.t_light_asymptotic / base.t_dark, rel=1e-12)
    assert half.t_light / half.t_dark == pytest.approx(base.t_light / base.t_dark, rel=2e-3)


def test_t_light_asymptotic(he_params):
    prediction = kato.predictions(he_params)
    assert kato.t_light_closed(he_params) == pytest.approx(
        kato.tau_light(he_params) / kato.slow_weight(he_params), rel=1e-12
    )
    assert prediction.t_light_asymptotic < prediction.t_light


def test_lambda2_exact(he_params):
    cache = build_cache(he_params)
    exact = kato.lambda2_exact(cache)
    assert exact.real == pytest.approx(kato.re_lambda2(he_params), rel=1e-2)
    assert abs(exact.imag + he_params.delta3) <= abs(he_params.omega / he_params.delta3) * abs(he_params.delta3)

    decoupled = build_cache(he_params.model_copy(update={"omega": 0.0}))
    assert abs(kato.lambda2_exact(decoupled).real) <= 1e-12 * he_params.gamma


@pytest.mark.parametrize(
    "fixture, resolvent_rtol, closed_rtol",
    [("he_params", 1e-3, 2e-2), ("desk_params", 3e-2, 5e-2)],
)
def test_resolvent_oracles(request, fixture, resolvent_rtol, closed_rtol):
    p = request.getfixturevalue(fixture)
    cache = build_cache(p)
    exact = kato.lambda2_exact(cache)
    _, slow_vector = cache.slow_mode()
    weight = float(np.vdot(slow_vector, slow_vector).real)

    assert kato.lambda2_resolvent(p).real == pytest.approx(exact.real, rel=resolvent_rtol)
    assert kato.lambda2_resolvent(p).imag == pytest.approx(exact.imag, rel=1e-3)
    assert kato.slow_weight_resolvent(p) == pytest.approx(weight, rel=resolvent_rtol)
    assert kato.slow_weight(p) == pytest.approx(weight, rel=closed_rtol)


def test_re_lambda2_sweep_bound():
    rng = np.random.default_rng(11)
    for _ in range(100):
        delta3 = -1.0
        p = AtomParams(
            gamma=rng.uniform(0.01, 0.2),
            delta2=0.0,
            delta3=delta3,
            delta4=delta3 * rng.uniform(5.0, 20.0),
            omega_l=rng.uniform(0.1, 0.5),
            omega=0.0,
        )
        p = p.model_copy(update={"omega": rng.uniform(0.005, min(0.05, 0.2 * p.omega_l))})
        assert p.in_regime
        exact = kato.lambda2_exact(build_cache(p)).real
        closed = kato.re_lambda2(p)
        bound = 3 * (p.omega / p.delta3) ** 2 + 3 * (p.omega_l / p.delta4) ** 2
        assert abs(closed - exact) / closed <= bound
