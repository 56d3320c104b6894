import math

import numpy as np
import pytest

from src.models.core import AnalyticComplexFunction, SampledComplexFunction
from src.models.experiment import ExperimentConfig
from src.services.asymptotics import (
    delta0_pm, delta_at_zero, delta_fn, f_pm, f_pm_from_coefficients, f_pm_w_side,
    gamma_modulus_defect, half_plane_violation, kappa_hat, predict_fields, prediction_sweep,
    z_side_coefficients,
)
from src.services.errors import DomainError
from src.services.harness import analytic_reflection

SMOOTH_NU = lambda s: 0.1 * (1.0 - 0.3 * np.asarray(s)) * (1.0 + np.asarray(s) ** 2)


def analytic_pair(amplitude=0.3, alpha=0.4):
    config = ExperimentConfig.from_dict({
        'scenario': 'b_equality',
        'initial': {'family': 'analytic_reflection', 'amplitude': amplitude, 'alpha': alpha},
    })
    return analytic_reflection(config)


def test_kappa_hat_of_zero_reflection():
    zero = SampledComplexFunction.zeros(np.linspace(-2, 2, 9))
    assert np.all(kappa_hat(zero, np.linspace(-1, 1, 5)) == 0)


@pytest.mark.parametrize("k", [-1.3, -0.2, 1e-3, 0.05, 0.7, 2.0])
def test_gamma_modulus_identity(k):
    assert abs(gamma_modulus_defect(k)) < 1e-10


def test_delta_with_zero_nu_is_one():
    zero = lambda s: np.zeros_like(np.asarray(s, dtype=float))
    assert delta_fn(zero, complex(0.2, 0.5)) == pytest.approx(1.0)
    assert delta_at_zero(zero) == pytest.approx(1.0)


@pytest.mark.parametrize("zeta", [-0.6, 0.0, 0.35, 0.9])
def test_delta_jump_relation(zeta):
    plus = delta_fn(SMOOTH_NU, zeta, side=1)
    minus = delta_fn(SMOOTH_NU, zeta, side=-1)
    factor = math.exp(2 * math.pi * float(SMOOTH_NU(zeta)))
    assert abs(plus - minus * factor) < 1e-10


def test_delta_connection_constants_are_unimodular():
    d_minus, d_plus = delta0_pm(SMOOTH_NU)
    assert abs(d_minus) == pytest.approx(1.0, abs=1e-14)
    assert abs(d_plus) == pytest.approx(1.0, abs=1e-14)


def test_delta_singular_at_endpoints():
    with pytest.raises(DomainError):
        delta_fn(SMOOTH_NU, 1.0)


def test_delta_half_plane_bound_follows_the_sign_of_nu():
    points = [0.5j, -0.5j, 0.3 + 0.1j, -0.7 - 0.2j]
    assert half_plane_violation(SMOOTH_NU, points) == 0.0
    assert half_plane_violation(SMOOTH_NU, points, sign=-1) > 0.1
    assert half_plane_violation(lambda s: -SMOOTH_NU(s), points, sign=-1) == 0.0


def test_delta_modulus_bounds():
    """|log|delta|| < pi sup|nu| off the segment, and < sup|nu|/2 once |Im zeta| >= 4."""
    rng = np.random.default_rng(5)
    sup = float(np.max(np.abs(SMOOTH_NU(np.linspace(-1.0, 1.0, 2001)))))
    signs = rng.choice([-1.0, 1.0], size=100)
    near = rng.uniform(-2.0, 2.0, 100) + 1j * signs * rng.uniform(0.05, 3.0, 100)
    far = rng.uniform(-10.0, 10.0, 100) + 1j * signs * rng.uniform(4.0, 20.0, 100)
    for zeta in near:
        assert abs(math.log(abs(delta_fn(SMOOTH_NU, zeta)))) <= math.pi * sup
    for zeta in far:
        assert abs(math.log(abs(delta_fn(SMOOTH_NU, zeta)))) <= sup / 2


def test_analytic_reflection_transformed_relation():
    r, r_hat = analytic_pair()
    z = np.array([-2.0, -0.4, 0.3, 1.7])
    assert np.allclose(r_hat(z), r(1.0 / z) / z, atol=1e-15)
    assert r(np.array([0.0]))[0] == 0


def test_stationary_moduli_match_kappa():
    _, r_hat = analytic_pair()
    f = f_pm(r_hat, 0.3)
    assert abs(f.f_plus) ** 2 == pytest.approx(kappa_hat(r_hat, f.z0), rel=1e-12)
    assert abs(f.f_minus) ** 2 == pytest.approx(-kappa_hat(r_hat, -f.z0), rel=1e-12)
    assert f.modulus_plus == pytest.approx(abs(f.f_plus) ** 2)


def test_zero_reflection_predicts_zero():
    zero = AnalyticComplexFunction(lambda s: np.zeros_like(s), (-10.0, 10.0))
    f = f_pm(zero, -0.4)
    assert f.f_minus == 0 and f.f_plus == 0
    assert predict_fields(zero, 50.0, 5.0) == (0j, 0j)


@pytest.mark.slow
@pytest.mark.parametrize("speed", [-0.6, 0.0, 0.45])
def test_three_routes_to_stationary_amplitudes_agree(speed):
    r, r_hat = analytic_pair()
    closed = f_pm(r_hat, speed)
    w_route = f_pm_w_side(r, speed)
    coeff = f_pm_from_coefficients(z_side_coefficients(r_hat, closed.z0), closed.z0, speed)
    for other in (w_route, coeff):
        assert abs(closed.f_minus - other.f_minus) < 1e-8
        assert abs(closed.f_plus - other.f_plus) < 1e-8


def test_predictions_need_tau_above_one():
    _, r_hat = analytic_pair()
    with pytest.raises(DomainError):
        predict_fields(r_hat, 1.0, 0.5)
    with pytest.raises(DomainError):
        predict_fields(r_hat, 1.0, 2.0)


def test_prediction_sweep_rows():
    _, r_hat = analytic_pair()
    rows = prediction_sweep(r_hat, [(10.0, 1.0), (20.0, -3.0)])
    assert len(rows) == 2
    assert set(rows[0]) == {'t', 'x', 'tau', 're_u_as', 'im_u_as', 're_v_as', 'im_v_as'}
    assert rows[0]['tau'] == pytest.approx(math.sqrt(99.0))


def test_prediction_left_moving_part():
    _, r_hat = analytic_pair()
    t, x = 100.0, 20.0
    u, v = predict_fields(r_hat, t, x)
    f = f_pm(r_hat, x / t)
    assert abs(u * math.sqrt(t - x) + v * math.sqrt(t + x)) == pytest.approx(2 * abs(f.f_minus), rel=1e-10)
