import math

import numpy as np
import pytest

from src.models.core import SampledComplexFunction
from src.models.scattering import ScatteringData
from src.models.solitons import soliton_data
from src.services.errors import ContractViolation, DomainError
from src.services.simulator import charge
from src.services.solitons import (
    blaschke_factor, cone_partition, cone_restrict, cone_scale, mtm_residual, n_soliton,
    one_soliton, one_soliton_parameters, radiation_exponent_w, radiation_exponent_z, residue_matrix,
    resolution_constants, resolution_prediction, soliton_point, soliton_speed, w_couplings,
)

LAM, NORMING = complex(-0.5, 0.9), complex(0.7, 0.2)


def reflectionless(spectrum):
    grid = np.linspace(-4, 4, 33)
    zero = SampledComplexFunction.zeros(grid)
    return ScatteringData(r=zero, r_hat=zero, spectrum=spectrum)


def test_one_soliton_parameters_at_unit_modulus():
    params = one_soliton_parameters(complex(-math.sqrt(0.5), math.sqrt(0.5)), 1.0)
    assert params.delta == pytest.approx(1.0)
    assert params.velocity == pytest.approx(0.0, abs=1e-15)
    assert params.gamma == pytest.approx(math.pi / 2)
    assert params.energy == pytest.approx(1.0)
    assert params.x0 == pytest.approx(0.0, abs=1e-14)
    assert set(params.to_dict()) == {'delta', 'gamma', 'E', 'beta', 'nu', 'x0', 'phi0'}


@pytest.mark.parametrize("lam, norming", [(complex(0.5, 0.5), 1.0), (complex(-0.5, -0.5), 1.0),
                                          (complex(-0.5, 0.5), 0.0)])
def test_one_soliton_rejects_bad_data(lam, norming):
    with pytest.raises(DomainError):
        one_soliton_parameters(lam, norming)


def test_one_soliton_scalar_and_array():
    u, v = one_soliton(LAM, NORMING, 1.0, 0.3)
    us, vs = one_soliton(LAM, NORMING, 1.0, np.array([0.3]))
    assert isinstance(u, complex)
    assert us[0] == pytest.approx(u) and vs[0] == pytest.approx(v)


def test_residue_system_matches_closed_form():
    spectrum = soliton_data([(LAM, NORMING)])
    x = np.linspace(-6, 6, 49)
    state = n_soliton(spectrum, 2.5, x)
    u, v = one_soliton(LAM, NORMING, 2.5, x)
    assert np.max(np.abs(state.u - u)) < 1e-10
    assert np.max(np.abs(state.v - v)) < 1e-10
    assert state.metadata['solitons'] == 1


def test_one_soliton_matches_residue_system_for_random_pairs():
    rng = np.random.default_rng(3)
    x = np.linspace(-6, 6, 25)
    for _ in range(20):
        lam = rng.uniform(0.6, 1.5) * np.exp(1j * rng.uniform(math.pi / 2 + 0.2, math.pi - 0.2))
        norming = rng.uniform(0.3, 2.0) * np.exp(1j * rng.uniform(-math.pi, math.pi))
        t = rng.uniform(-1.0, 1.0)
        state = n_soliton(soliton_data([(lam, norming)]), t, x)
        u, v = one_soliton(lam, norming, t, x)
        assert np.max(np.abs(state.u - u)) < 1e-10
        assert np.max(np.abs(state.v - v)) < 1e-10


def test_two_soliton_charge_is_the_sum_of_one_soliton_charges():
    pairs = [(complex(-0.5, 0.9), 1.0), (complex(-1.1, 0.6), 0.5j)]
    x = np.linspace(-30, 30, 3001)
    total = charge(n_soliton(soliton_data(pairs), 0.0, x))
    parts = sum(charge(n_soliton(soliton_data([pair]), 0.0, x)) for pair in pairs)
    assert total == pytest.approx(parts, rel=1e-6)


def test_one_soliton_solves_mtm():
    x = np.linspace(-5, 5, 41)
    residual = mtm_residual(lambda t, xs: one_soliton(LAM, NORMING, t, xs), 1.0, x, 1e-3)
    assert residual < 1e-7


@pytest.mark.slow
def test_two_soliton_solves_mtm():
    spectrum = soliton_data([(complex(-0.5, 0.9), 1.0), (complex(-1.1, 0.6), 0.5j)])

    def fields(t, xs):
        state = n_soliton(spectrum, t, xs)
        return state.u, state.v

    residual = mtm_residual(fields, 0.5, np.linspace(-4, 4, 17), 1e-3)
    assert residual < 1e-6


def test_empty_spectrum_is_zero():
    assert soliton_point(soliton_data([]), 1.0, 0.0) == (0j, 0j)


def test_n_soliton_grid_contract():
    with pytest.raises(ContractViolation):
        n_soliton(soliton_data([(LAM, NORMING)]), 0.0, [0.0])


def test_residue_matrix_shape():
    w, kappa_j, eta_j = w_couplings(soliton_data([(LAM, NORMING), (complex(-1.0, 0.4), 1.0)]), 0.0, 0.0)
    matrix = residue_matrix(w, kappa_j, eta_j)
    assert matrix.shape == (4, 4)
    assert np.allclose(np.diag(matrix), 1.0)


def test_cone_scale_and_speed_are_inverse():
    assert cone_scale(0.0) == pytest.approx(1.0)
    for v in (-0.7, -0.1, 0.3, 0.85):
        m = cone_scale(v)
        lam = math.sqrt(m) * complex(-math.cos(0.3), math.sin(0.3))
        assert soliton_speed(lam) == pytest.approx(v, abs=1e-13)
    with pytest.raises(DomainError):
        cone_scale(1.0)


def test_blaschke_factor_is_unimodular_on_real_axis():
    p = np.linspace(-3, 3, 13)
    values = blaschke_factor(p, complex(0.4, 0.7))
    assert np.allclose(np.abs(values), 1.0, atol=1e-14)
    assert blaschke_factor(complex(0.4, 0.7), complex(0.4, 0.7)) == 0


def test_cone_partition():
    # |lambda|^2 = 0.5 (fast), 1 (at rest), 2 (moving left)
    lams = [math.sqrt(s) * complex(-0.6, 0.8) for s in (0.5, 1.0, 2.0)]
    spectrum = soliton_data([(lam, 1.0) for lam in lams])
    partition = cone_partition(spectrum, -0.1, 0.1)
    assert partition.visible == [1]
    assert partition.ahead == [0]
    assert partition.behind == [2]
    with pytest.raises(DomainError):
        cone_partition(spectrum, 0.2, 0.1)


def test_cone_restrict_without_faster_solitons():
    lams = [complex(-0.6, 0.8), math.sqrt(2.0) * complex(-0.6, 0.8)]
    data = reflectionless(soliton_data([(lam, 1.0) for lam in lams]))
    restricted = cone_restrict(data, 0.0, 0.0)
    assert restricted.partition.visible == [0]
    assert len(restricted.data.spectrum) == 1
    assert restricted.data.spectrum.norming[0] == 1.0


def test_cone_restrict_applies_blaschke_factors():
    lams = [complex(-0.6, 0.8), math.sqrt(0.5) * complex(-0.8, 0.6)]
    data = reflectionless(soliton_data([(lam, 1.0) for lam in lams]))
    restricted = cone_restrict(data, 0.0, 0.0)
    assert restricted.partition.ahead == [1]
    z_ahead = lams[1] ** 2
    expected = blaschke_factor(lams[0] ** 2, z_ahead)
    assert restricted.data.spectrum.norming[0] == pytest.approx(expected)
    with pytest.raises(DomainError):
        cone_restrict(data, 0.0, 0.0, x1=1.0, x2=0.0)


def test_cone_restrict_with_the_full_cone_is_the_identity():
    lams = [math.sqrt(s) * complex(-0.6, 0.8) for s in (0.5, 1.0, 2.0)]
    grid = np.linspace(-4, 4, 33)
    r = SampledComplexFunction(grid, 0.1 * np.exp(-grid ** 2) * (1 + 0.2j * grid))
    spectrum = soliton_data([(lam, 1.0 + 0.5j * k) for k, lam in enumerate(lams)])
    data = ScatteringData(r=r, r_hat=r, spectrum=spectrum)
    restricted = cone_restrict(data, -0.99, 0.99)
    assert restricted.partition.visible == [0, 1, 2]
    assert np.array_equal(restricted.data.spectrum.eigenvalues, data.spectrum.eigenvalues)
    assert np.array_equal(restricted.data.spectrum.norming, data.spectrum.norming)
    assert np.max(np.abs(restricted.data.r.values - r.values)) <= 1e-15
    assert np.max(np.abs(restricted.data.r_hat.values - r.values)) <= 1e-15


def test_resolution_prediction_without_radiation_keeps_blaschke_factors():
    lams = [complex(-0.6, 0.8), math.sqrt(0.5) * complex(-0.8, 0.6)]
    data = reflectionless(soliton_data([(lam, 1.0) for lam in lams]))
    slow = resolution_prediction(data, 0)
    assert len(slow) == 1
    assert slow.norming[0] == pytest.approx(blaschke_factor(lams[0] ** 2, lams[1] ** 2))
    fast = resolution_prediction(data, 1)
    assert len(fast) == 1
    assert fast.norming[0] == pytest.approx(1.0)


def test_resolution_constants_need_a_common_modulus():
    lams = [complex(-0.6, 0.8), math.sqrt(0.5) * complex(-0.8, 0.6)]
    data = reflectionless(soliton_data([(lam, 1.0) for lam in lams]))
    with pytest.raises(DomainError):
        resolution_constants(data, 1.0)


def analytic_radiation(amplitude, spectrum):
    grid = np.linspace(-12, 12, 4800)

    def r_fn(w):
        return amplitude * np.exp(-(w - 1 / w) ** 2 / 4 + 0.4j * w)

    r = SampledComplexFunction.from_callable(r_fn, grid)
    r_hat = SampledComplexFunction.from_callable(lambda z: r_fn(1 / z) / z, grid)
    return ScatteringData(r=r, r_hat=r_hat, spectrum=spectrum)


def test_resolution_constants_with_radiation():
    spectrum = soliton_data([(np.exp(2.0j), 1.0), (np.exp(2.6j), 0.5 + 0.5j)])
    deviations = []
    for amplitude in (0.2, 0.1, 0.05):
        data = analytic_radiation(amplitude, spectrum)
        for w_j, z_j in zip(spectrum.w, spectrum.z):
            via_z = radiation_exponent_z(data.r_hat, z_j, 1.0)
            via_w = radiation_exponent_w(data.r, w_j, 1.0)
            assert abs(via_z - via_w) < 1e-6
        modified = resolution_constants(data, 1.0)
        deviations.append(float(np.max(np.abs(modified / spectrum.norming - 1))))
    assert deviations[0] > 1e-3
    # the exponent is quadratic in the reflection amplitude
    for coarse, fine in zip(deviations, deviations[1:]):
        assert math.log2(coarse / fine) >= 1.8
