import numpy as np
import pytest
from scipy.special import dawsn

from src.models.core import SampledComplexFunction
from src.models.rhp import JumpProblem, PoleData
from src.models.scattering import ScatteringData
from src.models.solitons import soliton_data
from src.services.errors import ContractViolation, InvalidDataError, SmallNormError
from src.services.scattering import evolve_scattering
from src.services.quadrature import integrate
from src.services.rhp import (
    cauchy_boundary, cauchy_transform, contour_grid, hilbert_transform, jump_w, jump_z,
    reconstruct_fields, reconstruct_point, solve_small_norm, solve_with_poles,
)
from src.services.solitons import solve_residues, soliton_point, w_couplings

GRID = np.linspace(-20, 20, 4001)


def gaussian():
    return SampledComplexFunction(GRID, np.exp(-GRID ** 2) * (1 + 0.3j * GRID))


def test_plemelj_difference_is_exact():
    f = gaussian()
    plus = cauchy_boundary(f, 'plus')
    minus = cauchy_boundary(f, 'minus')
    assert np.max(np.abs(plus.values - minus.values - f.values)) < 1e-14


def test_hilbert_transform_of_gaussian():
    values = hilbert_transform(np.exp(-GRID ** 2))
    inner = np.abs(GRID) <= 5
    expected = -2 / np.sqrt(np.pi) * dawsn(GRID[inner])
    assert np.max(np.abs(values[inner] - expected)) < 1e-8


def test_cauchy_transform_off_axis():
    f = gaussian()
    zeta = complex(0.4, 2.0)
    expected = integrate(lambda s: np.exp(-s ** 2) * (1 + 0.3j * s) / (s - zeta), -20, 20,
                         panels=80) / (2j * np.pi)
    assert cauchy_transform(f, zeta) == pytest.approx(expected, abs=1e-10)


def test_cauchy_transform_near_axis_approaches_boundary_value():
    f = gaussian()
    i = 2050
    near = cauchy_transform(f, complex(GRID[i], 1e-6))
    assert near == pytest.approx(cauchy_boundary(f, 'plus').values[i], abs=1e-4)


def test_jump_problem_validation():
    grid = np.linspace(-1, 1, 11)
    bad = np.zeros((11, 2, 2), dtype=complex)
    bad[:, 0, 0] = 1.0
    with pytest.raises(InvalidDataError):
        JumpProblem(grid, bad)
    with pytest.raises(ContractViolation):
        JumpProblem(grid, np.zeros((10, 2, 2)))
    with pytest.raises(ContractViolation):
        JumpProblem(np.array([0.0, 0.1, 0.3, 0.4]), np.zeros((4, 2, 2)))


def test_small_norm_with_nilpotent_jump():
    grid = contour_grid((-10.0, 10.0, 2000))
    f = 0.3 * np.exp(-grid ** 2) * np.exp(1j * grid)
    jump = np.zeros((grid.size, 2, 2), dtype=complex)
    jump[:, 0, 1] = f
    problem = JumpProblem(grid, jump)
    solution = solve_small_norm(problem)
    expected = cauchy_boundary(SampledComplexFunction(grid, f), 'minus').values
    assert solution.method == 'fixed-point'
    assert np.max(np.abs(solution.mu[:, 0, 1] - expected)) < 1e-13
    assert np.max(np.abs(solution.mu[:, 1, 0])) == 0
    h = problem.h
    assert solution.moment[0, 1] == pytest.approx(-h * f.sum() / (2j * np.pi), abs=1e-14)
    plus, minus = solution.boundary_values()
    assert np.allclose(plus, np.matmul(minus, np.eye(2) + jump), atol=1e-14)


def test_small_norm_threshold():
    grid = np.linspace(-1, 1, 11)
    jump = np.zeros((11, 2, 2), dtype=complex)
    jump[:, 0, 1] = 0.6
    with pytest.raises(SmallNormError):
        solve_small_norm(JumpProblem(grid, jump))


def test_contour_grid_has_origin():
    grid = contour_grid((-4.0, 4.0, 100))
    assert grid.size == 101
    assert 0.0 in grid


def test_jumps_vanish_at_origin_and_keep_unit_determinant():
    grid = contour_grid((-6.0, 6.0, 601))
    r = SampledComplexFunction(grid, 0.2 * np.exp(-grid ** 2))
    data = ScatteringData(r=r, r_hat=r)
    for problem in (jump_w(data, 1.0, 0.2, grid), jump_z(data, 1.0, 0.2, grid)):
        assert np.all(problem.jump[problem.origin_index()] == 0)
        assert problem.poles is None


def test_reflectionless_reconstruction_uses_residues():
    grid = np.linspace(-4, 4, 33)
    zero = SampledComplexFunction.zeros(grid)
    spectrum = soliton_data([(complex(-0.5, 0.9), 1.0)])
    data = ScatteringData(r=zero, r_hat=zero, spectrum=spectrum)
    assert reconstruct_point(data, 0.5, 0.1) == soliton_point(spectrum, 0.5, 0.1)


def test_reconstruction_with_eigenvalues_needs_poles():
    grid = np.linspace(-4, 4, 33)
    r = SampledComplexFunction(grid, 0.1 * np.exp(-grid ** 2))
    data = ScatteringData(r=r, r_hat=r, spectrum=soliton_data([(complex(-0.5, 0.9), 1.0)]))
    with pytest.raises(ContractViolation):
        reconstruct_point(data, 0.0, 0.0)
    with pytest.raises(ContractViolation):
        reconstruct_fields(data, 0.0, np.linspace(-1, 1, 3))


def test_zero_reflection_reconstructs_zero():
    grid = np.linspace(-4, 4, 33)
    zero = SampledComplexFunction.zeros(grid)
    data = ScatteringData(r=zero, r_hat=zero)
    state = reconstruct_fields(data, 0.0, np.linspace(-1, 1, 5))
    assert np.all(state.u == 0) and np.all(state.v == 0)
    assert state.metadata['failures'] == []


def test_pole_system_without_jump_matches_residue_solve():
    grid = contour_grid((-6.0, 6.0, 241))
    spectrum = soliton_data([(complex(-0.5, 0.9), complex(0.7, 0.2))])
    poles, kappa_j, eta_j = w_couplings(spectrum, 0.3, -0.2)
    problem = JumpProblem(grid, np.zeros((grid.size, 2, 2), dtype=complex),
                          poles=PoleData(poles, kappa_j, eta_j))
    m11, limit = solve_with_poles(problem)
    expected_m11, expected_limit = solve_residues(poles, kappa_j, eta_j)
    assert m11 == pytest.approx(expected_m11, rel=1e-8)
    assert limit == pytest.approx(expected_limit, rel=1e-8)


def radiation_only(contour, turn=1.0):
    r = SampledComplexFunction(contour, turn * 0.1 * np.exp(-contour ** 2) * (1 + 0.3j * contour))
    r_hat = SampledComplexFunction(contour, turn * 0.08 * np.exp(-(contour - 0.5) ** 2))
    return ScatteringData(r=r, r_hat=r_hat)


@pytest.mark.parametrize("alpha", [0.9, -2.4])
def test_reconstruction_is_phase_covariant(alpha):
    contour = contour_grid((-8.0, 8.0, 801))
    turn = np.exp(1j * alpha)
    x = np.linspace(-1, 1, 3)
    state = reconstruct_fields(radiation_only(contour), 0.5, x, contour=contour)
    rotated = reconstruct_fields(radiation_only(contour, turn), 0.5, x, contour=contour)
    assert np.max(np.abs(rotated.u - turn * state.u)) < 1e-10
    assert np.max(np.abs(rotated.v - turn * state.v)) < 1e-10
    assert np.max(np.abs(state.u)) > 1e-4


def test_reconstruction_commutes_with_time_flow():
    contour = contour_grid((-8.0, 8.0, 801))
    data = radiation_only(contour)
    x = np.linspace(-1, 1, 3)
    direct = reconstruct_fields(data, 1.5, x, contour=contour)
    flowed = reconstruct_fields(evolve_scattering(data, 1.5), 0.0, x, contour=contour)
    assert np.max(np.abs(direct.u - flowed.u)) < 1e-6
    assert np.max(np.abs(direct.v - flowed.v)) < 1e-6
