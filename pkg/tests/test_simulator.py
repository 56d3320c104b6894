import numpy as np
import pytest

from src.models.core import FieldState
from src.services.errors import ContractViolation
from src.services.simulator import (
    _cubic, _mass, charge, evolve, padded, sample_at, split_step, step_count,
)
from src.services.solitons import one_soliton

DX = 1.0 / 64


def gaussian_state(amplitude=0.5):
    x = np.arange(-8.0, 8.0 + DX / 2, DX)
    profile = amplitude * np.exp(-x ** 2)
    return FieldState(t=0.0, x_start=-8.0, dx=DX, u=profile.astype(complex),
                      v=(0.5 * profile).astype(complex))


def test_split_step_requires_unit_cfl():
    with pytest.raises(ContractViolation):
        split_step(gaussian_state(), DX / 2)


def test_split_step_forward_then_backward_is_identity():
    state = gaussian_state()
    back = split_step(split_step(state, DX), -DX)
    assert np.allclose(back.u[1:-1], state.u[1:-1], atol=1e-14)
    assert np.allclose(back.v[1:-1], state.v[1:-1], atol=1e-14)
    assert back.t == pytest.approx(0.0)


@pytest.mark.parametrize("s", [DX, -DX, 0.37, 2.0])
def test_mass_and_cubic_substeps_keep_local_density(s):
    rng = np.random.default_rng(11)
    shape = 257
    u = 0.2 * (rng.uniform(-1, 1, shape) + 1j * rng.uniform(-1, 1, shape))
    v = 0.2 * (rng.uniform(-1, 1, shape) + 1j * rng.uniform(-1, 1, shape))
    density = np.abs(u) ** 2 + np.abs(v) ** 2
    for substep in (_mass, _cubic):
        a, b = substep(u, v, s)
        assert np.max(np.abs(np.abs(a) ** 2 + np.abs(b) ** 2 - density)) <= 1e-15


def test_evolve_conserves_charge():
    state = padded(gaussian_state(), 1.0)
    final = evolve(state, 1.0)
    assert final.t == pytest.approx(1.0)
    assert final.metadata['steps'] == 64
    assert final.metadata['charge_drift'] < 1e-12
    assert charge(final) == pytest.approx(charge(state), rel=1e-12)


def test_evolve_zero_stays_zero():
    state = gaussian_state(amplitude=0.0)
    assert np.all(evolve(state, 0.5).u == 0)


def test_evolve_rejects_off_grid_and_past_times():
    state = gaussian_state()
    with pytest.raises(ContractViolation):
        step_count(state, 0.3 * DX)
    with pytest.raises(ContractViolation):
        evolve(state.replace(t=1.0), 0.5)


def test_evolve_to_current_time_returns_state():
    state = gaussian_state()
    assert evolve(state, 0.0) is state


def test_padded_and_sample_at():
    state = gaussian_state()
    wide = padded(state, 2.0, padding=1.0)
    assert wide.size == state.size + 2 * 192
    assert wide.x_start == pytest.approx(-11.0)
    u, v = sample_at(wide, 0.0)
    assert u == pytest.approx(0.5)
    assert v == pytest.approx(0.25)
    with pytest.raises(ContractViolation):
        sample_at(state, 100.0)


@pytest.mark.slow
def test_one_soliton_second_order_convergence():
    lam, norming = complex(-0.6, 0.8), 1.0 + 0j
    errors = []
    for dx in (1.0 / 32, 1.0 / 64, 1.0 / 128):
        x = np.arange(-20.0, 20.0 + dx / 2, dx)
        u, v = one_soliton(lam, norming, 0.0, x)
        state = FieldState(t=0.0, x_start=-20.0, dx=dx, u=u, v=v)
        final = evolve(state, 2.0)
        eu, ev = one_soliton(lam, norming, 2.0, final.x_grid)
        errors.append(max(np.max(np.abs(final.u - eu)), np.max(np.abs(final.v - ev))))
    orders = np.log2(np.array(errors[:-1]) / np.array(errors[1:]))
    assert np.all(orders > 1.8)
