import math

import numpy as np
import pytest

from src.services.errors import DomainError
from src.services.quadrature import cauchy_integral, integrate, panel_rule, principal_value


def test_panel_rule_avoids_breakpoints():
    nodes, weights = panel_rule(-1.0, 1.0, panels=4, order=8, breakpoints=(0.3,))
    assert not np.any(nodes == 0.3)
    assert weights.sum() == pytest.approx(2.0, abs=1e-14)
    assert panel_rule(1.0, 1.0)[0].size == 0


def test_integrate_polynomial_and_gaussian():
    assert integrate(lambda s: s ** 2, 0.0, 1.0) == pytest.approx(1 / 3, abs=1e-14)
    value = integrate(lambda s: np.exp(-s ** 2), -10.0, 10.0)
    assert value == pytest.approx(math.sqrt(math.pi), abs=1e-12)


def test_principal_value_of_constant():
    assert principal_value(lambda s: np.ones_like(s), -1.0, 1.0, 0.0) == pytest.approx(0.0, abs=1e-14)
    assert principal_value(lambda s: np.ones_like(s), -1.0, 2.0, 0.0) == pytest.approx(math.log(2), abs=1e-13)


def test_boundary_values_differ_by_residue():
    f = lambda s: np.exp(-s ** 2) * (1 + 0.5j * s)
    x0 = 0.37
    plus = cauchy_integral(f, -3.0, 3.0, x0, side=1)
    minus = cauchy_integral(f, -3.0, 3.0, x0, side=-1)
    assert plus - minus == pytest.approx(2j * math.pi * f(np.array([x0]))[0], abs=1e-12)


def test_near_axis_matches_off_axis_limit():
    f = lambda s: np.cos(s) + 0j
    near = cauchy_integral(f, -2.0, 2.0, complex(0.2, 1e-9))
    plus = cauchy_integral(f, -2.0, 2.0, 0.2, side=1)
    assert near == pytest.approx(plus, abs=1e-7)


def test_cauchy_integral_domain_errors():
    f = lambda s: np.ones_like(s)
    with pytest.raises(DomainError):
        cauchy_integral(f, -1.0, 1.0, 1.0)
    with pytest.raises(DomainError):
        cauchy_integral(f, -1.0, 1.0, 0.5)
