"""
Composite Gauss-Legendre quadrature and Cauchy / principal-value integrals
with analytic singularity subtraction.
"""

import math
from functools import lru_cache
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
from numpy.polynomial.legendre import leggauss
from numpy.typing import NDArray

from config import Config
from src.services.errors import DomainError

Integrand = Callable[[NDArray[np.float64]], NDArray]


@lru_cache(maxsize=32)
def _reference_rule(order: int) -> Tuple[NDArray, NDArray]:
    return leggauss(order)


def panel_rule(a: float, b: float, panels: int = Config.GL_PANELS, order: int = Config.GL_ORDER,
               breakpoints: Sequence[float] = ()) -> Tuple[NDArray, NDArray]:
    """Nodes and weights of a composite rule on [a, b].

    Breakpoints strictly inside (a, b) become panel edges, so no node ever
    sits on them.
    """
    if b <= a:
        return np.empty(0), np.empty(0)
    edges = np.linspace(a, b, panels + 1)
    inner = [p for p in breakpoints if a < p < b]
    if inner:
        edges = np.unique(np.concatenate([edges, inner]))
        # drop slivers next to a breakpoint
        keep = np.concatenate([[True], np.diff(edges) > 1e-12 * (b - a)])
        edges = edges[keep]
    ref_x, ref_w = _reference_rule(order)
    left, right = edges[:-1], edges[1:]
    half = 0.5 * (right - left)
    mid = 0.5 * (right + left)
    nodes = (mid[:, None] + half[:, None] * ref_x[None, :]).ravel()
    weights = (half[:, None] * ref_w[None, :]).ravel()
    return nodes, weights


def integrate(func: Integrand, a: float, b: float, panels: int = Config.GL_PANELS,
              order: int = Config.GL_ORDER, breakpoints: Sequence[float] = ()) -> complex:
    nodes, weights = panel_rule(a, b, panels, order, breakpoints)
    if nodes.size == 0:
        return 0.0
    return complex(np.sum(weights * func(nodes)))


def cauchy_integral(func: Integrand, a: float, b: float, zeta: complex,
                    side: Optional[int] = None, panels: int = Config.GL_PANELS,
                    order: int = Config.GL_ORDER) -> complex:
    """Integral of func(s)/(s - zeta) over [a, b].

    For zeta close to (a, b) the value func(Re zeta) is subtracted and its
    integral added back in closed form. A real zeta inside (a, b) needs
    ``side`` (+1 or -1) and yields the boundary value from that half-plane;
    ``side=0`` gives the principal value.
    """
    zeta = complex(zeta)
    x0 = zeta.real
    on_axis = zeta.imag == 0.0
    if on_axis and x0 in (a, b):
        raise DomainError(f"Cauchy integral is singular at the endpoint {x0}")
    if on_axis and a < x0 < b and side is None:
        raise DomainError("real evaluation point inside the interval needs a side")

    near = a < x0 < b and abs(zeta.imag) < (b - a) / panels
    if not near:
        return integrate(lambda s: func(s) / (s - zeta), a, b, panels, order)

    f0 = complex(np.asarray(func(np.array([x0])))[0])
    smooth = integrate(lambda s: (func(s) - f0) / (s - zeta), a, b, panels, order,
                       breakpoints=(x0,))
    if on_axis:
        log_term = np.log((b - x0) / (x0 - a)) + 1j * np.pi * side
    else:
        log_term = np.log((b - zeta) / (a - zeta))
    return smooth + f0 * log_term


def principal_value(func: Integrand, a: float, b: float, x0: float, **kwargs) -> complex:
    """PV integral of func(s)/(s - x0) over [a, b]."""
    return cauchy_integral(func, a, b, complex(x0), side=0, **kwargs)


def panels_for(a: float, b: float) -> int:
    """Panel count for an interval: the default, or two per unit length."""
    return max(Config.GL_PANELS, int(math.ceil(b - a)) * 2)
