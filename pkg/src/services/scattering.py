"""
Direct scattering for the massive Thirring model.

The Lax operator is gauge-transformed to the forms L(w) (regular at w = inf)
and L^(z) (regular at z = inf), with w = lambda^-2 and z = lambda^2; their
entries are listed in docs/transformed_operators.md. Jost columns are
integrated with classical RK4 at step dx using spectrally interpolated
half-cell values, after factoring the free oscillation out analytically.
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from numpy.typing import NDArray

from config import Config
from src.models.core import FieldState, SampledComplexFunction
from src.models.scattering import DiscreteSpectrum, ScatteringData, TransitionCoefficients
from src.services.core import second_quadrant_root
from src.services.errors import (
    ContractViolation, DomainError, EigenvalueAccuracyError, NonSimpleSpectrumError,
    ResolutionError, ResonanceError,
)

logger = logging.getLogger(__name__)

Entries = Tuple[NDArray, NDArray, NDArray, NDArray]
Box = Tuple[float, float, float, float]

CAUCHY_POINTS = 16
ARG_STEP_LIMIT = math.pi / 4
MAX_REFINEMENTS = 12
SUPPORT_FLOOR = 1e-15


@dataclass(frozen=True)
class _Profile:
    """u, v and their x-derivatives at nodes and half nodes, interleaved."""
    positions: NDArray[np.float64]
    u: NDArray[np.complex128]
    v: NDArray[np.complex128]
    ux: NDArray[np.complex128]
    vx: NDArray[np.complex128]
    h: float

    @property
    def nodes(self) -> int:
        return (self.positions.size + 1) // 2


def _interleave(nodes: NDArray, halves: NDArray) -> NDArray:
    out = np.empty(nodes.size + halves.size, dtype=complex)
    out[0::2] = nodes
    out[1::2] = halves
    return out


def _profile(fields: FieldState) -> _Profile:
    n, dx = fields.size, fields.dx
    kx = 2 * np.pi * np.fft.fftfreq(n, d=dx)
    if n % 2 == 0:
        kx[n // 2] = 0.0
    shift = np.exp(0.5j * kx * dx)

    def spectral(f):
        spec = np.fft.fft(f)
        deriv = np.fft.ifft(1j * kx * spec)
        half = np.fft.ifft(spec * shift)[:-1]
        half_deriv = np.fft.ifft(1j * kx * spec * shift)[:-1]
        return _interleave(f, half), _interleave(deriv, half_deriv)

    u, ux = spectral(fields.u)
    v, vx = spectral(fields.v)
    positions = fields.x_start + 0.5 * dx * np.arange(2 * n - 1)
    return _Profile(positions, u, v, ux, vx, dx)


def trim_to_support(fields: FieldState, floor: float = SUPPORT_FLOOR, margin: float = 4.0) -> FieldState:
    """Cut the grid to where the fields exceed floor, plus a margin."""
    amp = np.maximum(np.abs(fields.u), np.abs(fields.v))
    live = np.nonzero(amp > floor)[0]
    if live.size == 0:
        return fields.replace(x_start=0.0, u=np.zeros(2, complex), v=np.zeros(2, complex))
    pad = int(math.ceil(margin / fields.dx))
    lo = max(0, live[0] - pad)
    hi = min(fields.size, live[-1] + pad + 1)
    return fields.replace(x_start=fields.x_start + lo * fields.dx,
                          u=fields.u[lo:hi], v=fields.v[lo:hi])


def _w_coefficients(p: _Profile, n: int, w: NDArray) -> Tuple[NDArray, NDArray, NDArray]:
    u, v, ux = p.u[n], p.v[n], p.ux[n]
    inv = 1.0 / w
    uv = u * np.conj(v)
    q = -0.25j * (abs(u) ** 2 + abs(v) ** 2) + 0.5j * uv * inv
    l12 = 0.5j * (np.conj(u) - np.conj(v) * inv)
    l21 = ux - 0.5j * (v + abs(v) ** 2 * u) + 0.5j * u * (1 + uv) * inv
    return q, l12, l21


def _z_coefficients(p: _Profile, n: int, z: NDArray) -> Tuple[NDArray, NDArray, NDArray]:
    u, v, vx = p.u[n], p.v[n], p.vx[n]
    inv = 1.0 / z
    vu = np.conj(u) * v
    q = 0.25j * (abs(u) ** 2 + abs(v) ** 2) - 0.5j * vu * inv
    l12 = 0.5j * (np.conj(u) * inv - np.conj(v))
    l21 = vx + 0.5j * (u + abs(u) ** 2 * v) - 0.5j * v * (1 + vu) * inv
    return q, l12, l21


def _rk4(p: _Profile, entries: Callable[[int], Entries], y1: NDArray, y2: NDArray,
         start: int, stop: int) -> Tuple[NDArray, NDArray]:
    """Integrate y' = A(x) y from node start to node stop (either direction)."""
    step = 1 if stop > start else -1
    hh = step * p.h

    def apply(e, a, b):
        return e[0] * a + e[1] * b, e[2] * a + e[3] * b

    e0 = entries(2 * start)
    for j in range(start, stop, step):
        e1 = entries(2 * j + step)
        e2 = entries(2 * (j + step))
        k1 = apply(e0, y1, y2)
        k2 = apply(e1, y1 + 0.5 * hh * k1[0], y2 + 0.5 * hh * k1[1])
        k3 = apply(e1, y1 + 0.5 * hh * k2[0], y2 + 0.5 * hh * k2[1])
        k4 = apply(e2, y1 + hh * k3[0], y2 + hh * k3[1])
        y1 = y1 + hh / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
        y2 = y2 + hh / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
        e0 = e2
    return y1, y2


def _dressed_sweep(p: _Profile, points: NDArray, side: str) -> Tuple[NDArray, NDArray]:
    """Dressed first Jost column at the right end for real spectral points."""
    coefficients = _w_coefficients if side == 'w' else _z_coefficients
    sign = 1.0 if side == 'w' else -1.0
    k = (points - 1.0 / points) / 4

    def entries(n):
        q, l12, l21 = coefficients(p, n, points)
        phase = np.exp(2j * sign * k * p.positions[n])
        return q, l12 * phase, l21 / phase, -q

    ones = np.ones(points.size, dtype=complex)
    return _rk4(p, entries, ones, np.zeros_like(ones), 0, p.nodes - 1)


def _wronskian(p: _Profile, w: NDArray) -> Tuple[NDArray, NDArray, NDArray, float]:
    """a(w) = det[mu, nu] at mid-grid for w in the upper half-plane.

    mu = e^{ikx} Psi^-_1 runs rightwards from (1, 0), nu = e^{-ikx} Psi^+_2
    leftwards from (0, 1); both are bounded for Im k > 0.
    """
    k = (w - 1.0 / w) / 4
    mid = (p.nodes - 1) // 2

    def mu_entries(n):
        q, l12, l21 = _w_coefficients(p, n, w)
        return q, l12, l21, 2j * k - q

    def nu_entries(n):
        q, l12, l21 = _w_coefficients(p, n, w)
        return q - 2j * k, l12, l21, -q

    ones = np.ones(w.size, dtype=complex)
    zeros = np.zeros_like(ones)
    mu = _rk4(p, mu_entries, ones, zeros, 0, mid)
    nu = _rk4(p, nu_entries, zeros, ones, p.nodes - 1, mid)
    a = mu[0] * nu[1] - mu[1] * nu[0]
    return a, np.vstack(mu), np.vstack(nu), float(p.positions[2 * mid])


def _coerce_points(points) -> NDArray[np.complex128]:
    pts = np.atleast_1d(np.asarray(points, dtype=complex))
    if np.any(pts == 0):
        raise DomainError("spectral parameter must be nonzero")
    return pts


def _transition(p: _Profile, points: NDArray, side: str) -> TransitionCoefficients:
    a = np.empty(points.size, dtype=complex)
    b = np.full(points.size, np.nan, dtype=complex)
    real = points.imag == 0
    if np.any(real):
        m1, m2 = _dressed_sweep(p, points[real].real.astype(complex), side)
        a[real] = m1
        b[real] = m2 / points[real]
    if np.any(~real):
        if side != 'w':
            raise DomainError("off-axis transition coefficients are only available on the w-side")
        off = points[~real]
        if np.any(off.imag < 0):
            raise DomainError("off-axis evaluation requires Im w > 0")
        a[~real] = _wronskian(p, off)[0]
    if not np.all(np.isfinite(a)):
        raise ResolutionError(f"{side}-side Jost integration diverged")
    return TransitionCoefficients(points=points, a=a, b=b, side=side)


def transition_w(fields: FieldState, w) -> TransitionCoefficients:
    """a(w), b(w); b is NaN off the real axis."""
    return _transition(_profile(fields), _coerce_points(w), 'w')


def transition_z(fields: FieldState, z) -> TransitionCoefficients:
    """a^(z), b^(z) from the independent z-side problem (real z only)."""
    return _transition(_profile(fields), _coerce_points(z), 'z')


def _reflection(p: _Profile, grid: NDArray, side: str,
                resonance_tol: float) -> Tuple[SampledComplexFunction, float]:
    grid = np.asarray(grid, dtype=float)
    nonzero = grid != 0
    values = np.zeros(grid.size, dtype=complex)
    coeffs = _transition(p, grid[nonzero].astype(complex), side)
    margin = float(np.min(np.abs(coeffs.a))) if coeffs.a.size else 1.0
    if margin <= resonance_tol:
        where = grid[nonzero][int(np.argmin(np.abs(coeffs.a)))]
        raise ResonanceError(f"|a| = {margin:.2e} at {side} = {where:.4f}; data are not generic")
    values[nonzero] = coeffs.b / coeffs.a
    return SampledComplexFunction(grid, values), margin


def reflection(fields: FieldState, grid, side: str = 'w',
               resonance_tol: float = Config.RESONANCE_TOL) -> SampledComplexFunction:
    """r = b/a on a real grid (side 'w') or r^ = b^/a^ (side 'z')."""
    if side not in ('w', 'z'):
        raise ContractViolation(f"unknown side {side!r}")
    return _reflection(_profile(fields), grid, side, resonance_tol)[0]


def transformed_relation_defect(fields: FieldState, z_nodes) -> float:
    """max |r^(z) - r(1/z)/z| with both sides integrated at the nodes."""
    z = np.asarray(z_nodes, dtype=float)
    p = _profile(fields)
    zc = _transition(p, z.astype(complex), 'z')
    wc = _transition(p, (1.0 / z).astype(complex), 'w')
    return float(np.max(np.abs(zc.b / zc.a - (wc.b / wc.a) / z)))


# -- discrete spectrum -------------------------------------------------------

def _a_prime(p: _Profile, w: NDArray) -> NDArray:
    """Cauchy-integral derivative on circles that stay in the upper half-plane."""
    radius = np.minimum(1e-3 * np.maximum(1.0, np.abs(w)), 0.5 * w.imag)
    theta = 2 * np.pi * np.arange(CAUCHY_POINTS) / CAUCHY_POINTS
    ring = np.exp(1j * theta)
    points = (w[:, None] + radius[:, None] * ring[None, :]).ravel()
    a = _wronskian(p, points)[0].reshape(w.size, CAUCHY_POINTS)
    return np.mean(a * np.conj(ring)[None, :], axis=1) / radius


def _rectangle(box: Box, density: float) -> NDArray:
    x0, x1, y0, y1 = box
    corners = [complex(x0, y0), complex(x1, y0), complex(x1, y1), complex(x0, y1)]
    path = []
    for start, end in zip(corners, corners[1:] + corners[:1]):
        n = max(16, int(math.ceil(abs(end - start) * density)))
        path.append(start + (end - start) * np.arange(n) / n)
    return np.concatenate(path)


def _winding(p: _Profile, path: NDArray) -> Tuple[int, NDArray, NDArray]:
    """Winding number of a(w) along a closed polyline, refined until every
    argument increment is below ARG_STEP_LIMIT."""
    a = _wronskian(p, path)[0]
    for _ in range(MAX_REFINEMENTS):
        if np.min(np.abs(a)) < Config.NEWTON_TOL:
            raise ResolutionError("a(w) vanishes on the counting contour")
        steps = np.angle(np.roll(a, -1) / a)
        bad = np.nonzero(np.abs(steps) > ARG_STEP_LIMIT)[0]
        if bad.size == 0:
            return int(round(np.sum(steps) / (2 * np.pi))), path, a
        mids = 0.5 * (path[bad] + np.roll(path, -1)[bad])
        a_mid = _wronskian(p, mids)[0]
        path = np.insert(path, bad + 1, mids)
        a = np.insert(a, bad + 1, a_mid)
    raise ResolutionError("argument increments did not resolve on the counting contour")


def _count_zeros(p: _Profile, box: Box, verify: bool = False) -> int:
    count, path, a = _winding(p, _rectangle(box, density=8.0))
    if verify:
        mids = 0.5 * (path + np.roll(path, -1))
        fine = np.empty(2 * path.size, dtype=complex)
        fine[0::2], fine[1::2] = path, mids
        refined = _winding(p, fine)[0]
        if refined != count:
            raise ResolutionError(f"zero count {count} on the coarse contour but {refined} on the refined one")
    return count


def _newton(p: _Profile, box: Box) -> complex:
    x0, x1, y0, y1 = box
    w = complex(0.5 * (x0 + x1), 0.5 * (y0 + y1))
    for _ in range(Config.NEWTON_MAX_ITER):
        a = _wronskian(p, np.array([w]))[0][0]
        if abs(a) <= Config.NEWTON_TOL:
            break
        w = w - a / _a_prime(p, np.array([w]))[0]
        if w.imag <= 0:
            raise ResolutionError("Newton iteration left the upper half-plane")
    else:
        raise ResolutionError(f"Newton iteration did not reach |a| <= {Config.NEWTON_TOL}")
    pad_x, pad_y = 0.1 * (x1 - x0), 0.1 * (y1 - y0)
    if not (x0 - pad_x <= w.real <= x1 + pad_x and y0 - pad_y <= w.imag <= y1 + pad_y):
        raise ResolutionError(f"Newton converged to {w} outside its isolating box")
    derivative = _a_prime(p, np.array([w]))[0]
    if abs(derivative) < Config.SIMPLE_ZERO_TOL:
        raise NonSimpleSpectrumError(f"|a'(w)| = {abs(derivative):.2e} at w = {w}")
    return w


def _split(box: Box, fraction: float) -> List[Box]:
    x0, x1, y0, y1 = box
    xm = x0 + fraction * (x1 - x0)
    ym = y0 + fraction * (y1 - y0)
    return [(x0, xm, y0, ym), (xm, x1, y0, ym), (x0, xm, ym, y1), (xm, x1, ym, y1)]


def _isolate(p: _Profile, box: Box, count: int, depth: int = 0) -> List[complex]:
    if count == 0:
        return []
    size = max(box[1] - box[0], box[3] - box[2])
    if count == 1 and size <= Config.ISOLATION_SIZE:
        return [_newton(p, box)]
    if depth >= Config.MAX_QUADRISECTION_DEPTH:
        raise ResolutionError(f"{count} zeros could not be separated inside {box}")
    for fraction in (0.5, 0.513):
        children = _split(box, fraction)
        counts = [_count_zeros(p, child) for child in children]
        if sum(counts) == count:
            break
    else:
        raise ResolutionError(f"subdivision of {box} loses zeros: {counts} vs {count}")
    found: List[complex] = []
    for child, n in zip(children, counts):
        found.extend(_isolate(p, child, n, depth + 1))
    return found


def _find_w_zeros(p: _Profile, search_box: Optional[Box]) -> List[complex]:
    box = tuple(search_box or Config.SEARCH_BOX)
    if box[2] <= 0:
        raise ContractViolation("search box must stay in the open upper half-plane")
    total = _count_zeros(p, box, verify=True)
    logger.info(f"Argument principle: {total} zero(s) of a(w) in {box}")
    zeros = _isolate(p, box, total)
    return sorted(zeros, key=lambda w: (round(w.real, 12), round(w.imag, 12)))


def find_eigenvalues(fields: FieldState, search_box: Optional[Box] = None) -> List[complex]:
    """lambda_j in the second quadrant with a(lambda_j^-2) = 0."""
    p = _profile(fields)
    return [second_quadrant_root(w) for w in _find_w_zeros(p, search_box)]


def _norming(p: _Profile, w: NDArray) -> DiscreteSpectrum:
    a, mu, nu, x_mid = _wronskian(p, w)
    bad = np.abs(a) > Config.EIGENVALUE_ZERO_TOL
    if np.any(bad):
        raise EigenvalueAccuracyError(f"|a(w)| = {np.max(np.abs(a[bad])):.2e} exceeds "
                                      f"{Config.EIGENVALUE_ZERO_TOL}; not an eigenvalue")
    ratio = np.sum(np.conj(nu) * mu, axis=0) / np.sum(np.abs(nu) ** 2, axis=0)
    residual = np.linalg.norm(mu - ratio[None, :] * nu, axis=0) / np.linalg.norm(mu, axis=0)
    if np.any(residual > Config.PROPORTIONALITY_TOL):
        raise EigenvalueAccuracyError(f"Jost columns not proportional, residual {np.max(residual):.2e}")
    k = (w - 1.0 / w) / 4
    gamma = ratio * np.exp(-2j * k * x_mid)
    c = gamma / _a_prime(p, w)
    lam = np.array([second_quadrant_root(wj) for wj in w])
    return DiscreteSpectrum(lam, -0.5 * c * lam ** 4)


def norming_constants(fields: FieldState, w_list: Sequence[complex]) -> DiscreteSpectrum:
    """c_j = Gamma_j / a'(w_j), returned through C_j = -c_j lambda_j^4 / 2."""
    w = np.atleast_1d(np.asarray(w_list, dtype=complex))
    if w.size == 0:
        return DiscreteSpectrum()
    if np.any(w.imag <= 0):
        raise DomainError("eigenvalues w_j lie in the upper half-plane")
    return _norming(_profile(fields), w)


def default_grid(spec: Tuple[float, float, int]) -> NDArray[np.float64]:
    lo, hi, n = spec
    return np.linspace(lo, hi, int(n))


def scattering_data(fields: FieldState, w_grid=None, z_grid=None,
                    search_box: Optional[Box] = None, with_spectrum: bool = True,
                    resonance_tol: float = Config.RESONANCE_TOL) -> ScatteringData:
    """Reflection coefficients on both sides plus eigenvalues and norming constants."""
    fields = trim_to_support(fields)
    p = _profile(fields)
    w_grid = default_grid(Config.W_GRID) if w_grid is None else np.asarray(w_grid, float)
    z_grid = default_grid(Config.Z_GRID) if z_grid is None else np.asarray(z_grid, float)
    r, margin_w = _reflection(p, w_grid, 'w', resonance_tol)
    r_hat, margin_z = _reflection(p, z_grid, 'z', resonance_tol)
    spectrum = DiscreteSpectrum()
    if with_spectrum:
        zeros = _find_w_zeros(p, search_box)
        if zeros:
            spectrum = _norming(p, np.array(zeros))
    data = ScatteringData(r=r, r_hat=r_hat, spectrum=spectrum,
                          resonance_margin=min(margin_w, margin_z))
    logger.info(f"Scattering data: {len(spectrum)} eigenvalue(s), max|r| = {r.max_abs():.3e}, "
                f"positivity bound {data.positivity:.4f}")
    return data


def evolve_scattering(data: ScatteringData, t: float) -> ScatteringData:
    """Linear time flow p -> p exp(-it(lambda^2 + lambda^-2)/2)."""
    if t == 0:
        return data

    def flow(grid, values):
        safe = np.where(grid == 0, 1.0, grid)
        factor = np.exp(-0.5j * t * (safe + 1.0 / safe))
        return np.where(grid == 0, 0.0, values * factor)

    lam = data.spectrum.eigenvalues
    norming = data.spectrum.norming * np.exp(-0.5j * t * (lam ** 2 + lam ** -2))
    return data.replace(r=data.r.map(flow), r_hat=data.r_hat.map(flow),
                        spectrum=data.spectrum.with_norming(norming))
