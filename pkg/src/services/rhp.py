"""
Real-line Riemann-Hilbert machinery and inverse scattering.

Cauchy transforms are evaluated by the trapezoid rule, with linear
subtraction close to the axis. Boundary values use the odd-even grid Hilbert
transform, so the discrete Plemelj relation C_+ - C_- = id holds exactly.
The small-norm problem mu = C_-[(mu + 1) R] is solved by fixed-point
iteration, falling back to a dense or GMRES collocation solve.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Tuple

import numpy as np
from numpy.typing import NDArray
from scipy.signal import fftconvolve
from scipy.sparse.linalg import LinearOperator, gmres

from config import Config
from src.models.core import FieldState, SampledComplexFunction
from src.models.rhp import JumpProblem, PoleData
from src.models.scattering import ScatteringData
from src.services.core import residue_exponent_w, residue_exponent_z
from src.services.errors import ContractViolation, DomainError, LabError, SmallNormError
from src.services.solitons import soliton_point, w_couplings, z_couplings

logger = logging.getLogger(__name__)

IDENTITY = np.eye(2, dtype=complex)
DIVERGENCE_GRACE = 3


# -- Cauchy operators --------------------------------------------------------

@lru_cache(maxsize=8)
def _odd_kernel(n: int) -> NDArray[np.float64]:
    offsets = np.arange(-(n - 1), n)
    kernel = np.zeros(offsets.size)
    odd = offsets % 2 != 0
    kernel[odd] = -2.0 / (np.pi * offsets[odd])
    return kernel


def hilbert_transform(values) -> NDArray[np.complex128]:
    """H[f](s_j) = (1/pi) PV int f(s)/(s - s_j) ds on a uniform grid.

    Odd-even rule: only nodes at an odd offset from s_j contribute, each with
    weight 2/(pi (k - j)); the grid spacing cancels. Works along axis 0.
    """
    values = np.asarray(values, dtype=complex)
    n = values.shape[0]
    kernel = _odd_kernel(n).reshape((-1,) + (1,) * (values.ndim - 1))
    full = fftconvolve(values, kernel, mode='full', axes=0)
    return full[n - 1:2 * n - 1]


def _c_minus(values: NDArray) -> NDArray[np.complex128]:
    return -0.5 * values - 0.5j * hilbert_transform(values)


def _c_plus(values: NDArray) -> NDArray[np.complex128]:
    return 0.5 * values - 0.5j * hilbert_transform(values)


def cauchy_boundary(f: SampledComplexFunction, side: str) -> SampledComplexFunction:
    """C_+-[f] = +-f/2 - (i/2) H[f]."""
    if side == 'plus':
        return SampledComplexFunction(f.grid, _c_plus(f.values))
    if side == 'minus':
        return SampledComplexFunction(f.grid, _c_minus(f.values))
    raise DomainError(f"side must be 'plus' or 'minus', got {side!r}")


def _trapezoid_cauchy(grid: NDArray, values: NDArray, h: float, zeta: complex) -> NDArray:
    kernel = h / (grid - zeta)
    kernel[[0, -1]] *= 0.5
    kernel = kernel.reshape((-1,) + (1,) * (values.ndim - 1))
    return np.sum(values * kernel, axis=0) / (2j * np.pi)


def cauchy_transform(f: SampledComplexFunction, zeta: complex) -> complex:
    """C[f](zeta) = (1/2 pi i) int f(s)/(s - zeta) ds for zeta off the axis."""
    zeta = complex(zeta)
    if zeta.imag == 0:
        raise DomainError("Cauchy transform on the axis; use cauchy_boundary")
    grid, h = f.grid, f.h
    if abs(zeta.imag) >= Config.NEAR_AXIS_FACTOR * h or not grid[0] < zeta.real < grid[-1]:
        return complex(_trapezoid_cauchy(grid, f.values, h, zeta))

    x0 = zeta.real
    f0 = complex(f(np.array([x0]))[0])
    f1 = complex(f.derivative(np.array([x0]))[0])
    a, b = grid[0], grid[-1]
    remainder = f.values - f0 - f1 * (grid - x0)
    log_term = np.log((b - zeta) / (a - zeta))
    linear = f0 * log_term + f1 * ((b - a) + (zeta - x0) * log_term)
    return complex(_trapezoid_cauchy(grid, remainder, h, zeta) + linear / (2j * np.pi))


# -- small-norm solver -------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SmallNormSolution:
    """mu = M_- - 1 on the contour plus the moment lim zeta (M - 1)."""
    problem: JumpProblem
    mu: NDArray[np.complex128]
    moment: NDArray[np.complex128]
    iterations: int
    method: str
    residual: float

    @property
    def density(self) -> NDArray[np.complex128]:
        return np.matmul(self.mu + IDENTITY, self.problem.jump)

    def __call__(self, zeta: complex) -> NDArray[np.complex128]:
        """M(zeta) = 1 + C[(mu + 1) R](zeta)."""
        grid = self.problem.contour
        density = self.density
        out = IDENTITY.copy()
        for i in range(2):
            for j in range(2):
                entry = SampledComplexFunction(grid, density[:, i, j])
                out[i, j] += cauchy_transform(entry, zeta)
        return out

    def boundary_values(self) -> Tuple[NDArray, NDArray]:
        minus = self.mu + IDENTITY
        return minus + self.density, minus


def _collocation_operator(jump: NDArray) -> LinearOperator:
    """Row-vector operator m -> m - C_-[m R], unknowns stacked as [m_1; m_2]."""
    n = jump.shape[0]

    def matvec(vec):
        m = np.asarray(vec, dtype=complex).reshape(2, n).T
        g = np.einsum('nj,njk->nk', m, jump)
        return (m - _c_minus(g)).T.ravel()

    return LinearOperator((2 * n, 2 * n), matvec=matvec, dtype=complex)


def _dense_collocation(jump: NDArray) -> NDArray[np.complex128]:
    n = jump.shape[0]
    offsets = np.arange(n)[None, :] - np.arange(n)[:, None]
    hilbert = np.zeros((n, n))
    odd = offsets % 2 != 0
    hilbert[odd] = 2.0 / (np.pi * offsets[odd])
    c_minus = -0.5 * np.eye(n) - 0.5j * hilbert
    matrix = np.eye(2 * n, dtype=complex)
    for k in range(2):
        for j in range(2):
            matrix[k * n:(k + 1) * n, j * n:(j + 1) * n] -= c_minus * jump[None, :, j, k]
    return matrix


def _direct_solve(jump: NDArray, source: NDArray) -> Tuple[NDArray, str]:
    n = jump.shape[0]
    rhs = np.stack([source[:, i, :].T.ravel() for i in range(2)], axis=1)
    if n <= Config.DENSE_FALLBACK_NODES:
        sol = np.linalg.solve(_dense_collocation(jump), rhs)
        method = 'dense'
    else:
        operator = _collocation_operator(jump)
        sol = np.empty_like(rhs)
        for i in range(2):
            sol[:, i], info = gmres(operator, rhs[:, i], rtol=Config.FIXED_POINT_TOL, atol=0.0,
                                    restart=Config.GMRES_RESTART, maxiter=Config.GMRES_MAX_ITER)
            if info != 0:
                raise SmallNormError(f"GMRES did not converge (info={info})")
        method = 'gmres'
    mu = np.empty((n, 2, 2), dtype=complex)
    for i in range(2):
        mu[:, i, :] = sol[:, i].reshape(2, n).T
    return mu, method


def solve_small_norm(problem: JumpProblem, threshold: Optional[float] = None) -> SmallNormSolution:
    """Solve mu = C_-[(mu + 1) R]; M(zeta) = 1 + C[(mu + 1) R](zeta)."""
    threshold = Config.SMALL_NORM_THRESHOLD if threshold is None else threshold
    norm = problem.norm()
    if norm >= threshold:
        raise SmallNormError(f"max |R| = {norm:.3e} exceeds the small-norm threshold {threshold}")
    jump = problem.jump
    source = _c_minus(jump)

    mu = source.copy()
    previous = np.inf
    method = 'fixed-point'
    converged = False
    iterations = 0
    for iterations in range(1, Config.FIXED_POINT_MAX_ITER + 1):
        updated = _c_minus(np.matmul(mu, jump)) + source
        change = float(np.max(np.abs(updated - mu)))
        mu = updated
        if change < Config.FIXED_POINT_TOL:
            converged = True
            break
        if change > previous and iterations > DIVERGENCE_GRACE:
            logger.warning(f"Fixed-point iteration stopped contracting after {iterations} steps")
            break
        previous = change
    if not converged:
        mu, method = _direct_solve(jump, source)

    density = np.matmul(mu + IDENTITY, jump)
    residual = float(np.max(np.abs(mu - _c_minus(density))))
    if not np.isfinite(residual) or residual > Config.SMALL_NORM_THRESHOLD:
        raise SmallNormError(f"singular integral equation residual {residual:.3e}")
    moment = -problem.h * np.sum(density, axis=0) / (2j * np.pi)
    return SmallNormSolution(problem=problem, mu=mu, moment=moment, iterations=iterations,
                             method=method, residual=residual)


def solve_with_poles(problem: JumpProblem) -> Tuple[complex, complex]:
    """[M(0)]_11 and lim zeta [M]_12 with radiation and simple poles.

    First-row ansatz M = e_1 + P(zeta) + C[M_- R], with P carrying the poles;
    the boundary values and the residue amplitudes are solved together.
    """
    poles = problem.poles
    if poles is None or len(poles) == 0:
        solution = solve_small_norm(problem)
        i0 = problem.origin_index()
        return complex(1.0 + solution.mu[i0, 0, 0]), complex(solution.moment[0, 1])

    grid, jump, h, n = problem.contour, problem.jump, problem.h, problem.size
    p, kappa_j, eta_j = poles.poles, poles.kappa, poles.eta
    count = p.size
    if np.min(np.abs(p.imag)) < Config.NEAR_AXIS_FACTOR * h:
        logger.warning("A pole lies within a few grid steps of the contour")
    pole_gap = p[:, None] - np.conj(p)[None, :]
    to_pole = 1.0 / (grid[None, :] - p[:, None])
    to_conj = 1.0 / (grid[None, :] - np.conj(p)[:, None])
    scale_a = np.maximum(1.0, np.abs(kappa_j))
    scale_b = np.maximum(1.0, np.abs(eta_j))

    def matvec(vec):
        vec = np.asarray(vec, dtype=complex)
        m = vec[:2 * n].reshape(2, n).T
        a = vec[2 * n:2 * n + count]
        b = vec[2 * n + count:]
        g = np.einsum('nj,njk->nk', m, jump)
        rational = np.stack([a @ to_pole, b @ to_conj], axis=1)
        eq_nodes = m - _c_minus(g) - rational
        c_at_pole = h * (to_pole @ g[:, 1]) / (2j * np.pi)
        c_at_conj = h * (to_conj @ g[:, 0]) / (2j * np.pi)
        eq_a = (a - kappa_j * (b @ (1.0 / pole_gap).T + c_at_pole)) / scale_a
        eq_b = (b - eta_j * (a @ (-1.0 / pole_gap) + c_at_conj)) / scale_b
        return np.concatenate([eq_nodes.T.ravel(), eq_a, eq_b])

    size = 2 * n + 2 * count
    operator = LinearOperator((size, size), matvec=matvec, dtype=complex)
    rhs = np.zeros(size, dtype=complex)
    rhs[:n] = 1.0
    rhs[2 * n + count:] = eta_j / scale_b
    guess = np.zeros(size, dtype=complex)
    guess[:n] = 1.0
    sol, info = gmres(operator, rhs, x0=guess, rtol=Config.FIXED_POINT_TOL, atol=0.0,
                      restart=Config.GMRES_RESTART, maxiter=Config.GMRES_MAX_ITER)
    if info != 0:
        raise SmallNormError(f"GMRES on the pole-augmented system did not converge (info={info})")
    m = sol[:2 * n].reshape(2, n).T
    b = sol[2 * n + count:]
    g12 = np.einsum('nj,nj->n', m, jump[:, :, 1])
    limit = np.sum(b) - h * np.sum(g12) / (2j * np.pi)
    return complex(m[problem.origin_index(), 0]), complex(limit)


# -- jump assembly -----------------------------------------------------------

def contour_grid(spec: Tuple[float, float, int] = Config.CONTOUR) -> NDArray[np.float64]:
    """Uniform contour nodes; the count is made odd so a symmetric contour has a node at 0."""
    lo, hi, n = spec
    grid = np.linspace(lo, hi, int(n) | 1)
    nearest = int(np.argmin(np.abs(grid)))
    if abs(grid[nearest]) < 1e-12 * (hi - lo):
        grid[nearest] = 0.0
    return grid


def _unimodular(exponent_fn, grid: NDArray, t: float, x: float) -> NDArray[np.complex128]:
    safe = np.where(grid == 0, 1.0, grid)
    return np.exp(exponent_fn(safe, t, x))


def jump_w(data: ScatteringData, t: float, x: float, contour: Optional[NDArray] = None) -> JumpProblem:
    """R(w) = [[w|r|^2, conj(r) e^{-theta}], [w r e^{theta}, 0]], R(0) = 0."""
    grid = contour_grid() if contour is None else np.asarray(contour, dtype=float)
    r = data.r(grid)
    phase = _unimodular(residue_exponent_w, grid, t, x)
    jump = np.zeros((grid.size, 2, 2), dtype=complex)
    jump[:, 0, 0] = grid * np.abs(r) ** 2
    jump[:, 0, 1] = np.conj(r * phase)
    jump[:, 1, 0] = grid * r * phase
    jump[grid == 0] = 0.0
    poles = PoleData(*w_couplings(data.spectrum, t, x)) if len(data.spectrum) else None
    return JumpProblem(contour=grid, jump=jump, poles=poles, side='w')


def jump_z(data: ScatteringData, t: float, x: float, contour: Optional[NDArray] = None) -> JumpProblem:
    """R^(z) = [[0, -conj(r^) e^{-theta^}], [-z r^ e^{theta^}, z|r^|^2]], R^(0) = 0."""
    grid = contour_grid() if contour is None else np.asarray(contour, dtype=float)
    r_hat = data.r_hat(grid)
    phase = _unimodular(residue_exponent_z, grid, t, x)
    jump = np.zeros((grid.size, 2, 2), dtype=complex)
    jump[:, 0, 1] = -np.conj(r_hat * phase)
    jump[:, 1, 0] = -grid * r_hat * phase
    jump[:, 1, 1] = grid * np.abs(r_hat) ** 2
    jump[grid == 0] = 0.0
    poles = PoleData(*z_couplings(data.spectrum, t, x)) if len(data.spectrum) else None
    return JumpProblem(contour=grid, jump=jump, poles=poles, side='z')


# -- reconstruction ----------------------------------------------------------

def _component(problem: JumpProblem) -> complex:
    m11, limit = solve_with_poles(problem)
    return complex(m11 * np.conj(limit))


def reconstruct_point(data: ScatteringData, t: float, x: float, with_poles: bool = False,
                      contour: Optional[NDArray] = None) -> Tuple[complex, complex]:
    """(u, v) at (t, x) from scattering data given at t = 0."""
    if data.reflectionless:
        return soliton_point(data.spectrum, t, x)
    if len(data.spectrum) and not with_poles:
        raise ContractViolation("data carry eigenvalues; pass with_poles=True to include them")
    u = _component(jump_w(data, t, x, contour))
    v = _component(jump_z(data, t, x, contour))
    return u, v


def reconstruct_fields(data: ScatteringData, t: float, x_grid, with_poles: bool = False,
                       contour: Optional[NDArray] = None) -> FieldState:
    """Inverse scattering on a uniform x grid; failed points are NaN and listed in metadata."""
    xs = np.asarray(x_grid, dtype=float)
    if xs.ndim != 1 or xs.size < 2:
        raise ContractViolation("x_grid needs at least two nodes")
    u = np.empty(xs.size, dtype=complex)
    v = np.empty(xs.size, dtype=complex)
    failures = []
    for i, x in enumerate(xs):
        try:
            u[i], v[i] = reconstruct_point(data, t, float(x), with_poles, contour)
        except ContractViolation:
            raise
        except LabError as e:
            logger.warning(f"Reconstruction failed at x = {x:.6g}: {e}")
            u[i] = v[i] = np.nan
            failures.append(float(x))
    dx = float((xs[-1] - xs[0]) / (xs.size - 1))
    logger.info(f"Reconstructed {xs.size - len(failures)}/{xs.size} points at t = {t}")
    return FieldState(t=t, x_start=float(xs[0]), dx=dx, u=u, v=v,
                      metadata={'failures': failures, 'with_poles': with_poles})
