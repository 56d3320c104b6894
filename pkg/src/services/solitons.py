"""
Exact soliton solutions and soliton-resolution data.

N-solitons come from the reflectionless Riemann-Hilbert problem: with r = 0
the first row of M(w) is rational, and the residue conditions at w_j, conj(w_j)
reduce to a 2N x 2N linear system. The same system on the z-side yields v.
The closed-form one-soliton and the C_1 -> (x0, phi0) map are derived in
docs/transformed_operators.md.
"""

import logging
import math
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
from numpy.typing import NDArray

from config import Config
from src.models.core import FieldState
from src.models.scattering import DiscreteSpectrum, ScatteringData
from src.models.solitons import ConePartition, ConeRestriction, SolitonData, SolitonParameters
from src.services.asymptotics import Profile, kappa, kappa_hat
from src.services.core import residue_exponent_w, residue_exponent_z
from src.services.errors import (
    ContractViolation, DegenerateSpectrumError, DomainError, QuadratureError,
)
from src.services.quadrature import integrate, panels_for

logger = logging.getLogger(__name__)

CONE_RTOL = 1e-10
MODULUS_RTOL = 1e-8

Fields = Tuple[NDArray[np.complex128], NDArray[np.complex128]]


def _check_pair(lam: complex, norming: complex) -> None:
    if not (lam.real < 0 < lam.imag):
        raise DomainError(f"lambda_1 = {lam} is not in the open second quadrant")
    if norming == 0:
        raise DomainError("norming constant C_1 must be nonzero")


def one_soliton_parameters(lam: complex, norming: complex) -> SolitonParameters:
    lam, norming = complex(lam), complex(norming)
    _check_pair(lam, norming)
    delta = abs(lam)
    gamma = float(np.angle(lam ** -2))
    scale = 0.5 * (delta ** 2 + delta ** -2)
    energy = scale * math.sin(gamma)
    return SolitonParameters(
        delta=delta,
        gamma=gamma,
        energy=energy,
        frequency=scale * math.cos(gamma),
        velocity=(delta ** -2 - delta ** 2) / (delta ** -2 + delta ** 2),
        x0=math.log(abs(norming) / (delta * math.sin(gamma))) / energy,
        phi0=float(np.angle(norming)) + 0.5 * gamma,
    )


def one_soliton(lam: complex, norming: complex, t: float, x):
    """Closed-form one-soliton (u, v) at time t on the points x."""
    p = one_soliton_parameters(lam, norming)
    xs = np.asarray(x, dtype=float)
    s = p.energy * (xs - p.velocity * t - p.x0)
    carrier = np.exp(-1j * p.frequency * (t - p.velocity * xs) + 1j * p.phi0)
    amplitude = math.sin(p.gamma)
    u = amplitude / p.delta / np.cosh(s - 0.5j * p.gamma) * carrier
    v = -amplitude * p.delta / np.cosh(s + 0.5j * p.gamma) * carrier
    if xs.ndim == 0:
        return complex(u), complex(v)
    return u, v


# -- reflectionless residue systems ------------------------------------------

def _capped_exp(theta: NDArray) -> NDArray[np.complex128]:
    cap = Config.EXPONENT_CAP
    return np.exp(np.clip(theta.real, -cap, cap) + 1j * theta.imag)


def w_couplings(spectrum: DiscreteSpectrum, t: float, x: float) -> Tuple[NDArray, NDArray, NDArray]:
    """Poles w_j and the residue couplings at w_j and conj(w_j)."""
    w = spectrum.w
    c = spectrum.c
    theta = np.atleast_1d(residue_exponent_w(w, t, x))
    kappa_j = c * _capped_exp(theta)
    eta_j = -np.conj(c / w) * _capped_exp(np.conj(theta))
    return w, kappa_j, eta_j


def z_couplings(spectrum: DiscreteSpectrum, t: float, x: float) -> Tuple[NDArray, NDArray, NDArray]:
    """Poles z_j (lower half-plane) and the residue couplings at z_j and conj(z_j)."""
    z = spectrum.z
    c_hat = spectrum.c_hat
    theta = np.atleast_1d(residue_exponent_z(z, t, x))
    kappa_j = z * c_hat * _capped_exp(theta)
    eta_j = -np.conj(c_hat) * _capped_exp(np.conj(theta))
    return z, kappa_j, eta_j


def residue_matrix(poles: NDArray, kappa_j: NDArray, eta_j: NDArray) -> NDArray[np.complex128]:
    """Matrix of the first-row residue conditions in the unknowns (a, b).

    M_11 = 1 + sum a_j/(p - p_j), M_12 = sum b_k/(p - conj p_k);
    a_j = kappa_j M_12(p_j) and b_k = eta_k M_11(conj p_k).
    """
    n = poles.size
    diff = poles[:, None] - np.conj(poles)[None, :]
    matrix = np.eye(2 * n, dtype=complex)
    matrix[:n, n:] = -kappa_j[:, None] / diff
    matrix[n:, :n] = eta_j[:, None] / diff.T
    return matrix


def solve_residues(poles: NDArray, kappa_j: NDArray, eta_j: NDArray) -> Tuple[complex, complex]:
    """[M(0)]_11 and lim p [M(p)]_12 of the reflectionless problem."""
    n = poles.size
    matrix = residue_matrix(poles, kappa_j, eta_j)
    rhs = np.concatenate([np.zeros(n, dtype=complex), eta_j])
    scale = np.max(np.abs(matrix), axis=1)
    matrix = matrix / scale[:, None]
    rhs = rhs / scale
    cond = np.linalg.cond(matrix)
    if not np.isfinite(cond) or cond > Config.CONDITION_LIMIT:
        raise DegenerateSpectrumError(f"residue system condition number {cond:.3e}")
    sol = np.linalg.solve(matrix, rhs)
    a, b = sol[:n], sol[n:]
    return complex(1.0 - np.sum(a / poles)), complex(np.sum(b))


def soliton_point(spectrum: DiscreteSpectrum, t: float, x: float) -> Tuple[complex, complex]:
    """(u, v) of the reflectionless solution at a single (t, x)."""
    if len(spectrum) == 0:
        return 0j, 0j
    m11, limit = solve_residues(*w_couplings(spectrum, t, x))
    u = m11 * np.conj(limit)
    m11, limit = solve_residues(*z_couplings(spectrum, t, x))
    v = m11 * np.conj(limit)
    return complex(u), complex(v)


def soliton_fields(spectrum: DiscreteSpectrum, t: float, x) -> Fields:
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    u = np.zeros(xs.size, dtype=complex)
    v = np.zeros(xs.size, dtype=complex)
    for i, xi in enumerate(xs):
        u[i], v[i] = soliton_point(spectrum, t, float(xi))
    return u, v


def n_soliton(data: SolitonData, t: float, x_grid) -> FieldState:
    """N-soliton fields on a uniform grid."""
    if len(data) > Config.MAX_SOLITONS:
        raise ContractViolation(f"{len(data)} solitons exceed the supported {Config.MAX_SOLITONS}")
    xs = np.asarray(x_grid, dtype=float)
    if xs.ndim != 1 or xs.size < 2:
        raise ContractViolation("x_grid needs at least two nodes")
    u, v = soliton_fields(data, t, xs)
    dx = float((xs[-1] - xs[0]) / (xs.size - 1))
    return FieldState(t=t, x_start=float(xs[0]), dx=dx, u=u, v=v,
                      metadata={'solitons': len(data)})


def mtm_residual(fields: Callable[[float, NDArray], Fields], t: float, x, h: float) -> float:
    """Max modulus of the PDE residual by fourth-order central differences.

    i(u_t + u_x) + v + u|v|^2 and i(v_t - v_x) + u + v|u|^2.
    """
    xs = np.asarray(x, dtype=float)
    weights = np.array([1.0, -8.0, 8.0, -1.0]) / (12.0 * h)
    offsets = np.array([-2.0, -1.0, 1.0, 2.0]) * h
    later = [fields(t + dk, xs) for dk in offsets]
    shifted = [fields(t, xs + dk) for dk in offsets]
    u_t = sum(wk * f[0] for wk, f in zip(weights, later))
    v_t = sum(wk * f[1] for wk, f in zip(weights, later))
    u_x = sum(wk * f[0] for wk, f in zip(weights, shifted))
    v_x = sum(wk * f[1] for wk, f in zip(weights, shifted))
    u, v = fields(t, xs)
    res_u = 1j * (u_t + u_x) + v + u * np.abs(v) ** 2
    res_v = 1j * (v_t - v_x) + u + v * np.abs(u) ** 2
    return float(max(np.max(np.abs(res_u)), np.max(np.abs(res_v))))


# -- cone restriction --------------------------------------------------------

def cone_scale(speed: float) -> float:
    """L(v) = sqrt((1 - v)/(1 + v)), the |lambda|^2 of a soliton moving at speed v."""
    if not -1 < speed < 1:
        raise DomainError(f"speed {speed} must lie in (-1, 1)")
    return math.sqrt((1 - speed) / (1 + speed))


def soliton_speed(lam: complex) -> float:
    m = abs(complex(lam)) ** 2
    return (1.0 / m - m) / (1.0 / m + m)


def cone_partition(spectrum: DiscreteSpectrum, v1: float, v2: float) -> ConePartition:
    """Visible: L(v2) <= |lambda|^2 <= L(v1). Ahead (faster than v2): |lambda|^2 < L(v2)."""
    if not -1 < v1 <= v2 < 1:
        raise DomainError(f"cone speeds must satisfy -1 < v1 <= v2 < 1, got ({v1}, {v2})")
    low, high = cone_scale(v2), cone_scale(v1)
    moduli = np.abs(spectrum.eigenvalues) ** 2
    visible, ahead, behind = [], [], []
    for k, m in enumerate(moduli):
        if m < low * (1 - CONE_RTOL):
            ahead.append(k)
        elif m > high * (1 + CONE_RTOL):
            behind.append(k)
        else:
            visible.append(k)
    return ConePartition(visible=visible, ahead=ahead, behind=behind)


def blaschke_factor(p, p_k: complex):
    """(conj p_k / p_k) ((p - p_k)/(p - conj p_k))^2.

    The expression is the same in w, in z and in lambda^2 variables, and is
    unimodular for real p.
    """
    p = np.asarray(p, dtype=complex)
    p_k = complex(p_k)
    out = np.conj(p_k) / p_k * ((p - p_k) / (p - np.conj(p_k))) ** 2
    return out.item() if out.ndim == 0 else out


def _blaschke_product(points, poles: Sequence[complex]):
    out = np.ones_like(np.asarray(points, dtype=complex))
    for pole in poles:
        out = out * blaschke_factor(points, pole)
    return out


def cone_restrict(data: ScatteringData, v1: float, v2: float,
                  x1: float = 0.0, x2: float = 0.0) -> ConeRestriction:
    """Scattering data of the solution seen inside the cone x = xi + eta t,
    xi in [x1, x2], eta in [v1, v2]."""
    if x1 > x2:
        raise DomainError(f"cone offsets must satisfy x1 <= x2, got ({x1}, {x2})")
    partition = cone_partition(data.spectrum, v1, v2)
    spectrum = data.spectrum
    if not partition.ahead:
        restricted = data.replace(spectrum=spectrum.subset(partition.visible))
        return ConeRestriction(data=restricted, partition=partition)

    w_ahead = spectrum.w[partition.ahead]
    z_ahead = spectrum.z[partition.ahead]
    r = data.r.map(lambda grid, values: values * _blaschke_product(grid, w_ahead))
    r_hat = data.r_hat.map(lambda grid, values: values * _blaschke_product(grid, z_ahead))
    visible = spectrum.subset(partition.visible)
    norming = visible.norming * np.atleast_1d(_blaschke_product(visible.z, z_ahead))
    restricted = data.replace(r=r, r_hat=r_hat, spectrum=visible.with_norming(norming))
    logger.info(f"Cone [{v1}, {v2}]: visible {partition.visible}, ahead {partition.ahead}, "
                f"behind {partition.behind}")
    return ConeRestriction(data=restricted, partition=partition)


# -- soliton resolution ------------------------------------------------------

def radiation_exponent_z(r_hat: Profile, z_j: complex, scale: float) -> complex:
    """(1/pi i) int_{-L0}^{L0} log(1 + z|r^|^2) (1/(z - z_j) - 1/(2z)) dz."""
    g = lambda s: 2 * np.pi * kappa_hat(r_hat, s)
    panels = panels_for(-scale, scale)
    pole = integrate(lambda s: g(s) / (s - z_j), -scale, scale, panels=panels, breakpoints=(0.0,))
    origin = integrate(lambda s: g(s) / s, -scale, scale, panels=panels, breakpoints=(0.0,))
    return complex((pole - 0.5 * origin) / (np.pi * 1j))


def radiation_exponent_w(r: Profile, w_j: complex, scale: float) -> complex:
    """-(1/pi i) int_{|w| > 1/L0} log(1 + w|r|^2) (1/(w - w_j) - 1/(2w)) dw over the sampled support."""
    g = lambda s: 2 * np.pi * kappa(r, s)
    integrand = lambda s: g(s) * (1.0 / (s - w_j) - 0.5 / s)
    lo, hi = r.support
    cut = 1.0 / scale
    total = 0j
    if lo < -cut:
        total += integrate(integrand, lo, -cut, panels=panels_for(lo, -cut))
    if hi > cut:
        total += integrate(integrand, cut, hi, panels=panels_for(cut, hi))
    return complex(-total / (np.pi * 1j))


def resolution_constants(data: ScatteringData, scale: float,
                         tolerance: Optional[float] = None) -> NDArray[np.complex128]:
    """Modified norming constants of solitons sharing |lambda_j|^2 = L0."""
    tolerance = Config.TOLERANCES['resolution_forms'] if tolerance is None else tolerance
    spectrum = data.spectrum
    moduli = np.abs(spectrum.eigenvalues) ** 2
    if np.any(np.abs(moduli - scale) > MODULUS_RTOL * scale):
        raise DomainError(f"eigenvalue moduli {moduli.tolist()} differ from L0 = {scale}")
    modified = np.empty(len(spectrum), dtype=complex)
    for j, (w_j, z_j, c_j) in enumerate(zip(spectrum.w, spectrum.z, spectrum.norming)):
        via_z = radiation_exponent_z(data.r_hat, z_j, scale)
        via_w = radiation_exponent_w(data.r, w_j, scale)
        if abs(via_z - via_w) > tolerance:
            raise QuadratureError(
                f"resolution exponents disagree: z-form {via_z:.10g}, w-form {via_w:.10g}",
                context=f"eigenvalue {j}")
        modified[j] = c_j * np.exp(via_z)
    return modified


def resolution_prediction(data: ScatteringData, index: int,
                          tolerance: Optional[float] = None) -> DiscreteSpectrum:
    """Solitons visible in the cone of soliton ``index``, with constants carrying
    the Blaschke factors of faster solitons and the radiation exponent."""
    lam = data.spectrum.eigenvalues[index]
    speed = soliton_speed(lam)
    restriction = cone_restrict(data, speed, speed)
    scale = abs(lam) ** 2
    norming = resolution_constants(restriction.data, scale, tolerance)
    return restriction.data.spectrum.with_norming(norming)
