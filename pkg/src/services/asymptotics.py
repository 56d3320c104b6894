"""
Closed-form long-time predictions for soliton-free data.

Inside the light cone the solution decays like tau^{-1/2}, modulated by the
stationary-point amplitudes f_-(x/t), f_+(x/t). These are computed two ways:
from r^ on the z-side (production route) and from r on the w-side, where the
scalar factor d(w) enters (cross-check route).
"""

import logging
import math
from typing import Callable, Iterable, List, Tuple, Union

import numpy as np
from numpy.typing import NDArray
from scipy.special import gamma as gamma_fn
from scipy.special import loggamma

from src.models.asymptotics import AsymptoticCoefficients, StationaryAmplitudes
from src.models.core import AnalyticComplexFunction, SampledComplexFunction
from src.models.scattering import ScatteringData
from src.services.core import complex_power, cone_coords
from src.services.errors import DomainError, InvalidDataError
from src.services.quadrature import cauchy_integral, integrate, panels_for, principal_value

logger = logging.getLogger(__name__)

Profile = Union[SampledComplexFunction, AnalyticComplexFunction]
RealFunction = Callable[[NDArray], NDArray]

NEGATIVE_MODULUS_SLACK = 1e-12
SQRT_2PI = math.sqrt(2 * math.pi)


def _log_weight(profile: Profile, points) -> NDArray[np.float64]:
    pts = np.asarray(points, dtype=float)
    arg = 1.0 + pts * np.abs(profile(pts)) ** 2
    if np.any(arg <= 0):
        raise InvalidDataError("1 + p|r(p)|^2 is not positive; log undefined")
    return np.log(arg) / (2 * np.pi)


def kappa_hat(r_hat: Profile, z) -> Union[float, NDArray]:
    """(1/2pi) log(1 + z|r^(z)|^2)."""
    out = _log_weight(r_hat, z)
    return float(out) if np.ndim(out) == 0 else out


def kappa(r: Profile, w) -> Union[float, NDArray]:
    """(1/2pi) log(1 + w|r(w)|^2)."""
    out = _log_weight(r, w)
    return float(out) if np.ndim(out) == 0 else out


# -- scalar factor d(w) ------------------------------------------------------

def d_factor(r: Profile, w: complex, side: int = None) -> complex:
    """d(w) = exp{(1/2pi i) int log(1 + s|r(s)|^2)/(s - w) ds}; side=+-1 on the axis."""
    lo, hi = r.support
    k = lambda s: kappa(r, s)
    integral = cauchy_integral(k, lo, hi, complex(w), side=side, panels=panels_for(lo, hi))
    return complex(np.exp(-1j * integral))


def d_product(r: Profile, w: float) -> complex:
    """d_-(w) d_+(w) = exp{(1/pi i) PV int log(1 + s|r|^2)/(s - w) ds}."""
    lo, hi = r.support
    pv = principal_value(lambda s: kappa(r, s), lo, hi, float(w), panels=panels_for(lo, hi))
    return complex(np.exp(-2j * pv))


def d_at_zero(r: Profile) -> complex:
    return d_factor(r, 0.0, side=0)


def _hilbert_d_product(r: SampledComplexFunction) -> NDArray[np.complex128]:
    from src.services.rhp import hilbert_transform
    g = 2 * np.pi * kappa(r, r.grid)
    return np.exp(-1j * hilbert_transform(g.astype(complex)))


# -- rho pair ----------------------------------------------------------------

def rho_pair(data: ScatteringData, scale: float, side: str = 'z'
             ) -> Tuple[SampledComplexFunction, SampledComplexFunction]:
    """(rho, rho_breve) on the zeta grid obtained by rescaling the r (r^) grid.

    z-side: rho = -z0 zeta r^(z0 zeta), rho_breve = -conj r^(z0 zeta).
    w-side: rho = w0 zeta r(w0 zeta)/(d_- d_+), rho_breve = conj r (d_- d_+).
    """
    if scale <= 0:
        raise DomainError(f"scale must be positive, got {scale}")
    if side == 'z':
        base = data.r_hat
        if not (base.grid[0] <= -scale and scale <= base.grid[-1]):
            raise DomainError(f"z0 = {scale} outside the sampled support of r^")
        rho = -base.grid * base.values
        breve = -np.conj(base.values)
    elif side == 'w':
        base = data.r
        if not (base.grid[0] <= -scale and scale <= base.grid[-1]):
            raise DomainError(f"w0 = {scale} outside the sampled support of r")
        dd = _hilbert_d_product(base)
        rho = base.grid * base.values / dd
        breve = np.conj(base.values) * dd
    else:
        raise DomainError(f"unknown side {side!r}")
    zeta = base.grid / scale
    inside = np.abs(zeta) <= 1
    if np.any(1 + (rho * breve).real[inside] <= 0):
        raise InvalidDataError("1 + rho rho_breve must be positive on [-1, 1]")
    return SampledComplexFunction(zeta, rho), SampledComplexFunction(zeta, breve)


def nu_from_product(product: Callable[[NDArray], NDArray]) -> RealFunction:
    """nu = (1/2pi) log(1 + rho rho_breve) as a callable on [-1, 1]."""
    def nu(s):
        arg = 1.0 + np.real(product(s))
        if np.any(arg <= 0):
            raise InvalidDataError("1 + rho rho_breve must be positive")
        return np.log(arg) / (2 * np.pi)
    return nu


# -- scalar RHP --------------------------------------------------------------

def delta_fn(nu: RealFunction, zeta: complex, side: int = None) -> complex:
    """delta(zeta) = exp{-i int_{-1}^{1} nu(s)/(s - zeta) ds}.

    For real zeta in (-1, 1) pass side=+1/-1 for the boundary values
    delta_+ / delta_-.
    """
    zeta = complex(zeta)
    if zeta.imag == 0 and abs(zeta.real) == 1:
        raise DomainError("delta is singular at zeta = +-1; use delta0_pm")
    integral = cauchy_integral(nu, -1.0, 1.0, zeta, side=side)
    return complex(np.exp(-1j * integral))


def delta_at_zero(nu: RealFunction) -> complex:
    """delta(0), the principal value being regular since nu(0) = 0."""
    return complex(np.exp(-1j * principal_value(nu, -1.0, 1.0, 0.0)))


def delta0_pm(nu: RealFunction) -> Tuple[complex, complex]:
    """Connection constants at zeta = -1 and zeta = +1."""
    nu_m = float(nu(np.array([-1.0]))[0])
    nu_p = float(nu(np.array([1.0]))[0])
    left_m = integrate(lambda s: (nu(s) + s * nu_m) / (s + 1), -1.0, 0.0)
    right_m = integrate(lambda s: nu(s) / (s + 1), 0.0, 1.0)
    left_p = integrate(lambda s: (nu(s) - s * nu_p) / (s - 1), 0.0, 1.0)
    right_p = integrate(lambda s: nu(s) / (s - 1), -1.0, 0.0)
    delta_m = np.exp(-1j * (left_m + right_m) + 1j * nu_m)
    delta_p = np.exp(-1j * (left_p + right_p) - 1j * nu_p)
    return complex(delta_m), complex(delta_p)


def endpoint_limit_error(nu: RealFunction, distance: float, end: int = -1,
                         angle: float = math.pi / 3) -> float:
    """|delta(zeta)(-(zeta+1))^{-i nu0-} - delta0-| at |zeta + 1| = distance
    (end=-1), or |delta(zeta)(zeta-1)^{i nu0+} - delta0+| near +1."""
    delta_m, delta_p = delta0_pm(nu)
    if end == -1:
        zeta = -1.0 + distance * complex(math.cos(angle), math.sin(angle))
        nu0 = float(nu(np.array([-1.0]))[0])
        value = delta_fn(nu, zeta) * complex_power(-(zeta + 1), -1j * nu0)
        return abs(value - delta_m)
    zeta = 1.0 + distance * complex(-math.cos(angle), math.sin(angle))
    nu0 = float(nu(np.array([1.0]))[0])
    value = delta_fn(nu, zeta) * complex_power(zeta - 1, 1j * nu0)
    return abs(value - delta_p)


def half_plane_violation(nu: RealFunction, points: Iterable[complex], sign: int = 1) -> float:
    """Largest excess of |delta|^sign over 1 below the axis or of |delta|^-sign above it.

    sign=+1 is the bound that holds for nu >= 0; sign=-1 is its mirror for nu <= 0.
    """
    worst = 0.0
    for zeta in points:
        value = abs(delta_fn(nu, zeta)) ** sign
        excess = value - 1.0 if complex(zeta).imag < 0 else 1.0 / value - 1.0
        worst = max(worst, excess)
    return worst


def gamma_modulus_defect(kappa_value: float) -> float:
    """|Gamma(i k)|^2 k sinh(pi k)/pi - 1."""
    k = float(kappa_value)
    return float(abs(gamma_fn(1j * k)) ** 2 * k * math.sinh(math.pi * k) / math.pi - 1.0)


# -- stationary-point amplitudes --------------------------------------------

def coefficients(nu: RealFunction, rho_minus: complex, rho_plus: complex) -> AsymptoticCoefficients:
    delta_m, delta_p = delta0_pm(nu)
    return AsymptoticCoefficients(
        nu0_minus=float(nu(np.array([-1.0]))[0]),
        nu0_plus=float(nu(np.array([1.0]))[0]),
        delta0_minus=delta_m,
        delta0_plus=delta_p,
        delta_at_zero=delta_at_zero(nu),
        rho_minus=complex(rho_minus),
        rho_plus=complex(rho_plus),
    )


def _amplitudes(c: AsymptoticCoefficients) -> Tuple[complex, complex]:
    """tau-independent factors of the two stationary-phase terms."""
    amp_m = amp_p = 0j
    if c.rho_minus != 0 and c.nu0_minus != 0:
        amp_m = (SQRT_2PI * math.exp(math.pi * c.nu0_minus / 2) * np.exp(-0.25j * math.pi)
                 / (c.rho_minus * c.delta0_minus ** 2 * np.exp(loggamma(1j * c.nu0_minus))))
    if c.rho_plus != 0 and c.nu0_plus != 0:
        amp_p = (SQRT_2PI * math.exp(math.pi * c.nu0_plus / 2) * np.exp(0.25j * math.pi)
                 / (c.rho_plus * c.delta0_plus ** 2 * np.exp(loggamma(-1j * c.nu0_plus))))
    return complex(amp_m), complex(amp_p)


def q_as(c: AsymptoticCoefficients, tau: float) -> complex:
    """Leading radiation term; a summand with rho(-+1) = 0 is dropped."""
    if tau <= 0:
        raise DomainError(f"tau must be positive, got {tau}")
    amp_m, amp_p = _amplitudes(c)
    log_tau = math.log(tau)
    term_m = np.exp(-1j * tau + 1j * c.nu0_minus * log_tau) * amp_m
    term_p = np.exp(1j * tau - 1j * c.nu0_plus * log_tau) * amp_p
    return complex((term_m - term_p) / math.sqrt(tau))


def z_side_coefficients(r_hat: Profile, z0: float) -> AsymptoticCoefficients:
    nu = lambda s: kappa_hat(r_hat, z0 * np.asarray(s, dtype=float))
    rho_m = complex(z0 * r_hat(np.array([-z0]))[0])
    rho_p = complex(-z0 * r_hat(np.array([z0]))[0])
    return coefficients(nu, rho_m, rho_p)


def w_side_coefficients(r: Profile, w0: float) -> AsymptoticCoefficients:
    nu = lambda s: kappa(r, w0 * np.asarray(s, dtype=float))
    rho_m = complex(-w0 * r(np.array([-w0]))[0] / d_product(r, -w0))
    rho_p = complex(w0 * r(np.array([w0]))[0] / d_product(r, w0))
    return coefficients(nu, rho_m, rho_p)


def _z0_of(speed: float) -> float:
    if not -1 < speed < 1:
        raise DomainError(f"speed {speed} must lie in (-1, 1)")
    return math.sqrt((1 - speed) / (1 + speed))


def f_pm_from_coefficients(c: AsymptoticCoefficients, z0: float, speed: float) -> StationaryAmplitudes:
    """f_+- through the stationary-phase terms of the z-side problem."""
    amp_m, amp_p = _amplitudes(c)
    scale = math.sqrt(z0) / c.delta_at_zero
    return StationaryAmplitudes(speed=speed, z0=z0,
                                f_minus=complex(scale * np.conj(amp_m)),
                                f_plus=complex(scale * np.conj(amp_p)))


def f_pm_w_side(r: Profile, speed: float) -> StationaryAmplitudes:
    """f_+- through the w-side problem; includes d(0) and the w-side delta(0)."""
    z0 = _z0_of(speed)
    w0 = 1.0 / z0
    c = w_side_coefficients(r, w0)
    amp_m, amp_p = _amplitudes(c)
    scale = math.sqrt(w0) * d_at_zero(r) / c.delta_at_zero
    return StationaryAmplitudes(speed=speed, z0=z0,
                                f_minus=complex(scale * np.conj(amp_m)),
                                f_plus=complex(-scale * np.conj(amp_p)))


def f_pm(r_hat: Profile, speed: float) -> StationaryAmplitudes:
    """Modulus and argument of f_+- directly in terms of kappa^ on [-z0, z0]."""
    z0 = _z0_of(speed)
    lo, hi = r_hat.support
    if not (lo <= -z0 and z0 <= hi):
        raise DomainError(f"z0 = {z0} outside the sampled support of r^")
    k = lambda s: kappa_hat(r_hat, s)
    k_m = float(kappa_hat(r_hat, -z0))
    k_p = float(kappa_hat(r_hat, z0))
    mod_m, mod_p = -k_m, k_p
    for name, value in (('f_-', mod_m), ('f_+', mod_p)):
        if value < -NEGATIVE_MODULUS_SLACK:
            raise InvalidDataError(f"|{name}|^2 = {value:.3e} is negative")
    r_m = complex(r_hat(np.array([-z0]))[0])
    r_p = complex(r_hat(np.array([z0]))[0])

    through_zero = principal_value(k, -z0, z0, 0.0).real
    arg_delta_m = (-integrate(lambda s: (k(s) + s / z0 * k_m) / (s + z0), -z0, 0.0)
                   - integrate(lambda s: k(s) / (s + z0), 0.0, z0) + k_m).real
    arg_delta_p = (-integrate(lambda s: (k(s) - s / z0 * k_p) / (s - z0), 0.0, z0)
                   - integrate(lambda s: k(s) / (s - z0), -z0, 0.0) - k_p).real

    f_minus = f_plus = 0j
    if r_m != 0 and k_m != 0:
        arg_m = (math.pi / 4 + np.angle(r_m) + loggamma(1j * k_m).imag
                 + 2 * arg_delta_m + through_zero)
        f_minus = math.sqrt(max(mod_m, 0.0)) * np.exp(1j * arg_m)
    if r_p != 0 and k_p != 0:
        arg_p = (-math.pi / 4 + np.angle(r_p) + math.pi + loggamma(-1j * k_p).imag
                 + 2 * arg_delta_p + through_zero)
        f_plus = math.sqrt(max(mod_p, 0.0)) * np.exp(1j * arg_p)
    return StationaryAmplitudes(speed=speed, z0=z0, f_minus=complex(f_minus), f_plus=complex(f_plus))


def predict_fields(r_hat: Profile, t: float, x: float) -> Tuple[complex, complex]:
    """Leading-order (u, v) at (t, x) for soliton-free data."""
    cone = cone_coords(t, x)
    if cone.tau <= 1:
        raise DomainError(f"tau = {cone.tau} must exceed 1")
    f = f_pm(r_hat, x / t)
    log_tau = math.log(cone.tau)
    term_m = np.exp(1j * cone.tau + 1j * f.modulus_minus * log_tau) * f.f_minus
    term_p = np.exp(-1j * cone.tau + 1j * f.modulus_plus * log_tau) * f.f_plus
    u_as = (term_m + term_p) / math.sqrt(t - x)
    v_as = (term_m - term_p) / math.sqrt(t + x)
    return complex(u_as), complex(v_as)


def predict_from_q(r_hat: Profile, t: float, x: float) -> complex:
    """v_as through q_as: z0 delta(0)^{-1} conj(q_as(tau))."""
    cone = cone_coords(t, x)
    c = z_side_coefficients(r_hat, cone.z0)
    return complex(cone.z0 / c.delta_at_zero * np.conj(q_as(c, cone.tau)))


def prediction_sweep(r_hat: Profile, points: Iterable[Tuple[float, float]]) -> List[dict]:
    rows = []
    for t, x in points:
        u_as, v_as = predict_fields(r_hat, t, x)
        rows.append({'t': t, 'x': x, 'tau': cone_coords(t, x).tau,
                     're_u_as': u_as.real, 'im_u_as': u_as.imag,
                     're_v_as': v_as.real, 'im_v_as': v_as.imag})
    return rows
