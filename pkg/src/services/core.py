"""
Light-cone coordinates, the Joukowsky transform, oscillatory phases and the
branch-cut helper shared by every numerical module.
"""

import numpy as np

from src.models.core import ConeCoords
from src.services.errors import DomainError


def cone_coords(t: float, x: float) -> ConeCoords:
    """(tau, w0, z0) for a point strictly inside the forward light cone."""
    if not t > abs(x):
        raise DomainError(f"(t={t}, x={x}) lies outside the open light cone")
    tau = np.sqrt((t - x) * (t + x))
    w0 = np.sqrt((t + x) / (t - x))
    return ConeCoords(tau=float(tau), w0=float(w0), z0=float(1.0 / w0))


def joukowsky(zeta):
    """Z(zeta) = (zeta + 1/zeta)/2."""
    zeta = np.asarray(zeta, dtype=complex)
    if np.any(zeta == 0):
        raise DomainError("Joukowsky transform is singular at zeta = 0")
    out = 0.5 * (zeta + 1.0 / zeta)
    return out.item() if out.ndim == 0 else out


def phase_exponent(w, t: float, x: float):
    """-(i/2)(w - 1/w) x + (i/2)(w + 1/w) t."""
    w = np.asarray(w, dtype=complex)
    if np.any(w == 0):
        raise DomainError("phase exponent is singular at w = 0")
    inv = 1.0 / w
    out = -0.5j * (w - inv) * x + 0.5j * (w + inv) * t
    return out.item() if out.ndim == 0 else out


def complex_power(base, exponent):
    """base**exponent on the principal branch, arg(base) in (-pi, pi]."""
    base = np.asarray(base, dtype=complex)
    if np.any(base == 0):
        raise DomainError("complex power of zero is undefined here")
    out = np.exp(exponent * np.log(base))
    return out.item() if out.ndim == 0 else out


def second_quadrant_root(w):
    """The square root lambda of 1/w with Re lambda < 0 < Im lambda."""
    w = complex(w)
    if w.imag <= 0:
        raise DomainError(f"w = {w} is not in the upper half-plane")
    lam = complex_power(1.0 / w, 0.5)
    return -lam if lam.real > 0 else lam


def residue_exponent_w(w, t: float, x: float):
    """theta(w) = (i/2)(w - 1/w) x - (i/2)(w + 1/w) t, the w-side jump and residue phase."""
    out = -np.asarray(phase_exponent(w, t, x))
    return out.item() if out.ndim == 0 else out


def residue_exponent_z(z, t: float, x: float):
    """theta^(z) = -(i/2)(z - 1/z) x - (i/2)(z + 1/z) t."""
    z = np.asarray(z, dtype=complex)
    if np.any(z == 0):
        raise DomainError("phase exponent is singular at z = 0")
    inv = 1.0 / z
    out = -0.5j * (z - inv) * x - 0.5j * (z + inv) * t
    return out.item() if out.ndim == 0 else out
