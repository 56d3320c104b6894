"""
Scattering-side value types: transition coefficients, discrete spectrum and
the full scattering data of a potential.
"""

from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
from numpy.typing import NDArray

from src.models.core import SampledComplexFunction
from src.services.errors import ContractViolation


@dataclass(frozen=True, eq=False)
class TransitionCoefficients:
    """a, b at a set of spectral points (w- or z-side)."""
    points: NDArray[np.complex128]
    a: NDArray[np.complex128]
    b: NDArray[np.complex128]
    side: str = 'w'

    def unitarity_defect(self) -> NDArray[np.float64]:
        """| |a|^2 + p|b|^2 - 1 | on real points, NaN elsewhere."""
        real = np.abs(self.points.imag) == 0
        defect = np.abs(np.abs(self.a) ** 2 + self.points.real * np.abs(self.b) ** 2 - 1.0)
        return np.where(real, defect, np.nan)


@dataclass(frozen=True, eq=False)
class DiscreteSpectrum:
    """Eigenvalues lambda_j in the open second quadrant and norming constants C_j."""
    eigenvalues: NDArray[np.complex128] = field(default_factory=lambda: np.zeros(0, dtype=complex))
    norming: NDArray[np.complex128] = field(default_factory=lambda: np.zeros(0, dtype=complex))

    def __post_init__(self):
        lam = np.atleast_1d(np.asarray(self.eigenvalues, dtype=complex))
        cs = np.atleast_1d(np.asarray(self.norming, dtype=complex))
        object.__setattr__(self, 'eigenvalues', lam)
        object.__setattr__(self, 'norming', cs)
        if lam.shape != cs.shape:
            raise ContractViolation("eigenvalue and norming constant counts differ")
        if np.any(lam.real >= 0) or np.any(lam.imag <= 0):
            raise ContractViolation("eigenvalues must lie in the open second quadrant")
        if np.any(cs == 0):
            raise ContractViolation("norming constants must be nonzero")
        if lam.size > 1:
            gaps = np.abs(lam[:, None] - lam[None, :]) + np.eye(lam.size)
            if np.any(gaps == 0):
                raise ContractViolation("eigenvalues must be pairwise distinct")

    def __len__(self) -> int:
        return int(self.eigenvalues.size)

    @property
    def w(self) -> NDArray[np.complex128]:
        return self.eigenvalues ** -2

    @property
    def z(self) -> NDArray[np.complex128]:
        return self.eigenvalues ** 2

    @property
    def c(self) -> NDArray[np.complex128]:
        return -2.0 * self.norming / self.eigenvalues ** 4

    @property
    def c_hat(self) -> NDArray[np.complex128]:
        return 2.0 * self.norming

    def subset(self, indices: List[int]) -> 'DiscreteSpectrum':
        idx = np.asarray(indices, dtype=int)
        return DiscreteSpectrum(self.eigenvalues[idx], self.norming[idx])

    def with_norming(self, norming) -> 'DiscreteSpectrum':
        return DiscreteSpectrum(self.eigenvalues, norming)

    def to_dict(self) -> list:
        return [{'lambda': [lam.real, lam.imag], 'C': [cn.real, cn.imag]}
                for lam, cn in zip(self.eigenvalues, self.norming)]


@dataclass(frozen=True, eq=False)
class ScatteringData:
    """Reflection coefficients on both sides plus the discrete spectrum."""
    r: SampledComplexFunction
    r_hat: SampledComplexFunction
    spectrum: DiscreteSpectrum = field(default_factory=DiscreteSpectrum)
    positivity: Optional[float] = None
    resonance_margin: Optional[float] = None

    def __post_init__(self):
        if self.positivity is None:
            w, r = self.r.grid, self.r.values
            z, rh = self.r_hat.grid, self.r_hat.values
            bound = min(np.min(1 + w * np.abs(r) ** 2), np.min(1 + z * np.abs(rh) ** 2))
            object.__setattr__(self, 'positivity', float(bound))

    @property
    def soliton_free(self) -> bool:
        return len(self.spectrum) == 0

    @property
    def reflectionless(self) -> bool:
        return self.r.max_abs() == 0 and self.r_hat.max_abs() == 0

    def replace(self, **changes) -> 'ScatteringData':
        data = dict(r=self.r, r_hat=self.r_hat, spectrum=self.spectrum,
                    resonance_margin=self.resonance_margin)
        data.update(changes)
        return ScatteringData(**data)
