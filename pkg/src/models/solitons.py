"""
Soliton-side value types.
"""

from dataclasses import dataclass, field
from typing import Iterable, List, Tuple

import numpy as np

from src.models.scattering import DiscreteSpectrum, ScatteringData

# Pairs (lambda_j, C_j) carry the same invariants as a discrete spectrum.
SolitonData = DiscreteSpectrum


def soliton_data(pairs: Iterable[Tuple[complex, complex]]) -> SolitonData:
    pairs = list(pairs)
    if not pairs:
        return SolitonData()
    lam, norming = zip(*pairs)
    return SolitonData(np.array(lam, dtype=complex), np.array(norming, dtype=complex))


@dataclass(frozen=True)
class SolitonParameters:
    """Closed-form parameters of the one-soliton generated by (lambda_1, C_1)."""
    delta: float
    gamma: float
    energy: float
    frequency: float
    velocity: float
    x0: float
    phi0: float

    def to_dict(self) -> dict:
        return {
            'delta': self.delta,
            'gamma': self.gamma,
            'E': self.energy,
            'beta': self.frequency,
            'nu': self.velocity,
            'x0': self.x0,
            'phi0': self.phi0,
        }


@dataclass(frozen=True)
class ConePartition:
    """Eigenvalue indices visible in a cone, ahead of it (faster) and behind it."""
    visible: List[int] = field(default_factory=list)
    ahead: List[int] = field(default_factory=list)
    behind: List[int] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {'visible': list(self.visible), 'ahead': list(self.ahead), 'behind': list(self.behind)}


@dataclass(frozen=True, eq=False)
class ConeRestriction:
    data: ScatteringData
    partition: ConePartition
