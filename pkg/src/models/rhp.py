"""
Riemann-Hilbert problems on the real line: a sampled jump R with
M_+ = M_-(1 + R), optionally with simple poles off the axis.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np
from numpy.typing import NDArray

from config import Config
from src.services.errors import ContractViolation, InvalidDataError

GRID_RTOL = 1e-12


@dataclass(frozen=True, eq=False)
class PoleData:
    """First-row residue data: column 1 has poles at p_j with coupling kappa_j,
    column 2 at conj(p_j) with coupling eta_j."""
    poles: NDArray[np.complex128]
    kappa: NDArray[np.complex128]
    eta: NDArray[np.complex128]

    def __len__(self) -> int:
        return int(np.asarray(self.poles).size)


@dataclass(frozen=True, eq=False)
class JumpProblem:
    contour: NDArray[np.float64]
    jump: NDArray[np.complex128]
    poles: Optional[PoleData] = None
    side: str = 'w'

    def __post_init__(self):
        contour = np.asarray(self.contour, dtype=float)
        jump = np.asarray(self.jump, dtype=complex)
        object.__setattr__(self, 'contour', contour)
        object.__setattr__(self, 'jump', jump)
        if contour.ndim != 1 or contour.size < 3:
            raise ContractViolation("contour needs at least three nodes")
        if jump.shape != (contour.size, 2, 2):
            raise ContractViolation(f"jump has shape {jump.shape}, expected ({contour.size}, 2, 2)")
        steps = np.diff(contour)
        if np.any(steps <= 0) or np.max(np.abs(steps - steps.mean())) > GRID_RTOL * (contour[-1] - contour[0]):
            raise ContractViolation("contour nodes must be uniform and increasing")
        identity = np.eye(2)[None, :, :]
        det = np.linalg.det(identity + jump)
        scale = 1.0 + np.max(np.abs(jump))
        if np.max(np.abs(det - 1.0)) > Config.JUMP_DET_TOL * scale ** 2:
            raise InvalidDataError("det(1 + R) differs from 1 on the contour")

    @property
    def h(self) -> float:
        return float((self.contour[-1] - self.contour[0]) / (self.contour.size - 1))

    @property
    def size(self) -> int:
        return self.contour.size

    def norm(self) -> float:
        """max over nodes of the spectral norm of R."""
        return float(np.max(np.linalg.norm(self.jump, ord=2, axis=(1, 2))))

    def l1_norm(self) -> float:
        return float(self.h * np.sum(np.linalg.norm(self.jump, ord=2, axis=(1, 2))))

    def origin_index(self) -> int:
        idx = int(np.argmin(np.abs(self.contour)))
        if self.contour[idx] != 0.0:
            raise ContractViolation("contour has no node at the origin")
        return idx
