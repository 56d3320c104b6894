"""
Shared value types: light-cone coordinates, sampled complex functions and
field snapshots on a uniform grid.
"""

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Optional, Tuple

import numpy as np
from numpy.typing import NDArray
from scipy.interpolate import CubicSpline

from src.services.errors import ContractViolation

GRID_RTOL = 1e-12


@dataclass(frozen=True)
class ConeCoords:
    """Proper time and Joukowsky scales of a point inside the light cone."""
    tau: float
    w0: float
    z0: float


@dataclass(frozen=True, eq=False)
class SampledComplexFunction:
    """Complex samples on a uniform grid; cubic inside, zero outside."""
    grid: NDArray[np.float64]
    values: NDArray[np.complex128]

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        values = np.asarray(self.values, dtype=complex)
        object.__setattr__(self, 'grid', grid)
        object.__setattr__(self, 'values', values)
        if grid.ndim != 1 or grid.size < 2:
            raise ContractViolation("grid needs at least two nodes")
        if values.shape != grid.shape:
            raise ContractViolation(
                f"values length {values.size} differs from grid length {grid.size}")
        steps = np.diff(grid)
        if np.any(steps <= 0):
            raise ContractViolation("grid must be strictly increasing")
        h = (grid[-1] - grid[0]) / (grid.size - 1)
        if np.max(np.abs(steps - h)) > GRID_RTOL * (grid[-1] - grid[0]):
            raise ContractViolation("grid spacing is not uniform")

    @classmethod
    def from_callable(cls, func: Callable[[NDArray], NDArray], grid: NDArray) -> 'SampledComplexFunction':
        grid = np.asarray(grid, dtype=float)
        return cls(grid, np.asarray(func(grid), dtype=complex))

    @classmethod
    def zeros(cls, grid: NDArray) -> 'SampledComplexFunction':
        grid = np.asarray(grid, dtype=float)
        return cls(grid, np.zeros(grid.size, dtype=complex))

    @property
    def h(self) -> float:
        return float((self.grid[-1] - self.grid[0]) / (self.grid.size - 1))

    @property
    def support(self) -> Tuple[float, float]:
        return float(self.grid[0]), float(self.grid[-1])

    @cached_property
    def _splines(self) -> Tuple[CubicSpline, CubicSpline]:
        return (CubicSpline(self.grid, self.values.real),
                CubicSpline(self.grid, self.values.imag))

    def __call__(self, points) -> NDArray[np.complex128]:
        pts = np.asarray(points, dtype=float)
        re, im = self._splines
        out = re(pts) + 1j * im(pts)
        inside = (pts >= self.grid[0]) & (pts <= self.grid[-1])
        return np.where(inside, out, 0.0)

    def derivative(self, points) -> NDArray[np.complex128]:
        pts = np.asarray(points, dtype=float)
        re, im = self._splines
        out = re(pts, 1) + 1j * im(pts, 1)
        inside = (pts >= self.grid[0]) & (pts <= self.grid[-1])
        return np.where(inside, out, 0.0)

    def map(self, func: Callable[[NDArray, NDArray], NDArray]) -> 'SampledComplexFunction':
        """New samples func(grid, values) on the same grid."""
        return SampledComplexFunction(self.grid, func(self.grid, self.values))

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values)))


@dataclass(frozen=True, eq=False)
class FieldState:
    """Sampled (u, v) at time t on x_start + k*dx."""
    t: float
    x_start: float
    dx: float
    u: NDArray[np.complex128]
    v: NDArray[np.complex128]
    metadata: Optional[dict] = field(default=None, compare=False)

    def __post_init__(self):
        u = np.asarray(self.u, dtype=complex)
        v = np.asarray(self.v, dtype=complex)
        object.__setattr__(self, 'u', u)
        object.__setattr__(self, 'v', v)
        if self.dx <= 0:
            raise ContractViolation(f"dx must be positive, got {self.dx}")
        if u.ndim != 1 or u.shape != v.shape or u.size < 2:
            raise ContractViolation("u and v must be 1-d arrays of equal length >= 2")

    @property
    def size(self) -> int:
        return self.u.size

    @property
    def x_grid(self) -> NDArray[np.float64]:
        return self.x_start + self.dx * np.arange(self.size)

    def max_boundary_amplitude(self) -> float:
        ends = np.array([self.u[0], self.u[-1], self.v[0], self.v[-1]])
        return float(np.max(np.abs(ends)))

    def replace(self, **changes) -> 'FieldState':
        data = dict(t=self.t, x_start=self.x_start, dx=self.dx,
                    u=self.u, v=self.v, metadata=self.metadata)
        data.update(changes)
        return FieldState(**data)


@dataclass(frozen=True, eq=False)
class AnalyticComplexFunction:
    """Closed-form complex function, identically zero outside its support."""
    func: Callable[[NDArray], NDArray]
    support: Tuple[float, float]

    def __call__(self, points) -> NDArray[np.complex128]:
        pts = np.asarray(points, dtype=float)
        lo, hi = self.support
        inside = (pts >= lo) & (pts <= hi)
        safe = np.where(inside, pts, 0.5 * (lo + hi))
        return np.where(inside, np.asarray(self.func(safe), dtype=complex), 0.0)

    def sample(self, grid: NDArray) -> SampledComplexFunction:
        return SampledComplexFunction.from_callable(self, grid)
