"""Grids and scalar fields for the numeric cross-validation wing."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np


@dataclass(frozen=True)
class Grid1D:
    """Uniform periodic grid on [x_min, x_max); node j sits at x_min + j*dx."""

    x_min: float
    x_max: float
    n: int
    periodic: bool = True

    def __post_init__(self):
        if self.n < 8:
            raise ValueError("grid needs at least 8 points")
        if not self.x_max > self.x_min:
            raise ValueError("empty grid interval")

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.n

    def points(self) -> np.ndarray:
        return self.x_min + self.dx * np.arange(self.n)


def _sech(t):
    # overflow-safe: sech(t) = 2 e^{-|t|} / (1 + e^{-2|t|})
    a = np.abs(t)
    e = np.exp(-a)
    return 2.0 * e / (1.0 + e * e)


class ScalarField2:
    """Callable field (x, z) -> float with an x-derivative hook."""

    kind = "analytic"

    def __call__(self, x, z):
        raise NotImplementedError

    def dx(self, x, z):
        """Partial derivative in x; finite-difference fallback."""
        h = 1e-6
        return (self(x + h, z) - self(x - h, z)) / (2 * h)


class AnalyticField(ScalarField2):
    def __init__(self, fn: Callable, dfdx: Callable | None = None):
        self._fn = fn
        self._dfdx = dfdx

    def __call__(self, x, z):
        return self._fn(x, z)

    def dx(self, x, z):
        if self._dfdx is not None:
            return self._dfdx(x, z)
        return super().dx(x, z)


class GridSliceField(ScalarField2):
    """Field known on a periodic grid at one fixed z; linear interpolation in
    x (exact at the nodes), spectral-free central differences for dx."""

    kind = "grid"

    def __init__(self, grid: Grid1D, z0: float, values: np.ndarray):
        values = np.asarray(values, dtype=float)
        if values.shape != (grid.n,):
            raise ValueError("values must match the grid size")
        if not np.all(np.isfinite(values)):
            raise ValueError("non-finite field values")
        self.grid = grid
        self.z0 = float(z0)
        self.values = values

    def _locate(self, x):
        g = self.grid
        t = (np.asarray(x, dtype=float) - g.x_min) / g.dx
        j = np.floor(t).astype(int)
        frac = t - j
        j = np.mod(j, g.n)
        return j, frac

    def __call__(self, x, z):
        if abs(float(z) - self.z0) > 1e-12:
            raise ValueError(f"field is a slice at z={self.z0}, asked for z={z}")
        j, frac = self._locate(x)
        jn = (j + 1) % self.grid.n
        out = (1.0 - frac) * self.values[j] + frac * self.values[jn]
        return float(out) if np.isscalar(x) else out

    def dx(self, x, z):
        if abs(float(z) - self.z0) > 1e-12:
            raise ValueError(f"field is a slice at z={self.z0}, asked for z={z}")
        g = self.grid
        j, _ = self._locate(x)
        jp = (j + 1) % g.n
        jm = (j - 1) % g.n
        out = (self.values[jp] - self.values[jm]) / (2 * g.dx)
        return float(out) if np.isscalar(x) else out


def soliton(c: float) -> AnalyticField:
    """Traveling-wave solution l(x, z) = -c * sech^2(sqrt(c)/2 * (x - c z))
    of l_z - 3 l l_x + l_xxx = 0 (verified against the equation in the test
    suite by high-order finite differences before any use as an oracle)."""
    if c <= 0:
        raise ValueError("soliton speed must be positive")
    k = 0.5 * np.sqrt(c)

    def fn(x, z):
        return -c * _sech(k * (x - c * z)) ** 2

    def dfdx(x, z):
        t = k * (x - c * z)
        s = _sech(t)
        return 2.0 * c * k * s * s * np.tanh(t)

    return AnalyticField(fn, dfdx)


def zero_field() -> AnalyticField:
    return AnalyticField(lambda x, z: np.zeros_like(np.asarray(x, dtype=float)) + 0.0)


def constant_field(value: float) -> AnalyticField:
    return AnalyticField(
        lambda x, z: np.zeros_like(np.asarray(x, dtype=float)) + float(value),
        lambda x, z: np.zeros_like(np.asarray(x, dtype=float)) + 0.0,
    )
