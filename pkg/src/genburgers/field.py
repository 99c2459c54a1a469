"""Spatial profiles on a truncated uniform grid with constant far-field extension."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import ConfigurationError


@dataclass(frozen=True)
class Grid:
    """Uniform vertex grid ``linspace(-L, L, nx)``."""

    L: float
    nx: int

    def __post_init__(self):
        if not (np.isfinite(self.L) and self.L > 0):
            raise ConfigurationError("grid half-width L must be positive")
        if int(self.nx) != self.nx or self.nx < 3:
            raise ConfigurationError("grid needs at least 3 points")

    @property
    def xs(self) -> np.ndarray:
        return np.linspace(-self.L, self.L, self.nx)

    @property
    def dx(self) -> float:
        return 2.0 * self.L / (self.nx - 1)

    def refined(self) -> "Grid":
        """Same interval, spacing halved (every old node is kept)."""
        return Grid(self.L, 2 * self.nx - 1)


@dataclass
class Field:
    """A profile ``u(., t)`` sampled on a uniform grid.

    Outside ``[xs[0], xs[-1]]`` the profile is the constant ``far_left`` /
    ``far_right``; inside it is the cubic spline through the samples.
    """

    t: float
    xs: np.ndarray
    values: np.ndarray
    far_left: float
    far_right: float
    _spline: CubicSpline | None = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        self.xs = np.asarray(self.xs, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.xs.ndim != 1 or self.xs.shape != self.values.shape:
            raise ConfigurationError("xs and values must be 1-d arrays of equal length")
        if not np.all(np.isfinite(self.values)):
            raise ConfigurationError(f"non-finite values in field at t={self.t}")
        steps = np.diff(self.xs)
        if steps.size and (np.any(steps <= 0) or np.ptp(steps) > 1e-9 * steps[0]):
            raise ConfigurationError("field grid must be uniform and ascending")

    @property
    def dx(self) -> float:
        return float(self.xs[1] - self.xs[0])

    @property
    def grid(self) -> Grid:
        return Grid(float(self.xs[-1]), len(self.xs))

    def sup_norm(self) -> float:
        return float(max(np.max(np.abs(self.values)), abs(self.far_left), abs(self.far_right)))

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self._spline is None:
            self._spline = CubicSpline(self.xs, self.values)
        out = self._spline(x)
        out = np.where(x < self.xs[0], self.far_left, out)
        out = np.where(x > self.xs[-1], self.far_right, out)
        return out[()] if out.ndim == 0 else out

    def with_values(self, values) -> "Field":
        return Field(self.t, self.xs, values, self.far_left, self.far_right)
