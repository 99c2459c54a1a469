"""Bounded initial data and the exact heat-semigroup action on it.

Four representations are provided:

* :class:`Step` -- ``u_minus`` for ``x <= 0`` and ``u_plus`` for ``x > 0``;
* :class:`PiecewiseConstant` -- finitely many jumps;
* :class:`Smooth` -- a vectorised callable with a caller-certified bound;
* :class:`Sampled` -- a :class:`~genburgers.field.Field` used as data, which
  is how global continuation restarts from a terminal profile.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import erfc

from .errors import ConfigurationError, DomainError
from .field import Field, Grid
from .kernel import DEFAULT_QUAD, SQRT_PI, QuadratureSpec, panel_rule
from .spectral import PaddedGrid


class InitialData:
    """Common interface. Subclasses set the attributes below."""

    sup_norm: float
    lower: float
    upper: float
    left_limit: float
    right_limit: float

    @property
    def breakpoints(self) -> tuple:
        return ()

    def jumps(self):
        """``(position, value_left, value_right)`` for every discontinuity."""
        return []

    @property
    def has_jumps(self) -> bool:
        return any(a != b for _, a, b in self.jumps())

    def __call__(self, x):
        raise NotImplementedError

    def heat(self, x, t, q: QuadratureSpec = DEFAULT_QUAD):
        raise NotImplementedError


def _check_values(*vals):
    for v in vals:
        if not np.isfinite(v):
            raise DomainError("initial data values must be finite")


class PiecewiseConstant(InitialData):
    """``values[0]`` on ``x <= b[0]``, ``values[i]`` on ``(b[i-1], b[i]]``, ``values[-1]`` beyond."""

    def __init__(self, breakpoints, values):
        b = np.asarray(breakpoints, dtype=float).ravel()
        v = np.asarray(values, dtype=float).ravel()
        if v.size != b.size + 1:
            raise DomainError("need exactly one more value than breakpoints")
        if b.size and np.any(np.diff(b) <= 0):
            raise DomainError("breakpoints must be strictly ascending")
        _check_values(*b, *v)
        self._b = b
        self._v = v
        self.sup_norm = float(np.max(np.abs(v)))
        self.lower = float(np.min(v))
        self.upper = float(np.max(v))
        self.left_limit = float(v[0])
        self.right_limit = float(v[-1])

    @property
    def breakpoints(self):
        return tuple(self._b)

    @property
    def values(self):
        return tuple(self._v)

    def jumps(self):
        return [(float(b), float(self._v[i]), float(self._v[i + 1])) for i, b in enumerate(self._b)]

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        # side="left": a point equal to a breakpoint takes the value on its left
        out = self._v[np.searchsorted(self._b, x, side="left")]
        return out[()] if out.ndim == 0 else out

    def heat(self, x, t, q: QuadratureSpec = DEFAULT_QUAD):
        x = np.asarray(x, dtype=float)
        out = np.full(x.shape, self._v[0])
        rt = 2.0 * math.sqrt(t)
        for b, lo, hi in self.jumps():
            out = out + (hi - lo) * 0.5 * erfc(-(x - b) / rt)
        return out[()] if out.ndim == 0 else out

    def __repr__(self):
        return f"PiecewiseConstant(breakpoints={list(self._b)}, values={list(self._v)})"


class Step(PiecewiseConstant):
    """Riemann data: ``u_minus`` for ``x <= 0``, ``u_plus`` for ``x > 0``."""

    def __init__(self, u_minus: float, u_plus: float):
        super().__init__([0.0], [u_minus, u_plus])
        self.u_minus = float(u_minus)
        self.u_plus = float(u_plus)

    def shifted(self, delta: float) -> "Step":
        return Step(self.u_minus + delta, self.u_plus + delta)

    def __repr__(self):
        return f"Step(u_minus={self.u_minus}, u_plus={self.u_plus})"


def constant(value: float) -> PiecewiseConstant:
    return PiecewiseConstant([], [value])


@dataclass(eq=False)
class Smooth(InitialData):
    """Smooth data given by a vectorised callable.

    ``bound`` must be a certified bound on ``sup |func|``; it is never
    estimated from samples. ``lower``/``upper`` bound the range and
    ``left_limit``/``right_limit`` are the limits at ``-inf``/``+inf``.
    """

    func: Callable
    bound: float
    left_limit: float
    right_limit: float
    lower: float | None = None
    upper: float | None = None

    def __post_init__(self):
        _check_values(self.bound, self.left_limit, self.right_limit)
        if self.bound < 0:
            raise DomainError("bound must be nonnegative")
        if self.lower is None:
            self.lower = -self.bound
        if self.upper is None:
            self.upper = self.bound
        for lim in (self.left_limit, self.right_limit):
            if abs(lim) > self.bound:
                raise DomainError("far-field limits exceed the certified bound")
        self.sup_norm = float(self.bound)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.asarray(self.func(x), dtype=float)
        return out[()] if out.ndim == 0 else out

    def heat(self, x, t, q: QuadratureSpec = DEFAULT_QUAD):
        # Composite Gauss-Legendre in lambda: a single Hermite rule converges
        # slowly when the data has complex singularities near the real axis.
        x = np.asarray(x, dtype=float)
        lam, w = panel_rule(_unit_edges(q.lambda_max), q.hermite_order)
        w = w * np.exp(-lam * lam) / SQRT_PI
        s = x[..., None] + 2.0 * math.sqrt(t) * lam
        out = np.sum(self.func(s) * w, axis=-1)
        return out[()] if out.ndim == 0 else out


def _unit_edges(lam_max: float) -> np.ndarray:
    """Panel edges of width at most 1 on ``[-lam_max, lam_max]``."""
    return np.linspace(-lam_max, lam_max, 2 * int(math.ceil(lam_max)) + 1)


def tanh_profile(u_left: float, u_right: float, width: float, centre: float = 0.0) -> Smooth:
    """Monotone smooth front ``mean + half_gap * tanh((x - centre) / width)``."""
    if width <= 0:
        raise DomainError("width must be positive")
    mean = 0.5 * (u_left + u_right)
    half = 0.5 * (u_right - u_left)
    func = lambda x: mean + half * np.tanh((np.asarray(x) - centre) / width)  # noqa: E731
    return Smooth(func, bound=max(abs(u_left), abs(u_right)), left_limit=u_left,
                  right_limit=u_right, lower=min(u_left, u_right), upper=max(u_left, u_right))


class Sampled(InitialData):
    """A field reused as initial data.

    ``lower``/``upper`` are the bounds the data is certified to respect
    (for continuation, the original data's range), not the sampled extrema.
    """

    def __init__(self, fld: Field, lower: float, upper: float):
        self.field = fld
        self.lower = float(lower)
        self.upper = float(upper)
        self.sup_norm = max(abs(self.lower), abs(self.upper))
        self.left_limit = float(fld.far_left)
        self.right_limit = float(fld.far_right)

    def __call__(self, x):
        return self.field(x)

    def heat_on_grid(self, t: float) -> np.ndarray:
        ws = PaddedGrid(self.field.grid, t)
        return ws.heat(self.field.values, self.left_limit, self.right_limit, t)

    def heat(self, x, t, q: QuadratureSpec = DEFAULT_QUAD):
        on_grid = self.heat_on_grid(t)
        return Field(t, self.field.xs, on_grid, self.left_limit, self.right_limit)(x)


def _check_t(t):
    if not (np.isfinite(t) and t > 0):
        raise DomainError(f"heat convolution needs t > 0, got {t!r}")


def heat_convolution(d: InitialData, x, t: float, q: QuadratureSpec = DEFAULT_QUAD):
    """``int u0(s) G(x, t; s, 0) ds``: closed form for jump data, quadrature otherwise."""
    _check_t(t)
    return d.heat(x, t, q)


def heat_convolution_quadrature(d: InitialData, x, t: float, q: QuadratureSpec = DEFAULT_QUAD):
    """Direct quadrature of the heat convolution, independent of any closed form.

    Integrates ``u0(x + 2 sqrt(t) lambda) exp(-lambda^2) / sqrt(pi)`` with
    Gauss-Legendre panels split at every breakpoint of the data.
    """
    _check_t(t)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    lam_max = q.lambda_max
    rt = 2.0 * math.sqrt(t)
    out = np.empty_like(x)
    for i, xi in enumerate(x):
        cuts = [(b - xi) / rt for b in d.breakpoints if abs((b - xi) / rt) < lam_max]
        edges = np.unique(np.concatenate([_unit_edges(lam_max), cuts]))
        lam, w = panel_rule(edges, q.hermite_order)
        out[i] = np.sum(w * d(xi + rt * lam) * np.exp(-lam * lam)) / SQRT_PI
    return out if out.size > 1 else out[0]


def sample_field(d: InitialData, grid: Grid, t: float = 0.0) -> Field:
    """Pointwise samples of the data on ``grid``; far field from the data's limits."""
    if any(abs(b) >= grid.L for b in d.breakpoints):
        raise ConfigurationError(
            f"grid half-width {grid.L} does not contain all breakpoints {d.breakpoints}")
    return Field(t, grid.xs, d(grid.xs), d.left_limit, d.right_limit)


def check_far_field(d: InitialData, grid: Grid, tol: float = 1e-10) -> None:
    """Raise unless the data has reached its far-field limits at the grid edges."""
    if isinstance(d, Sampled) or not isinstance(d, Smooth):
        return
    gap = max(abs(d(-grid.L) - d.left_limit), abs(d(grid.L) - d.right_limit))
    if gap > tol * max(1.0, d.sup_norm):
        raise ConfigurationError(
            f"smooth data differs from its limits by {gap:.3g} at x=+-{grid.L}; widen the grid")
