"""Finite-difference reference solver on a truncated domain.

Second-order central diffusion on the vertex grid ``linspace(-L, L, nx)``
with Dirichlet ghost values equal to the far-field limits. Advection
``h(x) u u_x`` is non-conservative, either central (second order, default)
or upwinded by the sign of ``h u`` (first order, monotone).

Jump data is initialised with dual-cell averages, so a node sitting on a
discontinuity gets the mean of the one-sided values and no side is
privileged.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_banded

from . import backend
from .coeff import Coefficient, h
from .errors import ConfigurationError
from .field import Field, Grid
from .initial_data import InitialData, PiecewiseConstant, check_far_field, sample_field

SCHEMES = ("explicit", "semi_implicit")
ADVECTIONS = ("central", "upwind")


@dataclass(frozen=True)
class FdConfig:
    """``dt = dt_factor * dx**2``; the explicit scheme needs ``dt_factor <= 0.5``."""

    L: float = 2.5
    nx: int = 2001
    dt_factor: float = 0.4
    scheme: str = "explicit"
    advection: str = "central"

    def __post_init__(self):
        if not self.L > 0:
            raise ConfigurationError("L must be positive")
        if self.nx < 128:
            raise ConfigurationError("nx must be at least 128")
        if self.scheme not in SCHEMES:
            raise ConfigurationError(f"scheme must be one of {SCHEMES}")
        if self.advection not in ADVECTIONS:
            raise ConfigurationError(f"advection must be one of {ADVECTIONS}")
        if not self.dt_factor > 0:
            raise ConfigurationError("dt_factor must be positive")
        if self.scheme == "explicit" and self.dt_factor > 0.5:
            raise ConfigurationError("explicit scheme is unstable for dt_factor > 0.5")

    @property
    def grid(self) -> Grid:
        return Grid(self.L, self.nx)

    @property
    def dx(self) -> float:
        return self.grid.dx

    @property
    def dt(self) -> float:
        return self.dt_factor * self.dx ** 2

    def refined(self) -> "FdConfig":
        return FdConfig(self.L, 2 * self.nx - 1, self.dt_factor, self.scheme, self.advection)


def initial_values(d: InitialData, grid: Grid) -> np.ndarray:
    """Node values: dual-cell averages for piecewise-constant data, samples otherwise."""
    fld = sample_field(d, grid)
    if not isinstance(d, PiecewiseConstant):
        return fld.values
    xs, dx = grid.xs, grid.dx
    vals = fld.values.copy()
    for b, lo, hi in d.jumps():
        i = int(np.argmin(np.abs(xs - b)))
        # fraction of the dual cell [x_i - dx/2, x_i + dx/2] lying left of b
        frac = min(max((b - (xs[i] - 0.5 * dx)) / dx, 0.0), 1.0)
        vals[i] = frac * lo + (1.0 - frac) * hi
    return vals


def _check_stability(cfg: FdConfig, h_vals, bound: float):
    dx, dt = cfg.dx, cfg.dt
    a_max = float(np.max(np.abs(h_vals))) * bound
    if cfg.advection == "central":
        # cell Peclet number <= 2 keeps the central stencil monotone
        if a_max * dx > 2.0:
            raise ConfigurationError(f"cell Peclet number {a_max * dx:.3g} > 2; refine the grid")
        limit = 2.0 * dt / dx ** 2 if cfg.scheme == "explicit" else 0.0
        if limit > 1.0:
            raise ConfigurationError("explicit diffusion step exceeds the stability limit")
    else:
        diff = 2.0 * dt / dx ** 2 if cfg.scheme == "explicit" else 0.0
        if diff + dt * a_max / dx > 1.0:
            raise ConfigurationError("time step violates the upwind stability limit")
    if cfg.scheme == "semi_implicit" and dt * a_max / dx > 1.0:
        raise ConfigurationError("time step violates the advective CFL limit")


class _CrankNicolson:
    """Crank-Nicolson diffusion with explicit advection (Dirichlet ghosts)."""

    def __init__(self, n, dx, dt):
        self.r = dt / dx ** 2
        self.ab = np.zeros((3, n))
        self.ab[0, 1:] = -0.5 * self.r
        self.ab[1, :] = 1.0 + self.r
        self.ab[2, :-1] = -0.5 * self.r

    def step(self, u, hv, dx, dt, left, right, upwind):
        r = self.r
        ext = np.concatenate([[left], u, [right]])
        ul, ur = ext[:-2], ext[2:]
        a = hv * u
        if upwind:
            adv = (dt / dx) * a * np.where(a > 0, u - ul, ur - u)
        else:
            adv = (0.5 * dt / dx) * a * (ur - ul)
        rhs = u + 0.5 * r * (ur - 2.0 * u + ul) - adv
        rhs[0] += 0.5 * r * left
        rhs[-1] += 0.5 * r * right
        return solve_banded((1, 1), self.ab, rhs)


def solve_fd(d: InitialData, T: float, c: Coefficient, cfg: FdConfig, report_times=()) -> list:
    """Fields at every requested report time in ``(0, T]`` and at ``T``; times are hit exactly."""
    if not T > 0:
        raise ConfigurationError("T must be positive")
    grid = cfg.grid
    check_far_field(d, grid)
    xs, dx = grid.xs, grid.dx
    hv = h(c, xs)
    _check_stability(cfg, hv, d.sup_norm)
    left, right = d.left_limit, d.right_limit
    u = initial_values(d, grid).astype(float).copy()
    upwind = cfg.advection == "upwind"
    stops = sorted({float(t) for t in report_times if 0 < t <= T} | {float(T)})
    cn = _CrankNicolson(len(xs), dx, cfg.dt) if cfg.scheme == "semi_implicit" else None
    out = []
    t = 0.0
    for stop in stops:
        span = stop - t
        nsteps = max(1, int(math.ceil(span / cfg.dt * (1 - 1e-12))))
        dt = span / nsteps
        if cn is None:
            backend.fd_explicit_advance(u, hv, dx, dt, nsteps, left, right, upwind)
        else:
            if abs(dt - cfg.dt) > 1e-12 * cfg.dt:
                cn = _CrankNicolson(len(xs), dx, dt)
            for _ in range(nsteps):
                u = cn.step(u, hv, dx, dt, left, right, upwind)
        t = stop
        out.append(Field(stop, xs, u.copy(), left, right))
    return out


@dataclass
class Discrepancy:
    """Per-time sup and grid-L2 differences between two solutions."""

    times: np.ndarray
    sup: np.ndarray
    l2: np.ndarray

    @property
    def max_sup(self) -> float:
        return float(np.max(self.sup))

    @property
    def max_l2(self) -> float:
        return float(np.max(self.l2))


def _on_common_nodes(a: Field, b: Field):
    """Values of both fields on shared nodes (the coarser grid if one refines the other)."""
    lo = max(a.xs[0], b.xs[0])
    hi = min(a.xs[-1], b.xs[-1])
    if hi <= lo:
        raise ConfigurationError("fields have no overlapping spatial range")
    coarse, fine = (a, b) if a.dx >= b.dx else (b, a)
    xs = coarse.xs[(coarse.xs >= lo - 1e-12) & (coarse.xs <= hi + 1e-12)]
    ratio = coarse.dx / fine.dx
    k = int(round(ratio))
    offset = (xs[0] - fine.xs[0]) / fine.dx
    if abs(ratio - k) < 1e-9 and abs(offset - round(offset)) < 1e-6:
        j0 = int(round(offset))
        fine_vals = fine.values[j0: j0 + k * (len(xs) - 1) + 1: k]
    else:
        fine_vals = fine(xs)
    coarse_vals = coarse(xs) if len(xs) != len(coarse.xs) else coarse.values
    if coarse is a:
        return xs, coarse_vals, fine_vals
    return xs, fine_vals, coarse_vals


def compare(mild, fd, rtol: float = 1e-9) -> Discrepancy:
    """Discrepancy between two time-indexed field lists at every time of ``fd``.

    ``mild`` may be a list of fields or of solution patches. Each fd time must
    appear among the mild times.
    """
    from .mild_solver import all_fields

    mild_fields = all_fields(mild)
    mild_times = np.array([f.t for f in mild_fields])
    times, sups, l2s = [], [], []
    for g in fd:
        i = int(np.argmin(np.abs(mild_times - g.t)))
        if abs(mild_times[i] - g.t) > rtol * max(1.0, abs(g.t)):
            raise ConfigurationError(f"no matching report time for t={g.t}")
        xs, va, vb = _on_common_nodes(mild_fields[i], g)
        diff = va - vb
        dxc = xs[1] - xs[0]
        times.append(g.t)
        sups.append(float(np.max(np.abs(diff))))
        l2s.append(float(np.sqrt(dxc * np.sum(diff * diff))))
    if not times:
        raise ConfigurationError("no report times to compare")
    return Discrepancy(np.array(times), np.array(sups), np.array(l2s))


def richardson_order(coarse: Field, mid: Field, fine: Field) -> float:
    """Observed order ``log2(|u_h - u_{h/2}| / |u_{h/2} - u_{h/4}|)`` on the coarse nodes."""
    _, a, b = _on_common_nodes(coarse, mid)
    _, _, c = _on_common_nodes(coarse, fine)
    e1 = float(np.max(np.abs(a - b)))
    e2 = float(np.max(np.abs(b - c)))
    if e2 == 0.0:
        return math.inf
    return math.log2(e1 / e2)
