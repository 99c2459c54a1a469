"""Mild solutions by Picard iteration on the Duhamel integral equation.

For data ``u0`` the solution on ``(t0, t0 + T*]`` is the fixed point of

    M[v](x, t) = (heat semigroup of u0)(x, t)
                 + int_{t0}^t int  v(s,tau)^2 / 2 * (G h'(s) + G_s h(s)) ds dtau.

Representation. ``v`` is stored on time slices ``t0 < t_1 < ... < t_m``
(geometrically graded towards ``t0``) and, at each slice, on a uniform grid
over ``[-L, L]`` with constant far field. Because ``G h' + G_s h`` is the
``s``-derivative of ``G h``, the inner integral equals ``-e^{(t-tau)Laplacian}(w_x h)``
with ``w = v^2/2``; it is evaluated exactly for the trigonometric interpolant
of ``w`` on a zero-padded FFT grid (the far-field part of ``w`` is carried by a
Gaussian-CDF background, see :mod:`genburgers.spectral`). The ``tau``-integral
uses product weights on the slices: local cubic Lagrange interpolation, and on
the first interval ``[t0, t_1]`` the rule exact for ``a + b sqrt(tau - t0)``
when the data has jumps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import backend
from .coeff import Coefficient, dh, h, sup_dh
from .errors import (CertificationError, ConfigurationError, ConvergenceError,
                     PreconditionError, SolverError)
from .field import Field, Grid
from .initial_data import (InitialData, PiecewiseConstant, Sampled, Smooth, check_far_field,
                           sample_field)
from .kernel import DEFAULT_QUAD, SQRT_PI, QuadratureSpec
from .spectral import PaddedGrid

CONTRACTION_FACTOR = 0.5


@dataclass(frozen=True)
class SolverConfig:
    """Discretisation and stopping parameters of the mild solver.

    ``time_panels`` is the number of time slices per patch; ``t_min_report``
    is the first slice offset from the patch start (``None``: one thousandth
    of the patch length).
    """

    L: float = 2.5
    nx: int = 2001
    picard_tol: float = 1e-8
    max_iterations: int = 40
    quad: QuadratureSpec = DEFAULT_QUAD
    time_panels: int = 72
    t_min_report: float | None = None
    contraction_slack: float = 0.05

    def __post_init__(self):
        if not self.L > 0:
            raise ConfigurationError("L must be positive")
        if self.nx < 64:
            raise ConfigurationError("nx must be at least 64")
        if not self.picard_tol > 0:
            raise ConfigurationError("picard_tol must be positive")
        if self.max_iterations < 1:
            raise ConfigurationError("max_iterations must be positive")
        if self.time_panels < 4:
            raise ConfigurationError("time_panels must be at least 4")
        if self.t_min_report is not None and not self.t_min_report > 0:
            raise ConfigurationError("t_min_report must be positive")

    @property
    def grid(self) -> Grid:
        return Grid(self.L, self.nx)

    def refined(self) -> "SolverConfig":
        """Half the grid spacing and twice the time slices."""
        return replace(self, nx=2 * self.nx - 1, time_panels=2 * self.time_panels - 1)


@dataclass
class SolutionPatch:
    t0: float
    t_star: float
    fields: list
    iterations: int
    residual_history: list
    bound: float
    certified_step: float = field(default=0.0)

    @property
    def times(self) -> np.ndarray:
        return np.array([f.t for f in self.fields])

    @property
    def t_end(self) -> float:
        return self.t0 + self.t_star

    def values(self) -> np.ndarray:
        return np.array([f.values for f in self.fields])

    def field_at(self, t: float, rtol: float = 1e-9) -> Field:
        times = self.times
        i = int(np.argmin(np.abs(times - t)))
        if abs(times[i] - t) > rtol * max(1.0, abs(t)):
            raise KeyError(f"no report field at t={t}")
        return self.fields[i]


def certified_step(norm_u0: float, c: Coefficient) -> float:
    """Local existence time ``T*`` guaranteeing ``M`` is a 1/2-contraction on the bounded set."""
    if not norm_u0 >= 0:
        raise ConfigurationError("norm_u0 must be nonnegative")
    a = sup_dh(c) / 2.0 + 1.0 / SQRT_PI
    n1 = norm_u0 + 1.0
    return min(1.0, (n1 * n1 * a) ** -2, (4.0 * n1 * a) ** -2)


def slice_times(t0: float, duration: float, cfg: SolverConfig, report_times=()) -> np.ndarray:
    """Geometric slice times in ``(t0, t0 + duration]`` merged with requested report times."""
    t_min = cfg.t_min_report if cfg.t_min_report is not None else 1e-3 * duration
    t_min = min(t_min, duration / 10.0)
    rel = np.geomspace(t_min, duration, cfg.time_panels)
    extra = [t - t0 for t in report_times if t0 < t <= t0 + duration * (1 + 1e-12)]
    rel = np.sort(np.concatenate([rel, np.minimum(extra, duration)]))
    keep = np.concatenate([[True], np.diff(rel) > 1e-9 * duration])
    rel = rel[keep]
    rel[-1] = duration
    return t0 + rel


def duhamel_time_weights(tau, sqrt_start: bool) -> np.ndarray:
    """Product weights ``W[j, k]`` so that ``int_0^{tau_j} F ~ sum_k W[j, k] F(tau_k)``.

    ``tau[0] == 0``. Row 0 is zero. Intervals past the first use cubic
    Lagrange interpolation through the (up to) four nearest nodes among
    ``tau[1..j]``.
    """
    tau = np.asarray(tau, dtype=float)
    m = len(tau)
    W = np.zeros((m, m))
    t1 = tau[1]
    for j in range(1, m):
        if sqrt_start:
            # exact for a + b sqrt(tau)
            W[j, 0] += t1 / 3.0
            W[j, 1] += 2.0 * t1 / 3.0
        else:
            W[j, 0] += t1 / 2.0
            W[j, 1] += t1 / 2.0
        for k in range(1, j):
            lo = min(max(k - 1, 1), max(1, j - 3))
            nodes = np.arange(lo, min(lo + 4, j + 1))
            a, b = tau[k], tau[k + 1]
            width = b - a
            z = (tau[nodes] - a) / width
            p = np.arange(len(nodes))
            vander = z[None, :] ** p[:, None]
            moments = 1.0 / (p + 1.0)
            W[j, nodes] += width * np.linalg.solve(vander, moments)
    return W


class DuhamelOperator:
    """The map ``M`` for fixed data, coefficient, grid and slice times."""

    def __init__(self, d: InitialData, c: Coefficient, cfg: SolverConfig, t0: float, times):
        self.data = d
        self.coeff = c
        self.cfg = cfg
        self.t0 = float(t0)
        self.times = np.asarray(times, dtype=float)
        rel = self.times - self.t0
        if rel[0] <= 0 or np.any(np.diff(rel) <= 0):
            raise ConfigurationError("slice times must increase strictly after t0")
        self.tau = np.concatenate([[0.0], rel])
        self.grid = cfg.grid
        xs = self.grid.xs
        sample_field(d, self.grid)  # validates breakpoints against the grid
        check_far_field(d, self.grid)
        self.ws = ws = PaddedGrid(self.grid, rel[-1])
        self.h_pad = h(c, ws.s)
        self.dh_pad = dh(c, ws.s)
        self.left = d.left_limit
        self.right = d.right_limit
        wl, wr = 0.5 * self.left ** 2, 0.5 * self.right ** 2
        self.w_bg = ws.background(wl, wr)
        self.c_hat = ws.rfft((wr - wl) * ws.dsigma * self.h_pad)
        self.closed_start = isinstance(d, PiecewiseConstant)
        self.W = duhamel_time_weights(self.tau, sqrt_start=self.closed_start and d.has_jumps)

        if isinstance(d, Sampled) and d.field.grid == self.grid:
            self.heat = np.array([ws.heat(d.field.values, self.left, self.right, r) for r in rel])
        elif isinstance(d, Smooth):
            # spectral action on the samples; far-field agreement was checked above
            samples = d(xs)
            self.heat = np.array([ws.heat(samples, self.left, self.right, r) for r in rel])
        else:
            self.heat = np.array([d.heat(xs, r, cfg.quad) for r in rel])

        if self.closed_start:
            # F at tau = t0 for piecewise-constant w0: -sum_b [w0]_b h(b) G(x - b; t - t0)
            f0 = np.zeros((len(rel), len(xs)))
            for b, lo, hi in d.jumps():
                jump = 0.5 * (hi * hi - lo * lo)
                if jump == 0.0:
                    continue
                dt = rel[:, None]
                g = np.exp(-(xs[None, :] - b) ** 2 / (4.0 * dt)) / np.sqrt(4.0 * np.pi * dt)
                f0 -= jump * float(h(c, b)) * g
            self.f0 = f0
            self.s0_hat = np.zeros(len(ws.omega2), dtype=complex)
        else:
            self.f0 = None
            self.s0_hat = self._source_hat(d(xs)[None, :])[0]

    @property
    def xs(self):
        return self.grid.xs

    def _source_hat(self, values):
        """Fourier transform of ``-(w_x h)`` for each row of sampled ``v`` values."""
        ws = self.ws
        v = np.empty((values.shape[0], ws.n))
        v[:, : ws.pad] = self.left
        v[:, ws.pad: ws.pad + ws.nx] = values
        v[:, ws.pad + ws.nx:] = self.right
        wt = 0.5 * v * v - self.w_bg
        a_hat = ws.rfft(wt * self.dh_pad)
        b_hat = ws.rfft(wt * self.h_pad)
        return a_hat - ws.iomega * b_hat - self.c_hat

    def duhamel(self, values) -> np.ndarray:
        """The time-integral term of ``M`` on every slice, for slice values ``values`` (m, nx)."""
        ws = self.ws
        S = np.empty((len(self.tau), len(ws.omega2)), dtype=np.complex128)
        S[0] = self.s0_hat
        S[1:] = self._source_hat(np.asarray(values))
        acc = backend.duhamel_accumulate(S, ws.omega2, self.tau, self.W)
        out = ws.irfft(acc[1:])[:, ws.pad: ws.pad + ws.nx]
        if self.f0 is not None:
            out = out + self.W[1:, 0][:, None] * self.f0
        return out

    def apply(self, values) -> np.ndarray:
        return self.heat + self.duhamel(values)

    def to_fields(self, values) -> list:
        return [Field(t, self.xs, row, self.left, self.right) for t, row in zip(self.times, values)]


def _check_membership(values, bound, what="input"):
    sup = float(np.max(np.abs(values)))
    if sup > bound:
        raise PreconditionError(f"{what} sup-norm {sup:.6g} exceeds the admissible bound {bound:.6g}")


def apply_M(v, d: InitialData, c: Coefficient, cfg: SolverConfig, t0: float = 0.0) -> list:
    """Apply the Duhamel map to time-indexed fields ``v`` on ``(t0, t0 + T*]``."""
    times = [f.t for f in v]
    values = np.array([f.values for f in v])
    _check_membership(values, d.sup_norm + 1.0)
    op = DuhamelOperator(d, c, cfg, t0, times)
    return op.to_fields(op.apply(values))


def solve_local(d: InitialData, t0: float, c: Coefficient, cfg: SolverConfig,
                duration: float | None = None, report_times=()) -> SolutionPatch:
    """Picard iteration ``v <- M[v]`` from the heat-semigroup term to the fixed point.

    Raises :class:`ConvergenceError` when ``max_iterations`` is exhausted and
    :class:`CertificationError` when an update fails to contract by the
    certified factor (plus slack) or leaves the admissible set.
    """
    norm = d.sup_norm
    t_star = certified_step(norm, c)
    dur = t_star if duration is None else min(float(duration), t_star)
    if not dur > 0:
        raise ConfigurationError("patch duration must be positive")
    bound = norm + 1.0
    op = DuhamelOperator(d, c, cfg, t0, slice_times(t0, dur, cfg, report_times))
    v = op.heat.copy()
    _check_membership(v, bound, "initial iterate")
    history = []
    ratio_cap = CONTRACTION_FACTOR + cfg.contraction_slack
    for it in range(1, cfg.max_iterations + 1):
        new = op.apply(v)
        step = float(np.max(np.abs(new - v)))
        history.append(step)
        if float(np.max(np.abs(new))) > bound:
            raise CertificationError("iterate left the admissible set", history)
        if len(history) > 1 and step > ratio_cap * history[-2] + cfg.picard_tol:
            raise CertificationError(
                f"update ratio {step / history[-2]:.3f} exceeds {ratio_cap}", history)
        v = new
        if step <= cfg.picard_tol:
            break
    else:
        raise ConvergenceError(
            f"no convergence to {cfg.picard_tol:g} in {cfg.max_iterations} iterations", history)
    return SolutionPatch(t0=float(t0), t_star=dur, fields=op.to_fields(v), iterations=it,
                         residual_history=history, bound=bound, certified_step=t_star)


def solve_global(d: InitialData, T: float, c: Coefficient, cfg: SolverConfig,
                 report_times=()) -> list:
    """Chain local patches over ``(0, T]``.

    Each restart uses the previous terminal field as data, certified by the
    original range ``[inf u0, sup u0]`` so every patch gets the same step.
    """
    if not T > 0:
        raise ConfigurationError("T must be positive")
    lo, hi = d.lower, d.upper
    step = certified_step(d.sup_norm, c)
    patches = []
    data, t0 = d, 0.0
    index = 0
    while t0 < T * (1.0 - 1e-12):
        dur = min(step, T - t0)
        try:
            patch = solve_local(data, t0, c, cfg, duration=dur, report_times=report_times)
        except SolverError as exc:
            exc.patch_index = index
            raise
        patches.append(patch)
        data = Sampled(patch.fields[-1], lo, hi)
        t0 = patch.t_end
        index += 1
    return patches


def integral_residual(patch: SolutionPatch, d: InitialData, c: Coefficient,
                      cfg: SolverConfig) -> float:
    """``sup |u - M[u]|`` over the patch's slices."""
    op = DuhamelOperator(d, c, cfg, patch.t0, patch.times)
    values = patch.values()
    return float(np.max(np.abs(values - op.apply(values))))


def all_fields(sol) -> list:
    """Flatten a patch, a list of patches, or a list of fields into time-ordered fields."""
    if isinstance(sol, SolutionPatch):
        return list(sol.fields)
    out = []
    for item in sol:
        if isinstance(item, SolutionPatch):
            out.extend(item.fields)
        else:
            out.append(item)
    return sorted(out, key=lambda f: f.t)


def restart_data(patch: SolutionPatch, d: InitialData) -> Sampled:
    return Sampled(patch.fields[-1], d.lower, d.upper)
