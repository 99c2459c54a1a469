"""Heat kernel ``G(x,t;s,tau)``, its source derivatives, and integral identities.

Gaussian-weighted integrals over ``s`` are done in the scaled variable
``lambda = (s - x) / (2 sqrt(t - tau))``, in which ``G ds = exp(-lambda^2) dlambda / sqrt(pi)``
and all dependence on ``t - tau`` factors out of the node placement.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DomainError

SQRT_PI = math.sqrt(math.pi)


@dataclass(frozen=True)
class KernelPoint:
    x: float
    t: float
    s: float
    tau: float

    def __post_init__(self):
        _check_point(self.x, self.t, self.s, self.tau)


@dataclass(frozen=True)
class QuadratureSpec:
    """Quadrature resolution shared by the kernel identities and the solvers.

    ``hermite_order`` is the node count of every Gauss rule (Hermite for
    Gaussian-weighted integrals, Legendre on each panel of a split
    integral). ``panel_count`` is the number of 8-point Gauss-Legendre
    panels used for integrands with kinks (absolute values of differences).
    ``allow_underresolved`` admits ``hermite_order < 8``; it exists so that
    negative controls can be run deliberately.
    """

    hermite_order: int = 60
    panel_count: int = 200
    tail_epsilon: float = 1e-14
    allow_underresolved: bool = False

    def __post_init__(self):
        min_order = 1 if self.allow_underresolved else 8
        if int(self.hermite_order) != self.hermite_order or self.hermite_order < min_order:
            raise DomainError(f"hermite_order must be an integer >= {min_order}")
        if int(self.panel_count) != self.panel_count or self.panel_count < 1:
            raise DomainError("panel_count must be a positive integer")
        if not (0.0 < self.tail_epsilon <= 1e-6):
            raise DomainError("tail_epsilon must lie in (0, 1e-6]")

    @property
    def lambda_max(self) -> float:
        """Half-width in ``lambda`` beyond which the Gaussian mass is below ``tail_epsilon``."""
        return math.sqrt(-math.log(self.tail_epsilon)) + 1.0


DEFAULT_QUAD = QuadratureSpec()


def _check_point(x, t, s, tau):
    arrs = [np.asarray(a, dtype=float) for a in (x, t, s, tau)]
    if not all(np.all(np.isfinite(a)) for a in arrs):
        raise DomainError("kernel arguments must be finite")
    if np.any(arrs[1] - arrs[3] <= 0):
        raise DomainError("kernel requires t > tau")


def _unpack(p_or_x, t=None, s=None, tau=None):
    if isinstance(p_or_x, KernelPoint):
        return p_or_x.x, p_or_x.t, p_or_x.s, p_or_x.tau
    _check_point(p_or_x, t, s, tau)
    return (np.asarray(p_or_x, float), np.asarray(t, float),
            np.asarray(s, float), np.asarray(tau, float))


def _scalar(a):
    a = np.asarray(a)
    return a[()] if a.ndim == 0 else a


def eval_G(p, t=None, s=None, tau=None):
    """Heat kernel ``(4 pi (t-tau))^(-1/2) exp(-(x-s)^2 / (4 (t-tau)))``.

    Accepts a :class:`KernelPoint` or broadcastable arrays ``(x, t, s, tau)``.
    """
    x, t, s, tau = _unpack(p, t, s, tau)
    dt = np.subtract(t, tau)
    d = np.subtract(x, s)
    return _scalar(np.exp(-d * d / (4.0 * dt)) / np.sqrt(4.0 * np.pi * dt))


def eval_Gs(p, t=None, s=None, tau=None):
    """``dG/ds = (x - s) / (2 (t - tau)) * G``."""
    x, t, s, tau = _unpack(p, t, s, tau)
    dt = np.subtract(t, tau)
    d = np.subtract(x, s)
    g = np.exp(-d * d / (4.0 * dt)) / np.sqrt(4.0 * np.pi * dt)
    return _scalar(d / (2.0 * dt) * g)


def eval_Gss(p, t=None, s=None, tau=None):
    """``d^2G/ds^2 = ((x - s)^2 / (4 (t - tau)^2) - 1 / (2 (t - tau))) * G``."""
    x, t, s, tau = _unpack(p, t, s, tau)
    dt = np.subtract(t, tau)
    d = np.subtract(x, s)
    g = np.exp(-d * d / (4.0 * dt)) / np.sqrt(4.0 * np.pi * dt)
    return _scalar((d * d / (4.0 * dt * dt) - 1.0 / (2.0 * dt)) * g)


@lru_cache(maxsize=32)
def hermite_rule(order: int):
    """Gauss-Hermite nodes and weights for the weight ``exp(-lambda^2)``."""
    nodes, weights = np.polynomial.hermite.hermgauss(order)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


@lru_cache(maxsize=32)
def legendre_rule(order: int):
    nodes, weights = np.polynomial.legendre.leggauss(order)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def panel_rule(edges, order: int):
    """Composite Gauss-Legendre nodes/weights over consecutive ``edges``."""
    gx, gw = legendre_rule(order)
    edges = np.asarray(edges, dtype=float)
    a, b = edges[:-1, None], edges[1:, None]
    half = 0.5 * (b - a)
    nodes = (0.5 * (a + b) + half * gx).ravel()
    weights = (half * gw).ravel()
    return nodes, weights


def _check_dt(dt):
    if not (np.isfinite(dt) and dt > 0):
        raise DomainError(f"dt must be positive and finite, got {dt!r}")


def integral_G(dt: float, q: QuadratureSpec = DEFAULT_QUAD) -> float:
    """Integral of ``G`` over the source position, by Gauss-Hermite in ``lambda``."""
    _check_dt(dt)
    _, w = hermite_rule(q.hermite_order)
    # G ds = exp(-l^2) dl / sqrt(pi): the integrand in lambda is identically 1
    return float(np.sum(w) / SQRT_PI)


def _split_half_line(q: QuadratureSpec):
    # sign changes of lambda and of lambda^2 - 1/2 on the positive half-line
    edges = [0.0, math.sqrt(0.5), q.lambda_max]
    return panel_rule(edges, q.hermite_order)


def integral_absGs(dt: float, q: QuadratureSpec = DEFAULT_QUAD) -> float:
    """Integral of ``|G_s|`` over ``s``; equals ``1/sqrt(pi dt)`` exactly."""
    _check_dt(dt)
    lam, w = _split_half_line(q)
    # |G_s| ds = |lambda| exp(-lambda^2) dlambda / (sqrt(pi) sqrt(dt)); even in lambda
    half = np.sum(w * lam * np.exp(-lam * lam))
    return float(2.0 * half / (SQRT_PI * math.sqrt(dt)))


def integral_Gss_signed_and_abs(dt: float, q: QuadratureSpec = DEFAULT_QUAD):
    """Signed and absolute integrals of ``G_ss`` over ``s``.

    Returns ``(signed, absolute)``. The signed integral vanishes; the absolute
    one scales as ``c / dt``.
    """
    _check_dt(dt)
    x, w = hermite_rule(q.hermite_order)
    signed = np.sum(w * (x * x - 0.5)) / (SQRT_PI * dt)
    lam, pw = _split_half_line(q)
    absolute = 2.0 * np.sum(pw * np.abs(lam * lam - 0.5) * np.exp(-lam * lam)) / (SQRT_PI * dt)
    return float(signed), float(absolute)


IDENTITY_TOLERANCES = {
    "integral_G": 1e-10,
    "integral_absGs": 1e-7,
    "integral_Gss": 1e-8,
}
IDENTITY_DTS = (1e-4, 1e-2, 1.0, 1e2)


def identity_checks(dts=IDENTITY_DTS, q: QuadratureSpec = DEFAULT_QUAD, names=None) -> list:
    """Rows ``(identity, dt, value, error, tolerance, passed)`` for the kernel identities.

    ``integral_G`` is compared with 1, ``integral_absGs`` is normalised by
    ``sqrt(pi dt)`` and compared with 1, and ``integral_Gss`` with 0.
    """
    names = tuple(IDENTITY_TOLERANCES) if names is None else tuple(names)
    unknown = set(names) - set(IDENTITY_TOLERANCES)
    if unknown:
        raise DomainError(f"unknown identities {sorted(unknown)}")
    rows = []
    for name in names:
        tol = IDENTITY_TOLERANCES[name]
        for dt in dts:
            if name == "integral_G":
                value = integral_G(dt, q)
                err = abs(value - 1.0)
            elif name == "integral_absGs":
                value = integral_absGs(dt, q)
                err = abs(value * math.sqrt(math.pi * dt) - 1.0)
            else:
                value = integral_Gss_signed_and_abs(dt, q)[0]
                err = abs(value)
            rows.append((name, float(dt), value, err, tol, bool(err <= tol)))
    return rows


# --------------------------------------------------------------------------
# Hoelder-type difference bounds
# --------------------------------------------------------------------------

_KINK_PANEL_ORDER = 8
_DERIVS = {0: eval_G, 1: eval_Gs, 2: eval_Gss}

HOLDER_BOUNDS = (
    "G_space", "Gs_space", "Gss_space",
    "G_time", "Gs_time", "Gss_time",
)


def _diff_integral(fa, fb, centre, width, q: QuadratureSpec):
    """``int |fa(s) - fb(s)| ds`` for Gaussian-tailed integrands, vectorised over samples.

    ``centre`` and ``width`` (arrays over samples) set the s-window
    ``centre +- width``; the window is covered by ``panel_count`` Legendre
    panels of ``_KINK_PANEL_ORDER`` nodes each.
    """
    u, wu = panel_rule(np.linspace(-1.0, 1.0, q.panel_count + 1), _KINK_PANEL_ORDER)
    s = centre[:, None] + width[:, None] * u[None, :]
    vals = np.abs(fa(s) - fb(s))
    return np.sum(vals * wu[None, :], axis=1) * width


def holder_lhs(kind: str, x1, x2, t1, t2, tau, q: QuadratureSpec = DEFAULT_QUAD):
    """Left-hand side of a difference bound for arrays of sample points.

    Spatial kinds compare ``(x1, t1)`` with ``(x2, t1)``; temporal kinds
    compare ``(x1, t1)`` with ``(x1, t2)``.
    """
    order = {"G": 0, "Gs": 1, "Gss": 2}[kind.split("_")[0]]
    f = _DERIVS[order]
    x1, x2, t1, t2, tau = (np.atleast_1d(np.asarray(a, float)) for a in (x1, x2, t1, t2, tau))
    lam = q.lambda_max
    if kind.endswith("space"):
        dt = t1 - tau
        centre = 0.5 * (x1 + x2)
        width = 0.5 * np.abs(x1 - x2) + 2.0 * lam * np.sqrt(dt)
        return _diff_integral(
            lambda s: f(x1[:, None], t1[:, None], s, tau[:, None]),
            lambda s: f(x2[:, None], t1[:, None], s, tau[:, None]),
            centre, width, q)
    width = 2.0 * lam * np.sqrt(np.maximum(t1, t2) - tau)
    return _diff_integral(
        lambda s: f(x1[:, None], t1[:, None], s, tau[:, None]),
        lambda s: f(x1[:, None], t2[:, None], s, tau[:, None]),
        x1, width, q)


def holder_scale(kind: str, beta: float, x1, x2, t1, t2, tau):
    """Right-hand side of a difference bound divided by its unknown constant ``c(beta)``."""
    order = {"G": 0, "Gs": 1, "Gss": 2}[kind.split("_")[0]]
    x1, x2, t1, t2, tau = (np.atleast_1d(np.asarray(a, float)) for a in (x1, x2, t1, t2, tau))
    if kind.endswith("space"):
        dt = t1 - tau
        return (np.abs(x1 - x2) / np.sqrt(dt)) ** beta / dt ** (order / 2.0)
    # temporal bounds are stated for tau < t2 < t1
    dt2 = t2 - tau
    return (np.abs(t1 - t2) / dt2) ** (beta / 2.0) / dt2 ** (order / 2.0)


def holder_ratios(kind: str, beta: float, x1, x2, t1, t2, tau, q: QuadratureSpec = DEFAULT_QUAD):
    """Observed ratio of each bound's left side to its scale factor; 0 where both vanish."""
    if not (0.0 < beta < 1.0):
        raise DomainError("beta must lie in (0, 1)")
    lhs = holder_lhs(kind, x1, x2, t1, t2, tau, q)
    scale = holder_scale(kind, beta, x1, x2, t1, t2, tau)
    with np.errstate(invalid="ignore", divide="ignore"):
        ratio = np.where(scale > 0, lhs / np.where(scale > 0, scale, 1.0), 0.0)
    return ratio


def sample_holder_points(kind: str, n: int, rng: np.random.Generator):
    """Random sample points for one bound.

    The informative variable is the scale ratio (``|x1-x2|/sqrt(t-tau)`` or
    ``|t1-t2|/(t2-tau)``), drawn log-uniformly on ``[1e-3, 10]``; absolute
    positions and times are drawn at random so the scale invariance is
    exercised rather than assumed.
    """
    ratio = 10.0 ** rng.uniform(-3.0, 1.0, n)
    tau = rng.uniform(0.0, 1.0, n)
    dt = 10.0 ** rng.uniform(-3.0, 1.0, n)
    x1 = rng.uniform(-5.0, 5.0, n)
    if kind.endswith("space"):
        sign = rng.choice([-1.0, 1.0], n)
        x2 = x1 + sign * ratio * np.sqrt(dt)
        return x1, x2, tau + dt, tau + dt, tau
    t2 = tau + dt
    t1 = t2 + ratio * dt
    return x1, x1, t1, t2, tau


def fit_holder_constants(beta: float, sample_count: int, q: QuadratureSpec = DEFAULT_QUAD,
                         seed: int = 0) -> dict:
    """Largest observed ratio for each of the six difference bounds.

    Returns a mapping ``bound name -> fitted c(beta)``.
    """
    if not (0.0 < beta < 1.0):
        raise DomainError("beta must lie in (0, 1)")
    if int(sample_count) != sample_count or sample_count < 1:
        raise DomainError("sample_count must be a positive integer")
    rng = np.random.default_rng(seed)
    table = {}
    for kind in HOLDER_BOUNDS:
        pts = sample_holder_points(kind, sample_count, rng)
        table[kind] = float(np.max(holder_ratios(kind, beta, *pts, q=q)))
    return table
