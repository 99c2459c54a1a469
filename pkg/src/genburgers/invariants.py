"""Executable checks of the qualitative and quantitative properties of solutions.

Every check returns an :class:`InvariantReport`. Derivatives are taken by
finite differences on the report grid, independently of the solver's
internal formulas. Rate fits are least squares on log-log data; a fit with
``r_squared`` below :data:`MIN_R_SQUARED` yields status ``inconclusive``
rather than a pass or a fail.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .coeff import Coefficient, h, sup_dh
from .errors import ConfigurationError
from .initial_data import InitialData, PiecewiseConstant, Step
from .kernel import SQRT_PI
from .mild_solver import SolverConfig, all_fields, solve_global, solve_local

MIN_R_SQUARED = 0.98

PASS, FAIL, INCONCLUSIVE, NOT_APPLICABLE = "pass", "fail", "inconclusive", "not_applicable"


@dataclass
class InvariantReport:
    name: str
    status: str
    measured: dict
    threshold: dict
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status == PASS

    def to_dict(self) -> dict:
        out = asdict(self)
        out["passed"] = self.passed
        return _jsonable(out)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


@dataclass
class RateFit:
    """``norm ~ fitted_constant * t ** fitted_exponent`` on the fitted window."""

    times: np.ndarray
    norms: np.ndarray
    fitted_exponent: float
    fitted_constant: float
    r_squared: float

    @property
    def conclusive(self) -> bool:
        return self.r_squared >= MIN_R_SQUARED


def fit_rate(times, norms) -> RateFit:
    times = np.asarray(times, dtype=float)
    norms = np.asarray(norms, dtype=float)
    if times.size < 3:
        raise ConfigurationError("need at least three points for a rate fit")
    if np.any(times <= 0) or np.any(norms <= 0):
        raise ConfigurationError("rate fits need positive times and norms")
    lt, ln = np.log(times), np.log(norms)
    slope, icpt = np.polyfit(lt, ln, 1)
    resid = ln - (slope * lt + icpt)
    ss_tot = float(np.sum((ln - ln.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid ** 2)) / ss_tot if ss_tot > 0 else 0.0
    return RateFit(times, norms, float(slope), float(math.exp(icpt)), max(0.0, min(1.0, r2)))


def _fields(sol) -> list:
    fields = all_fields(sol)
    if not fields:
        raise ConfigurationError("solution has no fields")
    return fields


def _stack(fields):
    """Times, xs, dx and the value matrix of fields sharing one grid."""
    xs = fields[0].xs
    for f in fields:
        if f.xs.shape != xs.shape or not np.allclose(f.xs, xs, rtol=0, atol=1e-12):
            raise ConfigurationError("fields must share one grid")
    times = np.array([f.t for f in fields])
    return times, xs, float(xs[1] - xs[0]), np.array([f.values for f in fields])


# ---------------------------------------------------------------- bounds

def check_max_principle(sol, d: InitialData, tol: float = 1e-4) -> InvariantReport:
    """``inf u0 - tol <= u <= sup u0 + tol`` over every report field."""
    fields = _fields(sol)
    lo = min(float(np.min(f.values)) for f in fields)
    hi = max(float(np.max(f.values)) for f in fields)
    ok = lo >= d.lower - tol and hi <= d.upper + tol
    return InvariantReport(
        "max_principle", PASS if ok else FAIL,
        {"min": lo, "max": hi},
        {"lower": d.lower - tol, "upper": d.upper + tol},
        {"margin": min(lo - d.lower, d.upper - hi)})


def check_monotonicity(sol, d: InitialData, slack: float = 1e-10,
                       probes=(-1.0, 0.0, 1.0), strict_tol: float = 1e-8) -> InvariantReport:
    """Forward differences carry the sign of ``u_plus - u_minus`` at every report time.

    Besides the sign up to ``slack``, strict monotonicity is asserted as a
    central difference of at least ``strict_tol`` at the probes
    ``x = p * sqrt(t)``. Probes scale with the front width because far from
    it the profile is flat to machine precision at small ``t``.
    """
    if not isinstance(d, Step) or d.u_minus == d.u_plus:
        return InvariantReport("monotonicity", NOT_APPLICABLE, {}, {},
                               {"reason": "needs step data with distinct states"})
    sign = 1.0 if d.u_plus > d.u_minus else -1.0
    worst = math.inf
    weakest = math.inf
    per_time = []
    for f in _fields(sol):
        diffs = sign * np.diff(f.values)
        lo = float(np.min(diffs))
        xs = f.xs
        idx = [int(np.argmin(np.abs(xs - p * math.sqrt(f.t)))) for p in probes]
        central = [float(sign * (f.values[i + 1] - f.values[i - 1]))
                   for i in idx if 0 < i < len(xs) - 1]
        weakest = min(weakest, min(central)) if central else weakest
        worst = min(worst, lo)
        per_time.append((f.t, lo))
    ok = worst >= -slack and weakest >= strict_tol
    return InvariantReport(
        "monotonicity", PASS if ok else FAIL,
        {"min_signed_difference": worst, "min_probe_difference": weakest},
        {"slack": -slack, "strict_tol": strict_tol},
        {"sign": sign, "per_time": per_time})


def tail_estimate(d: InitialData, x: float, t: float) -> float:
    """Heat-kernel mass beyond distance ``x`` from the jumps, times the jump size."""
    total = 0.0
    for b, lo, hi in d.jumps():
        total += 0.5 * abs(hi - lo) * math.erfc(max(abs(x) - abs(b), 0.0) / (2.0 * math.sqrt(t)))
    return total


def check_far_field(sol, d: InitialData, x_probe, factor: float = 10.0,
                    floor: float = 1e-12) -> InvariantReport:
    """``|u(+-x_probe, t) - u_pm|`` against ``factor`` times the Gaussian tail estimate.

    ``x_probe`` may be a sequence; then the worst deviation must also
    decrease strictly outward (or sit below ``floor``, the round-off level).
    """
    probes = np.atleast_1d(np.asarray(x_probe, dtype=float))
    fields = _fields(sol)
    L = min(f.xs[-1] for f in fields)
    if np.any(probes <= 0) or np.any(probes > L):
        raise ConfigurationError(f"probes {probes.tolist()} must lie in (0, {L}]")
    devs, thresholds = [], []
    for p in probes:
        dev = 0.0
        thr = 0.0
        for f in fields:
            left, right = f(np.array([-p, p]))
            dev = max(dev, abs(left - d.left_limit), abs(right - d.right_limit))
            thr = max(thr, factor * tail_estimate(d, p, f.t))
        devs.append(dev)
        thresholds.append(max(thr, floor))
    ok = all(dv <= th for dv, th in zip(devs, thresholds))
    ordered = all(b < a or b <= floor for a, b in zip(devs, devs[1:]))
    return InvariantReport(
        "far_field", PASS if ok and ordered else FAIL,
        {"deviation": devs},
        {"threshold": thresholds},
        {"probes": probes.tolist(), "monotone_outward": ordered})


# ---------------------------------------------------------------- rates

def _window(times, t_lo, t_hi, decades):
    t_hi = times[-1] / 10.0 if t_hi is None else t_hi
    t_lo = t_hi * 10.0 ** -decades if t_lo is None else t_lo
    # widen to the nearest slices at or beyond each edge
    i_lo = max(int(np.searchsorted(times, t_lo * (1 + 1e-9), side="right")) - 1, 0)
    i_hi = min(int(np.searchsorted(times, t_hi * (1 - 1e-9), side="left")), len(times) - 1)
    sel = np.zeros(len(times), dtype=bool)
    sel[i_lo: i_hi + 1] = True
    if sel.sum() < 8:
        raise ConfigurationError(
            f"only {int(sel.sum())} report times in [{t_lo:.3g}, {t_hi:.3g}]; need 8")
    span = math.log10(times[sel][-1] / times[sel][0])
    if span < decades - 1e-6:
        raise ConfigurationError(f"report times span {span:.2f} decades; need {decades}")
    return sel


def derivative_norms(sol, c: Coefficient):
    """Per-time sup-norms of ``u_x``, ``u_xx`` and ``u_t`` (time differences and PDE form)."""
    times, xs, dx, U = _stack(_fields(sol))
    ux = np.gradient(U, dx, axis=1)
    uxx = (U[:, 2:] - 2.0 * U[:, 1:-1] + U[:, :-2]) / dx ** 2
    ut_time = np.gradient(U, times, axis=0, edge_order=2)
    ut_pde = uxx - h(c, xs[1:-1]) * U[:, 1:-1] * ux[:, 1:-1]
    inner = slice(1, -1)
    return {
        "times": times,
        "ux": np.max(np.abs(ux[:, inner]), axis=1),
        "uxx": np.max(np.abs(uxx), axis=1),
        "ut_time": np.max(np.abs(ut_time[:, inner]), axis=1),
        "ut_pde": np.max(np.abs(ut_pde), axis=1),
    }


def fit_derivative_decay(sol, c: Coefficient, t_lo=None, t_hi=None, decades: float = 1.5):
    """Rate fits of ``||u_x||``, ``||u_xx||`` and ``||u_t||`` (time-difference estimator).

    The default window ends a decade below the last report time, where the
    small-time asymptotics dominate, and spans ``decades`` decades.
    """
    n = derivative_norms(sol, c)
    sel = _window(n["times"], t_lo, t_hi, decades)
    t = n["times"][sel]
    return fit_rate(t, n["ux"][sel]), fit_rate(t, n["uxx"][sel]), fit_rate(t, n["ut_time"][sel])


def check_derivative_decay(sol, c: Coefficient, t_lo=None, t_hi=None, decades: float = 1.5,
                           ux_range=(-0.6, -0.4), second_range=(-1.15, -0.85),
                           ut_agreement: float = 0.05) -> InvariantReport:
    n = derivative_norms(sol, c)
    sel = _window(n["times"], t_lo, t_hi, decades)
    t = n["times"][sel]
    fits = {k: fit_rate(t, n[k][sel]) for k in ("ux", "uxx", "ut_time", "ut_pde")}
    ranges = {"ux": ux_range, "uxx": second_range, "ut_time": second_range, "ut_pde": second_range}
    rel = np.abs(n["ut_time"][sel] / n["ut_pde"][sel] - 1.0)
    in_range = all(ranges[k][0] <= f.fitted_exponent <= ranges[k][1] for k, f in fits.items())
    agree = float(np.max(rel)) <= ut_agreement
    if not all(f.conclusive for f in fits.values()):
        status = INCONCLUSIVE
    else:
        status = PASS if in_range and agree else FAIL
    return InvariantReport(
        "derivative_decay", status,
        {**{f"{k}_exponent": f.fitted_exponent for k, f in fits.items()},
         **{f"{k}_r_squared": f.r_squared for k, f in fits.items()},
         "ut_max_relative_gap": float(np.max(rel))},
        {"ux_range": list(ux_range), "second_order_range": list(second_range),
         "ut_agreement": ut_agreement, "min_r_squared": MIN_R_SQUARED},
        {"window": [float(t[0]), float(t[-1])], "points": int(sel.sum()),
         "constants": {k: f.fitted_constant for k, f in fits.items()}})


def check_small_time(sol, d: InitialData, min_exponent: float = 0.9) -> InvariantReport:
    """Rate of ``sup_x |u - heat_convolution(u0)|`` as ``t -> 0+`` over the first patch."""
    # first patch only: a restart resets the reference data
    if hasattr(sol, "fields"):
        first = list(sol.fields)
    elif sol and hasattr(sol[0], "fields"):
        first = list(sol[0].fields)
    else:
        first = _fields(sol)
    times = np.array([f.t for f in first])
    gaps = np.array([np.max(np.abs(f.values - d.heat(f.xs, f.t))) for f in first])
    keep = gaps > 0
    if keep.sum() < 3:
        return InvariantReport("small_time", PASS, {"max_gap": float(np.max(gaps))},
                               {"min_exponent": min_exponent},
                               {"reason": "solution equals the heat term"})
    fit = fit_rate(times[keep], gaps[keep])
    if not fit.conclusive:
        status = INCONCLUSIVE
    else:
        status = PASS if fit.fitted_exponent >= min_exponent else FAIL
    return InvariantReport(
        "small_time", status,
        {"exponent": fit.fitted_exponent, "r_squared": fit.r_squared,
         "constant": fit.fitted_constant},
        {"min_exponent": min_exponent, "min_r_squared": MIN_R_SQUARED},
        {"window": [float(times[0]), float(times[-1])]})


# ---------------------------------------------------------------- Hoelder

def sample_pairs(fields, n: int, rng: np.random.Generator, x_range=None):
    """Scale-invariant pairs: ``x2 - x1 = +-sqrt(t) * r`` with ``r`` log-uniform in [1e-3, 10]."""
    L = fields[0].xs[-1]
    half = 0.5 * L if x_range is None else x_range
    idx = rng.integers(0, len(fields), n)
    x1 = rng.uniform(-half, half, n)
    r = 10.0 ** rng.uniform(-3.0, 1.0, n)
    sgn = rng.choice([-1.0, 1.0], n)
    t = np.array([fields[i].t for i in idx])
    x2 = np.clip(x1 + sgn * np.sqrt(t) * r, -L, L)
    return idx, x1, x2, t


def holder_ratio_max(fields, beta: float, n: int, seed: int = 0) -> float:
    rng = np.random.default_rng(seed)
    idx, x1, x2, t = sample_pairs(fields, n, rng)
    best = 0.0
    for i in np.unique(idx):
        m = idx == i
        f = fields[i]
        du = np.abs(f(x1[m]) - f(x2[m]))
        scale = (np.abs(x1[m] - x2[m]) / math.sqrt(f.t)) ** beta
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(scale > 0, du / scale, 0.0)
        best = max(best, float(np.max(ratio)))
    return best


def check_holder(sol, beta: float, n_samples: int = 2000, seed: int = 0,
                 stability: float = 0.25, c_max: float | None = None) -> InvariantReport:
    """Fitted constant ``max |u(x1) - u(x2)| / (|x1 - x2| / sqrt t)^beta`` and its stability.

    ``c_max`` (default ten times the oscillation of the first field) bounds
    the constant; a discontinuous profile exceeds it.
    """
    if not 0.0 < beta < 1.0:
        raise ConfigurationError("beta must lie in (0, 1)")
    fields = _fields(sol)
    c1 = holder_ratio_max(fields, beta, n_samples, seed)
    c2 = holder_ratio_max(fields, beta, 2 * n_samples, seed + 1)
    osc = max(float(np.ptp(f.values)) for f in fields)
    limit = 10.0 * max(osc, 1e-300) if c_max is None else c_max
    if c1 == 0.0 and c2 == 0.0:
        stable = True
    else:
        stable = abs(c2 - c1) <= stability * max(c1, c2)
    ok = stable and max(c1, c2) <= limit and math.isfinite(c2)
    return InvariantReport(
        "holder", PASS if ok else FAIL,
        {"c": c1, "c_doubled": c2},
        {"relative_stability": stability, "c_max": limit},
        {"beta": beta, "samples": n_samples, "seed": seed})


# ---------------------------------------------------------------- residual

def residual_times(t: float, dx: float, L: float):
    """Report times ``t - delta, t, t + delta`` with ``delta`` shrinking like ``dx``."""
    delta = t * dx / L
    return (t - delta, t, t + delta)


def pde_residual(sol, c: Coefficient, t: float, margin: float = 0.5) -> float:
    """``sup |u_t - u_xx + h u u_x|`` at time ``t`` by central differences.

    ``sol`` must hold fields at the three :func:`residual_times`; the outer
    ``margin`` of the grid is excluded.
    """
    fields = _fields(sol)
    times = np.array([f.t for f in fields])
    dx = fields[0].dx
    L = fields[0].xs[-1]
    picked = []
    for s in residual_times(t, dx, L):
        i = int(np.argmin(np.abs(times - s)))
        if abs(times[i] - s) > 1e-9 * max(1.0, s):
            raise ConfigurationError(f"no field at t={s}; solve with residual_times as report times")
        picked.append(fields[i])
    um, u0, up = (f.values for f in picked)
    xs = picked[1].xs
    ut = (up - um) / (picked[2].t - picked[0].t)
    ux = (u0[2:] - u0[:-2]) / (2.0 * dx)
    uxx = (u0[2:] - 2.0 * u0[1:-1] + u0[:-2]) / dx ** 2
    r = ut[1:-1] - uxx + h(c, xs[1:-1]) * u0[1:-1] * ux
    inner = np.abs(xs[1:-1]) <= L - margin
    return float(np.max(np.abs(r[inner])))


def check_pde_residual(residuals, min_order: float = 1.5) -> InvariantReport:
    """Residuals at successive grid halvings must decay with observed order ``>= min_order``."""
    res = np.asarray(residuals, dtype=float)
    if res.size < 2:
        raise ConfigurationError("need residuals at two or more resolutions")
    with np.errstate(divide="ignore"):
        orders = np.log2(res[:-1] / res[1:])
    if np.all(res <= 1e-13):
        return InvariantReport("pde_residual", PASS, {"residuals": res.tolist()},
                               {"min_order": min_order}, {"reason": "residual at round-off"})
    ok = bool(np.all(orders >= min_order))
    return InvariantReport("pde_residual", PASS if ok else FAIL,
                           {"residuals": res.tolist(), "orders": orders.tolist()},
                           {"min_order": min_order})


def pde_residual_study(d: InitialData, c: Coefficient, cfg: SolverConfig, t: float,
                       levels: int = 3, min_order: float = 1.5) -> InvariantReport:
    residuals = []
    for _ in range(levels):
        g = cfg.grid
        patch = solve_local(d, 0.0, c, cfg, report_times=residual_times(t, g.dx, g.L))
        residuals.append(pde_residual(patch, c, t))
        cfg = cfg.refined()
    return check_pde_residual(residuals, min_order)


# ---------------------------------------------------------------- dependence

def gronwall_series(t: float, scale: float, n_max: int = 200, rtol: float = 1e-14) -> float:
    """Partial sum of ``scale^n t^(n/2) / (pi^(n/2) n Gamma(n/2))`` for ``n = 1..n_max``.

    Stops early once a term falls below ``rtol`` times the running sum.
    """
    if not t > 0:
        raise ConfigurationError("t must be positive")
    if not scale > 0:
        raise ConfigurationError("scale must be positive")
    log_z = math.log(scale) + 0.5 * math.log(t / math.pi)
    total = 0.0
    for n in range(1, n_max + 1):
        term = math.exp(n * log_z - math.log(n) - math.lgamma(0.5 * n))
        total += term
        # terms eventually decrease monotonically (Gamma growth), so stop there
        if term < rtol * total and n > 2 * math.exp(2 * log_z):
            break
    return total


def gronwall_envelope(t, norm_1: float, norm_2: float, c: Coefficient, T: float):
    """Bound on ``||u1 - u2|| / ||u01 - u02||`` from the weakly singular Gronwall inequality.

    With ``b = (norm_1 + norm_2) / 2 * (sup|h'| sqrt(T) + 1 / sqrt(pi))`` the
    difference obeys ``y(t) <= 1 + b int_0^t y / sqrt(t - tau)``, whose
    solution bound is ``E_{1/2}(b sqrt(pi t)) = 1 + 2 * gronwall_series(t, pi b)``.
    """
    b = 0.5 * (norm_1 + norm_2) * (sup_dh(c) * math.sqrt(T) + 1.0 / SQRT_PI)
    ts = np.atleast_1d(np.asarray(t, dtype=float))
    out = np.array([1.0 + 2.0 * gronwall_series(s, math.pi * b) for s in ts])
    return out if np.ndim(t) else float(out[0])


def midpoint_data(d1: InitialData, d2: InitialData) -> InitialData:
    """Data halfway between two piecewise-constant data with equal breakpoints."""
    if not (isinstance(d1, PiecewiseConstant) and isinstance(d2, PiecewiseConstant)):
        raise ConfigurationError("gap halving needs piecewise-constant data")
    if d1.breakpoints != d2.breakpoints:
        raise ConfigurationError("gap halving needs equal breakpoints")
    vals = 0.5 * (np.asarray(d1.values) + np.asarray(d2.values))
    if isinstance(d1, Step):
        return Step(*vals)
    return PiecewiseConstant(d1.breakpoints, vals)


def data_gap(d1: InitialData, d2: InitialData) -> float:
    if isinstance(d1, PiecewiseConstant) and isinstance(d2, PiecewiseConstant) \
            and d1.breakpoints == d2.breakpoints:
        return float(np.max(np.abs(np.asarray(d1.values) - np.asarray(d2.values))))
    raise ConfigurationError("data gap is computed exactly only for matching piecewise-constant data")


def response_ratio(d1, d2, T, c, cfg, report_times):
    gap = data_gap(d1, d2)
    if gap == 0.0:
        return None
    s1 = all_fields(solve_global(d1, T, c, cfg, report_times=report_times))
    s2 = all_fields(solve_global(d2, T, c, cfg, report_times=report_times))
    t1 = {round(f.t / T, 9): f for f in s1}
    out = []
    for g in s2:
        f = t1.get(round(g.t / T, 9))
        if f is not None and any(abs(g.t - r) <= 1e-9 * T for r in report_times):
            out.append((g.t, float(np.max(np.abs(f.values - g.values))) / gap))
    return np.array(out)


def continuous_dependence(d1: InitialData, d2: InitialData, T: float, c: Coefficient,
                          cfg: SolverConfig, n_report: int = 24,
                          stability: float = 0.10) -> InvariantReport:
    """Response ratio ``R(t) = ||u1 - u2|| / ||u01 - u02||`` and its linearity in the gap.

    Passes iff ``R`` is bounded by the Gronwall envelope and changes by at
    most ``stability`` (relative) when the gap is halved.
    """
    if data_gap(d1, d2) == 0.0:
        return InvariantReport("continuous_dependence", NOT_APPLICABLE, {}, {},
                               {"reason": "identical data"})
    report = tuple(np.geomspace(T * 1e-2, T, n_report))
    full = response_ratio(d1, d2, T, c, cfg, report)
    half = response_ratio(d1, midpoint_data(d1, d2), T, c, cfg, report)
    times = full[:, 0]
    r_full, r_half = full[:, 1], half[:, 1]
    env = gronwall_envelope(times, d1.sup_norm, d2.sup_norm, c, T)
    rel = np.abs(r_half / r_full - 1.0)
    bounded = bool(np.all(np.maximum.accumulate(r_full) <= env))
    stable = float(np.max(rel)) <= stability
    return InvariantReport(
        "continuous_dependence", PASS if bounded and stable else FAIL,
        {"max_R": float(np.max(r_full)), "max_R_half_gap": float(np.max(r_half)),
         "max_relative_change": float(np.max(rel))},
        {"envelope_at_T": float(env[-1]), "stability": stability},
        {"times": times.tolist(), "R": r_full.tolist(), "R_half": r_half.tolist(),
         "envelope": env.tolist(), "fitted_C": float(np.max(r_full))})
