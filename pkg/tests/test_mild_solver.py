import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from genburgers.coeff import Coefficient, grid_sup_dh
from genburgers.errors import (CertificationError, ConfigurationError, ConvergenceError,
                               PreconditionError, SolverError)
from genburgers.field import Field
from genburgers.initial_data import Step, constant, tanh_profile
from genburgers.mild_solver import (DuhamelOperator, SolverConfig, apply_M, certified_step,
                                    duhamel_time_weights, integral_residual, slice_times,
                                    solve_global, solve_local)

from conftest import T_STAR_ALPHA1


# ---------------------------------------------------------------- certified step

def test_certified_step_alpha1(alpha1):
    assert certified_step(1.0, alpha1) == pytest.approx(T_STAR_ALPHA1, rel=1e-14)


def test_certified_step_from_grid_searched_sup(alpha1):
    a = grid_sup_dh(alpha1) / 2 + 1 / math.sqrt(math.pi)
    assert certified_step(1.0, alpha1) == pytest.approx(min(1.0, (4 * a) ** -2, (8 * a) ** -2), rel=1e-9)


@given(st.floats(0.0, 50.0), st.floats(0.1, 5.0))
def test_certified_step_in_unit_interval(norm, alpha):
    t = certified_step(norm, Coefficient(alpha))
    assert 0.0 < t <= 1.0


def test_certified_step_nonincreasing(alpha1):
    steps = [certified_step(n, alpha1) for n in np.linspace(0, 10, 41)]
    assert all(b <= a for a, b in zip(steps, steps[1:]))


def test_certified_step_rejects_negative_norm(alpha1):
    with pytest.raises(ConfigurationError):
        certified_step(-0.1, alpha1)


# ---------------------------------------------------------------- time weights

@settings(max_examples=30)
@given(st.integers(6, 30), st.floats(1e-4, 1e-1), st.integers(0, 3))
def test_time_weights_exact_for_cubics(m, t_min, degree):
    tau = np.concatenate([[0.0], np.geomspace(t_min, 1.0, m)])
    W = duhamel_time_weights(tau, sqrt_start=False)
    f = tau ** degree
    exact = tau ** (degree + 1) / (degree + 1)
    # the first interval uses the trapezoid rule, exact only up to degree 1
    err_first = 0.0 if degree <= 1 else tau[1] ** (degree + 1)
    np.testing.assert_allclose(W @ f, exact, atol=err_first + 1e-12)


def test_time_weights_sqrt_start_exact():
    tau = np.concatenate([[0.0], np.geomspace(1e-3, 1.0, 20)])
    W = duhamel_time_weights(tau, sqrt_start=True)
    f = 2.0 + 3.0 * np.sqrt(tau)
    exact = 2.0 * tau + 2.0 * tau ** 1.5
    # beyond the first interval the cubic rule approximates sqrt
    assert abs((W @ f)[1] - exact[1]) < 1e-15
    np.testing.assert_allclose(W @ f, exact, rtol=1e-3)


def test_slice_times_contain_report_times():
    cfg = SolverConfig()
    ts = slice_times(0.5, 0.02, cfg, report_times=[0.51, 0.6, 0.4])
    assert ts[-1] == pytest.approx(0.52)
    assert np.any(np.isclose(ts, 0.51, rtol=0, atol=1e-15))
    assert np.all(np.diff(ts) > 0) and ts[0] > 0.5


# ---------------------------------------------------------------- the map M

def _fields_like(op, values):
    return [Field(t, op.xs, v, op.left, op.right) for t, v in zip(op.times, values)]


def test_M_fixes_constants(alpha1, coarse_cfg):
    d = constant(0.7)
    times = slice_times(0.0, certified_step(0.7, alpha1), coarse_cfg)
    op = DuhamelOperator(d, alpha1, coarse_cfg, 0.0, times)
    v = np.full((len(times), coarse_cfg.nx), 0.7)
    out = apply_M(_fields_like(op, v), d, alpha1, coarse_cfg)
    assert max(np.max(np.abs(f.values - 0.7)) for f in out) <= 1e-12


def test_M_of_zero_is_heat_term(alpha1, step_data, coarse_cfg):
    # v = 0 inside the grid; far-field levels still enter through the data
    times = slice_times(0.0, T_STAR_ALPHA1, coarse_cfg)
    op = DuhamelOperator(step_data, alpha1, coarse_cfg, 0.0, times)
    xs = op.xs
    zero = np.zeros((len(times), len(xs)))
    zero_fields = [Field(t, xs, z, 0.0, 0.0) for t, z in zip(times, zero)]
    d0 = constant(0.0)
    out = apply_M(zero_fields, d0, alpha1, coarse_cfg)
    assert max(np.max(np.abs(f.values)) for f in out) == 0.0
    # for step data the heat term equals erf
    np.testing.assert_allclose(op.heat[-1], step_data.heat(xs, times[-1]), atol=1e-15)


def test_M_preserves_oddness(alpha1, coarse_cfg):
    d = Step(-0.8, 0.8)
    times = slice_times(0.0, certified_step(0.8, alpha1), coarse_cfg)
    op = DuhamelOperator(d, alpha1, coarse_cfg, 0.0, times)
    rng = np.random.default_rng(1)
    bumps = rng.uniform(-0.2, 0.2, (len(times), 1)) * np.exp(-op.xs ** 2 / 0.01)
    v = np.tanh(op.xs / 0.05)[None, :] * 0.8 + bumps * op.xs
    v = 0.5 * (v - v[:, ::-1])  # exactly odd
    out = op.apply(v)
    np.testing.assert_allclose(out, -out[:, ::-1], atol=1e-8)


def test_M_rejects_inputs_outside_admissible_set(alpha1, step_data, coarse_cfg):
    times = slice_times(0.0, T_STAR_ALPHA1, coarse_cfg)
    xs = coarse_cfg.grid.xs
    big = [Field(t, xs, np.full_like(xs, 2.5), -1, 1) for t in times]
    with pytest.raises(PreconditionError):
        apply_M(big, step_data, alpha1, coarse_cfg)


# ---------------------------------------------------------------- local solve

def test_constant_data_one_iteration(alpha1, coarse_cfg):
    patch = solve_local(constant(0.7), 0.0, alpha1, coarse_cfg)
    assert patch.iterations == 1
    assert max(np.max(np.abs(f.values - 0.7)) for f in patch.fields) <= 1e-12
    assert integral_residual(patch, constant(0.7), alpha1, coarse_cfg) <= 1e-12


def test_step_contraction_certificate(step_patch):
    hist = step_patch.residual_history
    assert step_patch.iterations <= 40
    for a, b in zip(hist, hist[1:]):
        assert b <= 0.55 * a + 1e-8
    assert hist[-1] <= 1e-8


def test_step_patch_metadata(step_patch):
    assert step_patch.t_star == pytest.approx(T_STAR_ALPHA1)
    assert step_patch.bound == 2.0
    assert step_patch.times[-1] == pytest.approx(T_STAR_ALPHA1)
    assert step_patch.times[0] == pytest.approx(1e-3 * T_STAR_ALPHA1)
    assert max(f.sup_norm() for f in step_patch.fields) <= step_patch.bound


def test_step_solution_is_odd(step_patch):
    for f in step_patch.fields:
        np.testing.assert_allclose(f.values, -f.values[::-1], atol=1e-10)
        assert abs(f(0.0)) <= 1e-6


def test_step_integral_residual(step_patch, alpha1, step_data, desk_cfg):
    assert integral_residual(step_patch, step_data, alpha1, desk_cfg) <= 2e-8


def test_residual_detects_perturbation(step_patch, alpha1, step_data, desk_cfg):
    delta = 1e-3
    fields = list(step_patch.fields)
    k = len(fields) // 2
    fields[k] = fields[k].with_values(fields[k].values + delta)
    perturbed = type(step_patch)(step_patch.t0, step_patch.t_star, fields, step_patch.iterations,
                                 step_patch.residual_history, step_patch.bound)
    assert integral_residual(perturbed, step_data, alpha1, desk_cfg) >= delta / 2


def test_convergence_error_carries_history(alpha1, step_data, coarse_cfg):
    from dataclasses import replace
    cfg = replace(coarse_cfg, max_iterations=2)
    with pytest.raises(ConvergenceError) as info:
        solve_local(step_data, 0.0, alpha1, cfg)
    assert len(info.value.residual_history) == 2


def test_certification_error_on_broken_contraction(alpha1, step_data, coarse_cfg, monkeypatch):
    original = DuhamelOperator.apply
    calls = {"n": 0}

    def sloppy(self, values):
        calls["n"] += 1
        out = original(self, values)
        # a map that stops contracting after the first step
        return out + (1e-3 * calls["n"] if calls["n"] > 1 else 0.0)

    monkeypatch.setattr(DuhamelOperator, "apply", sloppy)
    with pytest.raises(CertificationError):
        solve_local(step_data, 0.0, alpha1, coarse_cfg)


def test_solver_config_validation():
    for bad in ({"L": 0}, {"nx": 32}, {"picard_tol": 0}, {"t_min_report": -1.0}):
        with pytest.raises(ConfigurationError):
            SolverConfig(**bad)


def test_smooth_data_solves(alpha1, coarse_cfg):
    d = tanh_profile(-1.0, 1.0, 0.1)
    patch = solve_local(d, 0.0, alpha1, coarse_cfg)
    assert patch.residual_history[-1] <= 1e-8
    # no blow-up of derivatives for smooth data
    dx = coarse_cfg.grid.dx
    ux = [np.max(np.abs(np.diff(f.values))) / dx for f in patch.fields]
    assert max(ux) <= 1.01 / 0.1


# ---------------------------------------------------------------- global solve

def test_constant_global_patch_count(alpha1, coarse_cfg):
    d = constant(0.4)
    T = 2.5 * certified_step(0.4, alpha1)
    patches = solve_global(d, T, alpha1, coarse_cfg)
    assert len(patches) == 3
    assert patches[-1].t_end == pytest.approx(T)
    assert all(np.allclose(f.values, 0.4, atol=1e-12) for p in patches for f in p.fields)


def test_step_three_patches_join_continuously(alpha1, step_data, coarse_cfg):
    patches = solve_global(step_data, 3 * T_STAR_ALPHA1, alpha1, coarse_cfg)
    assert len(patches) == 3
    for a, b in zip(patches, patches[1:]):
        assert b.t0 == pytest.approx(a.t_end)
        assert b.t_star == pytest.approx(a.t_star)
        # the first slice of the next patch sits delta after the join; u_t is bounded there
        end, start = a.fields[-1], b.fields[0]
        delta = start.t - end.t
        ut = np.max(np.abs(a.fields[-1].values - a.fields[-2].values)) / (a.fields[-1].t - a.fields[-2].t)
        assert np.max(np.abs(start.values - end.values)) <= 2 * ut * delta + coarse_cfg.picard_tol
    top = max(np.max(np.abs(f.values)) for p in patches for f in p.fields)
    assert top <= 1.0 + 1e-4


def test_global_failure_reports_patch_index(alpha1, step_data, coarse_cfg, monkeypatch):
    import genburgers.mild_solver as ms

    original = ms.solve_local

    def fail_second(d, t0, *args, **kwargs):
        if t0 > 0:
            raise ConvergenceError("forced", [1.0])
        return original(d, t0, *args, **kwargs)

    monkeypatch.setattr(ms, "solve_local", fail_second)
    with pytest.raises(SolverError) as info:
        ms.solve_global(step_data, 2 * T_STAR_ALPHA1, alpha1, coarse_cfg)
    assert info.value.patch_index == 1
    assert str(info.value).startswith("patch 1")
