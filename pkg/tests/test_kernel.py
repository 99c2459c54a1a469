import math

import mpmath as mp
import numpy as np
import pytest
from scipy.optimize import brentq
from hypothesis import given, settings
from hypothesis import strategies as st

from genburgers.errors import DomainError
from genburgers.kernel import (DEFAULT_QUAD, HOLDER_BOUNDS, KernelPoint, QuadratureSpec, eval_G,
                               eval_Gs, eval_Gss, fit_holder_constants, holder_lhs, holder_ratios,
                               identity_checks, integral_absGs, integral_G,
                               integral_Gss_signed_and_abs)

DTS = [1e-4, 1e-2, 1.0, 1e2]
# int |G_ss| ds * dt = sqrt(2 / (pi e)), from the two inflection points of the Gaussian
ABS_GSS_TIMES_DT = 0.48394144903828669960


@pytest.mark.parametrize("dt", DTS)
def test_integral_identities(dt):
    assert abs(integral_G(dt) - 1.0) <= 1e-10
    assert abs(integral_absGs(dt) * math.sqrt(math.pi * dt) - 1.0) <= 1e-7
    signed, absolute = integral_Gss_signed_and_abs(dt)
    assert abs(signed) <= 1e-8
    assert absolute * dt == pytest.approx(ABS_GSS_TIMES_DT, rel=1e-10)


def test_abs_gs_against_adaptive_quadrature():
    dt = 0.37
    mp.mp.dps = 30
    ref = mp.quad(lambda s: abs((0 - s) / (2 * dt)) * mp.exp(-s * s / (4 * dt))
                  / mp.sqrt(4 * mp.pi * dt), [-mp.inf, 0, mp.inf])
    assert integral_absGs(dt) == pytest.approx(float(ref), rel=1e-12)


def test_identity_table_all_pass_by_default():
    rows = identity_checks()
    assert len(rows) == 12
    assert all(r[-1] for r in rows)


def test_underresolved_rule_fails_identity_table():
    q = QuadratureSpec(hermite_order=4, allow_underresolved=True)
    rows = identity_checks(q=q)
    assert not all(r[-1] for r in rows)
    assert {r[0] for r in rows if not r[-1]} == {"integral_absGs"}


def test_hermite_order_floor():
    with pytest.raises(DomainError):
        QuadratureSpec(hermite_order=4)
    with pytest.raises(DomainError):
        QuadratureSpec(tail_epsilon=0.1)


@pytest.mark.parametrize("func", [eval_G, eval_Gs, eval_Gss])
def test_kernel_requires_t_after_tau(func):
    with pytest.raises(DomainError):
        func(0.0, 1.0, 0.0, 1.0)
    with pytest.raises(DomainError):
        func(0.0, 1.0, float("nan"), 0.0)


def test_kernel_point_validation():
    with pytest.raises(DomainError):
        KernelPoint(0.0, 0.5, 0.0, 1.0)
    p = KernelPoint(0.3, 1.0, -0.2, 0.25)
    assert eval_G(p) == pytest.approx(eval_G(0.3, 1.0, -0.2, 0.25))


@given(st.floats(-5, 5), st.floats(-5, 5), st.floats(1e-3, 10))
def test_kernel_symmetries(x, s, dt):
    g = eval_G(x, dt, s, 0.0)
    assert g >= 0
    assert eval_G(s, dt, x, 0.0) == pytest.approx(g, rel=1e-12, abs=1e-300)
    # G_s is odd under exchanging x and s
    assert eval_Gs(s, dt, x, 0.0) == pytest.approx(-eval_Gs(x, dt, s, 0.0), rel=1e-12, abs=1e-300)


@settings(max_examples=30)
@given(st.floats(-2, 2), st.floats(-2, 2), st.floats(0.05, 3))
def test_derivatives_match_finite_differences(x, s, dt):
    eps = 1e-5
    fd1 = (eval_G(x, dt, s + eps, 0.0) - eval_G(x, dt, s - eps, 0.0)) / (2 * eps)
    fd2 = (eval_Gs(x, dt, s + eps, 0.0) - eval_Gs(x, dt, s - eps, 0.0)) / (2 * eps)
    assert eval_Gs(x, dt, s, 0.0) == pytest.approx(fd1, abs=1e-6)
    assert eval_Gss(x, dt, s, 0.0) == pytest.approx(fd2, abs=1e-5)


def test_holder_lhs_against_adaptive_quadrature():
    x1, x2, t = 0.1, 0.25, 0.4
    mp.mp.dps = 20

    def f(x, s):
        return (x - s) / (2 * t) * mp.exp(-(x - s) ** 2 / (4 * t)) / mp.sqrt(4 * mp.pi * t)

    def diff(s):
        return float(f(x1, s) - f(x2, s))

    # kinks of |f1 - f2| located by bracketing sign changes
    grid = np.linspace(-6, 6, 2401)
    vals = np.array([diff(s) for s in grid])
    kinks = [brentq(diff, a, b, xtol=1e-15)
             for a, b, va, vb in zip(grid, grid[1:], vals, vals[1:]) if va * vb < 0]
    ref = float(mp.quad(lambda s: abs(f(x1, s) - f(x2, s)), [-mp.inf, *kinks, mp.inf]))
    assert holder_lhs("Gs_space", x1, x2, t, t, 0.0)[0] == pytest.approx(ref, rel=1e-4)
    fine = QuadratureSpec(panel_count=2000)
    assert holder_lhs("Gs_space", x1, x2, t, t, 0.0, fine)[0] == pytest.approx(ref, rel=1e-6)


def test_holder_ratio_zero_for_equal_points():
    for kind in ("G_space", "Gs_space", "Gss_space"):
        assert holder_ratios(kind, 0.5, 0.3, 0.3, 1.0, 1.0, 0.0)[0] == 0.0


def test_holder_fit_reproducible_and_finite():
    a = fit_holder_constants(0.5, 100, seed=3)
    b = fit_holder_constants(0.5, 100, seed=3)
    assert a == b
    assert set(a) == set(HOLDER_BOUNDS)
    assert all(np.isfinite(v) and v > 0 for v in a.values())


def test_holder_fit_rejects_bad_beta():
    with pytest.raises(DomainError):
        fit_holder_constants(1.0, 10)
