"""Unit tests for quad module (Gauss-Kronrod, tanh-sinh, tails, cumulative rule)."""

from __future__ import annotations

import math

import numpy as np
import pytest
from scipy import special

from config import NonConvergence, NonFiniteIntegrand, QuadConfig
from quad import (
    CumulativeRule,
    QuadResult,
    gauss_kronrod_panel,
    integrate_adaptive,
    integrate_decaying_tail,
    integrate_oscillatory_decaying,
    integrate_panels,
    integrate_tanh_sinh,
)


@pytest.fixture
def cfg():
    return QuadConfig()


# --- Gauss-Kronrod ---


def test_kronrod_panel_exact_for_polynomials():
    value, err = gauss_kronrod_panel(lambda x: x ** 10 - 3 * x ** 3, 0.0, 2.0)
    assert value.real == pytest.approx(2 ** 11 / 11 - 3 * 2 ** 4 / 4, rel=1e-14)
    assert err < 1e-10


def test_adaptive_sine(cfg):
    r = integrate_adaptive(math.sin, 0.0, math.pi, cfg)
    assert r.converged
    assert r.real == pytest.approx(2.0, abs=1e-12)
    assert r.abs_error_estimate <= 1e-9


def test_adaptive_complex_integrand(cfg):
    r = integrate_adaptive(lambda x: complex(math.cos(x), math.sin(x)), 0.0, 0.5 * math.pi, cfg)
    assert r.value == pytest.approx(1.0 + 1.0j, abs=1e-12)


def test_adaptive_conjugate_symmetry(cfg):
    def f(x):
        return complex(math.cos(3 * x), math.sin(x * x))

    r = integrate_adaptive(f, -1.0, 2.0, cfg)
    rc = integrate_adaptive(lambda x: f(x).conjugate(), -1.0, 2.0, cfg)
    assert rc.value == r.value.conjugate()


def test_adaptive_fast_oscillation(cfg):
    r = integrate_adaptive(lambda x: math.cos(x * x), 0.0, 30.0, cfg)
    assert r.converged
    # int_0^30 cos(x^2) = sqrt(pi/8) - int_30^inf cos(x^2); the tail is -sin(900)/60 to leading order
    assert r.real == pytest.approx(math.sqrt(math.pi / 8) + math.sin(900.0) / 60.0, abs=5e-5)


def test_adaptive_rejects_empty_interval(cfg):
    with pytest.raises(ValueError):
        integrate_adaptive(math.sin, 1.0, 1.0, cfg)


def test_adaptive_nan_integrand_raises(cfg):
    with pytest.raises(NonFiniteIntegrand):
        integrate_adaptive(lambda x: float("nan"), 0.0, 1.0, cfg)


def test_adaptive_budget_exhaustion_is_soft():
    tight = QuadConfig(rel_tol=1e-15, abs_tol=0.0, max_subdivisions=3)
    r = integrate_adaptive(lambda x: math.sqrt(x), 0.0, 1.0, tight)
    assert not r.converged
    assert r.real == pytest.approx(2.0 / 3.0, abs=1e-3)
    with pytest.raises(NonConvergence):
        r.require()


def test_panels_sum_matches_single_interval(cfg):
    whole = integrate_adaptive(math.exp, 0.0, 3.0, cfg)
    split = integrate_panels(math.exp, [0.0, 1.0, 2.0, 3.0], cfg)
    assert split.real == pytest.approx(whole.real, rel=1e-13)
    assert split.real == pytest.approx(math.e ** 3 - 1.0, rel=1e-12)


# --- properties ---


def _slack(result: QuadResult) -> float:
    return result.abs_error_estimate + 1e-15 * abs(result.value)


def test_adaptive_is_linear(cfg):
    def f(x):
        return math.exp(x)

    def g(x):
        return math.cos(5.0 * x)

    rf = integrate_adaptive(f, 0.0, 2.0, cfg)
    rg = integrate_adaptive(g, 0.0, 2.0, cfg)
    combined = integrate_adaptive(lambda x: 2.0 * f(x) - 3.0 * g(x), 0.0, 2.0, cfg)
    bound = _slack(combined) + 2.0 * _slack(rf) + 3.0 * _slack(rg)
    assert abs(combined.value - (2.0 * rf.value - 3.0 * rg.value)) <= bound


def test_adaptive_is_additive_over_intervals(cfg):
    def f(x):
        return math.sin(x * x) + x

    whole = integrate_adaptive(f, 0.0, 3.0, cfg)
    left = integrate_adaptive(f, 0.0, 1.3, cfg)
    right = integrate_adaptive(f, 1.3, 3.0, cfg)
    assert abs(whole.value - (left.value + right.value)) <= _slack(whole) + _slack(left) + _slack(right)


def _fresnel_cos_at_3() -> float:
    scale = math.sqrt(math.pi / 2.0)
    _, c = special.fresnel(3.0 / scale)
    return scale * c


@pytest.mark.parametrize(
    "label, run, exact",
    [
        ("x^20", lambda cfg: integrate_adaptive(lambda x: x ** 20, 0.0, 1.0, cfg), 1.0 / 21.0),
        ("sqrt", lambda cfg: integrate_adaptive(math.sqrt, 0.0, 1.0, cfg), 2.0 / 3.0),
        ("sin", lambda cfg: integrate_adaptive(math.sin, 0.0, math.pi, cfg), 2.0),
        ("cos x^2", lambda cfg: integrate_adaptive(lambda x: math.cos(x * x), 0.0, 3.0, cfg), None),
        ("1/sqrt", lambda cfg: integrate_tanh_sinh(lambda x: 1.0 / math.sqrt(x), 0.0, 1.0, cfg), 2.0),
        ("log", lambda cfg: integrate_tanh_sinh(math.log, 0.0, 1.0, cfg), -1.0),
        ("lorentz tail", lambda cfg: integrate_decaying_tail(lambda x: 1.0 / (1.0 + x * x), 1.0, cfg),
         math.pi / 4.0),
    ],
)
def test_error_estimates_are_honest(cfg, label, run, exact):
    if exact is None:
        exact = _fresnel_cos_at_3()
    r = run(cfg)
    true_error = abs(r.value - exact)
    assert true_error <= 10.0 * r.abs_error_estimate + 4.0 * math.ulp(abs(exact)), label


# --- tanh-sinh ---


def test_tanh_sinh_inverse_sqrt(cfg):
    r = integrate_tanh_sinh(lambda x: 1.0 / math.sqrt(x), 0.0, 1.0, cfg)
    assert r.converged
    assert r.real == pytest.approx(2.0, abs=1e-12)


def test_tanh_sinh_log_singularity(cfg):
    r = integrate_tanh_sinh(math.log, 0.0, 1.0, cfg)
    assert r.real == pytest.approx(-1.0, abs=1e-12)


def test_tanh_sinh_both_endpoints_singular(cfg):
    r = integrate_tanh_sinh(lambda x: 1.0 / math.sqrt((1.0 - x) * (1.0 + x)), -1.0, 1.0, cfg)
    # nodes that round onto +-1 are dropped, which caps accuracy near 1e-8
    assert r.real == pytest.approx(math.pi, abs=1e-7)


def test_tanh_sinh_never_touches_endpoints(cfg):
    seen = []

    def f(x):
        seen.append(x)
        return 1.0 / math.sqrt(x * (1.0 - x))

    integrate_tanh_sinh(f, 0.0, 1.0, cfg)
    assert all(0.0 < x < 1.0 for x in seen)


def test_tanh_sinh_smooth_integrand(cfg):
    r = integrate_tanh_sinh(math.cos, 0.0, 1.0, cfg)
    assert r.real == pytest.approx(math.sin(1.0), abs=1e-13)


# --- tails ---


def test_decaying_tail_power_law(cfg):
    r = integrate_decaying_tail(lambda x: 1.0 / (1.0 + x * x), 1.0, cfg)
    assert r.real == pytest.approx(math.pi / 4.0, abs=1e-9)


def test_decaying_tail_exponential(cfg):
    r = integrate_decaying_tail(lambda x: math.exp(-x), 0.0, cfg)
    assert r.converged
    assert r.real == pytest.approx(1.0, abs=1e-11)


def test_decaying_tail_singular_start(cfg):
    r = integrate_decaying_tail(lambda x: math.exp(-x) / math.sqrt(x), 0.0, cfg, singular_start=True)
    assert r.real == pytest.approx(math.sqrt(math.pi), abs=1e-9)


def test_oscillatory_decaying_laplace_pair(cfg):
    # int_0^inf e^{-u} e^{i w u} du = 1 / (1 - i w)
    w = 3.0
    r = integrate_oscillatory_decaying(lambda u: math.exp(-u), w, cfg)
    assert r.converged
    assert r.value == pytest.approx(1.0 / (1.0 - 1j * w), abs=1e-11)


def test_oscillatory_decaying_zero_frequency_is_plain_tail(cfg):
    r = integrate_oscillatory_decaying(lambda u: math.exp(-2.0 * u), 0.0, cfg)
    assert r.real == pytest.approx(0.5, abs=1e-11)


def test_oscillatory_decaying_offset_start(cfg):
    w = -0.25
    r = integrate_oscillatory_decaying(lambda u: math.exp(-2.0 * u), w, cfg, a=1.0)
    expected = -np.exp((-2.0 + 1j * w) * 1.0) / (-2.0 + 1j * w)
    assert r.value == pytest.approx(expected, abs=1e-11)


# --- QuadResult ---


def test_quad_result_addition_combines_flags():
    a = QuadResult(1.0, 1e-3, 10)
    b = QuadResult(2.0j, 2e-3, 5, converged=False)
    c = a + b
    assert c.value == 1.0 + 2.0j
    assert c.abs_error_estimate == pytest.approx(3e-3)
    assert c.n_evals == 15
    assert not c.converged


def test_quad_result_scaled():
    r = QuadResult(2.0, 1e-3, 4).scaled(-1j)
    assert r.value == -2.0j
    assert r.abs_error_estimate == pytest.approx(1e-3)


# --- CumulativeRule ---


def test_cumulative_rule_integral_and_running_values():
    rule = CumulativeRule(np.linspace(0.0, 2.0, 5))
    values = np.cos(rule.nodes)
    assert rule.integral(values).real == pytest.approx(math.sin(2.0), abs=1e-14)
    running = rule.cumulative(values)
    np.testing.assert_allclose(running, np.sin(rule.nodes), atol=1e-13)


def test_cumulative_rule_nested_ordered_integral():
    # int_0^1 int_0^x1 dx2 dx1 = 1/2; nesting running integrals gives x^2/2 at the nodes
    rule = CumulativeRule([0.0, 0.5, 1.0], order=8)
    first = rule.cumulative(np.ones_like(rule.nodes))
    assert rule.integral(first).real == pytest.approx(0.5, abs=1e-14)
    np.testing.assert_allclose(rule.cumulative(first), rule.nodes ** 2 / 2.0, atol=1e-14)


def test_cumulative_rule_rejects_bad_edges():
    with pytest.raises(ValueError):
        CumulativeRule([0.0, 0.0, 1.0])
    with pytest.raises(ValueError):
        CumulativeRule([1.0])
