"""Unit tests for specfun module (Fresnel, complex arctan, U/V/P/Q, contour segments)."""

from __future__ import annotations

import cmath
import math

import pytest
from scipy import special

from config import DomainTooSmall, PoleError, QuadConfig
from specfun import (
    FRESNEL_LIMIT,
    SQRT_I,
    ContourParams,
    P,
    Q,
    U,
    V,
    arctan_principal,
    arctan_right_of_cut,
    contour_convergence,
    contour_limits,
    contour_segments,
    expm1_over,
    fresnel,
    fresnel_remainder,
    pq_partial,
    remainder_square,
)
from quad import integrate_tanh_sinh

SCALE = math.sqrt(math.pi / 2.0)


@pytest.fixture
def cfg():
    return QuadConfig()


def scipy_fresnel(x: float) -> tuple[float, float]:
    # scipy uses int_0^z cos(pi t^2 / 2); rescale to int_0^x cos(y^2)
    s, c = special.fresnel(x / SCALE)
    return SCALE * c, SCALE * s


# --- Fresnel ---


@pytest.mark.parametrize("x", [0.1, 0.7, 1.5, 2.0, 2.5, 3.3, 5.0, 6.5, 12.0, 40.0])
def test_fresnel_matches_scipy(x):
    pair = fresnel(x)
    c, s = scipy_fresnel(x)
    assert pair.c == pytest.approx(c, abs=1e-12)
    assert pair.s == pytest.approx(s, abs=1e-12)


def test_fresnel_zero_and_oddness():
    assert fresnel(0.0).c == 0.0 and fresnel(0.0).s == 0.0
    for x in (0.3, 2.7, 9.0):
        plus, minus = fresnel(x), fresnel(-x)
        assert minus.c == -plus.c and minus.s == -plus.s


def test_fresnel_limits_at_infinity():
    assert fresnel(math.inf).c == FRESNEL_LIMIT
    assert fresnel(-math.inf).s == -FRESNEL_LIMIT
    assert fresnel(1e4).c == pytest.approx(FRESNEL_LIMIT, abs=1e-4)


def test_fresnel_continuous_across_series_switch():
    below, above = fresnel(2.0), fresnel(2.0 + 1e-12)
    assert above.c == pytest.approx(below.c, abs=1e-11)
    assert above.s == pytest.approx(below.s, abs=1e-11)


def test_fresnel_nan_rejected():
    with pytest.raises(ValueError):
        fresnel(float("nan"))


def test_remainder_leading_term():
    x = 40.0
    tail = fresnel_remainder(x)
    assert tail.c == pytest.approx(-math.sin(x * x) / (2 * x), abs=1e-5)
    assert tail.s == pytest.approx(math.cos(x * x) / (2 * x), abs=1e-5)


def test_remainder_consistent_with_fresnel():
    for x in (4.0, 5.5, 8.0):
        tail, head = fresnel_remainder(x), fresnel(x)
        assert head.c + tail.c == pytest.approx(FRESNEL_LIMIT, abs=1e-13)
        assert head.s + tail.s == pytest.approx(FRESNEL_LIMIT, abs=1e-13)


def test_remainder_domain():
    with pytest.raises(DomainTooSmall):
        fresnel_remainder(3.9)


def test_remainder_square_close_to_one_over_8x2():
    x = 40.0
    assert remainder_square(x) == pytest.approx(1.0 / (8.0 * x * x), rel=1e-3)


# --- arctan ---


def test_arctan_real_axis_matches_math():
    for x in (-5.0, -0.3, 0.0, 0.7, 100.0):
        assert arctan_principal(x) == pytest.approx(math.atan(x), abs=1e-15)


def test_arctan_imaginary_axis_inside_unit_interval():
    # arctan(iy) = i artanh(y) for |y| < 1
    assert arctan_principal(0.5j) == pytest.approx(1j * math.atanh(0.5), abs=1e-15)


def test_arctan_poles_raise():
    with pytest.raises(PoleError):
        arctan_principal(1j)
    with pytest.raises(PoleError):
        arctan_principal(-1j)


def test_arctan_conjugate_symmetry_off_cuts():
    for z in (0.3 + 0.4j, 2.0 - 1.5j, -0.7 + 3.0j):
        assert arctan_principal(z.conjugate()) == pytest.approx(arctan_principal(z).conjugate(), abs=1e-14)


def test_arctan_is_odd_off_the_cuts():
    for z in (0.3 + 0.4j, 2.0 - 1.5j, -0.7 + 3.0j, 0.5j, 4.0):
        assert arctan_principal(-z) == pytest.approx(-arctan_principal(z), abs=1e-14)


@pytest.mark.parametrize("phi", [math.pi / 4, math.pi / 2, 3 * math.pi / 4])
def test_arctan_real_part_near_the_pole_tracks_approach_angle(phi):
    z = 1j - 1j * 1e-6 * cmath.exp(1j * phi)
    assert arctan_principal(z).real == pytest.approx(phi / 2.0, abs=1e-4)


def test_arctan_right_side_of_upper_cut():
    y = 2.0
    expected = complex(0.5 * math.pi, math.atanh(1.0 / y))
    assert arctan_right_of_cut(y) == expected
    assert arctan_principal(complex(1e-12, y)) == pytest.approx(expected, abs=1e-9)


def test_arctan_is_inverse_of_tan():
    z = 0.4 + 0.2j
    assert cmath.tan(arctan_principal(z)) == pytest.approx(z, abs=1e-14)


# --- U, V, P, Q ---


def test_u_and_v_at_zero(cfg):
    assert U(0.0, cfg).value == pytest.approx(math.pi / math.sqrt(2.0), abs=1e-9)
    assert V(0.0, cfg).value == pytest.approx(math.pi / math.sqrt(2.0), abs=1e-9)


def test_u_grows_with_t(cfg):
    assert U(-1.0, cfg).value < U(0.0, cfg).value < U(1.0, cfg).value


@pytest.mark.parametrize("t", [-3.0, -1.0, 1.0, 3.0])
def test_u_is_reflected_v(cfg, t):
    # x -> 1/x maps the U integrand onto the V integrand at -t
    expected = math.exp(math.pi * t / 8.0) * V(-t, cfg).value
    assert U(t, cfg).value == pytest.approx(expected, rel=1e-9)


def test_v_positive_and_increasing_in_t(cfg):
    values = [V(t, cfg).value for t in (-4.0, -2.0, -0.5, 0.0, 0.5, 2.0, 4.0)]
    assert all(v > 0 for v in values)
    assert all(lo < hi for lo, hi in zip(values, values[1:]))


def test_p_and_q_at_zero_against_direct_y_integrals(cfg):
    direct_p = integrate_tanh_sinh(lambda y: (math.sqrt(y) - 1.0) / (1.0 - y * y), 0.0, 1.0, cfg)
    direct_q = integrate_tanh_sinh(
        lambda y: (1.0 / math.sqrt(y) - 1.0) / ((1.0 - y) * (1.0 + y)), 0.0, 1.0, cfg
    )
    assert P(0.0, cfg).value == pytest.approx(direct_p.value, abs=1e-9)
    assert Q(0.0, cfg).value == pytest.approx(direct_q.value, abs=1e-9)


def test_p_q_conjugate_in_t(cfg):
    assert P(-2.0, cfg).value == pytest.approx(P(2.0, cfg).value.conjugate(), abs=1e-10)
    assert Q(-2.0, cfg).value == pytest.approx(Q(2.0, cfg).value.conjugate(), abs=1e-10)


def test_pq_partial_approaches_full(cfg):
    p_full, q_full = P(1.0, cfg).value, Q(1.0, cfg).value
    p_part, q_part = pq_partial(1.0, 1.0 - 1e-8, cfg)
    assert p_part.value == pytest.approx(p_full, abs=1e-7)
    assert q_part.value == pytest.approx(q_full, abs=1e-7)


def test_pq_partial_rejects_sigma_outside_unit_interval(cfg):
    with pytest.raises(ValueError):
        pq_partial(1.0, 1.0, cfg)


def test_expm1_over_series_branch_is_continuous():
    a = math.pi / 8.0
    assert expm1_over(0.0, a) == a
    assert expm1_over(0.99e-6, a) == pytest.approx(expm1_over(1.01e-6, a), rel=1e-7)


# --- contour ---


def test_contour_params_validation():
    with pytest.raises(ValueError):
        ContourParams(A=1, B=0, t=0.0, R=1.0, eps=0.1)
    with pytest.raises(ValueError):
        ContourParams(A=1, B=0, t=0.0, R=10.0, eps=0.6)


def test_contour_closes_for_finite_geometry(cfg):
    p = ContourParams(A=1.0, B=1j, t=-1.0, R=50.0, eps=1e-3)
    segments = contour_segments(p, cfg)
    assert abs(segments.total) <= 1e-8


@pytest.mark.parametrize("a, b, t", [(1.0, 0.0, 1.0), (0.0, 1.0, 1.0), (1.0, 1j, -1.0)])
def test_contour_closes_at_large_radius(cfg, a, b, t):
    p = ContourParams(A=a, B=b, t=t, R=1e4, eps=1e-4)
    assert abs(contour_segments(p, cfg).total) <= 1e-2


def test_contour_convergence_gaps_shrink(cfg):
    p = ContourParams(A=1.0, B=0.0, t=1.0, R=1e4, eps=1e-4)
    gaps = contour_convergence(p, cfg, steps=3)
    assert len(gaps) == 4
    assert all(later < earlier for earlier, later in zip(gaps, gaps[1:]))
    # arc and tails fall off like R^(-1/2)
    assert gaps[-1] <= gaps[0] / 2.0


def test_contour_small_indentation_bound(cfg):
    p = ContourParams(A=1.0, B=0.5, t=0.0, R=20.0, eps=1e-4)
    j4 = contour_segments(p, cfg).J[3]
    assert abs(j4) <= p.eps * math.pi * (abs(p.A) + abs(p.B)) / 4.0 * 1.1


def test_contour_segments_approach_their_limits(cfg):
    p = ContourParams(A=0.3 - 0.2j, B=1.0 + 0.5j, t=1.0, R=1e8, eps=1e-7)
    numeric = contour_segments(p, cfg).J
    limits = contour_limits(p, cfg)
    for k, (value, limit) in enumerate(zip(numeric, limits), start=1):
        assert abs(value - limit) <= 2e-3, f"J{k}"


def test_contour_limits_sum_to_zero(cfg):
    p = ContourParams(A=1.0, B=-1j, t=2.0, R=10.0, eps=0.1)
    assert abs(sum(contour_limits(p, cfg))) <= 1e-8


def test_contour_rejects_geometry_overlapping_the_pole(cfg):
    p = ContourParams(A=1.0, B=0.0, t=0.0, R=1.1, eps=0.1)
    with pytest.raises(ValueError):
        contour_segments(p, cfg)


def test_sqrt_i_constant():
    assert SQRT_I * SQRT_I == pytest.approx(1j, abs=1e-15)
