"""
Special functions: Fresnel integrals (unnormalized, argument y^2), the
principal-branch complex arctan, the auxiliary integrals U, V, P, Q and the
numeric contour segments J1..J5 that tie them together.
"""

from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np
from numpy.polynomial import laguerre

from config import DomainTooSmall, PoleError, PoleTooClose, QuadConfig
from quad import (
    QuadResult,
    integrate_adaptive,
    integrate_decaying_tail,
    integrate_oscillatory_decaying,
    integrate_panels,
    integrate_tanh_sinh,
)

logger = logging.getLogger(__name__)

FRESNEL_LIMIT = math.sqrt(math.pi / 8.0)
SQRT_I = cmath.exp(0.25j * math.pi)
SERIES_SWITCH = 2.0  # power series below, auxiliary-function form above
REMAINDER_MIN_X = 4.0
ASYMPTOTIC_MIN_X = 6.0
SMALL_T = 1e-6


@dataclass(frozen=True)
class FresnelPair:
    """(int cos y^2, int sin y^2) over some range."""

    c: float
    s: float
    abs_error_estimate: float = 0.0


@dataclass(frozen=True)
class SpecialValue:
    """A special-function value with its absolute error estimate."""

    value: complex
    abs_error_estimate: float


@dataclass(frozen=True)
class ContourParams:
    """Coefficients, parameter and geometry of the quarter-plane contour."""

    A: complex
    B: complex
    t: float
    R: float
    eps: float

    def __post_init__(self) -> None:
        if not self.R > 1:
            raise ValueError(f"R must be > 1, got {self.R}")
        if not 0 < self.eps < 0.5:
            raise ValueError(f"eps must be in (0, 1/2), got {self.eps}")


@dataclass(frozen=True)
class ContourSegments:
    """J1..J5 with their quadrature error estimates."""

    J: tuple[complex, complex, complex, complex, complex]
    errors: tuple[float, float, float, float, float]

    @property
    def total(self) -> complex:
        return sum(self.J, 0.0 + 0.0j)


def expm1_over(t: float, a: float) -> float:
    """(exp(a*t) - 1) / t, continued by its series through t = 0."""
    if abs(t) < SMALL_T:
        return a + 0.5 * a * a * t + a ** 3 * t * t / 6.0
    return math.expm1(a * t) / t


# --- Fresnel ---


def _fresnel_series(x: float) -> tuple[float, float]:
    x4 = x ** 4
    c_terms, s_terms = [], []
    p = x  # (-1)^n x^(4n+1) / (2n)!
    q = x ** 3  # (-1)^n x^(4n+3) / (2n+1)!
    n = 0
    while True:
        c_term = p / (4 * n + 1)
        s_term = q / (4 * n + 3)
        c_terms.append(c_term)
        s_terms.append(s_term)
        if abs(c_term) < 1e-18 and abs(s_term) < 1e-18:
            break
        p = -p * x4 / ((2 * n + 1) * (2 * n + 2))
        q = -q * x4 / ((2 * n + 2) * (2 * n + 3))
        n += 1
    return math.fsum(c_terms), math.fsum(s_terms)


@lru_cache(maxsize=None)
def _laguerre_rule(n: int) -> tuple[np.ndarray, np.ndarray]:
    return laguerre.laggauss(n)


def _aux_laplace(x: float, n: int) -> complex:
    # int_0^inf exp(-u) / sqrt(x^2 + i u) du by Gauss-Laguerre
    nodes, weights = _laguerre_rule(n)
    return complex(np.sum(weights / np.sqrt(x * x + 1j * nodes)))


def _aux_asymptotic(x: float) -> tuple[complex, float]:
    # same integral as _aux_laplace, expanded in i/x^2 and cut at the smallest term
    ratio = 1j / (x * x)
    term = 1.0 + 0.0j
    total = term
    k = 1
    while True:
        nxt = term * (-(2 * k - 1) / 2.0) * ratio
        if abs(nxt) >= abs(term):
            break
        total += nxt
        term = nxt
        k += 1
        if abs(term) < 1e-18:
            break
    omitted = abs(term * (-(2 * k - 1) / 2.0) * ratio)
    return total / x, omitted / x


def _remainder(x: float) -> FresnelPair:
    """int_x^inf of (cos y^2, sin y^2) for x > 0 via the steepest-descent form."""
    if x >= ASYMPTOTIC_MIN_X:
        aux, err = _aux_asymptotic(x)
    else:
        aux = _aux_laplace(x, 64)
        err = abs(aux - _aux_laplace(x, 48))
    tail = 0.5j * cmath.exp(1j * x * x) * aux
    return FresnelPair(c=tail.real, s=tail.imag, abs_error_estimate=0.5 * err)


def fresnel_remainder(x: float) -> FresnelPair:
    """
    Tails (int_x^inf cos y^2 dy, int_x^inf sin y^2 dy) for x >= 4.
    Leading behaviour: (-sin(x^2), cos(x^2)) / (2x).
    """
    if x < REMAINDER_MIN_X:
        raise DomainTooSmall(f"fresnel_remainder needs x >= {REMAINDER_MIN_X}, got {x}")
    return _remainder(x)


def fresnel(x: float) -> FresnelPair:
    """C(x) = int_0^x cos y^2 dy and S(x) = int_0^x sin y^2 dy."""
    if not math.isfinite(x):
        if math.isnan(x):
            raise ValueError("fresnel argument is NaN")
        sign = 1.0 if x > 0 else -1.0
        return FresnelPair(sign * FRESNEL_LIMIT, sign * FRESNEL_LIMIT)
    ax = abs(x)
    sign = -1.0 if x < 0 else 1.0
    if ax <= SERIES_SWITCH:
        c, s = _fresnel_series(ax)
        return FresnelPair(sign * c, sign * s)
    tail = _remainder(ax)
    return FresnelPair(
        sign * (FRESNEL_LIMIT - tail.c),
        sign * (FRESNEL_LIMIT - tail.s),
        tail.abs_error_estimate,
    )


def remainder_square(x: float) -> float:
    """
    Half the squared modulus of int_x^inf exp(i y^2) dy, which equals the
    ordered double integral of cos(y^2 - u^2) over x < u < y. Used for the
    window-edge corrections of the generating-function solvers.
    """
    tail = fresnel_remainder(x)
    return 0.5 * (tail.c * tail.c + tail.s * tail.s)


# --- complex arctan ---


def arctan_principal(z: complex) -> complex:
    """
    arctan z = ln((1 + iz) / (1 - iz)) / (2i) with the principal logarithm,
    arg in (-pi, pi]. Cuts run along (-i*inf, -i) and (i, i*inf).
    """
    z = complex(z)
    if z == 1j or z == -1j:
        raise PoleError(f"arctan has a logarithmic pole at z = {z}")
    w = (1.0 + 1j * z) / (1.0 - 1j * z)
    if w.imag == 0.0:
        w = complex(w.real, 0.0)  # -0.0 would select arg = -pi
    log_w = cmath.log(w)
    return complex(0.5 * log_w.imag, -0.5 * log_w.real)


def arctan_right_of_cut(y: float) -> complex:
    """Limit of arctan(iy + delta), delta -> 0+, on the upper cut y > 1."""
    return complex(0.5 * math.pi, math.atanh(1.0 / y))


# --- U, V, P, Q ---


def _uv_integral(power: float, t: float, cfg: QuadConfig, moment: int = 0) -> QuadResult:
    quarter = 0.25 * t

    def integrand(x: float) -> float:
        angle = math.atan(x)
        value = x ** power / (1.0 + x * x) * math.exp(quarter * angle)
        return value * (0.25 * angle) ** moment if moment else value

    head = integrate_tanh_sinh(integrand, 0.0, 1.0, cfg).require()
    tail = integrate_decaying_tail(integrand, 1.0, cfg).require()
    return head + tail


def U(t: float, cfg: QuadConfig) -> SpecialValue:
    """U(t) = int_0^inf sqrt(x) / (1 + x^2) exp((t/4) arctan x) dx."""
    r = _uv_integral(0.5, t, cfg)
    return SpecialValue(r.value.real, r.abs_error_estimate)


def V(t: float, cfg: QuadConfig) -> SpecialValue:
    """V(t) = int_0^inf x^(-1/2) / (1 + x^2) exp((t/4) arctan x) dx."""
    r = _uv_integral(-0.5, t, cfg)
    return SpecialValue(r.value.real, r.abs_error_estimate)


def uv_derivatives(cfg: QuadConfig) -> tuple[float, float]:
    """(U'(0), V'(0)), used for the t -> 0 continuation of P and Q."""
    return (
        _uv_integral(0.5, 0.0, cfg, moment=1).value.real,
        _uv_integral(-0.5, 0.0, cfg, moment=1).value.real,
    )


def _one_minus_tanh(u: float) -> float:
    decay = math.exp(-2.0 * u)
    return 2.0 * decay / (1.0 + decay)


def p_envelope(u: float) -> float:
    """sqrt(tanh u) - 1, the P integrand after y = tanh u."""
    return -_one_minus_tanh(u) / (1.0 + math.sqrt(math.tanh(u)))


def q_envelope(u: float) -> float:
    """1/sqrt(tanh u) - 1, the Q integrand after y = tanh u."""
    root = math.sqrt(math.tanh(u))
    return _one_minus_tanh(u) / (root * (1.0 + root))


def _phase_integral(envelope, t: float, cfg: QuadConfig, upper: float = math.inf) -> QuadResult:
    omega = 0.25 * t

    def integrand(u: float) -> complex:
        return envelope(u) * complex(math.cos(omega * u), math.sin(omega * u))

    split = min(1.0, upper)
    # tanh-sinh near u = 0 where 1/sqrt(tanh u) ~ u^(-1/2)
    head = integrate_tanh_sinh(integrand, 0.0, split, cfg).require()
    if upper <= 1.0:
        return head
    if math.isinf(upper):
        return head + integrate_oscillatory_decaying(envelope, omega, cfg, a=1.0).require()
    return head + integrate_adaptive(integrand, 1.0, upper, cfg).require()


def P(t: float, cfg: QuadConfig) -> SpecialValue:
    """P(t) = int_0^inf (sqrt(tanh u) - 1) exp(i t u / 4) du."""
    r = _phase_integral(p_envelope, t, cfg)
    return SpecialValue(r.value, r.abs_error_estimate)


def Q(t: float, cfg: QuadConfig) -> SpecialValue:
    """Q(t) = int_0^inf (1/sqrt(tanh u) - 1) exp(i t u / 4) du."""
    r = _phase_integral(q_envelope, t, cfg)
    return SpecialValue(r.value, r.abs_error_estimate)


def pq_partial(t: float, sigma: float, cfg: QuadConfig) -> tuple[SpecialValue, SpecialValue]:
    """P and Q with the y-integration stopped at y = sigma < 1."""
    if not 0.0 < sigma < 1.0:
        raise ValueError(f"sigma must lie in (0, 1), got {sigma}")
    upper = math.atanh(sigma)
    p = _phase_integral(p_envelope, t, cfg, upper)
    q = _phase_integral(q_envelope, t, cfg, upper)
    return SpecialValue(p.value, p.abs_error_estimate), SpecialValue(q.value, q.abs_error_estimate)


# --- contour ---


def _bracket(z: complex, sqrt_z: complex, p: ContourParams) -> complex:
    # [(sqrt z - sqrt i) A + (1/sqrt z - 1/sqrt i) B] / (1 + z^2), with z - i cancelled
    common = 1.0 / ((sqrt_z + SQRT_I) * (z + 1j))
    return common * (p.A - p.B / (sqrt_z * SQRT_I))


def _guard_pole(z: complex, p: ContourParams) -> None:
    if abs(z - 1j) < p.eps / 10.0:
        raise PoleTooClose(f"contour abscissa {z} within eps/10 of i")


def _contour_integrand(z: complex, p: ContourParams, angle: complex | None = None) -> complex:
    _guard_pole(z, p)
    if angle is None:
        angle = arctan_principal(z)
    return _bracket(z, cmath.sqrt(z), p) * cmath.exp(0.25 * p.t * angle)


def geometric_edges(start: float, stop: float, first: float) -> list[float]:
    edges = [start]
    width = first
    while edges[-1] + width < stop:
        edges.append(edges[-1] + width)
        width *= 2.0
    edges.append(stop)
    return edges


def contour_segments(p: ContourParams, cfg: QuadConfig) -> ContourSegments:
    """
    Numeric J1..J5 along the counter-clockwise contour: real axis, quarter arc
    of radius R, right bank of the upper cut, indentation around i, and the
    imaginary segment back to 0.
    """
    if not p.R > 1.0 + 2.0 * p.eps:
        raise ValueError("contour needs R > 1 + 2 eps")

    def on_real(x: float) -> complex:
        return _contour_integrand(complex(x, 0.0), p)

    j1 = integrate_tanh_sinh(on_real, 0.0, 1.0, cfg) + integrate_panels(
        on_real, geometric_edges(1.0, p.R, 1.0), cfg
    )

    def on_arc(phi: float) -> complex:
        z = p.R * cmath.exp(1j * phi)
        return _contour_integrand(z, p) * 1j * z

    j2 = integrate_adaptive(on_arc, 0.0, 0.5 * math.pi, cfg)

    def on_cut(y: float) -> complex:
        return -1j * _contour_integrand(complex(0.0, y), p, arctan_right_of_cut(y))

    j3 = integrate_panels(on_cut, geometric_edges(1.0 + p.eps, p.R, p.eps), cfg)

    def on_indent(phi: float) -> complex:
        step = p.eps * cmath.exp(1j * phi)
        return -_contour_integrand(1j - 1j * step, p) * step

    j4 = integrate_adaptive(on_indent, 0.0, math.pi, cfg)

    def on_axis(y: float) -> complex:
        return -1j * _contour_integrand(complex(0.0, y), p)

    j5 = integrate_tanh_sinh(on_axis, 0.0, 1.0 - p.eps, cfg)

    parts = (j1, j2, j3, j4, j5)
    for k, part in enumerate(parts, start=1):
        if not part.converged:
            logger.warning("contour segment J%d not converged (err %.3e)", k, part.abs_error_estimate)
    return ContourSegments(
        J=tuple(complex(r.value) for r in parts),
        errors=tuple(r.abs_error_estimate for r in parts),
    )


def contour_limits(p: ContourParams, cfg: QuadConfig) -> tuple[complex, ...]:
    """Values of J1..J5 as R -> inf and eps -> 0+, in terms of U, V, P, Q."""
    u, v = U(p.t, cfg).value, V(p.t, cfg).value
    pv, qv = P(p.t, cfg).value, Q(p.t, cfg).value
    growth = math.exp(math.pi * p.t / 8.0)
    j1 = p.A * u + p.B * v - 4.0 * SQRT_I * (p.A - 1j * p.B) * expm1_over(p.t, math.pi / 8.0)
    j3 = 1j * SQRT_I * growth * (p.A * qv - 1j * p.B * pv)
    j5 = -1j * SQRT_I * (p.A * pv - 1j * p.B * qv)
    return (j1, 0j, j3, 0j, j5)


def contour_convergence(p: ContourParams, cfg: QuadConfig, steps: int = 3) -> tuple[float, ...]:
    """
    Largest |J_k - limit_k| at p and after each of `steps` refinements that
    double R and halve eps. The closed sum is zero at any finite geometry, so
    the distance to the limits is what shrinks.
    """
    limits = contour_limits(p, cfg)
    gaps = []
    for _ in range(steps + 1):
        segments = contour_segments(p, cfg)
        gaps.append(max(abs(j - limit) for j, limit in zip(segments.J, limits)))
        p = replace(p, R=2.0 * p.R, eps=0.5 * p.eps)
    return tuple(gaps)
