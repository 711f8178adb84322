"""
Generating-function solvers for the ordered iterated cosine integrals

    I_n = int_{x1 > x2 > ... > x2n} prod cos(x_{2k-1}^2 - x_{2k}^2),

and the numerical identity checks that pin them to 2/n! (pi/4)^n.

T(x, t) = sum_n tau_n(x) t^n satisfies the first-order system

    T' = t (cos(x^2) A + sin(x^2) B),  A' = cos(x^2) T,  B' = sin(x^2) T,

with A, B the running cosine and sine moments of T. The system is started at
x_min from Fresnel-remainder data and read at x_max with a Fresnel-remainder
tail correction. alpha(t) = A(0, t) and beta(t) = B(0, t).
"""

from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from config import IllConditioned, InitRegime, OdeConfig, QuadConfig, SolveConfig
from ode import Trajectory, integrate
from quad import integrate_panels, integrate_tanh_sinh
from specfun import (
    SMALL_T,
    SQRT_I,
    P,
    Q,
    U,
    V,
    expm1_over,
    fresnel_remainder,
    geometric_edges,
    pq_partial,
    remainder_square,
    uv_derivatives,
)

logger = logging.getLogger(__name__)

SQRT_PI = math.sqrt(math.pi)
SUITE_T_GRID = (-2.0, -1.0, -0.5, 0.5, 1.0, 2.0)
DIFF_STEP = 0.02
MAX_CONDITION = 1e12
GAUSSIAN_REACH = 8.0  # erfc(8) ~ 1e-29
# hierarchy step control relative to cfg.ode; levels go down to ~1e-4
HIERARCHY_RTOL_FACTOR = 1e-2
HIERARCHY_ATOL_FACTOR = 1e-4
HIERARCHY_RTOL_FLOOR = 1e-13


# --- closed forms ---


def closed_form_I(n: int) -> float:
    """2/n! (pi/4)^n."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return 2.0 / math.factorial(n) * (math.pi / 4.0) ** n


def closed_form_T0(t: float) -> float:
    return math.exp(math.pi * t / 8.0)


def closed_form_T_inf(t: float) -> float:
    return 2.0 * math.exp(math.pi * t / 4.0) - 1.0


# --- result types ---


@dataclass(frozen=True)
class IdentityResult:
    """One numerical identity: lhs and rhs computed along separate paths."""

    name: str
    lhs: complex
    rhs: complex
    abs_diff: float
    tol: float
    passed: bool

    @classmethod
    def compare(cls, name: str, lhs: complex, rhs: complex, tol: float) -> "IdentityResult":
        diff = float(abs(lhs - rhs))
        return cls(name=name, lhs=lhs, rhs=rhs, abs_diff=diff, tol=tol, passed=bool(diff <= tol))


@dataclass(frozen=True)
class TSystemState:
    T: float
    A: float
    B: float

    @classmethod
    def from_vector(cls, y: np.ndarray) -> "TSystemState":
        return cls(T=float(y[0]), A=float(y[1]), B=float(y[2]))


@dataclass(frozen=True)
class TauHierarchyState:
    """tau_1..tau_N and the moments A_0..A_{N-1}, B_0..B_{N-1}; tau_0 = 1 is implicit."""

    tau: tuple[float, ...]
    A_part: tuple[float, ...]
    B_part: tuple[float, ...]

    @classmethod
    def from_vector(cls, y: np.ndarray, n: int) -> "TauHierarchyState":
        return cls(
            tau=tuple(float(v) for v in y[:n]),
            A_part=tuple(float(v) for v in y[n:2 * n]),
            B_part=tuple(float(v) for v in y[2 * n:]),
        )


@dataclass(frozen=True)
class HierarchyLevel:
    n: int
    value: float
    abs_error_estimate: float
    accuracy_degraded: bool

    @property
    def exact(self) -> float:
        return closed_form_I(self.n)


@dataclass(frozen=True)
class AlphaBeta:
    alpha: float
    beta: float
    checks: tuple[IdentityResult, ...]


@dataclass(frozen=True)
class SeriesFit:
    """Least-squares Taylor coefficients of T(inf, t); I_n = coefficients[n]."""

    coefficients: tuple[float, ...]
    condition: float

    @property
    def I(self) -> tuple[float, ...]:
        m = (len(self.coefficients) - 1) // 2
        return self.coefficients[1:m + 1]


@dataclass(frozen=True)
class Ode4Residual:
    max_residual: float
    max_second_derivative: float

    def within(self, rel: float) -> bool:
        return self.max_residual <= rel * max(self.max_second_derivative, 1.0)


# --- window edges ---


@dataclass(frozen=True)
class _Edge:
    rc: float
    rs: float
    k: float


@lru_cache(maxsize=64)
def _edge(x: float) -> _Edge:
    # remainders beyond |x|; k is the ordered double integral of cos(y^2 - u^2) there
    tail = fresnel_remainder(abs(x))
    return _Edge(rc=tail.c, rs=tail.s, k=remainder_square(abs(x)))


def _step_cap(x: float) -> float:
    return math.pi / (4.0 * (1.0 + abs(x)))


def _tolerance(cfg: SolveConfig, scale: float = 1.0) -> float:
    return cfg.target_tol * max(1.0, abs(scale))


# --- generating function ---


def _t_field(t: float) -> Callable[[float, np.ndarray], np.ndarray]:
    def field(x: float, y: np.ndarray) -> np.ndarray:
        c, s = math.cos(x * x), math.sin(x * x)
        return np.array([t * (c * y[1] + s * y[2]), c * y[0], s * y[0]])

    return field


@lru_cache(maxsize=64)
def solve_T(t: float, cfg: SolveConfig) -> Trajectory:
    """Trajectory of (T, A, B) over [x_min, x_max]."""
    if not math.isfinite(t):
        raise ValueError(f"t must be finite, got {t}")
    left = _edge(cfg.x_min)
    # T(x_min) = 1 + t k; A, B are the mirrored Fresnel tails weighted by that T
    lift = t * left.k
    if abs(lift) > cfg.init_tol:
        raise InitRegime(
            f"initial offset {lift:.3e} exceeds init_tol={cfg.init_tol}; widen x_min"
        )
    y0 = [1.0 + lift, left.rc * (1.0 + lift), left.rs * (1.0 + lift)]
    trajectory = integrate(_t_field(t), cfg.x_min, y0, cfg.x_max, cfg.ode, h_limit=_step_cap)
    logger.debug("solve_T(t=%g): %d steps", t, trajectory.n_steps)
    return trajectory


def t_infinity_value(t: float, cfg: SolveConfig) -> float:
    """
    T(inf, t): T(x_max) plus the frozen-moment tail. Beyond x_max the moments
    and T are expanded to the orders carrying k = remainder_square(x_max).
    """
    state = TSystemState.from_vector(solve_T(t, cfg).final)
    right = _edge(cfg.x_max)
    first = t * (state.A * right.rc + state.B * right.rs)
    second = t * state.T * right.k
    return state.T + first * (1.0 + t * right.k) + second


def _t_at_zero(t: float, cfg: SolveConfig) -> TSystemState:
    return TSystemState.from_vector(solve_T(t, cfg)(0.0))


def T_zero(t: float, cfg: SolveConfig) -> IdentityResult:
    lhs = _t_at_zero(t, cfg).T
    rhs = closed_form_T0(t)
    return IdentityResult.compare(f"T_zero(t={t:g})", lhs, rhs, _tolerance(cfg, rhs))


def T_infinity(t: float, cfg: SolveConfig) -> IdentityResult:
    lhs = t_infinity_value(t, cfg)
    rhs = closed_form_T_inf(t)
    return IdentityResult.compare(f"T_infinity(t={t:g})", lhs, rhs, _tolerance(cfg, rhs))


def tinf_from_t0_check(t: float, cfg: SolveConfig) -> IdentityResult:
    """T(inf, t) = 2 T(0, t) exp(pi t / 8) - 1, both sides numeric."""
    lhs = t_infinity_value(t, cfg)
    rhs = 2.0 * _t_at_zero(t, cfg).T * math.exp(math.pi * t / 8.0) - 1.0
    return IdentityResult.compare(f"tinf_from_t0(t={t:g})", lhs, rhs, 2.0 * _tolerance(cfg, rhs))


def boxed_t0_check(t: float, cfg: SolveConfig) -> IdentityResult:
    """T(0, t) exp(pi t / 8) = 1 + t / (2 sqrt(pi)) (alpha U + beta V)."""
    state = _t_at_zero(t, cfg)
    u, v = _uv(t, cfg.quad)
    lhs = state.T * math.exp(math.pi * t / 8.0)
    rhs = 1.0 + t / (2.0 * SQRT_PI) * (state.A * u + state.B * v)
    return IdentityResult.compare(f"boxed_t0(t={t:g})", lhs, rhs, _tolerance(cfg, rhs))


# --- alpha, beta and the auxiliary integrals ---


@lru_cache(maxsize=128)
def _uv(t: float, quad: QuadConfig) -> tuple[float, float]:
    return U(t, quad).value.real, V(t, quad).value.real


@lru_cache(maxsize=128)
def _pq(t: float, quad: QuadConfig) -> tuple[complex, complex]:
    return complex(P(t, quad).value), complex(Q(t, quad).value)


def alpha_beta(t: float, cfg: SolveConfig) -> AlphaBeta:
    """
    alpha = A(0), beta = B(0) from the trajectory, checked against the linear
    system alpha U + beta V = 2 sqrt(pi) (e^(pi t/4) - 1) / t, alpha V = beta U
    and against its explicit solution.
    """
    state = _t_at_zero(t, cfg)
    a, b = state.A, state.B
    u, v = _uv(t, cfg.quad)
    drive = 2.0 * SQRT_PI * expm1_over(t, math.pi / 4.0)
    norm = u * u + v * v
    tol = _tolerance(cfg)
    checks = (
        IdentityResult.compare(f"alpha_beta.linear(t={t:g})", a * u + b * v, drive,
                               _tolerance(cfg, drive)),
        IdentityResult.compare(f"alpha_beta.orthogonal(t={t:g})", a * v, b * u, tol),
        IdentityResult.compare(f"alpha_beta.alpha(t={t:g})", a, drive * u / norm, tol),
        IdentityResult.compare(f"alpha_beta.beta(t={t:g})", b, drive * v / norm, tol),
    )
    return AlphaBeta(alpha=a, beta=b, checks=checks)


def pq_from_uv(t: float, cfg: SolveConfig) -> tuple[complex, complex]:
    """P and Q expressed through U and V; the t -> 0 limit uses U'(0), V'(0)."""
    u, v = _uv(t, cfg.quad)
    if abs(t) < SMALL_T:
        du, dv = uv_derivatives(cfg.quad)
        base = -0.5j * math.pi
        p = base + 4.0 / math.pi * SQRT_I * (du + 1j * dv + 1j * math.pi * v / 8.0)
        q = base + 4.0 / math.pi * SQRT_I * (du + 1j * dv + math.pi * u / 8.0)
        return p, q
    half = math.exp(math.pi * t / 8.0)
    denom = math.expm1(math.pi * t / 4.0)
    p = -4j / t + SQRT_I * (u + 1j * half * v) / denom
    q = -4j / t + SQRT_I * (half * u + 1j * v) / denom
    return p, q


def uv_from_pq(t: float, cfg: SolveConfig) -> tuple[IdentityResult, IdentityResult]:
    """U and V rebuilt from quadrature P and Q, compared with quadrature U and V."""
    p, q = _pq(t, cfg.quad)
    u, v = _uv(t, cfg.quad)
    half = math.exp(math.pi * t / 8.0)
    drift = 4.0 * SQRT_I * expm1_over(t, math.pi / 8.0)
    u_rebuilt = drift + 1j * SQRT_I * (p - half * q)
    v_rebuilt = -1j * drift - SQRT_I * half * p + SQRT_I * q
    return (
        IdentityResult.compare(f"uv_from_pq.U(t={t:g})", u_rebuilt, u, _tolerance(cfg, u)),
        IdentityResult.compare(f"uv_from_pq.V(t={t:g})", v_rebuilt, v, _tolerance(cfg, v)),
    )


def uv_symmetry_check(t: float, cfg: SolveConfig) -> IdentityResult:
    """U(t) = e^(pi t/8) V(-t), from x -> 1/x in the defining integral."""
    u = U(t, cfg.quad)
    v = V(-t, cfg.quad)
    growth = math.exp(math.pi * t / 8.0)
    rhs = growth * v.value.real
    tol = cfg.quad.rel_tol * abs(u.value) + u.abs_error_estimate + growth * v.abs_error_estimate
    return IdentityResult.compare(f"uv_symmetry(t={t:g})", u.value.real, rhs, tol)


def bracket_residual(t: float, cfg: SolveConfig) -> IdentityResult:
    """1 = (2 sqrt(i)/sqrt(pi)) (alpha - i beta) - (i sqrt(i) t / (2 sqrt(pi))) (alpha P - i beta Q)."""
    state = _t_at_zero(t, cfg)
    a, b = state.A, state.B
    p, q = _pq(t, cfg.quad)
    lhs = (2.0 * SQRT_I / SQRT_PI) * (a - 1j * b) - (
        1j * SQRT_I * t / (2.0 * SQRT_PI)
    ) * (a * p - 1j * b * q)
    return IdentityResult.compare(f"bracket(t={t:g})", lhs, 1.0, _tolerance(cfg))


# --- Gaussian transforms ---


def _gaussian_moment(t: float, s: float, cfg: SolveConfig, upper: float) -> float:
    """sqrt(s) * int_{-inf}^{upper} T(x, t) exp(-s x^2) dx with upper 0 or +inf."""
    if not s > 0:
        raise ValueError(f"s must be > 0, got {s}")
    trajectory = solve_T(t, cfg)
    root = math.sqrt(s)
    reach = GAUSSIAN_REACH / root
    total = 0.0

    lo = cfg.x_min
    if -reach > lo:
        lo = -reach
    else:
        total += 0.5 * SQRT_PI * math.erfc(root * abs(cfg.x_min))  # T = 1 to the left

    if math.isinf(upper):
        hi = cfg.x_max
        if reach < hi:
            hi = reach
        else:
            total += t_infinity_value(t, cfg) * 0.5 * SQRT_PI * math.erfc(root * cfg.x_max)
    else:
        hi = upper

    def integrand(x: float) -> float:
        return root * float(trajectory(x)[0]) * math.exp(-s * x * x)

    edges = np.linspace(lo, hi, max(2, int(math.ceil(hi - lo)) + 1))
    return total + integrate_panels(integrand, edges, cfg.quad).real


def even_transform_check(t: float, s: float, cfg: SolveConfig) -> IdentityResult:
    """sqrt(s) int T e^(-s x^2) dx = sqrt(pi) T(0, t) exp((t/4) arccot s)."""
    lhs = _gaussian_moment(t, s, cfg, math.inf)
    arccot = 0.5 * math.pi - math.atan(s)
    rhs = SQRT_PI * _t_at_zero(t, cfg).T * math.exp(0.25 * t * arccot)
    return IdentityResult.compare(f"even_transform(t={t:g}, s={s:g})", lhs, rhs,
                                  _tolerance(cfg, rhs))


def truncated_transform_rhs(t: float, s: float, cfg: SolveConfig) -> float:
    """Closed solution of the half-line transform ODE with D(0+) = sqrt(pi)/2."""
    state = _t_at_zero(t, cfg)
    a, b = state.A, state.B
    quarter = 0.25 * t

    def integrand(r: float) -> float:
        return (r * a + b) / (math.sqrt(r) * (1.0 + r * r)) * math.exp(quarter * math.atan(r))

    inner = integrate_tanh_sinh(integrand, 0.0, min(s, 1.0), cfg.quad)
    if s > 1.0:
        inner = inner + integrate_panels(integrand, geometric_edges(1.0, s, 1.0), cfg.quad)
    return 0.5 * SQRT_PI * math.exp(-quarter * math.atan(s)) * (
        1.0 + t / (2.0 * SQRT_PI) * inner.real
    )


def truncated_transform_check(t: float, s: float, cfg: SolveConfig) -> IdentityResult:
    lhs = _gaussian_moment(t, s, cfg, 0.0)
    rhs = truncated_transform_rhs(t, s, cfg)
    return IdentityResult.compare(f"truncated_transform(t={t:g}, s={s:g})", lhs, rhs,
                                  _tolerance(cfg, rhs))


def imaginary_boundary_check(t: float, cfg: SolveConfig, sigma: float = 1.0 - 1e-6) -> IdentityResult:
    """
    The half-line transform continued to s = i*sigma. As sigma -> 1 it tends
    to sqrt(i) (alpha - i beta); the oscillating remainder is proportional to
    the bracket residual plus the P, Q tails beyond sigma.
    """
    state = _t_at_zero(t, cfg)
    a, b = state.A, state.B
    p_part, q_part = pq_partial(t, sigma, cfg.quad)
    u_sigma = math.atanh(sigma)
    omega = 0.25 * t
    if abs(omega) < SMALL_T:
        sweep = u_sigma + 0.5j * omega * u_sigma ** 2
    else:
        sweep = (cmath.exp(1j * omega * u_sigma) - 1.0) / (1j * omega)
    inner = SQRT_I * (1j * a * p_part.value + b * q_part.value + (1j * a + b) * sweep)
    lhs = 0.5 * SQRT_PI * cmath.exp(-1j * omega * u_sigma) * (1.0 + t / (2.0 * SQRT_PI) * inner)
    rhs = SQRT_I * (a - 1j * b)
    tol = _tolerance(cfg) + abs(t) * (1.0 - sigma)
    return IdentityResult.compare(f"imaginary_boundary(t={t:g})", lhs, rhs, tol)


# --- derivatives at the origin ---


def _richardson(estimate: Callable[[float], float], h: float = DIFF_STEP) -> float:
    coarse, fine = estimate(h), estimate(0.5 * h)
    return (4.0 * fine - coarse) / 3.0


def _system_derivatives(t: float, x: float, y: np.ndarray) -> tuple[float, float, float, float]:
    """T', T'', T''', T'''' from the (T, A, B) state."""
    T, A, B = (float(v) for v in y)
    c, s = math.cos(x * x), math.sin(x * x)
    w = c * B - s * A
    d1 = t * (c * A + s * B)
    d2 = t * T + 2.0 * x * t * w
    d3 = t * d1 + 2.0 * t * w - 4.0 * x * x * d1
    w1 = -2.0 * x * (s * B + c * A)
    d4 = t * d2 + 2.0 * t * w1 - 8.0 * x * d1 - 4.0 * x * x * d2
    return d1, d2, d3, d4


def boundary_conditions(t: float, cfg: SolveConfig) -> list[IdentityResult]:
    """
    T'(0) = t alpha, T''(0) = t T(0), T'''(0) = t^2 alpha + 2 t beta and
    T(-inf) = 1. Derivatives come from finite differences of the dense output.
    """
    trajectory = solve_T(t, cfg)
    origin = TSystemState.from_vector(trajectory(0.0))

    def T(x: float) -> float:
        return float(trajectory(x)[0])

    def T1(x: float) -> float:
        return _system_derivatives(t, x, trajectory(x))[0]

    d1 = _richardson(lambda h: (T(h) - T(-h)) / (2.0 * h))
    d2 = _richardson(lambda h: (T1(h) - T1(-h)) / (2.0 * h))
    d3 = _richardson(lambda h: (T1(h) - 2.0 * T1(0.0) + T1(-h)) / (h * h))
    # differenced dense output loses about two digits against the step tolerance
    tol = 100.0 * _tolerance(cfg) * max(1.0, t * t)
    return [
        IdentityResult.compare(f"boundary.dT(t={t:g})", d1, t * origin.A, tol),
        IdentityResult.compare(f"boundary.d2T(t={t:g})", d2, t * origin.T, tol),
        IdentityResult.compare(
            f"boundary.d3T(t={t:g})", d3, t * t * origin.A + 2.0 * t * origin.B, tol
        ),
        IdentityResult.compare(f"boundary.T_left(t={t:g})", T(cfg.x_min), 1.0, cfg.init_tol),
    ]


def ode4_residual(
    t: float, cfg: SolveConfig, grid: Sequence[float] | None = None
) -> Ode4Residual:
    """Residual of T'''' = (t - 4x^2) T'' - 12 x T' on a grid (default [-5, 5])."""
    trajectory = solve_T(t, cfg)
    xs = np.linspace(-5.0, 5.0, 201) if grid is None else np.asarray(grid, dtype=float)
    worst, scale = 0.0, 0.0
    for x in xs:
        d1, d2, _, d4 = _system_derivatives(t, float(x), trajectory(float(x)))
        residual = d4 - ((t - 4.0 * x * x) * d2 - 12.0 * x * d1)
        worst = max(worst, abs(residual))
        scale = max(scale, abs(d2))
    return Ode4Residual(max_residual=worst, max_second_derivative=scale)


# --- tau hierarchy ---


def _hierarchy_ode(cfg: SolveConfig) -> OdeConfig:
    return replace(
        cfg.ode,
        rtol=max(cfg.ode.rtol * HIERARCHY_RTOL_FACTOR, HIERARCHY_RTOL_FLOOR),
        atol=cfg.ode.atol * HIERARCHY_ATOL_FACTOR,
    )


def _reverse_step_cap(x: float) -> float:
    # finer than _step_cap so the reversed solve walks its own step sequence
    return math.pi / (6.0 * (1.0 + abs(x)))


def _hierarchy_field(n: int) -> Callable[[float, np.ndarray], np.ndarray]:
    def field(x: float, y: np.ndarray) -> np.ndarray:
        c, s = math.cos(x * x), math.sin(x * x)
        tau, a, b = y[:n], y[n:2 * n], y[2 * n:]
        lower = np.concatenate(([1.0], tau[:-1]))
        return np.concatenate([c * a + s * b, c * lower, s * lower])

    return field


def _seed(n: int, edge: _Edge) -> np.ndarray:
    y0 = np.zeros(3 * n)
    y0[0] = edge.k
    y0[n] = edge.rc
    y0[2 * n] = edge.rs
    if n > 1:
        y0[n + 1] = edge.k * edge.rc
        y0[2 * n + 1] = edge.k * edge.rs
    return y0


@lru_cache(maxsize=16)
def _hierarchy_trajectory(n: int, cfg: SolveConfig) -> Trajectory:
    return integrate(_hierarchy_field(n), cfg.x_min, _seed(n, _edge(cfg.x_min)), cfg.x_max,
                     _hierarchy_ode(cfg), h_limit=_step_cap)


@lru_cache(maxsize=16)
def _reversed_trajectory(n: int, cfg: SolveConfig) -> Trajectory:
    """
    The K_n system in sigma = x_max - x: tau, A, B become the moments over
    [x, inf), seeded from the right-edge remainders and read at x_min.
    """
    forward = _hierarchy_field(n)

    def field(sigma: float, y: np.ndarray) -> np.ndarray:
        return forward(cfg.x_max - sigma, y)

    return integrate(field, 0.0, _seed(n, _edge(cfg.x_max)), cfg.x_max - cfg.x_min,
                     _hierarchy_ode(cfg), h_limit=lambda sigma: _reverse_step_cap(cfg.x_max - sigma))


def _read_levels(
    n: int, trajectory: Trajectory, start: float, end: float, cfg: SolveConfig
) -> list[HierarchyLevel]:
    """Levels 1..n from the final state, with the tail beyond `end` added back."""
    state = TauHierarchyState.from_vector(trajectory.final, n)
    seeded, far = _edge(start), _edge(end)
    ode = _hierarchy_ode(cfg)
    window = 10.0 * ode.rtol * abs(end - start)
    drift = ode.atol * trajectory.n_steps
    edges = far.k / end ** 2 + seeded.k / start ** 2
    levels: list[HierarchyLevel] = []
    for k in range(1, n + 1):
        below = 1.0 if k == 1 else state.tau[k - 2]
        first = state.A_part[k - 1] * far.rc + state.B_part[k - 1] * far.rs
        if k > 1:
            first += far.k * (state.A_part[k - 2] * far.rc + state.B_part[k - 2] * far.rs)
        value = state.tau[k - 1] + first + below * far.k
        # neglected edge terms scale with the level below
        weight = 1.0 if k == 1 else abs(levels[-1].value)
        error = window * abs(value) + drift + edges * weight
        degraded = error > cfg.target_tol * abs(value)
        if degraded:
            logger.warning("level %d: relative error estimate %.2e above target %.2e",
                           k, error / abs(value), cfg.target_tol)
        levels.append(HierarchyLevel(n=k, value=value, abs_error_estimate=error,
                                     accuracy_degraded=degraded))
    return levels


def tau_trajectory(n: int, cfg: SolveConfig) -> Trajectory:
    """Dense (tau_1..tau_N, A_0..A_{N-1}, B_0..B_{N-1}) over [x_min, x_max]."""
    return _hierarchy_trajectory(n, cfg)


def solve_tau_hierarchy(n: int, cfg: SolveConfig) -> list[HierarchyLevel]:
    """I_1..I_N from the triangular tau system."""
    if n < 1:
        raise ValueError(f"N must be >= 1, got {n}")
    return _read_levels(n, _hierarchy_trajectory(n, cfg), cfg.x_min, cfg.x_max, cfg)


def kn_hierarchy(n: int, cfg: SolveConfig) -> list[HierarchyLevel]:
    """
    K_1..K_N, the variant with every inner integral running up to +inf,
    integrated right to left.
    """
    if n < 1:
        raise ValueError(f"N must be >= 1, got {n}")
    return _read_levels(n, _reversed_trajectory(n, cfg), cfg.x_max, cfg.x_min, cfg)


# --- series cross-check ---


def series_extract(t_grid: Sequence[float], cfg: SolveConfig, m: int | None = None) -> SeriesFit:
    """
    Least-squares polynomial of degree 2m through T(inf, t) on a symmetric grid.

    `m` defaults to the largest order the grid supports, (len(t_grid) - 1) // 2.
    """
    ts = np.asarray(sorted(t_grid), dtype=float)
    if len(ts) < 3:
        raise ValueError("t_grid needs at least 3 points")
    if np.any(np.abs(ts) > 1.0):
        raise ValueError("t_grid must lie in [-1, 1]")
    if not np.allclose(ts, -ts[::-1], atol=1e-12):
        raise ValueError("t_grid must be symmetric around 0")
    if m is None:
        m = (len(ts) - 1) // 2
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    if len(ts) < 2 * m + 1:
        raise ValueError(f"order m={m} needs at least {2 * m + 1} grid points, got {len(ts)}")
    degree = 2 * m
    matrix = np.vander(ts, degree + 1, increasing=True)
    condition = float(np.linalg.cond(matrix))
    if not condition < MAX_CONDITION:
        raise IllConditioned(f"fit matrix condition {condition:.3e} >= {MAX_CONDITION:.0e}")
    values = np.array([t_infinity_value(float(t), cfg) for t in ts])
    coefficients, *_ = np.linalg.lstsq(matrix, values, rcond=None)
    return SeriesFit(coefficients=tuple(float(c) for c in coefficients), condition=condition)
