"""
One-dimensional quadrature kernels: adaptive Gauss-Kronrod, tanh-sinh for
endpoint singularities, interval doubling for decaying tails, period summation
for oscillatory tails, and a composite Gauss-Legendre rule with running
integrals for nested (iterated) integrals.

All kernels are deterministic pure functions; integrands map a real abscissa
to a real or complex value.
"""

from __future__ import annotations

import heapq
import logging
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial import legendre

from config import NonConvergence, NonFiniteIntegrand, QuadConfig

logger = logging.getLogger(__name__)

Integrand = Callable[[float], complex]

# Gauss-Kronrod 15(7): Kronrod abscissas on [0, 1], Kronrod and Gauss weights.
# Gauss nodes are the odd-indexed Kronrod nodes plus the centre.
_XGK = np.array([
    0.9914553711208126,
    0.9491079123427585,
    0.8648644233597691,
    0.7415311855993944,
    0.5860872354676911,
    0.4058451513773972,
    0.2077849550078985,
    0.0,
])
_WGK = np.array([
    0.02293532201052922,
    0.06309209262997855,
    0.1047900103222502,
    0.1406532597155259,
    0.1690047266392679,
    0.1903505780647854,
    0.2044329400752989,
    0.2094821410847278,
])
_WG = np.array([
    0.0,
    0.1294849661688697,
    0.0,
    0.2797053914892767,
    0.0,
    0.3818300505051189,
    0.0,
    0.4179591836734694,
])

# full symmetric node set: 7 negative, centre, 7 positive
_GK_NODES = np.concatenate([-_XGK[:-1], [0.0], _XGK[-2::-1]])
_GK_WK = np.concatenate([_WGK[:-1], [_WGK[-1]], _WGK[-2::-1]])
_GK_WG = np.concatenate([_WG[:-1], [_WG[-1]], _WG[-2::-1]])

_TANH_SINH_T_MAX = 4.5
_HALF_PI = 0.5 * math.pi


@dataclass(frozen=True)
class QuadResult:
    """Value of one quadrature call with its error estimate and cost."""

    value: complex
    abs_error_estimate: float
    n_evals: int
    converged: bool = True

    def __add__(self, other: "QuadResult") -> "QuadResult":
        return QuadResult(
            value=self.value + other.value,
            abs_error_estimate=self.abs_error_estimate + other.abs_error_estimate,
            n_evals=self.n_evals + other.n_evals,
            converged=self.converged and other.converged,
        )

    def scaled(self, factor: complex) -> "QuadResult":
        return QuadResult(
            value=self.value * factor,
            abs_error_estimate=self.abs_error_estimate * abs(factor),
            n_evals=self.n_evals,
            converged=self.converged,
        )

    @property
    def real(self) -> float:
        return complex(self.value).real

    def require(self) -> "QuadResult":
        """Return self, or raise NonConvergence if the budget ran out."""
        if not self.converged:
            raise NonConvergence(
                f"quadrature did not converge: value={self.value}, "
                f"error estimate={self.abs_error_estimate:.3e}, evals={self.n_evals}"
            )
        return self


def _evaluate(f: Integrand, xs: Sequence[float]) -> np.ndarray:
    values = np.array([f(float(x)) for x in xs], dtype=complex)
    if not np.all(np.isfinite(values)):
        bad = [float(x) for x, v in zip(xs, values) if not np.isfinite(v)]
        raise NonFiniteIntegrand(f"integrand not finite at x={bad[0]!r}")
    return values


def _weighted_sum(weights: np.ndarray, values: np.ndarray) -> complex:
    # real and imaginary parts summed separately so conj(f) integrates to conj(result)
    return complex(float(np.dot(weights, values.real)), float(np.dot(weights, values.imag)))


def gauss_kronrod_panel(f: Integrand, a: float, b: float) -> tuple[complex, float]:
    """Single 15-point Kronrod estimate on [a, b] and |Kronrod - Gauss|."""
    centre = 0.5 * (a + b)
    half = 0.5 * (b - a)
    values = _evaluate(f, centre + half * _GK_NODES)
    kronrod = half * _weighted_sum(_GK_WK, values)
    gauss = half * _weighted_sum(_GK_WG, values)
    return kronrod, abs(kronrod - gauss)


def integrate_adaptive(f: Integrand, a: float, b: float, cfg: QuadConfig) -> QuadResult:
    """
    Globally adaptive Gauss-Kronrod 15(7): repeatedly bisect the panel with the
    largest |K - G| until the summed estimate meets the tolerance.
    """
    if not a < b:
        raise ValueError(f"integrate_adaptive needs a < b, got [{a}, {b}]")

    value, err = gauss_kronrod_panel(f, a, b)
    n_evals = len(_GK_NODES)
    counter = 0
    heap: list[tuple[float, int, float, float, complex]] = [(-err, counter, a, b, value)]
    total, total_err = value, err
    converged = True

    while total_err > cfg.tolerance(total):
        if len(heap) >= cfg.max_subdivisions:
            converged = False
            break
        neg_err, _, left, right, panel_value = heapq.heappop(heap)
        mid = 0.5 * (left + right)
        if not left < mid < right:
            heapq.heappush(heap, (neg_err, counter, left, right, panel_value))
            converged = False
            break
        total -= panel_value
        total_err += neg_err
        for lo, hi in ((left, mid), (mid, right)):
            v, e = gauss_kronrod_panel(f, lo, hi)
            n_evals += len(_GK_NODES)
            counter += 1
            heapq.heappush(heap, (-e, counter, lo, hi, v))
            total += v
            total_err += e

    # re-sum in positional order so the value does not depend on refinement history
    panels = sorted(heap, key=lambda item: item[2])
    value = complex(
        math.fsum(p[4].real for p in panels), math.fsum(p[4].imag for p in panels)
    )
    err = math.fsum(-p[0] for p in panels)
    if not converged:
        logger.warning(
            "Gauss-Kronrod on [%g, %g] stopped at %d panels, error estimate %.3e",
            a, b, len(panels), err,
        )
    return QuadResult(value=value, abs_error_estimate=err, n_evals=n_evals, converged=converged)


def integrate_panels(f: Integrand, edges: Sequence[float], cfg: QuadConfig) -> QuadResult:
    """Sum of integrate_adaptive over consecutive [edges[k], edges[k+1]]."""
    result = None
    for lo, hi in zip(edges, edges[1:]):
        if hi <= lo:
            continue
        part = integrate_adaptive(f, lo, hi, cfg)
        result = part if result is None else result + part
    if result is None:
        raise ValueError("integrate_panels needs at least one non-empty panel")
    return result


def _tanh_sinh_nodes(a: float, b: float, t: float) -> tuple[list[float], float]:
    """Abscissas generated by +t and -t, and their common weight."""
    centre = 0.5 * (a + b)
    half = 0.5 * (b - a)
    if t == 0.0:
        return [centre], half * _HALF_PI
    u = _HALF_PI * math.sinh(t)
    decay = math.exp(-2.0 * u)
    # distance from the nearer endpoint, computed without cancellation
    dist = half * 2.0 * decay / (1.0 + decay)
    weight = half * _HALF_PI * math.cosh(t) * 4.0 * decay / (1.0 + decay) ** 2
    nodes = [x for x in (a + dist, b - dist) if a < x < b]
    return nodes, weight


def integrate_tanh_sinh(f: Integrand, a: float, b: float, cfg: QuadConfig) -> QuadResult:
    """
    Double-exponential quadrature for integrands with integrable endpoint
    singularities. The step starts at h=1 and halves per level; abscissas that
    round onto an endpoint are dropped, so f is never evaluated at a or b.
    """
    if not a < b:
        raise ValueError(f"integrate_tanh_sinh needs a < b, got [{a}, {b}]")

    n_evals = 0

    def level_sum(ts: Sequence[float]) -> complex:
        nonlocal n_evals
        acc_re, acc_im = [], []
        for t in ts:
            nodes, weight = _tanh_sinh_nodes(a, b, t)
            if not nodes:
                continue
            values = _evaluate(f, nodes)
            n_evals += len(nodes)
            acc_re.append(weight * float(values.real.sum()))
            acc_im.append(weight * float(values.imag.sum()))
        return complex(math.fsum(acc_re), math.fsum(acc_im))

    h = 1.0
    n_max = int(_TANH_SINH_T_MAX / h)
    weighted = level_sum([k * h for k in range(0, n_max + 1)])
    estimate = h * weighted
    err = math.inf
    converged = False
    for level in range(1, cfg.max_level + 1):
        h *= 0.5
        n_max = int(_TANH_SINH_T_MAX / h)
        weighted += level_sum([k * h for k in range(1, n_max + 1, 2)])
        new_estimate = h * weighted
        err = abs(new_estimate - estimate)
        estimate = new_estimate
        if level >= 3 and err <= cfg.tolerance(estimate):
            converged = True
            break

    if not converged:
        logger.warning(
            "tanh-sinh on [%g, %g] hit level cap %d, error estimate %.3e",
            a, b, cfg.max_level, err,
        )
    return QuadResult(value=estimate, abs_error_estimate=err, n_evals=max(n_evals, 1),
                      converged=converged)


def integrate_decaying_tail(
    f: Integrand, a: float, cfg: QuadConfig, singular_start: bool = False
) -> QuadResult:
    """
    Integral of a monotonically decaying integrand over [a, inf) by panels
    [a, 2a], [2a, 4a], ... (or [0, 1], [1, 2], ... from a = 0). Stops once a
    panel contributes less than a quarter of the tolerance, then adds the
    geometric estimate of the remaining tail.
    """
    lo = a
    hi = a + max(abs(a), 1.0)
    total: QuadResult | None = None
    previous = None
    last = None
    n_panels = 0
    converged = False

    while n_panels < cfg.max_subdivisions and math.isfinite(hi):
        kernel = integrate_tanh_sinh if (singular_start and n_panels == 0) else integrate_adaptive
        panel = kernel(f, lo, hi, cfg)
        total = panel if total is None else total + panel
        n_panels += 1
        previous, last = last, panel.value
        if n_panels >= 2 and abs(last) < cfg.tolerance(total.value) / 4.0:
            converged = True
            break
        lo, hi = hi, hi + max(abs(hi), 1.0)

    assert total is not None
    remainder = 0.0 + 0.0j
    if previous is not None and abs(previous) > 0.0:
        ratio = abs(last) / abs(previous)
        if ratio < 1.0:
            remainder = last * ratio / (1.0 - ratio)

    if not converged:
        logger.warning("decaying tail from %g not converged after %d panels", a, n_panels)
    return QuadResult(
        value=total.value + remainder,
        abs_error_estimate=total.abs_error_estimate + 0.5 * abs(remainder),
        n_evals=total.n_evals,
        converged=converged and total.converged,
    )


def integrate_oscillatory_decaying(
    g: Integrand, omega: float, cfg: QuadConfig, a: float = 0.0
) -> QuadResult:
    """
    Integral of g(u) * exp(i*omega*u) over [a, inf) for an exponentially
    decaying envelope g, summed one period 2*pi/|omega| at a time. Terminates
    after two consecutive periods below tolerance.
    """
    if omega == 0.0:
        return integrate_decaying_tail(g, a, cfg)

    def integrand(u: float) -> complex:
        return g(u) * complex(math.cos(omega * u), math.sin(omega * u))

    period = 2.0 * math.pi / abs(omega)
    total: QuadResult | None = None
    quiet = 0
    for k in range(cfg.max_periods):
        panel = integrate_adaptive(integrand, a + k * period, a + (k + 1) * period, cfg)
        total = panel if total is None else total + panel
        quiet = quiet + 1 if abs(panel.value) < cfg.tolerance(total.value) else 0
        if quiet == 2:
            return total

    assert total is not None
    logger.warning("oscillatory tail (omega=%g) not converged after %d periods",
                   omega, cfg.max_periods)
    return QuadResult(total.value, total.abs_error_estimate, total.n_evals, converged=False)


class CumulativeRule:
    """
    Composite Gauss-Legendre rule on a fixed panel partition that also yields
    the running integral from the left edge to every node. Nesting running
    integrals level by level evaluates iterated integrals over ordered domains.
    """

    def __init__(self, edges: Sequence[float], order: int = 16):
        edges = np.asarray(edges, dtype=float)
        if edges.ndim != 1 or len(edges) < 2 or np.any(np.diff(edges) <= 0):
            raise ValueError("edges must be a strictly increasing sequence of >= 2 points")
        xi, w = legendre.leggauss(order)
        # S[i, j] = integral over [-1, xi_i] of the j-th Lagrange basis polynomial
        basis = np.linalg.inv(legendre.legvander(xi, order - 1))
        antideriv = legendre.legint(basis, lbnd=-1, axis=0)
        self._s = legendre.legvander(xi, order) @ antideriv
        self._w = w
        self.edges = edges
        self._half = 0.5 * np.diff(edges)
        centre = 0.5 * (edges[1:] + edges[:-1])
        self.nodes = centre[:, None] + self._half[:, None] * xi[None, :]

    @property
    def n_nodes(self) -> int:
        return self.nodes.size

    def integral(self, values: np.ndarray) -> complex:
        """Integral over the whole partition of node values shaped like `nodes`."""
        return complex(np.sum(self._half * (values @ self._w)))

    def cumulative(self, values: np.ndarray) -> np.ndarray:
        """Running integral from edges[0] to each node."""
        within = self._half[:, None] * (values @ self._s.T)
        totals = self._half * (values @ self._w)
        offsets = np.concatenate([[0.0], np.cumsum(totals)[:-1]])
        return offsets[:, None] + within
