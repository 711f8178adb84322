"""
Brute-force reference values for the lowest nested integrals.

Each integral is regularized with a Gaussian weight exp(-eps * sum x_i^2),
evaluated on a fixed Gauss-Legendre partition of [-X(eps), upper] by nesting
running integrals, and the damping is removed by polynomial extrapolation
to eps = 0. Nothing here shares code with the ODE solvers.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from config import DampingSchedule, ExtrapolationUnstable, QuadConfig
from quad import CumulativeRule

logger = logging.getLogger(__name__)

TAU1_MAX_ABS_X = 10.0


@dataclass(frozen=True)
class OracleResult:
    value: float
    abs_error_estimate: float
    damped: tuple[tuple[float, float], ...]  # (eps, damped value) pairs
    extrapolants: tuple[float, ...]


def _panel_edges(lo: float, hi: float, cfg: QuadConfig) -> np.ndarray:
    # panels of half a local wavelength of cos(x^2), or a quarter for tight tolerances
    fraction = 0.25 if cfg.rel_tol <= 1e-8 else 0.5
    edges = [lo]
    x = lo
    while x < hi:
        x = min(hi, x + min(0.5, fraction * math.pi / (1.0 + abs(x))))
        edges.append(x)
    return np.array(edges)


def _damped_level(n: int, eps: float, upper: float | None, cfg: QuadConfig) -> float:
    """tau_n(upper) with every variable damped by exp(-eps x^2); upper None means +X."""
    cutoff = DampingSchedule.cutoff(eps)
    hi = cutoff if upper is None else min(upper, cutoff)
    rule = CumulativeRule(_panel_edges(-cutoff, hi, cfg))
    x2 = rule.nodes ** 2
    damp = np.exp(-eps * x2)
    down = np.exp(-1j * x2) * damp  # e^{-i y^2} weight for the inner variable
    up = np.exp(1j * x2) * damp

    tau = np.ones_like(x2)
    for level in range(1, n + 1):
        inner = rule.cumulative(down * tau)
        outer = (up * inner).real
        if level == n:
            return rule.integral(outer).real
        tau = rule.cumulative(outer).real
    raise AssertionError("unreachable")


def full_plane_damped(eps: float, cfg: QuadConfig) -> float:
    """Unordered damped integral of cos(x1^2 - x2^2) over the plane."""
    cutoff = DampingSchedule.cutoff(eps)
    rule = CumulativeRule(_panel_edges(-cutoff, cutoff, cfg))
    x2 = rule.nodes ** 2
    gauss = rule.integral(np.exp((1j - eps) * x2))
    return (gauss * gauss.conjugate()).real


def damped_closed_form(eps: float) -> float:
    """Ordered damped I_1 in closed form: pi / (2 sqrt(1 + eps^2))."""
    return math.pi / (2.0 * math.sqrt(1.0 + eps * eps))


def neville(xs: Sequence[float], ys: Sequence[float], at: float = 0.0) -> float:
    """Value at `at` of the interpolating polynomial through (xs, ys)."""
    table = list(ys)
    n = len(xs)
    for k in range(1, n):
        for i in range(n - k):
            table[i] = ((at - xs[i + k]) * table[i] + (xs[i] - at) * table[i + 1]) / (
                xs[i] - xs[i + k]
            )
    return table[0]


def extrapolate(eps: Sequence[float], values: Sequence[float], order: int) -> tuple[float, float, tuple[float, ...]]:
    """
    Extrapolants through growing prefixes of the schedule, using at most
    order + 1 trailing points each. Returns (value, error estimate, sequence).
    """
    sequence = []
    for k in range(len(eps)):
        lo = max(0, k - order)
        sequence.append(neville(eps[lo:k + 1], values[lo:k + 1]))
    if len(sequence) == 1:
        return sequence[0], abs(sequence[0]), tuple(sequence)
    steps = [abs(b - a) for a, b in zip(sequence, sequence[1:])]
    if len(steps) >= 2 and steps[-1] > steps[-2]:
        raise ExtrapolationUnstable(
            f"extrapolants diverge: last steps {steps[-2]:.3e} -> {steps[-1]:.3e}"
        )
    return sequence[-1], steps[-1], tuple(sequence)


def _run(n: int, upper: float | None, sched: DampingSchedule, cfg: QuadConfig) -> OracleResult:
    damped = tuple((eps, _damped_level(n, eps, upper, cfg)) for eps in sched.eps_list)
    for eps, value in damped:
        logger.debug("damped level %d at eps=%g: %.12f", n, eps, value)
    value, err, sequence = extrapolate(
        [e for e, _ in damped], [v for _, v in damped], sched.extrapolation_order
    )
    return OracleResult(value=value, abs_error_estimate=err, damped=damped, extrapolants=sequence)


def direct_I1(sched: DampingSchedule, cfg: QuadConfig) -> OracleResult:
    return _run(1, None, sched, cfg)


def direct_tau1(x: float, sched: DampingSchedule, cfg: QuadConfig) -> OracleResult:
    """tau_1(x) = int_{x1 < x} int_{x2 < x1} cos(x1^2 - x2^2), for |x| <= 10."""
    if abs(x) > TAU1_MAX_ABS_X:
        raise ValueError(f"direct_tau1 needs |x| <= {TAU1_MAX_ABS_X}, got {x}")
    return _run(1, x, sched, cfg)


def direct_I2(sched: DampingSchedule, cfg: QuadConfig) -> OracleResult:
    """Four nested running integrals; the slowest of the oracles."""
    return _run(2, None, sched, cfg)
