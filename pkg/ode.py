"""
Adaptive Dormand-Prince 5(4) integrator with PI step control and quartic
dense output. The fields handled here are small (a handful of components)
and may be real or complex.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from config import MaxStepsExceeded, NonFiniteState, OdeConfig, StepUnderflow

logger = logging.getLogger(__name__)

Field = Callable[[float, np.ndarray], np.ndarray]

_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0])
_A = [
    np.array([]),
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
]
_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84])
# fifth-order minus embedded fourth-order weights, over all seven stages
_E = np.array([-71 / 57600, 0.0, 71 / 16695, -71 / 1920, 17253 / 339200, -22 / 525, 1 / 40])
# dense output: y(x + s h) = y + h * K^T P [s, s^2, s^3, s^4]
_P = np.array(
    [
        [1, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432],
        [0, 0, 0, 0],
        [0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799],
        [0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072],
        [0, 127303824393 / 49829197408, -318862633887 / 49829197408, 701980252875 / 199316789632],
        [0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844],
        [0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423],
    ]
)

_SAFETY = 0.9
_MIN_FACTOR = 0.2
_MAX_FACTOR = 10.0
_ALPHA = 0.7 / 5  # PI gains
_BETA = 0.4 / 5


@dataclass(frozen=True)
class Trajectory:
    """
    Accepted step endpoints and, per step, the quartic interpolation
    coefficients Q (shape: steps x dim x 4) scaled by the step width.
    """

    xs: np.ndarray
    ys: np.ndarray
    coeffs: np.ndarray
    n_evals: int

    @property
    def x_first(self) -> float:
        return float(self.xs[0])

    @property
    def x_last(self) -> float:
        return float(self.xs[-1])

    @property
    def final(self) -> np.ndarray:
        return self.ys[-1]

    @property
    def n_steps(self) -> int:
        return len(self.xs) - 1

    def __call__(self, x: float) -> np.ndarray:
        """Dense state at x in [x_first, x_last]."""
        if not self.x_first <= x <= self.x_last:
            raise ValueError(f"x={x} outside trajectory [{self.x_first}, {self.x_last}]")
        i = int(np.searchsorted(self.xs, x, side="right")) - 1
        if i >= self.n_steps:
            return self.ys[-1].copy()
        x_left = self.xs[i]
        if x == x_left:
            return self.ys[i].copy()
        s = (x - x_left) / (self.xs[i + 1] - x_left)
        powers = np.array([s, s * s, s ** 3, s ** 4])
        return self.ys[i] + self.coeffs[i] @ powers


def _error_norm(err: np.ndarray, y: np.ndarray, y_new: np.ndarray, cfg: OdeConfig) -> float:
    scale = cfg.atol + cfg.rtol * np.maximum(np.abs(y), np.abs(y_new))
    return float(np.sqrt(np.mean(np.abs(err / scale) ** 2)))


def integrate(
    field: Field,
    x0: float,
    y0,
    x1: float,
    cfg: OdeConfig,
    h_limit: Optional[Callable[[float], float]] = None,
) -> Trajectory:
    """
    Integrate y' = field(x, y) from x0 to x1 (x0 < x1).
    `h_limit(x)` optionally caps the step further, e.g. to resolve a local
    oscillation period.
    """
    if not x0 < x1:
        raise ValueError(f"integrate needs x0 < x1, got {x0}, {x1}")
    y = np.atleast_1d(np.array(y0, dtype=complex if np.iscomplexobj(y0) else float))
    dtype = y.dtype

    def evaluate(x: float, state: np.ndarray) -> np.ndarray:
        out = np.asarray(field(x, state), dtype=dtype)
        if not np.all(np.isfinite(out)):
            raise NonFiniteState(f"field returned a non-finite value at x={x}")
        return out

    first_slope = field(x0, y)
    if np.iscomplexobj(first_slope) and dtype != complex:
        y = y.astype(complex)
        dtype = y.dtype
    f = np.asarray(first_slope, dtype=dtype)
    if not np.all(np.isfinite(f)):
        raise NonFiniteState(f"field returned a non-finite value at x={x0}")
    n_evals = 1

    xs, ys, coeffs = [x0], [y.copy()], []
    x = x0
    h = cfg.h_init
    prev_err = 1e-4
    stages = np.empty((7, y.size), dtype=dtype)
    steps = 0

    while x < x1:
        cap = cfg.h_max if h_limit is None else min(cfg.h_max, h_limit(x))
        h = min(h, cap, x1 - x)
        step_rejected = False
        while True:
            if h < cfg.h_min and x + h < x1:
                raise StepUnderflow(f"step {h:.3e} below h_min={cfg.h_min:.3e} at x={x}")
            steps += 1
            if steps > cfg.max_steps:
                raise MaxStepsExceeded(f"more than {cfg.max_steps} steps before x={x1}")

            stages[0] = f
            for i in range(1, 6):
                stages[i] = evaluate(x + _C[i] * h, y + h * (_A[i] @ stages[:i]))
            y_new = y + h * (_B @ stages[:6])
            f_new = evaluate(x + h, y_new)
            stages[6] = f_new
            n_evals += 6
            if not np.all(np.isfinite(y_new)):
                raise NonFiniteState(f"state became non-finite at x={x + h}")

            err = _error_norm(h * (_E @ stages), y, y_new, cfg)
            if err <= 1.0:
                break
            step_rejected = True
            h *= max(_MIN_FACTOR, _SAFETY * err ** -0.2)

        coeffs.append(h * (stages.T @ _P))
        x = x1 if x1 - (x + h) < 1e-15 * max(1.0, abs(x1)) else x + h
        y, f = y_new, f_new
        xs.append(x)
        ys.append(y.copy())

        if err == 0.0:
            factor = _MAX_FACTOR
        else:
            factor = _SAFETY * err ** -_ALPHA * prev_err ** _BETA
            factor = min(_MAX_FACTOR, max(_MIN_FACTOR, factor))
        if step_rejected:
            factor = min(1.0, factor)
        h *= factor
        prev_err = max(err, 1e-4)

    logger.debug("integrated [%g, %g] in %d steps, %d evals", x0, x1, len(xs) - 1, n_evals)
    return Trajectory(
        xs=np.array(xs),
        ys=np.array(ys),
        coeffs=np.array(coeffs),
        n_evals=n_evals,
    )
