"""
Shared configuration records, error types and the config-file loader.

Every tunable of the verification engine lives in a frozen dataclass so a
configuration can be hashed (solver results are cached per config) and echoed
verbatim into reports.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Mapping, Optional

ENV_PREFIX = "LZ_"


# --- errors ---


class VerificationError(Exception):
    """Base class for every failure raised by the engine."""


class ConfigError(VerificationError, ValueError):
    """Invalid configuration value, unknown key or malformed config file."""


class NonConvergence(VerificationError):
    """A quadrature ran out of its subdivision, level or period budget."""


class NonFiniteIntegrand(VerificationError):
    """An integrand returned NaN or infinity."""


class DomainTooSmall(VerificationError):
    """An asymptotic formula was asked for outside its regime."""


class PoleError(VerificationError):
    """Evaluation exactly at a pole (arctan at z = +i or z = -i)."""


class PoleTooClose(VerificationError):
    """A contour abscissa landed inside the exclusion disc around a pole."""


class StepUnderflow(VerificationError):
    """The ODE step size dropped below h_min."""


class MaxStepsExceeded(VerificationError):
    """The ODE integrator used up its step budget."""


class NonFiniteState(VerificationError):
    """The ODE state became NaN or infinite."""


class InitRegime(VerificationError):
    """The integration window is too small for the asymptotic initial data."""


class IllConditioned(VerificationError):
    """A least-squares fit matrix is numerically singular."""


class ExtrapolationUnstable(VerificationError):
    """Successive damping-removal extrapolants diverge."""


# --- config records ---


@dataclass(frozen=True)
class QuadConfig:
    """Tolerances and budgets shared by all quadrature kernels."""

    rel_tol: float = 1e-10
    abs_tol: float = 1e-13
    max_subdivisions: int = 2000
    max_level: int = 10  # tanh-sinh halvings of h=1
    max_periods: int = 1000

    def __post_init__(self) -> None:
        if not self.rel_tol > 0:
            raise ConfigError(f"rel_tol must be > 0, got {self.rel_tol}")
        if not self.abs_tol >= 0:
            raise ConfigError(f"abs_tol must be >= 0, got {self.abs_tol}")
        if self.max_subdivisions < 1:
            raise ConfigError(f"max_subdivisions must be >= 1, got {self.max_subdivisions}")
        if self.max_level < 3:
            raise ConfigError(f"max_level must be >= 3, got {self.max_level}")
        if self.max_periods < 2:
            raise ConfigError(f"max_periods must be >= 2, got {self.max_periods}")

    def tolerance(self, value: complex) -> float:
        """Absolute error target for an integral of the given size."""
        return max(self.abs_tol, self.rel_tol * abs(value))


@dataclass(frozen=True)
class OdeConfig:
    """Step control for the embedded Runge-Kutta integrator."""

    rtol: float = 1e-10
    atol: float = 1e-12
    h_init: float = 1e-3
    h_min: float = 1e-12
    h_max: float = 0.5
    max_steps: int = 2_000_000

    def __post_init__(self) -> None:
        if not (self.rtol > 0 and self.atol > 0):
            raise ConfigError("rtol and atol must be > 0")
        if not 0 < self.h_min <= self.h_init <= self.h_max:
            raise ConfigError(
                f"need 0 < h_min <= h_init <= h_max, got {self.h_min}, {self.h_init}, {self.h_max}"
            )
        if self.max_steps < 1:
            raise ConfigError(f"max_steps must be >= 1, got {self.max_steps}")


@dataclass(frozen=True)
class SolveConfig:
    """Integration window and tolerances for the generating-function solvers."""

    x_min: float = -40.0
    x_max: float = 40.0
    ode: OdeConfig = field(default_factory=OdeConfig)
    quad: QuadConfig = field(default_factory=QuadConfig)
    init_tol: float = 1e-3
    target_tol: float = 1e-6  # requested accuracy of each I_n

    def __post_init__(self) -> None:
        if self.x_max <= self.x_min:
            raise ConfigError(f"x_max ({self.x_max}) must exceed x_min ({self.x_min})")
        if self.x_min > -10:
            raise ConfigError(f"x_min must be <= -10, got {self.x_min}")
        if self.x_max < 10:
            raise ConfigError(f"x_max must be >= 10, got {self.x_max}")
        if not self.init_tol > 0:
            raise ConfigError(f"init_tol must be > 0, got {self.init_tol}")


@dataclass(frozen=True)
class DampingSchedule:
    """Gaussian damping strengths for the brute-force oracle, strongest first."""

    eps_list: tuple[float, ...] = (0.2, 0.1, 0.05, 0.025)
    extrapolation_order: int = 2

    def __post_init__(self) -> None:
        if any(e <= 0 for e in self.eps_list):
            raise ConfigError("damping strengths must be > 0")
        if any(b >= a for a, b in zip(self.eps_list, self.eps_list[1:])):
            raise ConfigError("eps_list must be strictly decreasing")
        if self.extrapolation_order < 0 or len(self.eps_list) < self.extrapolation_order + 1:
            raise ConfigError("eps_list needs at least extrapolation_order + 1 entries")

    @staticmethod
    def cutoff(eps: float) -> float:
        """Half-width X(eps) beyond which the Gaussian weight is negligible."""
        return 6.0 / math.sqrt(eps)


@dataclass(frozen=True)
class SuiteConfig:
    """Everything the identity suite needs, as echoed into the report."""

    solve: SolveConfig = field(default_factory=SolveConfig)
    damping: DampingSchedule = field(default_factory=DampingSchedule)
    tol_scale: float = 1.0
    threads: int = 1
    fast: bool = False

    def __post_init__(self) -> None:
        if not self.tol_scale > 0:
            raise ConfigError(f"tol_scale must be > 0, got {self.tol_scale}")
        if self.threads < 1:
            raise ConfigError(f"threads must be >= 1, got {self.threads}")

    def scaled(self, tol: float) -> float:
        """Apply the suite-wide tolerance factor (factor < 1 loosens)."""
        return tol / self.tol_scale


# --- loading ---

# config key -> (record path, converter)
_KEYS = {
    "x_min": (("solve", "x_min"), float),
    "x_max": (("solve", "x_max"), float),
    "init_tol": (("solve", "init_tol"), float),
    "target_tol": (("solve", "target_tol"), float),
    "ode_rtol": (("solve", "ode", "rtol"), float),
    "ode_atol": (("solve", "ode", "atol"), float),
    "ode_h_init": (("solve", "ode", "h_init"), float),
    "ode_h_min": (("solve", "ode", "h_min"), float),
    "ode_h_max": (("solve", "ode", "h_max"), float),
    "ode_max_steps": (("solve", "ode", "max_steps"), int),
    "quad_rel_tol": (("solve", "quad", "rel_tol"), float),
    "quad_abs_tol": (("solve", "quad", "abs_tol"), float),
    "quad_max_subdivisions": (("solve", "quad", "max_subdivisions"), int),
    "quad_max_level": (("solve", "quad", "max_level"), int),
    "quad_max_periods": (("solve", "quad", "max_periods"), int),
    "tol_scale": (("tol_scale",), float),
    "threads": (("threads",), int),
    "fast": (("fast",), None),
}


def _parse_bool(raw: str) -> bool:
    lowered = raw.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {raw!r}")


def parse_config_text(text: str, source: str = "<config>") -> dict[str, object]:
    """
    Parse flat `key = value` lines. `#` starts a comment; blank lines are ignored.
    Returns typed values keyed by config key.
    """
    values: dict[str, object] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {line!r}")
        key, raw = (part.strip() for part in line.split("=", 1))
        values[key] = _convert(key, raw, f"{source}:{lineno}")
    return values


def _convert(key: str, raw: str, where: str) -> object:
    if key not in _KEYS:
        raise ConfigError(f"{where}: unknown key {key!r}")
    converter = _KEYS[key][1] or _parse_bool
    try:
        return converter(raw)
    except ValueError as e:
        raise ConfigError(f"{where}: bad value for {key!r}: {e}") from e


def load_config(path: Optional[str | Path]) -> dict[str, object]:
    """Read a config file; a missing path argument yields no overrides."""
    if path is None:
        return {}
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as e:
        raise ConfigError(f"cannot read config file {p}: {e}") from e
    return parse_config_text(text, source=str(p))


def env_overrides(environ: Optional[Mapping[str, str]] = None) -> dict[str, object]:
    """Collect `LZ_<KEY>` variables (e.g. LZ_X_MAX=60) from the environment."""
    environ = os.environ if environ is None else environ
    values: dict[str, object] = {}
    for name, raw in environ.items():
        if not name.startswith(ENV_PREFIX):
            continue
        key = name[len(ENV_PREFIX):].lower()
        if key in _KEYS:
            values[key] = _convert(key, raw, f"${name}")
    return values


def build_suite_config(*layers: Mapping[str, object]) -> SuiteConfig:
    """
    Fold override layers (lowest precedence first) onto the defaults.
    Validation happens once, on the assembled records, so that a pair like
    x_min/x_max is checked together.
    """
    merged: dict[str, object] = {}
    for layer in layers:
        merged.update({k: v for k, v in layer.items() if v is not None})

    flat = {k: merged[k] for k in _KEYS if k in merged}
    try:
        ode = {f.name: getattr(OdeConfig(), f.name) for f in fields(OdeConfig)}
        quad = {f.name: getattr(QuadConfig(), f.name) for f in fields(QuadConfig)}
        solve = {f.name: getattr(SolveConfig(), f.name) for f in fields(SolveConfig)}
        suite = {f.name: getattr(SuiteConfig(), f.name) for f in fields(SuiteConfig)}
        for key, value in flat.items():
            path = _KEYS[key][0]
            if path[0] != "solve":
                suite[path[0]] = value
            elif len(path) == 2:
                solve[path[1]] = value
            elif path[1] == "ode":
                ode[path[2]] = value
            else:
                quad[path[2]] = value
        solve["ode"] = OdeConfig(**ode)
        solve["quad"] = QuadConfig(**quad)
        suite["solve"] = SolveConfig(**solve)
        return SuiteConfig(**suite)
    except TypeError as e:
        raise ConfigError(str(e)) from e
