#!/usr/bin/env python3
"""
CLI for the iterated Fresnel-integral verification engine.
Usage: python main.py check [--fast] [--out report.json]
       python main.py eval arctan 0,0.5
       python main.py in-table 6
       python main.py profile 1 --x-min -10 --x-max 10 --step 0.1
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from typing import Callable, Optional, Sequence

# Load .env if present (optional)
try:
    from dotenv import load_dotenv
    load_dotenv()
except ImportError:
    pass

import landau
import oracle
import specfun
from config import (
    ConfigError,
    SolveConfig,
    SuiteConfig,
    VerificationError,
    build_suite_config,
    env_overrides,
    load_config,
)
from landau import IdentityResult

VERSION = "0.1.0"
EVAL_FUNCTIONS = ("U", "V", "P", "Q", "fresnel", "arctan", "T0", "Tinf")
TRANSFORM_S_GRID = (0.5, 1.0, 2.0)
CONTOUR_SETS = ((1.0, 0.0, 1.0), (0.0, 1.0, 1.0), (1.0, 1j, -1.0))

logger = logging.getLogger(__name__)

Check = Callable[[], list[IdentityResult]]


@dataclass
class SuiteReport:
    version: str
    config: dict
    checks: list[tuple[IdentityResult, float]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(result.passed for result, _ in self.checks)

    def to_json(self) -> str:
        rows = []
        for result, seconds in self.checks:
            lhs, rhs = complex(result.lhs), complex(result.rhs)
            rows.append({
                "name": result.name,
                "lhs_re": lhs.real,
                "lhs_im": lhs.imag,
                "rhs_re": rhs.real,
                "rhs_im": rhs.imag,
                "abs_diff": result.abs_diff,
                "tol": result.tol,
                "pass": result.passed,
                "seconds": seconds,
            })
        return json.dumps(
            {"version": self.version, "config": self.config, "checks": rows, "pass": self.passed},
            indent=2,
        )


def _fmt(value: complex) -> str:
    value = complex(value)
    if value.imag == 0.0:
        return f"{value.real:.17g}"
    return f"{value.real:.17g}{value.imag:+.17g}i"


def _solve_config(suite: SuiteConfig) -> SolveConfig:
    return replace(suite.solve, target_tol=suite.scaled(suite.solve.target_tol))


# --- the identity suite ---


def suite_checks(suite: SuiteConfig) -> list[tuple[str, Check]]:
    """All checks in report order. Each entry yields one or more results."""
    cfg = _solve_config(suite)
    quad = cfg.quad
    checks: list[tuple[str, Check]] = []

    def transforms(t: float) -> list[IdentityResult]:
        out = []
        for s in TRANSFORM_S_GRID:
            out.append(landau.even_transform_check(t, s, cfg))
            out.append(landau.truncated_transform_check(t, s, cfg))
        return out

    for t in landau.SUITE_T_GRID:
        checks += [
            (f"T_zero {t}", lambda t=t: [landau.T_zero(t, cfg)]),
            (f"T_infinity {t}", lambda t=t: [landau.T_infinity(t, cfg)]),
            (f"tinf_from_t0 {t}", lambda t=t: [landau.tinf_from_t0_check(t, cfg)]),
            (f"boxed_t0 {t}", lambda t=t: [landau.boxed_t0_check(t, cfg)]),
            (f"alpha_beta {t}", lambda t=t: list(landau.alpha_beta(t, cfg).checks)),
            (f"bracket {t}", lambda t=t: [landau.bracket_residual(t, cfg)]),
            (f"uv_from_pq {t}", lambda t=t: list(landau.uv_from_pq(t, cfg))),
            (f"imaginary_boundary {t}", lambda t=t: [landau.imaginary_boundary_check(t, cfg)]),
            (f"transforms {t}", lambda t=t: transforms(t)),
        ]

    def parity() -> list[IdentityResult]:
        out = []
        for t in (0.5, 1.0, 2.0):
            lhs = landau.T_zero(t, cfg).lhs * landau.T_zero(-t, cfg).lhs
            out.append(IdentityResult.compare(f"parity(t={t:g})", lhs, 1.0, cfg.target_tol))
        return out

    def uv_symmetry() -> list[IdentityResult]:
        return [landau.uv_symmetry_check(t, cfg) for t in (-3.0, -1.0, 1.0, 3.0)]

    def pq_relations() -> list[IdentityResult]:
        tol = suite.scaled(1e-8)
        out = []
        for t in (-3.0, -1.0, 1.0, 2.0):
            p, q = landau.pq_from_uv(t, cfg)
            out.append(IdentityResult.compare(f"pq_from_uv.P(t={t:g})", p, specfun.P(t, quad).value, tol))
            out.append(IdentityResult.compare(f"pq_from_uv.Q(t={t:g})", q, specfun.Q(t, quad).value, tol))
        return out

    def contour_closure() -> list[IdentityResult]:
        out = []
        for a, b, t in CONTOUR_SETS:
            params = specfun.ContourParams(A=a, B=b, t=t, R=1e4, eps=1e-4)
            label = f"(A={_fmt(a)}, B={_fmt(b)}, t={t:g})"
            total = specfun.contour_segments(params, quad).total
            out.append(IdentityResult.compare(f"contour_closure{label}", total, 0.0, suite.scaled(1e-2)))
            gaps = specfun.contour_convergence(params, quad, steps=3)
            # largest growth between refinements; zero when the gaps shrink monotonically
            growth = max(0.0, max(later - earlier for earlier, later in zip(gaps, gaps[1:])))
            out.append(IdentityResult.compare(f"contour_convergence{label}", growth, 0.0, 0.0))
        return out

    def ode4() -> list[IdentityResult]:
        residual = landau.ode4_residual(1.0, cfg)
        tol = 1e-7 * max(residual.max_second_derivative, 1.0)
        return [IdentityResult.compare("ode4_residual(t=1)", residual.max_residual, 0.0, tol)]

    def hierarchy() -> list[IdentityResult]:
        return [
            IdentityResult.compare(f"I_{level.n}", level.value, level.exact,
                                   cfg.target_tol * level.exact)
            for level in landau.solve_tau_hierarchy(6, cfg)
        ]

    def kn() -> list[IdentityResult]:
        i_levels = landau.solve_tau_hierarchy(6, cfg)[:3]
        out = []
        for k_level, i_level in zip(landau.kn_hierarchy(3, cfg), i_levels):
            out.append(IdentityResult.compare(f"K_{k_level.n}", k_level.value, k_level.exact,
                                              max(cfg.target_tol, k_level.abs_error_estimate)))
            combined = k_level.abs_error_estimate + i_level.abs_error_estimate
            out.append(IdentityResult.compare(f"K_{k_level.n}=I_{i_level.n}", k_level.value,
                                              i_level.value, max(suite.scaled(1e-5), combined)))
        return out

    def series() -> list[IdentityResult]:
        fit = landau.series_extract([k / 4.0 for k in range(-4, 5)], cfg)
        return [
            IdentityResult.compare("series.c0", fit.coefficients[0], 1.0, suite.scaled(1e-6)),
            IdentityResult.compare("series.I_1", fit.I[0], landau.closed_form_I(1), suite.scaled(1e-4)),
            IdentityResult.compare("series.I_2", fit.I[1], landau.closed_form_I(2), suite.scaled(1e-3)),
        ]

    def oracle_i1() -> list[IdentityResult]:
        result = oracle.direct_I1(suite.damping, quad)
        return [IdentityResult.compare("oracle.I_1", result.value, landau.closed_form_I(1),
                                       suite.scaled(1e-3))]

    def oracle_tau1() -> list[IdentityResult]:
        direct = oracle.direct_tau1(0.0, suite.damping, quad).value
        solved = float(landau.tau_trajectory(1, cfg)(0.0)[0])
        return [IdentityResult.compare("oracle.tau_1(0)", direct, solved, suite.scaled(1e-3))]

    def oracle_i2() -> list[IdentityResult]:
        result = oracle.direct_I2(suite.damping, quad)
        return [IdentityResult.compare("oracle.I_2", result.value, landau.closed_form_I(2),
                                       suite.scaled(1e-2))]

    checks += [
        ("parity", parity),
        ("uv_symmetry", uv_symmetry),
        ("pq_relations", pq_relations),
        ("contour_closure", contour_closure),
        ("boundary_conditions", lambda: landau.boundary_conditions(1.0, cfg)),
        ("ode4_residual", ode4),
        ("hierarchy", hierarchy),
        ("kn_hierarchy", kn),
        ("series", series),
        ("oracle_I1", oracle_i1),
        ("oracle_tau1", oracle_tau1),
    ]
    if not suite.fast:
        checks.append(("oracle_I2", oracle_i2))
    return checks


def _timed(label: str, check: Check) -> tuple[list[IdentityResult], float]:
    start = time.perf_counter()
    try:
        results = check()
    except VerificationError as e:
        logger.error("check %s raised %s: %s", label, type(e).__name__, e)
        nan = float("nan")
        results = [IdentityResult(name=label, lhs=nan, rhs=nan, abs_diff=nan, tol=0.0, passed=False)]
    return results, time.perf_counter() - start


def run_suite(suite: SuiteConfig) -> SuiteReport:
    report = SuiteReport(version=VERSION, config=asdict(suite))
    checks = suite_checks(suite)
    with ThreadPoolExecutor(max_workers=suite.threads) as pool:
        futures = [pool.submit(_timed, label, check) for label, check in checks]
        for future in futures:
            results, seconds = future.result()
            report.checks += [(result, seconds) for result in results]
    return report


# --- subcommands ---


def cmd_check(args: argparse.Namespace, suite: SuiteConfig) -> int:
    report = run_suite(suite)
    text = report.to_json()
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    failed = [result.name for result, _ in report.checks if not result.passed]
    if failed:
        print(f"{len(failed)} check(s) failed: {', '.join(failed)}", file=sys.stderr)
        return 1
    return 0


def _parse_point(raw: str) -> complex:
    if "," in raw:
        re_part, im_part = raw.split(",", 1)
        return complex(float(re_part), float(im_part))
    return complex(float(raw), 0.0)


def cmd_eval(args: argparse.Namespace, suite: SuiteConfig) -> int:
    name = args.function
    if name not in EVAL_FUNCTIONS:
        print(f"Error: unknown function {name!r}; choose from {', '.join(EVAL_FUNCTIONS)}",
              file=sys.stderr)
        return 2
    try:
        point = _parse_point(args.value)
    except ValueError:
        print(f"Error: cannot parse argument {args.value!r}", file=sys.stderr)
        return 2
    cfg = _solve_config(suite)

    if name == "arctan":
        print(f"value: {_fmt(specfun.arctan_principal(point))}")
        return 0
    if point.imag != 0.0:
        print(f"Error: {name} takes a real argument", file=sys.stderr)
        return 2
    x = point.real
    if name == "fresnel":
        pair = specfun.fresnel(x)
        print(f"value: {_fmt(complex(pair.c, pair.s))}")
        print(f"abs_error_estimate: {pair.abs_error_estimate:.3e}")
    elif name in ("T0", "Tinf"):
        result = landau.T_zero(x, cfg) if name == "T0" else landau.T_infinity(x, cfg)
        print(f"value: {_fmt(result.lhs)}")
        print(f"closed_form_diff: {result.abs_diff:.3e}")
    else:
        special = getattr(specfun, name)(x, cfg.quad)
        print(f"value: {_fmt(special.value)}")
        print(f"abs_error_estimate: {special.abs_error_estimate:.3e}")
    return 0


def _csv_writer():
    return csv.writer(sys.stdout, lineterminator="\n")


def cmd_in_table(args: argparse.Namespace, suite: SuiteConfig) -> int:
    if args.n < 0:
        print("Error: N must be >= 0", file=sys.stderr)
        return 2
    cfg = _solve_config(suite)
    writer = _csv_writer()
    writer.writerow(["n", "I_numeric", "I_closed", "abs_diff", "err_estimate"])
    if args.n == 0:
        return 0
    status = 0
    for level in landau.solve_tau_hierarchy(args.n, cfg):
        diff = abs(level.value - level.exact)
        writer.writerow([
            level.n,
            f"{level.value:.17g}",
            f"{level.exact:.17g}",
            f"{diff:.17g}",
            f"{level.abs_error_estimate:.17g}",
        ])
        if diff > cfg.target_tol * level.exact:
            status = 1
    return status


def cmd_profile(args: argparse.Namespace, suite: SuiteConfig) -> int:
    cfg = _solve_config(suite)
    lo, hi, step = args.x_min, args.x_max, args.step
    if not (step > 0 and lo < hi and cfg.x_min <= lo and hi <= cfg.x_max):
        print(
            f"Error: need step > 0 and {cfg.x_min} <= x_min < x_max <= {cfg.x_max}",
            file=sys.stderr,
        )
        return 2
    trajectory = landau.solve_T(args.t, cfg)
    writer = _csv_writer()
    writer.writerow(["x", "T", "A", "B"])
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    for k in range(count):
        x = min(hi, lo + k * step)
        state = landau.TSystemState.from_vector(trajectory(x))
        writer.writerow([f"{x:.17g}", f"{state.T:.17g}", f"{state.A:.17g}", f"{state.B:.17g}"])
    return 0


# --- entry point ---


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="Numerically verify I_n = 2/n! (pi/4)^n and the identities behind it."
    )
    parser.add_argument("--config", type=str, default=None, help="Flat 'key = value' config file.")
    parser.add_argument("--out", type=str, default=None, help="Write the check report here.")
    parser.add_argument("--fast", action="store_true", default=None, help="Skip slow oracle checks.")
    parser.add_argument("--tol-scale", type=float, default=None,
                        help="Divide every check tolerance by this factor (< 1 loosens).")
    parser.add_argument("--threads", type=int, default=None, help="Worker threads for check.")
    parser.add_argument("-v", "--verbose", action="store_true", help="Debug logging.")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("check", help="Run the identity suite and print a JSON report.")

    ev = sub.add_parser("eval", help="Evaluate one special function or solver value.")
    ev.add_argument("function", type=str, help=f"One of: {', '.join(EVAL_FUNCTIONS)}")
    ev.add_argument("value", type=str, help="Argument; complex as 're,im'.")

    table = sub.add_parser("in-table", help="CSV of I_1..I_N against the closed form.")
    table.add_argument("n", type=int)

    profile = sub.add_parser("profile", help="CSV of (T, A, B) along x for one t.")
    profile.add_argument("t", type=float)
    profile.add_argument("--x-min", type=float, default=-10.0)
    profile.add_argument("--x-max", type=float, default=10.0)
    profile.add_argument("--step", type=float, default=0.1)
    return parser


COMMANDS = {
    "check": cmd_check,
    "eval": cmd_eval,
    "in-table": cmd_in_table,
    "profile": cmd_profile,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )

    try:
        flags = {"tol_scale": args.tol_scale, "threads": args.threads, "fast": args.fast}
        suite = build_suite_config(env_overrides(), load_config(args.config), flags)
    except ConfigError as e:
        print(f"Error: {e}", file=sys.stderr)
        return 2

    try:
        return COMMANDS[args.command](args, suite)
    except ConfigError as e:
        print(f"Error: {e}", file=sys.stderr)
        return 2
    except VerificationError as e:
        print(f"Error: {e}", file=sys.stderr)
        return 1
    except Exception as e:
        print(f"Error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
