"""Command-line front end.

Usage:
    khessian [--config run.json] [--output-dir DIR] [--log-level LEVEL] COMMAND [options]
    khessian --seed-fixtures

Commands: ko, scan, ivp, blowup, dirichlet, large, verify, sweep. Each
writes `<command>.json` plus its CSV data files into the output directory
and prints the JSON to stdout. Exit codes: 0 success, 1 domain or
configuration error, 2 numerical failure, 3 file I/O failure; on error
`error.json` holds the diagnostics.
"""
from dataclasses import dataclass, fields
from typing import Any, Dict, List, NoReturn, Optional, Sequence, Tuple
import argparse
import json
import logging
import math
import os
import sys

import numpy as np

from utils_logging import configure_logging

from . import artifacts, config
from .dirichlet import (
    comparison_check,
    default_grid,
    explicit_subsolution,
    large_solution_sequence,
    laplace_supersolution,
    solve_monotone,
    solve_shooting,
)
from .errors import (
    ArtifactIOError,
    ConfigError,
    DomainError,
    KHessianError,
    NoExplosiveSupersolutionError,
    NumericalFailure,
)
from .estimates import necessity_limit_check, run_estimate_suite
from .hessian_radial import ProblemSpec
from .nonlinearity import (
    Constant,
    ExpMinusOne,
    Nonlinearity,
    PowerLaw,
    ko_classify,
    ko_integral,
    nonlinearity_from_json,
    running_minimum,
    sharpened_ko_scan,
)
from .ode_ivp import StepControls, beta_for_radius, blowup_radius, energy_identity_report, integrate_ivp
from .queue import run_sweep, sweep_cells
from .validation import validate_document

logger = logging.getLogger(__name__)

COMMANDS = ("ko", "scan", "ivp", "blowup", "dirichlet", "large", "verify", "sweep")

REQUIRED: Dict[str, Tuple[str, ...]] = {
    "ko": ("nonlinearity",),
    "scan": ("nonlinearity", "betas"),
    "ivp": ("nonlinearity", "N", "beta"),
    "blowup": ("nonlinearity", "N", "beta"),
    "dirichlet": ("nonlinearity", "N", "R", "c"),
    "large": ("nonlinearity", "N", "R", "n_values"),
    "verify": (),
    "sweep": ("betas", "ps", "ks", "Ns"),
}


@dataclass
class RunConfig:
    command: str
    N: Optional[int] = None
    k: Optional[int] = None
    R: Optional[float] = None
    c: Optional[float] = None
    nonlinearity: Optional[Dict[str, Any]] = None
    beta: Optional[float] = None
    betas: Optional[List[float]] = None
    r_max: float = config.DEFAULT_RMAX
    tol: float = config.KO_TOL
    bracket_tol: float = config.BRACKET_TOL
    method: str = "shooting"
    grid_size: int = 1024
    n_values: Optional[List[float]] = None
    eps: Optional[List[float]] = None
    ps: Optional[List[float]] = None
    ks: Optional[List[int]] = None
    Ns: Optional[List[int]] = None
    trajectory: Optional[str] = None
    metadata: Optional[str] = None
    output_dir: str = config.OUTPUT_DIR
    backend: str = config.SWEEP_BACKEND
    workers: Optional[int] = None
    use_cache: bool = True

    @classmethod
    def from_dict(cls, doc: Dict[str, Any]) -> "RunConfig":
        """Schema-check `doc`, then check the dispatched operation's preconditions.

        Raises:
            ConfigError: naming the offending field.
            DomainError: values outside an operation's domain.
        """
        doc = {k: v for k, v in doc.items() if v is not None}
        validate_document(doc, "run_config.json", _fallback_check)
        cfg = cls(**doc)
        cfg.check()
        return cfg

    @property
    def order(self) -> int:
        if self.k is not None:
            return int(self.k)
        return int((self.nonlinearity or {}).get("k", 1))

    def spec(self) -> ProblemSpec:
        if self.N is None:
            raise ConfigError(f"'{self.command}' needs the dimension N", field="N")
        return ProblemSpec(int(self.N), self.order, self.R, self.c)

    def nl(self) -> Nonlinearity:
        if self.nonlinearity is None:
            raise ConfigError(f"'{self.command}' needs a nonlinearity", field="nonlinearity")
        return nonlinearity_from_json(self.nonlinearity, k=self.order)

    def check(self) -> None:
        for name in REQUIRED[self.command]:
            if getattr(self, name) is None:
                raise ConfigError(f"'{self.command}' needs '{name}'", field=name)
        if self.command == "verify" and self.trajectory is None:
            for name in ("nonlinearity", "N", "beta"):
                if getattr(self, name) is None:
                    raise ConfigError(f"'verify' needs '{name}' or a trajectory file", field=name)
        if self.nonlinearity is not None:
            self.nl()
        if self.N is not None:
            self.spec()
        if self.command == "dirichlet" and self.method != "shooting" and self.grid_size < config.MONOTONE_MIN_GRID:
            raise ConfigError(f"monotone iteration needs grid_size >= {config.MONOTONE_MIN_GRID}", field="grid_size")
        for name in ("betas", "n_values"):
            seq = getattr(self, name)
            if seq is not None and any(b <= a for a, b in zip(seq, seq[1:])):
                raise ConfigError(f"'{name}' must be strictly increasing", field=name)
        if self.eps and any(b >= a for a, b in zip(self.eps, self.eps[1:])):
            raise ConfigError("'eps' must be strictly decreasing", field="eps")

    def to_dict(self) -> Dict[str, Any]:
        return {f.name: getattr(self, f.name) for f in fields(self) if getattr(self, f.name) is not None}


def _fallback_check(doc: Any) -> Optional[str]:
    if not isinstance(doc, dict) or doc.get("command") not in COMMANDS:
        return "command"
    known = {f.name for f in fields(RunConfig)}
    for name in doc:
        if name not in known:
            return name
    return None


def _path(cfg: RunConfig, name: str) -> str:
    return os.path.join(cfg.output_dir, name)


def _cmd_ko(cfg: RunConfig) -> Dict[str, Any]:
    nl = cfg.nl()
    report = ko_integral(nl, cfg.beta or config.KO_CANONICAL_BETA, cfg.tol)
    return {
        "nonlinearity": nl.to_dict(),
        "report": report.to_dict(),
        "classification": ko_classify(nl).value if nl.ko_eligible else None,
        "regularity": "checked" if nl.regularity_checked else "unchecked",
    }


def _cmd_scan(cfg: RunConfig) -> Dict[str, Any]:
    nl = cfg.nl()
    reports = sharpened_ko_scan(nl, cfg.betas or [], cfg.tol)
    mins = running_minimum(reports)
    rows = [
        {"beta": r.beta, "verdict": r.verdict.value, "K_beta": r.value if r.converges else math.inf,
         "error_bound": r.error_bound, "running_min": m}
        for r, m in zip(reports, mins)
    ]
    artifacts.write_csv(_path(cfg, "scan.csv"), ["beta", "verdict", "K_beta", "error_bound", "running_min"], rows)
    return {"nonlinearity": nl.to_dict(), "reports": [r.to_dict() for r in reports], "running_min": mins}


def _cmd_ivp(cfg: RunConfig) -> Dict[str, Any]:
    spec, nl = cfg.spec(), cfg.nl()
    traj = integrate_ivp(spec, nl, float(cfg.beta or 0.0), cfg.r_max)
    csv_path, json_path = artifacts.write_trajectory(traj, cfg.output_dir)
    return {
        "trajectory": traj.metadata(),
        "energy_identity": energy_identity_report(traj).to_dict(),
        "files": [csv_path, json_path],
    }


def _cmd_blowup(cfg: RunConfig) -> Dict[str, Any]:
    spec, nl = cfg.spec(), cfg.nl()
    est = blowup_radius(spec, nl, float(cfg.beta or 0.0), cfg.bracket_tol, cfg.r_max)
    payload: Dict[str, Any] = {"estimate": est.to_dict()}
    if est.trajectory is not None:
        payload["files"] = list(artifacts.write_trajectory(est.trajectory, cfg.output_dir))
    return payload


def _cmd_dirichlet(cfg: RunConfig) -> Dict[str, Any]:
    spec, nl = cfg.spec(), cfg.nl()
    grid = default_grid(spec, cfg.grid_size)
    methods = ["shooting", "monotone"] if cfg.method == "both" else [cfg.method]
    solutions = []
    for method in methods:
        if method == "shooting":
            solutions.append(solve_shooting(spec, nl, grid))
        else:
            sol, trace = solve_monotone(spec, nl, cfg.grid_size, shift=(method == "shifted"))
            sol.info["violations"] = trace.violations
            solutions.append(sol)
    sub = explicit_subsolution(spec, nl).sample(grid)
    artifacts.write_profile(_path(cfg, "subsolution.csv"), sub.r, sub.u)
    try:
        sup = laplace_supersolution(spec, nl, grid, cfg.bracket_tol)
    except NoExplosiveSupersolutionError as e:
        logger.warning("no explosive supersolution: %s", e)
        sup = None
    if sup is not None:
        artifacts.write_profile(_path(cfg, "supersolution.csv"), sup.r, sup.u)
    out: List[Dict[str, Any]] = []
    for sol in solutions:
        artifacts.write_profile(_path(cfg, f"solution_{sol.method}.csv"), sol.r, sol.u)
        entry = sol.to_dict()
        entry["beta_star"] = float(sol.u[0])
        entry["admissible"] = sol.admissible(nl)
        entry["above_subsolution"] = comparison_check(sub, sol.profile())
        entry["below_supersolution"] = comparison_check(sol.profile(), sup) if sup is not None else None
        out.append(entry)
    payload: Dict[str, Any] = {
        "problem": spec.to_dict(),
        "nonlinearity": nl.to_dict(),
        "beta_star": out[0]["beta_star"],
        "solutions": out,
        "supersolution": sup.metadata if sup is not None else None,
    }
    if len(solutions) == 2:
        payload["max_difference"] = float(np.max(np.abs(solutions[0].u - solutions[1].u)))
    return payload


def _cmd_large(cfg: RunConfig) -> Dict[str, Any]:
    spec, nl = cfg.spec(), cfg.nl()
    seq = large_solution_sequence(spec, nl, cfg.n_values or [], default_grid(spec.with_boundary(c=1.0), cfg.grid_size))
    columns = ["r"] + [f"u_{n:g}" for n in seq.n_values] + ["bound"]
    rows = []
    for i, r in enumerate(seq.bound.r.tolist()):
        row: Dict[str, Any] = {"r": r, "bound": float(seq.bound.u[i])}
        for n, sol in zip(seq.n_values, seq.solutions):
            row[f"u_{n:g}"] = float(sol.u[i])
        rows.append(row)
    artifacts.write_csv(_path(cfg, "large.csv"), columns, rows)
    return {"problem": spec.to_dict(), "nonlinearity": nl.to_dict(), "sequence": seq.to_dict()}


def _cmd_verify(cfg: RunConfig) -> Dict[str, Any]:
    if cfg.trajectory is not None:
        spec = cfg.spec() if cfg.N is not None else None
        nl = cfg.nl() if cfg.nonlinearity is not None else None
        traj = artifacts.read_trajectory(cfg.trajectory, cfg.metadata, spec, nl)
    else:
        traj = integrate_ivp(cfg.spec(), cfg.nl(), float(cfg.beta or 0.0), cfg.r_max)
    reports = run_estimate_suite(traj)
    if cfg.eps:
        reports.extend(necessity_limit_check(traj.nl, traj.spec, cfg.eps))
    artifacts.write_verify(_path(cfg, "verify.csv"), [r.row() for r in reports])
    return {
        "trajectory": traj.metadata(),
        "reports": [r.to_dict() for r in reports],
        "all_passed": all(r.passed for r in reports),
    }


def _cmd_sweep(cfg: RunConfig) -> Dict[str, Any]:
    cells = sweep_cells(cfg.betas or [], cfg.ps or [], cfg.ks or [], cfg.Ns or [], cfg.r_max)
    rows = run_sweep(cells, cfg.backend, cfg.workers, cfg.use_cache)
    path = artifacts.write_sweep(_path(cfg, "sweep.csv"), rows)
    return {"cells": len(rows), "file": path, "rows": rows}


HANDLERS = {
    "ko": _cmd_ko,
    "scan": _cmd_scan,
    "ivp": _cmd_ivp,
    "blowup": _cmd_blowup,
    "dirichlet": _cmd_dirichlet,
    "large": _cmd_large,
    "verify": _cmd_verify,
    "sweep": _cmd_sweep,
}


def exit_code(exc: BaseException) -> int:
    if isinstance(exc, ArtifactIOError):
        return 3
    if isinstance(exc, DomainError):
        return 1
    if isinstance(exc, NumericalFailure):
        return 2
    if isinstance(exc, OSError):
        return 3
    raise exc


def _report_error(exc: BaseException, output_dir: Optional[str]) -> int:
    code = exit_code(exc)
    if isinstance(exc, KHessianError):
        payload = exc.to_dict()
    else:
        payload = {"error": "io", "type": type(exc).__name__, "message": str(exc)}
    payload["exit_code"] = code
    logger.error("%s: %s", payload["type"], payload["message"])
    if output_dir:
        try:
            artifacts.write_json(os.path.join(output_dir, "error.json"), payload)
        except ArtifactIOError:
            pass
    sys.stderr.write(artifacts.dumps_json(payload))
    return code


def run(cfg: RunConfig) -> int:
    """Dispatch one command and write its artifacts; returns the exit code."""
    try:
        payload: Dict[str, Any] = {"command": cfg.command}
        payload.update(HANDLERS[cfg.command](cfg))
        payload["config"] = cfg.to_dict()
        artifacts.write_json(_path(cfg, f"{cfg.command}.json"), payload)
    except (KHessianError, OSError) as e:
        return _report_error(e, cfg.output_dir)
    sys.stdout.write(artifacts.dumps_json(payload))
    return 0


def seed_fixtures(path: str = config.FIXTURES_PATH) -> Dict[str, Any]:
    """Recompute the oracle values used by the tests with 10x tighter tolerances."""
    tight = StepControls().tightened(0.1)
    ko_tol = config.KO_TOL / 10
    bracket_tol = config.BRACKET_TOL / 10
    fixtures: Dict[str, Any] = {}
    quadratic = PowerLaw(p=2.0, k=1)
    fixtures["ko_power_p2_k1_beta1"] = ko_integral(quadratic, 1.0, ko_tol).to_dict()
    est = blowup_radius(ProblemSpec(3, 1), quadratic, 1.0, bracket_tol, controls=tight)
    fixtures["blowup_power_p2_k1_N3_beta1"] = est.to_dict()
    linear = solve_shooting(ProblemSpec(3, 1, 1.0, 2.0), PowerLaw(p=1.0, k=1), controls=tight,
                            tol=config.SHOOTING_TOL / 10)
    fixtures["shooting_linear_N3_R1_c2"] = {"beta_star": linear.info["beta_star"], "exact": 2.0 / math.sinh(1.0)}
    const = solve_shooting(ProblemSpec(3, 2, 2.0, 5.0), Constant(c=math.sqrt(3.0), k=2), controls=tight,
                           tol=config.SHOOTING_TOL / 10)
    fixtures["shooting_constant_N3_k2_R2_c5"] = {"beta_star": const.info["beta_star"], "exact": 3.0}
    fixtures["ko_expm1_a1_k1_beta1"] = ko_integral(ExpMinusOne(a=1.0, k=1), 1.0, ko_tol).to_dict()
    second = PowerLaw(p=2.0, k=2)
    for beta in (1.0, 4.0):
        est = blowup_radius(ProblemSpec(4, 2), second, beta, bracket_tol, controls=tight)
        fixtures[f"blowup_power_p2_k2_N4_beta{beta:g}"] = est.to_dict()
    necessity = []
    for eps in (0.5, 0.25, 0.125):
        est = beta_for_radius(ProblemSpec(3, 1), quadratic, eps, side="high", bracket_tol=bracket_tol, controls=tight)
        necessity.append({"eps": eps, "beta": est.beta, "rho_low": est.rho_low, "rho_high": est.rho_high,
                          "K": ko_integral(quadratic, est.beta, ko_tol).value})
    fixtures["necessity_power_p2_k1_N3"] = necessity
    doc = {
        "tolerances": {"ko_tol": ko_tol, "bracket_tol": bracket_tol, "ivp": tight.to_dict()},
        "fixtures": fixtures,
    }
    artifacts.write_json(path, doc)
    logger.info("seeded %d fixtures into %s", len(fixtures), path)
    return doc


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> NoReturn:
        raise ConfigError(f"{self.prog}: {message}")


def _floats(text: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="khessian", description="Boundary blow-up k-Hessian laboratory.")
    parser.add_argument("--config", help="JSON run configuration; command-line flags override it")
    parser.add_argument("--output-dir", dest="output_dir", help="directory for result files")
    parser.add_argument("--log-level", dest="log_level", help="DEBUG, INFO, WARNING or ERROR")
    parser.add_argument("--seed-fixtures", dest="seed_fixtures", action="store_true",
                        help="regenerate test oracle values with tightened tolerances and exit")

    common = _Parser(add_help=False)
    common.add_argument("--nl", dest="nonlinearity", help='nonlinearity JSON, e.g. \'{"kind":"power","p":2}\'')
    common.add_argument("--k", type=int, help="Hessian order")
    common.add_argument("--N", type=int, help="dimension")
    common.add_argument("--R", type=_floats, help="ball radius")
    common.add_argument("--c", type=_floats, help="boundary value")
    common.add_argument("--beta", type=_floats, help="central value / KO lower limit")
    common.add_argument("--rmax", dest="r_max", type=_floats, help="integration limit")
    common.add_argument("--tol", type=_floats, help="quadrature tolerance")
    common.add_argument("--bracket-tol", dest="bracket_tol", type=_floats, help="blow-up bracket width")

    sub = parser.add_subparsers(dest="command")
    sub.add_parser("ko", parents=[common], help="Keller-Osserman integral K(beta) and classification")
    scan = sub.add_parser("scan", parents=[common], help="K(beta) along increasing betas")
    scan.add_argument("--betas", nargs="+", type=_floats)
    sub.add_parser("ivp", parents=[common], help="integrate the radial problem and write the trajectory")
    sub.add_parser("blowup", parents=[common], help="bracket the blow-up radius")
    dirichlet = sub.add_parser("dirichlet", parents=[common], help="finite Dirichlet problem on a ball")
    dirichlet.add_argument("--method", choices=["shooting", "monotone", "shifted", "both"])
    dirichlet.add_argument("--grid-size", dest="grid_size", type=int)
    large = sub.add_parser("large", parents=[common], help="sequence u_n with boundary values n")
    large.add_argument("--n-values", dest="n_values", nargs="+", type=_floats)
    large.add_argument("--grid-size", dest="grid_size", type=int)
    verify = sub.add_parser("verify", parents=[common], help="run the estimate suite on a trajectory")
    verify.add_argument("--trajectory", help="trajectory CSV written by 'ivp'")
    verify.add_argument("--metadata", help="metadata JSON; defaults to the CSV's sidecar")
    verify.add_argument("--eps", nargs="+", type=_floats, help="radii for the necessity check")
    sweep = sub.add_parser("sweep", parents=[common], help="Cartesian grid over (beta, p, k, N)")
    sweep.add_argument("--betas", nargs="+", type=_floats)
    sweep.add_argument("--ps", nargs="+", type=_floats)
    sweep.add_argument("--ks", nargs="+", type=int)
    sweep.add_argument("--Ns", nargs="+", type=int)
    sweep.add_argument("--backend", choices=["auto", "local", "rq"])
    sweep.add_argument("--workers", type=int)
    sweep.add_argument("--no-cache", dest="use_cache", action="store_false", default=None)
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    doc: Dict[str, Any] = {}
    if args.config:
        loaded = artifacts.read_json(args.config)
        if not isinstance(loaded, dict):
            raise ConfigError(f"{args.config} must hold a JSON object", field="config")
        doc.update(loaded)
    known = {f.name for f in fields(RunConfig)}
    for name, value in vars(args).items():
        if name in known and value is not None:
            doc[name] = value
    if isinstance(doc.get("nonlinearity"), str):
        try:
            doc["nonlinearity"] = json.loads(doc["nonlinearity"])
        except ValueError as e:
            raise ConfigError(f"--nl is not valid JSON: {e}", field="nonlinearity")
    if "command" not in doc:
        raise ConfigError("no command given", field="command")
    doc.setdefault("output_dir", config.OUTPUT_DIR)
    return RunConfig.from_dict(doc)


def main(argv: Optional[Sequence[str]] = None) -> int:
    output_dir: Optional[str] = None
    try:
        args = build_parser().parse_args(argv)
        configure_logging(args.log_level)
        output_dir = args.output_dir
        if args.seed_fixtures:
            seed_fixtures()
            if args.command is None:
                return 0
        cfg = config_from_args(args)
    except (KHessianError, OSError) as e:
        return _report_error(e, output_dir)
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
