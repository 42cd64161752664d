"""Verifiers for the quantitative estimates along radial trajectories.

Every check returns an `EstimateReport` whose `slack` is non-negative when
the inequality holds. A report passes when

    slack >= -(quadrature_error + 1e-8 * max(1, |lhs|, |rhs|))

The integral bounds are evaluated in the xi variable with the singular
endpoint machinery of `core.nonlinearity`.
"""
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence
import logging
import math
import warnings

import numpy as np
from scipy import integrate

from . import config
from .errors import DomainError, NonMonotoneError
from .hessian_radial import ProblemSpec
from .nonlinearity import KOClass, Nonlinearity, ko_classify, ko_integral, truncated_ko_integral
from .ode_ivp import BlowupEstimate, RadialTrajectory, beta_for_radius, blowup_radius

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EstimateReport:
    name: str
    lhs: float
    rhs: float
    slack: float
    passed: bool
    quadrature_error: float = 0.0
    metadata: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "inequality": self.name,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "slack": self.slack,
            "pass": self.passed,
            "quadrature_error": self.quadrature_error,
            "metadata": self.metadata,
        }

    def row(self) -> Dict[str, Any]:
        """Flat CSV row: inequality, lhs, rhs, slack, pass."""
        return {"inequality": self.name, "lhs": self.lhs, "rhs": self.rhs, "slack": self.slack, "pass": self.passed}


def make_report(name: str, lhs: float, rhs: float, slack: float, quadrature_error: float = 0.0,
                metadata: Optional[Dict[str, Any]] = None) -> EstimateReport:
    allowance = quadrature_error + config.ESTIMATE_REL_SLACK * max(1.0, abs(lhs), abs(rhs))
    passed = bool(slack >= -allowance)
    report = EstimateReport(name, lhs, rhs, slack, passed, quadrature_error, dict(metadata or {}))
    log = logger.info if passed else logger.warning
    log("%s: lhs=%.12g rhs=%.12g slack=%.3g -> %s", name, lhs, rhs, slack, "pass" if passed else "FAIL")
    return report


def _check_radii(traj: RadialTrajectory, *radii: float) -> None:
    for rho in radii:
        if not 0 < rho < traj.r_end:
            raise DomainError(f"radius {rho} outside the open trajectory range (0, {traj.r_end})")


def _exponent(spec: ProblemSpec) -> float:
    return 1.0 / (spec.k + 1)


def _r_parametrized(traj: RadialTrajectory, rho1: float, rho2: float) -> Dict[str, float]:
    """int_{rho1}^{rho2} C^e xi'(r) / ((k+1)(G(xi(r)) - G(xi(rho1))))^e dr with algebraic endpoint weight."""
    spec, nl = traj.spec, traj.nl
    e = _exponent(spec)
    spline = traj.interpolant()
    deriv = spline.derivative()
    xi1 = float(spline(rho1))
    C = spec.c_radial

    def smooth_part(r: float) -> float:
        h = float(spline(r)) - xi1
        if h <= 0:
            return C ** e * float(deriv(rho1)) ** (1 - e) / ((spec.k + 1) * float(nl.g_power(xi1))) ** e
        return C ** e * float(deriv(r)) * (r - rho1) ** e / ((spec.k + 1) * nl.G_span(xi1, h)) ** e

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        value, err = integrate.quad(smooth_part, rho1, rho2, weight="alg", wvar=(-e, 0.0),
                                    limit=config.QUAD_PIECE_LIMIT)
    return {"r_parametrized": float(value), "r_parametrized_error": float(err)}


def check_lower_bound(traj: RadialTrajectory, rho1: float, rho2: float) -> EstimateReport:
    """Lower bound on the Keller-Osserman-type integral between xi(rho1) and xi(rho2).

    For N != 2k the right side is k/(N-2k) rho1^(2k/(k+1)) [1 - (rho1/rho2)^(N/k-2)];
    for N = 2k it is rho1^(2k/(k+1)) ln(rho2/rho1).
    """
    if not rho1 < rho2:
        raise DomainError(f"need rho1 < rho2, got {rho1} and {rho2}")
    _check_radii(traj, rho1, rho2)
    spec, nl = traj.spec, traj.nl
    N, k = spec.N, spec.k
    e = _exponent(spec)
    xi1, xi2 = traj.xi_at(rho1), traj.xi_at(rho2)
    if not xi2 > xi1:
        raise DomainError("xi must increase strictly between rho1 and rho2")
    value, err = truncated_ko_integral(nl, xi1, xi2)
    scale = spec.c_radial ** e
    lhs = scale * value
    power = rho1 ** (2.0 * k / (k + 1))
    if N == 2 * k:
        name = "lower_bound_log"
        rhs = power * math.log(rho2 / rho1)
    else:
        name = "lower_bound_power"
        rhs = k / (N - 2 * k) * power * (1.0 - (rho1 / rho2) ** (N / k - 2.0))
    metadata: Dict[str, Any] = {"rho1": rho1, "rho2": rho2, "xi1": xi1, "xi2": xi2, "reading": "xi-substituted"}
    metadata.update(_r_parametrized(traj, rho1, rho2))
    return make_report(name, lhs, rhs, lhs - rhs, scale * err, metadata)


def check_pointwise_lower_bound(traj: RadialTrajectory, rho1: float) -> EstimateReport:
    """C^e xi'(r) / ((k+1)(G(xi(r)) - G(xi(rho1))))^e >= (rho1/r)^(N/k-1) rho1^((k-1)/(k+1)) for r > rho1."""
    _check_radii(traj, rho1)
    spec, nl = traj.spec, traj.nl
    k, q, e = spec.k, spec.flux_exponent, _exponent(spec)
    xi1 = traj.xi_at(rho1)
    mask = (traj.r > rho1) & (traj.xi > xi1)
    if not np.any(mask):
        raise DomainError(f"no grid points beyond rho1 = {rho1} with xi above xi(rho1)")
    worst = None
    for r, xi, xip in zip(traj.r[mask], traj.xi[mask], traj.xip[mask]):
        dG = nl.G_span(xi1, xi - xi1)
        lhs = spec.c_radial ** e * xip / ((k + 1) * dG) ** e
        rhs = (rho1 / r) ** q * rho1 ** ((k - 1.0) / (k + 1))
        rel = (lhs - rhs) / max(1.0, abs(lhs), abs(rhs))
        if worst is None or rel < worst[0]:
            worst = (rel, float(lhs), float(rhs), float(r))
    assert worst is not None
    _, lhs, rhs, r_worst = worst
    return make_report("pointwise_lower_bound", lhs, rhs, lhs - rhs, 0.0, {"rho1": rho1, "r": r_worst})


def check_growth_bound(traj: RadialTrajectory) -> EstimateReport:
    """r^q xi'(r) <= ((k+1)/C)^e G(xi(r))^e r^(N/k - 2/(k+1)) at every grid point r > 0.

    Reports the worst relative violation when there is one and otherwise the
    point with the largest ratio lhs/rhs. The origin, where both sides
    vanish, is skipped.
    """
    spec, nl = traj.spec, traj.nl
    N, k, q, e = spec.N, spec.k, spec.flux_exponent, _exponent(spec)
    if not traj.from_origin:
        raise DomainError("growth bound needs a trajectory starting at the origin")
    factor = ((k + 1) / spec.c_radial) ** e
    G = np.array([nl.G(x) for x in traj.xi])
    lhs = np.power(traj.r, q) * np.maximum(traj.xip, 0.0)
    rhs = factor * np.power(G, e) * np.power(traj.r, N / k - 2.0 * e)
    rel = (rhs - lhs) / np.maximum(1.0, np.maximum(np.abs(lhs), np.abs(rhs)))
    inner = np.flatnonzero((traj.r > 0) & (rhs > 0))
    if inner.size == 0:
        raise DomainError("growth bound needs grid points with r > 0 and G(xi) > 0")
    ratio = lhs[inner] / rhs[inner]
    bad = rel[inner] < -config.ESTIMATE_REL_SLACK
    i = int(inner[np.argmin(rel[inner])] if np.any(bad) else inner[np.argmax(ratio)])
    return make_report(
        "growth_bound", float(lhs[i]), float(rhs[i]), float(rhs[i] - lhs[i]), 0.0,
        {"r": float(traj.r[i]), "ratio": float(np.max(ratio)), "points": len(traj),
         "violations": int(np.count_nonzero(rel < -config.ESTIMATE_REL_SLACK))},
    )


def remaining_radius_rhs(spec: ProblemSpec, rho: float) -> float:
    """C^(-1/(k+1)) (k+1)/(2k) rho^(2k/(k+1))."""
    k = spec.k
    return spec.c_radial ** (-_exponent(spec)) * (k + 1) / (2.0 * k) * rho ** (2.0 * k / (k + 1))


def check_remaining_radius_bound(traj: RadialTrajectory, rho: float) -> EstimateReport:
    """int_{xi(0)}^{xi(rho)} dt / ((k+1)(G(t) - G(xi(0))))^(1/(k+1)) against its radius bound."""
    if not traj.from_origin:
        raise DomainError("remaining-radius bound needs a trajectory starting at the origin")
    _check_radii(traj, rho)
    spec, nl = traj.spec, traj.nl
    beta = float(traj.xi[0])
    xi_rho = traj.xi_at(rho)
    if not xi_rho > beta:
        raise DomainError("xi must increase strictly on (0, rho]")
    lhs, err = truncated_ko_integral(nl, beta, xi_rho)
    rhs = remaining_radius_rhs(spec, rho)
    return make_report("remaining_radius_bound", lhs, rhs, rhs - lhs, err, {"rho": rho, "xi_rho": xi_rho})


def run_estimate_suite(traj: RadialTrajectory) -> List[EstimateReport]:
    """All trajectory verifiers at rho1 = r_end/4, rho2 = r_end/2 and rho = 0.9 r_end."""
    r_end = traj.r_end
    rho1, rho2 = 0.25 * r_end, 0.5 * r_end
    return [
        check_lower_bound(traj, rho1, rho2),
        check_pointwise_lower_bound(traj, rho1),
        check_growth_bound(traj),
        check_remaining_radius_bound(traj, 0.9 * r_end),
    ]


def necessity_limit_check(nl: Nonlinearity, spec: ProblemSpec, eps_sequence: Sequence[float]) -> List[EstimateReport]:
    """K(beta_n) <= C^(-1/(k+1)) (k+1)/(2k) rho(beta_n)^(2k/(k+1)) where rho(beta_n) ~ eps_n.

    beta_n is located by bisection so that the upper edge of the blow-up
    bracket sits at eps_n; the bound is evaluated at that upper edge.

    Raises:
        DomainError: the Keller-Osserman condition fails or eps_sequence is not decreasing.
    """
    if nl.k != spec.k:
        nl = nl.with_order(spec.k)
    eps = [float(x) for x in eps_sequence]
    if not eps or any(x <= 0 for x in eps) or any(b >= a for a, b in zip(eps, eps[1:])):
        raise DomainError("eps_sequence must be positive and strictly decreasing")
    if ko_classify(nl) is not KOClass.HOLDS:
        raise DomainError("Keller-Osserman condition fails; no explosive solutions of small radius exist")
    reports = []
    for x in eps:
        est = beta_for_radius(spec, nl, x, side="high")
        K = ko_integral(nl, est.beta)
        rhs = remaining_radius_rhs(spec, est.rho_high)
        reports.append(make_report(
            "necessity_limit", float(K.value), rhs, rhs - float(K.value), float(K.error_bound),
            {"eps": x, "beta": est.beta, "rho_low": est.rho_low, "rho_high": est.rho_high},
        ))
    return reports


def radius_infimum_scan(spec: ProblemSpec, nl: Nonlinearity, betas: Sequence[float]) -> List[BlowupEstimate]:
    """Blow-up radii along increasing betas; they decrease toward 0 when the condition holds.

    Raises:
        NonMonotoneError: a larger beta produced a bracket entirely above a smaller beta's.
    """
    betas = [float(b) for b in betas]
    if not betas or any(b <= 0 for b in betas) or any(b2 <= b1 for b1, b2 in zip(betas, betas[1:])):
        raise DomainError("betas must be positive and strictly increasing")
    out = [blowup_radius(spec, nl, b) for b in betas]
    for a, b in zip(out, out[1:]):
        if a.blows_up and b.blows_up and b.rho_low > a.rho_high:
            raise NonMonotoneError(
                "blow-up radius increased along the beta scan",
                partial=[a.to_dict(), b.to_dict()], diagnostics={"pair": [a.beta, b.beta]},
            )
    return out
