"""Radial initial-value problem for sigma_k^{1/k}(D^2 u) = g(u).

A radial solution u(x) = xi(|x|) with xi(0) = beta, xi'(0) = 0 satisfies

    C (xi'/r)^(k-1) xi'' + C (N-k)/k (xi'/r)^k = g^k(xi),   C = C(N-1, k-1).

Integration starts at a small r0 from the two-term Taylor expansion and
steps scipy's DOP853 pair manually so every accepted step can be checked
and the state can switch representation. Two extra components carry
integrator-accurate flux integrals for the energy identity

    [(r^q xi')^(k+1)]' = (k+1)/C g^k(xi) r^m xi',   q = N/k - 1,  m = N + N/k - 2.

Once xi' is large the slope is recovered from the energy E = (r^q xi')^(k+1)
instead of being integrated directly.
"""
from dataclasses import dataclass, field, replace
from enum import Enum
from functools import cached_property
from typing import Any, Dict, List, Optional, Sequence, Tuple
import logging
import math

import numpy as np
from scipy.integrate import DOP853, cumulative_simpson
from scipy.interpolate import CubicHermiteSpline
from scipy.optimize import brentq

from . import config
from .errors import (
    BracketingFailure,
    BudgetExceededError,
    DegenerateSlopeError,
    DomainError,
    NonMonotoneError,
)
from .hessian_radial import ProblemSpec
from .nonlinearity import Nonlinearity, shifted_ko_integral

logger = logging.getLogger(__name__)


class Termination(str, Enum):
    REACHED_RMAX = "reached_rmax"
    BLOWUP_DETECTED = "blowup_detected"
    STEP_UNDERFLOW = "step_underflow"


@dataclass(frozen=True)
class StepControls:
    """Tolerances and limits for one integration. r0 and max_step default to fractions of the length scale."""

    abs_tol: float = config.IVP_ABS_TOL
    rel_tol: float = config.IVP_REL_TOL
    max_steps: int = config.IVP_MAX_STEPS
    r0: Optional[float] = None
    max_step: Optional[float] = None
    threshold: float = config.BLOWUP_THRESHOLD
    switch: float = config.DIVERGENCE_SWITCH

    def resolved(self, spec: ProblemSpec) -> "StepControls":
        return replace(
            self,
            r0=self.r0 if self.r0 is not None else config.IVP_SERIES_START * spec.length,
            max_step=self.max_step if self.max_step is not None else config.IVP_MAX_STEP_FRACTION * spec.length,
        )

    def tightened(self, factor: float = 0.1) -> "StepControls":
        """Tighter tolerances and a higher blow-up threshold for bracket refinement."""
        return replace(
            self,
            abs_tol=max(self.abs_tol * factor, 1e-16),
            rel_tol=max(self.rel_tol * factor, 1e-13),
            threshold=self.threshold * 100.0,
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "abs_tol": self.abs_tol,
            "rel_tol": self.rel_tol,
            "max_steps": self.max_steps,
            "r0": self.r0,
            "max_step": self.max_step,
            "threshold": self.threshold,
            "switch": self.switch,
        }


@dataclass(frozen=True)
class RadialTrajectory:
    """Sampled radial profile with integrator metadata.

    `flux` and `moment` are the integrator-carried integrals
    Q(r) = int (k+1)/C g^k(xi) s^m xi' ds and P(r) = int G(xi) s^(m-1) ds;
    `G_xi` is G(xi(r)) carried the same way. They are absent for
    trajectories read back from files.
    """

    r: np.ndarray
    xi: np.ndarray
    xip: np.ndarray
    spec: ProblemSpec
    nl: Nonlinearity
    beta: float
    termination: Termination
    controls: StepControls = field(default_factory=StepControls)
    flux: Optional[np.ndarray] = None
    moment: Optional[np.ndarray] = None
    G_xi: Optional[np.ndarray] = None
    steps: int = 0
    message: str = ""

    def __post_init__(self) -> None:
        for name in ("r", "xi", "xip"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        if not (self.r.shape == self.xi.shape == self.xip.shape) or self.r.ndim != 1:
            raise DomainError("trajectory arrays r, xi, xip must be 1-D with equal length")

    def __len__(self) -> int:
        return int(self.r.size)

    @property
    def r_end(self) -> float:
        return float(self.r[-1])

    @property
    def from_origin(self) -> bool:
        return bool(self.r.size and self.r[0] == 0.0)

    def energy(self) -> np.ndarray:
        """E(r) = (r^q xi'(r))^(k+1)."""
        q = self.spec.flux_exponent
        with np.errstate(over="ignore"):
            return np.power(np.power(self.r, q) * np.maximum(self.xip, 0.0), self.spec.k + 1)

    @cached_property
    def _spline(self) -> CubicHermiteSpline:
        return CubicHermiteSpline(self.r, self.xi, self.xip)

    def interpolant(self) -> CubicHermiteSpline:
        return self._spline

    def xi_at(self, radius: float) -> float:
        if not self.r[0] <= radius <= self.r[-1]:
            raise DomainError(f"radius {radius} outside the trajectory range [{self.r[0]}, {self.r[-1]}]")
        return float(self.interpolant()(radius))

    def xip_at(self, radius: float) -> float:
        if not self.r[0] <= radius <= self.r[-1]:
            raise DomainError(f"radius {radius} outside the trajectory range [{self.r[0]}, {self.r[-1]}]")
        return float(self.interpolant().derivative()(radius))

    def metadata(self) -> Dict[str, Any]:
        return {
            "spec": self.spec.to_dict(),
            "nonlinearity": self.nl.to_dict(),
            "beta": self.beta,
            "termination": self.termination.value,
            "controls": self.controls.to_dict(),
            "points": len(self),
            "steps": self.steps,
            "r_end": self.r_end,
            "message": self.message,
        }

    def to_dict(self) -> Dict[str, Any]:
        d = self.metadata()
        d.update({"r": self.r.tolist(), "xi": self.xi.tolist(), "xip": self.xip.tolist()})
        return d


def _second_derivative(r: float, w: float, gk: float, spec: ProblemSpec) -> float:
    N, k = spec.N, spec.k
    if k == 1:
        return gk - (N - 1) * w / r
    if w <= 0:
        raise DegenerateSlopeError(
            "xi' vanishes at r > 0 with k > 1; start from series_start instead",
            diagnostics={"r": r, "xip": w, "k": k},
        )
    v = w / r
    return (gk / spec.c_radial - (N - k) / k * v ** k) * v ** (1 - k)


def ivp_rhs(r: float, xi: float, xip: float, spec: ProblemSpec, nl: Nonlinearity) -> float:
    """xi''(r) solved from the radial equation.

    Raises:
        DomainError: r <= 0.
        DegenerateSlopeError: xi' = 0 at r > 0 with k > 1.
    """
    if not r > 0:
        raise DomainError("the radial equation is singular at r = 0; use series_start")
    if xip < -config.SLOPE_CLAMP:
        raise DomainError(f"xi' must be non-negative, got {xip}")
    return _second_derivative(r, max(xip, 0.0), float(nl.g_power(xi)), spec)


def origin_curvature(spec: ProblemSpec, nl: Nonlinearity, beta: float) -> float:
    """xi''(0) = C(N, k)^(-1/k) g(beta), forced by sigma_k = C(N, k) xi''(0)^k at the origin."""
    if not beta > 0:
        raise DomainError(f"central value beta must be positive, got {beta}")
    g_beta = float(nl.g(beta))
    if not g_beta > 0:
        raise DomainError(f"g(beta) must be positive, got g({beta}) = {g_beta}")
    return spec.c_nk ** (-1.0 / spec.k) * g_beta


def series_start(spec: ProblemSpec, nl: Nonlinearity, beta: float, r0: Optional[float] = None) -> Tuple[float, float]:
    """Two-term Taylor start (xi(r0), xi'(r0))."""
    if r0 is None:
        r0 = config.IVP_SERIES_START * spec.length
    a = origin_curvature(spec, nl, beta)
    return beta + 0.5 * a * r0 * r0, a * r0


class _Overflow(Exception):
    pass


class _RadialSystem:
    """Right-hand sides for the slope form [xi, w, G, Q, P] and the energy form [xi, E, G, Q, P]."""

    def __init__(self, spec: ProblemSpec, nl: Nonlinearity):
        self.spec = spec
        self.nl = nl
        self.k = spec.k
        self.C = spec.c_radial
        self.q = spec.flux_exponent
        self.m = spec.weight_exponent

    def _gk(self, xi: float) -> float:
        gk = float(self.nl.g_power(xi))
        if not math.isfinite(gk):
            raise _Overflow()
        return gk

    def _common(self, r: float, xi: float, w: float, gamma: float, gk: float) -> Tuple[float, float, float]:
        flux = (self.k + 1) / self.C * gk * r ** self.m * w
        return gk * w, flux, gamma * r ** (self.m - 1)

    def slope(self, r: float, y: np.ndarray) -> np.ndarray:
        xi, w, gamma = y[0], max(y[1], 0.0), y[2]
        gk = self._gk(xi)
        wp = _second_derivative(r, w, gk, self.spec)
        out = np.array([w, wp, *self._common(r, xi, w, gamma, gk)])
        if not np.all(np.isfinite(out)):
            raise _Overflow()
        return out

    def energy(self, r: float, y: np.ndarray) -> np.ndarray:
        xi, E, gamma = y[0], max(y[1], 0.0), y[2]
        w = self.slope_from_energy(r, E)
        gk = self._gk(xi)
        dgamma, flux, dmoment = self._common(r, xi, w, gamma, gk)
        out = np.array([w, flux, dgamma, flux, dmoment])
        if not np.all(np.isfinite(out)):
            raise _Overflow()
        return out

    def slope_from_energy(self, r: Any, E: Any) -> Any:
        return np.power(np.maximum(E, 0.0), 1.0 / (self.k + 1)) / np.power(r, self.q)

    def energy_from_slope(self, r: float, w: float) -> float:
        return (r ** self.q * max(w, 0.0)) ** (self.k + 1)


class _Recorder:
    def __init__(self) -> None:
        self.rows: List[Tuple[float, float, float, float, float, float]] = []

    def add(self, r: float, xi: float, w: float, gamma: float, Q: float, P: float) -> None:
        self.rows.append((r, xi, w, gamma, Q, P))

    def build(self, spec: ProblemSpec, nl: Nonlinearity, beta: float, controls: StepControls,
              termination: Termination, steps: int, message: str) -> RadialTrajectory:
        arr = np.asarray(self.rows, dtype=float).reshape(-1, 6)
        return RadialTrajectory(
            r=arr[:, 0], xi=arr[:, 1], xip=arr[:, 2], spec=spec, nl=nl, beta=beta,
            termination=termination, controls=controls, flux=arr[:, 4], moment=arr[:, 5],
            G_xi=arr[:, 3], steps=steps, message=message,
        )


def integrate_ivp(
    spec: ProblemSpec,
    nl: Nonlinearity,
    beta: float,
    r_max: float,
    controls: Optional[StepControls] = None,
    r_eval: Optional[Sequence[float]] = None,
) -> RadialTrajectory:
    """Integrate the radial problem from xi(0) = beta, xi'(0) = 0.

    Args:
        spec: Dimension and Hessian order (R only sets the length scale).
        nl: Nonlinearity paired with spec.k.
        beta: Central value, > 0.
        r_max: Outer radius.
        controls: Step controls; defaults from `core.config`.
        r_eval: Optional increasing radii to sample from the dense output.
            Without it the accepted steps are recorded.

    Returns:
        RadialTrajectory ending at r_max, at the first point where xi or xi'
        exceeds the threshold, or where the step size underflowed.

    Raises:
        BudgetExceededError: more than max_steps steps; partial trajectory attached.
        DegenerateSlopeError: a flat step (xi' = 0 at r > 0 with k > 1).
        NonMonotoneError: an accepted step with xi' < 0 beyond the clamp.
    """
    if not r_max > 0:
        raise DomainError(f"r_max must be positive, got {r_max}")
    if nl.k != spec.k:
        nl = nl.with_order(spec.k)
    ctl = (controls or StepControls()).resolved(spec)
    assert ctl.r0 is not None and ctl.max_step is not None
    r0 = ctl.r0
    if r0 >= r_max:
        raise DomainError(f"r_max = {r_max} must exceed the series start r0 = {r0}")
    system = _RadialSystem(spec, nl)
    a = origin_curvature(spec, nl, beta)
    xi0, w0 = series_start(spec, nl, beta, r0)
    G_beta = nl.G(beta)
    gk_beta = float(nl.g_power(beta))
    m = system.m
    E0 = system.energy_from_slope(r0, w0)
    P0 = G_beta * r0 ** m / m + gk_beta * a * r0 ** (m + 2) / (2.0 * (m + 2))

    samples: Optional[np.ndarray] = None
    if r_eval is not None:
        samples = np.asarray(r_eval, dtype=float)
        if samples.ndim != 1 or np.any(np.diff(samples) <= 0) or np.any(samples < 0):
            raise DomainError("r_eval must be a strictly increasing sequence of non-negative radii")
        if samples[0] > 0:
            samples = np.concatenate([[0.0], samples])
    rec = _Recorder()
    cursor = 0

    def emit_series(upto: float) -> int:
        i = cursor
        while samples is not None and i < samples.size and samples[i] <= upto:
            s = samples[i]
            xi_s = beta + 0.5 * a * s * s
            P_s = G_beta * s ** m / m + gk_beta * a * s ** (m + 2) / (2.0 * (m + 2)) if s > 0 else 0.0
            rec.add(s, xi_s, a * s, nl.G(xi_s), system.energy_from_slope(s, a * s), P_s)
            i += 1
        return i

    if samples is None:
        rec.add(0.0, beta, 0.0, G_beta, 0.0, 0.0)
        rec.add(r0, xi0, w0, nl.G(xi0), E0, P0)
    else:
        cursor = emit_series(r0)

    y = np.array([xi0, w0, nl.G(xi0), E0, P0])
    energy_form = False
    solver = DOP853(system.slope, r0, y, r_max, max_step=ctl.max_step, rtol=ctl.rel_tol, atol=ctl.abs_tol)
    steps = 0
    termination = Termination.REACHED_RMAX
    message = ""
    last = (r0, y.copy(), energy_form)

    def unpack(r: Any, state: np.ndarray, in_energy: bool) -> Tuple[Any, Any, Any, Any, Any]:
        # state rows: xi, (w or E), G, Q, P
        w = system.slope_from_energy(r, state[1]) if in_energy else state[1]
        return state[0], w, state[2], state[3], state[4]

    def partial(msg: str) -> RadialTrajectory:
        return rec.build(spec, nl, beta, ctl, termination, steps, msg)

    while True:
        try:
            status = solver.step()
        except _Overflow:
            termination = Termination.BLOWUP_DETECTED
            message = "right-hand side overflowed"
            break
        except DegenerateSlopeError as e:
            raise DegenerateSlopeError(e.message, partial=partial(e.message), diagnostics=e.diagnostics)
        if status is not None and solver.status == "failed":
            termination = Termination.STEP_UNDERFLOW
            message = str(status)
            break
        steps += 1
        t = solver.t
        xi_t, w_t, gamma_t, Q_t, P_t = unpack(t, solver.y, energy_form)
        if w_t < 0:
            if w_t < -config.SLOPE_CLAMP:
                raise NonMonotoneError(
                    f"xi' became negative at r = {t:g}",
                    partial=partial("negative slope"),
                    diagnostics={"r": t, "xip": float(w_t)},
                )
            w_t = 0.0
        if xi_t < last[1][0] - config.SLOPE_CLAMP * max(1.0, abs(xi_t)):
            raise NonMonotoneError(
                f"xi decreased at r = {t:g}", partial=partial("decreasing profile"),
                diagnostics={"r": t, "xi": float(xi_t), "previous": float(last[1][0])},
            )
        if samples is None:
            rec.add(t, xi_t, w_t, gamma_t, Q_t, P_t)
        else:
            dense = solver.dense_output()
            while cursor < samples.size and samples[cursor] <= t:
                s = samples[cursor]
                rec.add(s, *unpack(s, dense(s), energy_form))
                cursor += 1
        last = (t, solver.y.copy(), energy_form)
        if xi_t > ctl.threshold or w_t > ctl.threshold:
            termination = Termination.BLOWUP_DETECTED
            message = f"threshold {ctl.threshold:g} crossed at r = {t:.17g}"
            if samples is not None and (not rec.rows or t > rec.rows[-1][0]):
                rec.add(t, xi_t, w_t, gamma_t, Q_t, P_t)
            break
        if solver.status == "finished":
            termination = Termination.REACHED_RMAX
            break
        if steps >= ctl.max_steps:
            raise BudgetExceededError(
                f"integration exceeded {ctl.max_steps} steps", partial=partial("step budget exhausted"),
                diagnostics={"r": t, "beta": beta},
            )
        if not energy_form and w_t > ctl.switch:
            energy_form = True
            state = solver.y.copy()
            state[1] = system.energy_from_slope(t, w_t)
            logger.debug("switching to energy form at r=%.17g (xi'=%g)", t, w_t)
            first_step = min(solver.step_size or ctl.max_step, r_max - t)
            solver = DOP853(system.energy, t, state, r_max, max_step=ctl.max_step,
                            rtol=ctl.rel_tol, atol=ctl.abs_tol, first_step=first_step)

    r_last, y_last, in_energy = last
    if termination is not Termination.REACHED_RMAX and (not rec.rows or r_last > rec.rows[-1][0]):
        # the bracket and the partial result start from the last accepted state
        rec.add(r_last, *unpack(r_last, y_last, in_energy))
    traj = rec.build(spec, nl, beta, ctl, termination, steps, message)
    logger.info(
        "integrated beta=%g N=%d k=%d: %s at r=%.12g after %d steps",
        beta, spec.N, spec.k, termination.value, traj.r_end, steps,
    )
    return traj


@dataclass(frozen=True)
class EnergyReport:
    differential: float
    integrated: Optional[float]
    scale: float
    source: str

    @property
    def worst(self) -> float:
        return max(self.differential, self.integrated or 0.0)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "differential": self.differential,
            "integrated": self.integrated,
            "scale": self.scale,
            "relative": self.worst / self.scale,
            "source": self.source,
        }


def energy_identity_report(traj: RadialTrajectory) -> EnergyReport:
    """Residuals of the energy identity in differential and integrated-from-zero form.

    The differential residual is max_i |E_i - E_1 - int_{r_1}^{r_i} flux|
    over points with r > 0. The integrated residual compares E with
    (k+1)/C [G(xi) r^m - m int_0^r G(xi) s^(m-1) ds] and needs a trajectory
    starting at the origin. Integrals come from the integrator when it
    carried them, otherwise from Simpson's rule on the stored grid.
    """
    if len(traj) < 3:
        raise DomainError("energy identity needs at least 3 trajectory points")
    spec, nl = traj.spec, traj.nl
    k, C, m = spec.k, spec.c_radial, spec.weight_exponent
    E = traj.energy()
    pos = traj.r > 0
    if np.count_nonzero(pos) < 2:
        raise DomainError("energy identity needs at least 2 points with r > 0")
    r = traj.r
    if traj.flux is not None and traj.moment is not None:
        source = "integrator"
        Q = traj.flux
        P = traj.moment
        G = traj.G_xi if traj.G_xi is not None else np.array([nl.G(x) for x in traj.xi])
    else:
        source = "grid"
        gk = np.asarray(nl.g_power(traj.xi), dtype=float)
        F = (k + 1) / C * gk * np.power(r, m) * traj.xip
        G = np.array([nl.G(x) for x in traj.xi])
        Q = np.full_like(r, np.nan)
        Q[pos] = cumulative_simpson(F[pos], x=r[pos], initial=0.0)
        P = cumulative_simpson(G * np.power(r, m - 1), x=r, initial=0.0) if traj.from_origin else None
    first = int(np.argmax(pos))
    Ep, Qp = E[pos], Q[pos]
    differential = float(np.max(np.abs(Ep - Ep[0] - (Qp - Q[first]))))
    integrated: Optional[float] = None
    if traj.from_origin and P is not None:
        integrated = float(np.max(np.abs(E - (k + 1) / C * (G * np.power(r, m) - m * P))))
    scale = max(1.0, float(np.max(np.abs(E))))
    return EnergyReport(differential=differential, integrated=integrated, scale=scale, source=source)


def energy_identity_residual(traj: RadialTrajectory) -> float:
    """Largest absolute residual over both forms of the energy identity."""
    return energy_identity_report(traj).worst


class BlowupVerdict(str, Enum):
    BLOWUP = "blowup"
    NO_BLOWUP = "no_blowup_up_to"


@dataclass(frozen=True)
class BlowupEstimate:
    beta: float
    rho_low: float
    rho_high: float
    verdict: BlowupVerdict
    r_max: float
    trajectory: Optional[RadialTrajectory] = field(default=None, repr=False, compare=False)

    @property
    def width(self) -> float:
        return self.rho_high - self.rho_low

    @property
    def blows_up(self) -> bool:
        return self.verdict is BlowupVerdict.BLOWUP

    def to_dict(self) -> Dict[str, Any]:
        return {
            "beta": self.beta,
            "verdict": self.verdict.value,
            "rho_low": self.rho_low,
            "rho_high": self.rho_high,
            "width": self.width,
            "r_max": self.r_max,
        }


def _no_blowup(beta: float, r_max: float, r_end: float, traj: RadialTrajectory) -> BlowupEstimate:
    return BlowupEstimate(beta, min(r_end, r_max), math.inf, BlowupVerdict.NO_BLOWUP, r_max, traj)


def _bracket_from_state(traj: RadialTrajectory, r_max: float, tol: float) -> BlowupEstimate:
    """Two-sided bound on the blow-up radius from the last recorded state.

    Past r1 the energy identity gives
        (k+1) r1^m (G(xi)-G(xi1)+D1)/C <= E(r) <= (k+1) rho^m (G(xi)-G(xi1)+D2)/C
    with D = C E1 / ((k+1) radius^m), which integrates to bounds on rho - r1
    through the shifted Keller-Osserman integral.
    """
    spec, nl, beta = traj.spec, traj.nl, traj.beta
    k, C, q, m = spec.k, spec.c_radial, spec.flux_exponent, spec.weight_exponent
    e = 1.0 / (k + 1)
    r1, xi1 = float(traj.r[-1]), float(traj.xi[-1])
    E1 = float(traj.energy()[-1])
    D1 = C * E1 / ((k + 1) * r1 ** m)
    J1 = shifted_ko_integral(nl, xi1, D1, tol)
    if not J1.converges:
        logger.info("beta=%g: remaining-radius integral diverges; solution is global", beta)
        return _no_blowup(beta, r_max, r1, traj)
    A = (C / r1 ** m) ** e * (J1.value + J1.error_bound)

    def excess(delta: float) -> float:
        return delta - (r1 + delta) ** q * A

    if excess(r1) <= 0:
        raise BracketingFailure(
            "remaining-radius bound does not close within [r1, 2 r1]",
            partial={"rho_low": r1, "rho_high": math.inf},
            diagnostics={"beta": beta, "r1": r1, "A": A},
        )
    delta_up = brentq(excess, 0.0, r1, xtol=1e-15 * max(1.0, r1), rtol=4 * np.finfo(float).eps)
    rho_high = r1 + delta_up
    D2 = C * E1 / ((k + 1) * rho_high ** m)
    J2 = shifted_ko_integral(nl, xi1, D2, tol)
    delta_lo = r1 ** q * (C / rho_high ** m) ** e * max(0.0, J2.value - J2.error_bound)
    rho_low = r1 + delta_lo
    if rho_low > r_max:
        return _no_blowup(beta, r_max, r1, traj)
    return BlowupEstimate(beta, rho_low, rho_high, BlowupVerdict.BLOWUP, r_max, traj)


def blowup_radius(
    spec: ProblemSpec,
    nl: Nonlinearity,
    beta: float,
    bracket_tol: float = config.BRACKET_TOL,
    r_max: float = config.DEFAULT_RMAX,
    controls: Optional[StepControls] = None,
) -> BlowupEstimate:
    """Bracket the explosion radius rho(beta), or report no blow-up up to r_max.

    Raises:
        BracketingFailure: step underflow, or the bracket stayed wider than
            bracket_tol after the refinement rounds; the best bracket is attached.
    """
    if nl.k != spec.k:
        nl = nl.with_order(spec.k)
    ctl = controls or StepControls()
    best: Optional[BlowupEstimate] = None
    for attempt in range(config.BRACKET_REFINEMENTS + 1):
        traj = integrate_ivp(spec, nl, beta, r_max, ctl)
        if traj.termination is Termination.REACHED_RMAX:
            return _no_blowup(beta, r_max, traj.r_end, traj)
        if traj.termination is Termination.STEP_UNDERFLOW:
            raise BracketingFailure(
                f"step size underflow at r = {traj.r_end:g}: {traj.message}",
                partial=best.to_dict() if best else {"rho_low": traj.r_end, "rho_high": math.inf},
                diagnostics={"beta": beta, "r_end": traj.r_end},
            )
        est = _bracket_from_state(traj, r_max, min(config.KO_TOL, 0.01 * bracket_tol))
        if not est.blows_up or est.width <= bracket_tol:
            logger.info("blow-up radius beta=%g: [%.12g, %.12g] (%s)", beta, est.rho_low, est.rho_high,
                        est.verdict.value)
            return est
        best = est
        logger.warning("bracket width %.3g exceeds %.3g for beta=%g; refining (round %d)",
                       est.width, bracket_tol, beta, attempt + 1)
        ctl = ctl.tightened()
    assert best is not None
    raise BracketingFailure(
        f"bracket width {best.width:.3g} still exceeds {bracket_tol:g}",
        partial=best.to_dict(), diagnostics={"beta": beta},
    )


def _edge(est: BlowupEstimate, side: str) -> float:
    if not est.blows_up:
        return math.inf
    return est.rho_low if side == "low" else est.rho_high


def beta_for_radius(
    spec: ProblemSpec,
    nl: Nonlinearity,
    radius: float,
    side: str = "high",
    bracket_tol: float = config.BRACKET_TOL,
    controls: Optional[StepControls] = None,
) -> BlowupEstimate:
    """Central value whose blow-up radius sits at `radius`.

    side="low" returns the largest bisected beta with rho_low >= radius
    (the solution is finite on the open ball); side="high" the smallest
    with rho_high <= radius (it explodes inside the closed ball).

    Raises:
        NonMonotoneError: two evaluations contradict rho decreasing in beta.
    """
    if side not in ("low", "high"):
        raise DomainError(f"side must be 'low' or 'high', got {side!r}")
    if not radius > 0:
        raise DomainError(f"radius must be positive, got {radius}")
    seen: List[BlowupEstimate] = []

    def evaluate(beta: float) -> BlowupEstimate:
        est = blowup_radius(spec, nl, beta, bracket_tol, controls=controls)
        for other in seen:
            lo, hi = (other, est) if other.beta < est.beta else (est, other)
            # rho is non-increasing in beta
            if lo.blows_up and hi.blows_up and lo.rho_high < hi.rho_low:
                raise NonMonotoneError(
                    "blow-up radius increased with the central value",
                    partial=[lo.to_dict(), hi.to_dict()],
                    diagnostics={"pair": [lo.beta, hi.beta]},
                )
            if lo.blows_up and not hi.blows_up:
                raise NonMonotoneError(
                    "larger central value reported no blow-up",
                    partial=[lo.to_dict(), hi.to_dict()],
                    diagnostics={"pair": [lo.beta, hi.beta]},
                )
        seen.append(est)
        return est

    def outside(est: BlowupEstimate) -> bool:
        return _edge(est, side) > radius if side == "high" else _edge(est, side) >= radius

    start = evaluate(1.0)
    lo_est: Optional[BlowupEstimate] = None
    hi_est: Optional[BlowupEstimate] = None
    if outside(start):
        lo_est = start
        beta = 1.0
        for _ in range(60):
            beta *= 4.0
            est = evaluate(beta)
            if not outside(est):
                hi_est = est
                break
            lo_est = est
    else:
        hi_est = start
        beta = 1.0
        for _ in range(60):
            beta /= 4.0
            est = evaluate(beta)
            if outside(est):
                lo_est = est
                break
            hi_est = est
    if lo_est is None or hi_est is None:
        raise BracketingFailure(
            f"could not bracket a central value with blow-up radius {radius:g}",
            diagnostics={"radius": radius, "side": side},
        )
    for _ in range(config.RADIUS_SEARCH_ITERATIONS):
        target = lo_est if side == "low" else hi_est
        if abs(_edge(target, side) - radius) <= bracket_tol or hi_est.beta / lo_est.beta - 1.0 <= 1e-12:
            break
        mid = math.sqrt(lo_est.beta * hi_est.beta)
        est = evaluate(mid)
        logger.debug("radius search: beta=%.17g edge=%.12g target=%.12g", mid, _edge(est, side), radius)
        if outside(est):
            lo_est = est
        else:
            hi_est = est
    result = lo_est if side == "low" else hi_est
    logger.info("beta for radius %g (%s side): %.12g", radius, side, result.beta)
    return result
