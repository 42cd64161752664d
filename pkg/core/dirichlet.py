"""Dirichlet problems sigma_k^{1/k}(D^2 u) = g(u) in B_R, u = c on the sphere.

Two solvers are provided and cross-checked:

- `solve_shooting` bisects the central value of the radial initial-value
  problem until xi(R) = c.
- `solve_monotone` iterates the frozen-source radial problem
  C [r^(N-k)/k (u')^k]' = r^(N-1) f(r), solved in closed form by double
  integration, from the explicit quadratic subsolution.

The frozen-source map is order-reversing (a larger source bends the
profile down further), so with no shift one monotone step is a pair of
sweeps: even iterates increase, odd iterates decrease, and the two
envelopes meet at the solution. With `shift=True` each step instead
solves sigma_k(v) - mu v = g^k(u) - mu u exactly by shooting, which is
order-preserving for mu >= max (g^k)'.
"""
from dataclasses import dataclass, field
from typing import Any, Dict, List, NoReturn, Optional, Sequence, Tuple
import logging
import math

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.integrate import cumulative_simpson, solve_ivp
from scipy.interpolate import CubicSpline
from scipy.optimize import brentq

from . import config
from .errors import (
    DomainError,
    GridMismatchError,
    MonotonicityViolation,
    NoExplosiveSupersolutionError,
    NonConvergenceError,
    UnreachableBoundaryError,
)
from .hessian_radial import ProblemSpec, is_k_admissible, radial_eigenvalues
from .nonlinearity import KOClass, Nonlinearity, ko_classify
from .ode_ivp import (
    RadialTrajectory,
    StepControls,
    Termination,
    beta_for_radius,
    integrate_ivp,
    ivp_rhs,
    origin_curvature,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RadialProfile:
    """Values of a radial function on a grid of radii; +inf marks points past a blow-up."""

    r: np.ndarray
    u: np.ndarray
    label: str = ""
    metadata: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "r", np.asarray(self.r, dtype=float))
        object.__setattr__(self, "u", np.asarray(self.u, dtype=float))
        if self.r.shape != self.u.shape or self.r.ndim != 1:
            raise DomainError("profile arrays r and u must be 1-D with equal length")

    def to_dict(self) -> Dict[str, Any]:
        return {"label": self.label, "r": self.r.tolist(), "u": self.u.tolist(), "metadata": self.metadata}


@dataclass(frozen=True)
class QuadraticProfile:
    """u(r) = c + a (r^2 - R^2) / 2."""

    a: float
    c: float
    R: float

    def value(self, r: Any) -> Any:
        return self.c + 0.5 * self.a * (np.asarray(r, dtype=float) ** 2 - self.R ** 2)

    def slope(self, r: Any) -> Any:
        return self.a * np.asarray(r, dtype=float)

    def sample(self, grid: Sequence[float], label: str = "explicit_subsolution") -> RadialProfile:
        r = np.asarray(grid, dtype=float)
        return RadialProfile(r, self.value(r), label, {"a": self.a, "c": self.c, "R": self.R})


def default_grid(spec: ProblemSpec, intervals: int = 1024) -> np.ndarray:
    spec.require_ball()
    return np.linspace(0.0, spec.radius(), intervals + 1)


def _check_grid(spec: ProblemSpec, grid: Optional[Sequence[float]]) -> np.ndarray:
    if grid is None:
        return default_grid(spec)
    r = np.asarray(grid, dtype=float)
    if r.ndim != 1 or r.size < 3 or r[0] != 0.0 or np.any(np.diff(r) <= 0):
        raise DomainError("grid must be strictly increasing, start at 0 and hold at least 3 points")
    if not math.isclose(r[-1], spec.radius(), rel_tol=1e-12):
        raise DomainError(f"grid must end at R = {spec.R}, got {r[-1]}")
    return r


def explicit_subsolution(spec: ProblemSpec, nl: Nonlinearity, c: Optional[float] = None) -> QuadraticProfile:
    """Quadratic with sigma_k^{1/k} = g(c) identically and value c on the sphere.

    a = C(N, k)^(-1/k) g(c). Since u <= c and g is non-decreasing,
    sigma_k^{1/k}(u) = g(c) >= g(u): a subsolution.
    """
    c = spec.c if c is None else c
    if spec.R is None or c is None or not c > 0:
        raise DomainError("explicit subsolution needs a ball radius R and a boundary value c > 0")
    a = spec.c_nk ** (-1.0 / spec.k) * float(nl.g(c))
    return QuadraticProfile(a=a, c=float(c), R=spec.radius())


def laplace_nonlinearity(spec: ProblemSpec, nl: Nonlinearity) -> Nonlinearity:
    """g~ = N C(N, k)^(-1/k) g paired with k = 1.

    Maclaurin's inequality turns an explosive solution of Laplace u = g~(u)
    into a supersolution of sigma_k^{1/k}(D^2 u) = g(u).
    """
    return nl.with_order(1).scaled(spec.N * spec.c_nk ** (-1.0 / spec.k))


def _profile_from_trajectory(traj: RadialTrajectory, grid: np.ndarray, label: str,
                             metadata: Dict[str, Any]) -> RadialProfile:
    u = np.full_like(grid, np.inf)
    inside = grid <= traj.r_end
    u[inside] = traj.interpolant()(grid[inside])
    return RadialProfile(grid, u, label, metadata)


def laplace_supersolution(
    spec: ProblemSpec,
    nl: Nonlinearity,
    grid: Optional[Sequence[float]] = None,
    bracket_tol: float = config.BRACKET_TOL,
) -> RadialProfile:
    """Explosive radial solution of Laplace u = g~(u) whose blow-up radius sits just past R.

    Raises:
        NoExplosiveSupersolutionError: g~ fails the Keller-Osserman condition.
    """
    spec.require_ball()
    r = _check_grid(spec, grid)
    g_tilde = laplace_nonlinearity(spec, nl)
    if not g_tilde.ko_eligible or ko_classify(g_tilde) is not KOClass.HOLDS:
        raise NoExplosiveSupersolutionError(
            "Keller-Osserman condition fails for the Laplace nonlinearity; no explosive supersolution",
            diagnostics={"nonlinearity": g_tilde.to_dict()},
        )
    spec1 = ProblemSpec(spec.N, 1, spec.R)
    est = beta_for_radius(spec1, g_tilde, spec.radius(), side="low", bracket_tol=bracket_tol)
    traj = integrate_ivp(spec1, g_tilde, est.beta, spec.radius(), r_eval=r)
    meta = {"beta": est.beta, "rho_low": est.rho_low, "rho_high": est.rho_high, "nonlinearity": g_tilde.to_dict()}
    profile = _profile_from_trajectory(traj, r, "laplace_supersolution", meta)
    if spec.c is not None and profile.u[-1] < spec.c:
        logger.warning("supersolution boundary value %.6g is below c = %.6g", profile.u[-1], spec.c)
    return profile


@dataclass(frozen=True)
class IterationTrace:
    """Snapshots of the monotone iteration; `lower` is the non-decreasing trace."""

    lower: List[np.ndarray] = field(default_factory=list)
    upper: List[np.ndarray] = field(default_factory=list)
    updates: List[float] = field(default_factory=list)
    violations: int = 0

    @property
    def iterations(self) -> int:
        return len(self.updates)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "iterations": self.iterations,
            "violations": self.violations,
            "updates": list(self.updates),
            "lower": [x.tolist() for x in self.lower],
            "upper": [x.tolist() for x in self.upper],
        }


@dataclass(frozen=True)
class DirichletSolution:
    spec: ProblemSpec
    method: str
    r: np.ndarray
    u: np.ndarray
    up: np.ndarray
    residual: float
    info: Dict[str, Any] = field(default_factory=dict)
    trajectory: Optional[RadialTrajectory] = field(default=None, repr=False, compare=False)

    @property
    def boundary_error(self) -> float:
        return abs(float(self.u[-1]) - self.spec.boundary_value())

    def profile(self) -> RadialProfile:
        return RadialProfile(self.r, self.u, self.method, dict(self.info))

    def admissible(self, nl: Nonlinearity) -> bool:
        """Radial eigenvalues are k-admissible at every grid point."""
        spec = self.spec
        for r, u, up in zip(self.r, self.u, self.up):
            if r == 0:
                upp = origin_curvature(spec, nl, float(u))
                lam = radial_eigenvalues(0.0, 0.0, upp, spec.N, spec.R)
            else:
                upp = ivp_rhs(float(r), float(u), float(up), spec, nl)
                lam = radial_eigenvalues(float(r), float(up), upp, spec.N, spec.R)
            if not is_k_admissible(lam, spec.k):
                return False
        return True

    def to_dict(self) -> Dict[str, Any]:
        return {
            "spec": self.spec.to_dict(),
            "method": self.method,
            "residual": self.residual,
            "boundary_error": self.boundary_error,
            "info": self.info,
        }


def divergence_residual(spec: ProblemSpec, nl: Nonlinearity, r: np.ndarray, u: np.ndarray, up: np.ndarray) -> float:
    """max |C/k r^(N-k) (u')^k - int_0^r s^(N-1) g^k(u) ds|, relative to the largest flux."""
    N, k = spec.N, spec.k
    lhs = spec.c_radial / k * np.power(r, N - k) * np.power(np.maximum(up, 0.0), k)
    gk = np.asarray(nl.g_power(np.maximum(u, 0.0)), dtype=float)
    rhs = cumulative_simpson(np.power(r, N - 1) * gk, x=r, initial=0.0)
    return float(np.max(np.abs(lhs - rhs)) / max(1.0, float(np.max(np.abs(rhs)))))


def solve_shooting(
    spec: ProblemSpec,
    nl: Nonlinearity,
    grid: Optional[Sequence[float]] = None,
    controls: Optional[StepControls] = None,
    tol: float = config.SHOOTING_TOL,
) -> DirichletSolution:
    """Match xi_beta(R) = c by bracketing the central value beta in (0, c].

    Raises:
        UnreachableBoundaryError: no central value reaches c without blowing up.
    """
    spec.require_ball()
    if nl.k != spec.k:
        nl = nl.with_order(spec.k)
    R, c = spec.radius(), spec.boundary_value()
    r = _check_grid(spec, grid)

    def mismatch(beta: float) -> float:
        traj = integrate_ivp(spec, nl, beta, R, controls)
        if traj.termination is not Termination.REACHED_RMAX:
            return math.inf
        return float(traj.xi[-1]) - c

    hi = c
    f_hi = mismatch(hi)
    lo = c * config.SHOOTING_LOWER_FRACTION
    f_lo = mismatch(lo)
    for _ in range(8):
        if f_lo < 0:
            break
        lo *= 1e-3
        f_lo = mismatch(lo)
    if not f_lo < 0:
        raise UnreachableBoundaryError(
            f"every central value in ({lo:g}, {c:g}] overshoots c",
            diagnostics={"beta_low": lo, "mismatch": f_lo},
        )
    if f_hi == 0.0:
        beta_star = hi
    else:
        for _ in range(config.RADIUS_SEARCH_ITERATIONS):
            if math.isfinite(f_hi):
                break
            mid = 0.5 * (lo + hi)
            f_mid = mismatch(mid)
            if f_mid < 0:
                lo, f_lo = mid, f_mid
            else:
                hi, f_hi = mid, f_mid
        if not math.isfinite(f_hi):
            raise UnreachableBoundaryError(
                "could not find a central value whose solution stays finite up to R",
                partial={"beta_low": lo, "beta_high": hi},
            )
        beta_star = brentq(mismatch, lo, hi, xtol=1e-14 * c, rtol=4 * np.finfo(float).eps)
    traj = integrate_ivp(spec, nl, beta_star, R, controls, r_eval=r)
    if traj.termination is not Termination.REACHED_RMAX or abs(traj.xi[-1] - c) > tol * c:
        raise UnreachableBoundaryError(
            f"shooting missed the boundary value: xi(R) = {traj.xi[-1]:.17g}, c = {c:g}",
            partial=traj, diagnostics={"beta_star": beta_star},
        )
    residual = divergence_residual(spec, nl, traj.r, traj.xi, traj.xip)
    logger.info("shooting N=%d k=%d R=%g c=%g: beta*=%.15g residual=%.3g", spec.N, spec.k, R, c, beta_star, residual)
    return DirichletSolution(
        spec=spec, method="shooting", r=traj.r, u=traj.xi, up=traj.xip, residual=residual,
        info={"beta_star": beta_star, "nonlinearity": nl.to_dict()}, trajectory=traj,
    )


class _FrozenSourceSolver:
    """u for C [r^(N-k)/k (u')^k]' = r^(N-1) f with u'(0) = 0, u(R) = c, on a fixed grid.

    (u')^k = (k/C) r^(k-N) int_0^r s^(N-1) f(s) ds with the inner integral
    by 8-point Gauss-Legendre on a cubic spline of f per grid interval;
    u = c - int_r^R u' from a spline antiderivative.
    """

    def __init__(self, spec: ProblemSpec, r: np.ndarray):
        self.spec = spec
        self.r = r
        self.c = spec.boundary_value()
        nodes, weights = leggauss(8)
        a, b = r[:-1, None], r[1:, None]
        half = 0.5 * (b - a)
        self.s = 0.5 * (a + b) + half * nodes[None, :]
        self.w = half * weights[None, :] * np.power(self.s, spec.N - 1)
        self.pos = r > 0

    def __call__(self, f: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        N, k = self.spec.N, self.spec.k
        spline = CubicSpline(self.r, f)
        inner = np.concatenate([[0.0], np.cumsum(np.sum(self.w * spline(self.s), axis=1))])
        up = np.zeros_like(self.r)
        rp = self.r[self.pos]
        flux = k / self.spec.c_radial * np.power(rp, k - N) * inner[self.pos]
        up[self.pos] = np.power(np.maximum(flux, 0.0), 1.0 / k)
        anti = CubicSpline(self.r, up).antiderivative()
        u = self.c - (anti(self.r[-1]) - anti(self.r))
        return u, up


def _source(nl: Nonlinearity, u: np.ndarray) -> np.ndarray:
    return np.asarray(nl.g_power(np.maximum(u, 0.0)), dtype=float)


def _slack(u: np.ndarray) -> np.ndarray:
    return config.COMPARISON_SLACK * np.maximum(1.0, np.abs(u))


class _ShiftedStep:
    """One exact step of sigma_k(v) - mu v = g^k(u) - mu u, v(R) = c, by shooting on v(0)."""

    def __init__(self, spec: ProblemSpec, nl: Nonlinearity, r: np.ndarray, mu: float):
        self.spec = spec
        self.nl = nl
        self.r = r
        self.mu = mu
        self.R = float(r[-1])
        self.c = spec.boundary_value()
        self.r0 = config.IVP_SERIES_START * self.R

    def _shoot(self, gamma: float, h: CubicSpline) -> Any:
        N, k, C, mu = self.spec.N, self.spec.k, self.spec.c_radial, self.mu

        def rhs(t: float, y: np.ndarray) -> List[float]:
            vp = (max(y[1], 0.0) * k / (C * t ** (N - k))) ** (1.0 / k)
            return [vp, t ** (N - 1) * max(mu * y[0] + float(h(t)), 0.0)]

        s0 = max(mu * gamma + float(h(0.0)), 0.0)
        a = (s0 / self.spec.c_nk) ** (1.0 / k)
        r0 = self.r0
        y0 = [gamma + 0.5 * a * r0 * r0, s0 * r0 ** N / N]
        sol = solve_ivp(rhs, (r0, self.R), y0, method="DOP853", rtol=1e-10, atol=1e-13, dense_output=True)
        return sol, a

    def __call__(self, u: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        h = CubicSpline(self.r, _source(self.nl, u) - self.mu * u)

        def mismatch(gamma: float) -> float:
            sol, _ = self._shoot(gamma, h)
            return float(sol.y[0, -1]) - self.c

        hi = self.c
        lo = float(u[0])
        span = max(self.c - lo, 1.0)
        for _ in range(20):
            if mismatch(lo) <= 0:
                break
            lo -= span
            span *= 2.0
        else:
            raise NonConvergenceError("shifted step could not bracket the central value",
                                      diagnostics={"low": lo, "high": hi})
        gamma = hi if mismatch(hi) == 0 else brentq(mismatch, lo, hi, xtol=1e-14 * max(1.0, self.c))
        sol, a = self._shoot(gamma, h)
        v = np.empty_like(self.r)
        vp = np.empty_like(self.r)
        near = self.r <= self.r0
        v[near] = gamma + 0.5 * a * self.r[near] ** 2
        vp[near] = a * self.r[near]
        far = ~near
        y = sol.sol(self.r[far])
        v[far] = y[0]
        N, k, C = self.spec.N, self.spec.k, self.spec.c_radial
        vp[far] = np.power(np.maximum(y[1], 0.0) * k / (C * np.power(self.r[far], N - k)), 1.0 / k)
        return v, vp


def solve_monotone(
    spec: ProblemSpec,
    nl: Nonlinearity,
    grid_size: int = 1024,
    tol: float = config.MONOTONE_TOL,
    max_iterations: int = config.MONOTONE_MAX_ITERATIONS,
    shift: bool = False,
) -> Tuple[DirichletSolution, IterationTrace]:
    """Monotone iteration from the explicit subsolution on a uniform grid with grid_size intervals.

    Raises:
        MonotonicityViolation: the trace lost its ordering; trace attached.
        NonConvergenceError: no convergence within max_iterations; trace attached.
    """
    spec.require_ball()
    if grid_size < config.MONOTONE_MIN_GRID:
        raise DomainError(f"grid_size must be at least {config.MONOTONE_MIN_GRID}, got {grid_size}")
    if nl.k != spec.k:
        nl = nl.with_order(spec.k)
    r = default_grid(spec, grid_size)
    c = spec.boundary_value()
    u0 = explicit_subsolution(spec, nl).value(r)
    trace = IterationTrace(lower=[u0])
    scale = tol * max(1.0, c)

    def fail(exc: type, message: str, **diag: Any) -> NoReturn:
        bad = IterationTrace(trace.lower, trace.upper, trace.updates, trace.violations + 1)
        raise exc(message, partial=bad, diagnostics=diag)

    if shift:
        k = spec.k
        mu = k * float(nl.g(c)) ** (k - 1) * float(nl.derivative(c))
        step = _ShiftedStep(spec, nl, r, mu)
        u = u0
        for it in range(1, max_iterations + 1):
            v, vp = step(u)
            if np.any(v < u - _slack(u)):
                fail(MonotonicityViolation, f"shifted iterate {it} decreased", iteration=it)
            update = float(np.max(np.abs(v - u)))
            trace.lower.append(v)
            trace.updates.append(update)
            logger.debug("shifted iteration %d: update %.3g", it, update)
            u = v
            if update <= scale:
                return _monotone_result(spec, nl, r, u, vp, trace, "monotone_shifted", {"mu": mu}), trace
        fail(NonConvergenceError, f"shifted iteration did not converge in {max_iterations} steps",
             last_update=trace.updates[-1])

    solve = _FrozenSourceSolver(spec, r)
    low = u0
    high: Optional[np.ndarray] = None
    for it in range(1, max_iterations + 1):
        odd, _ = solve(_source(nl, low))
        even, up_even = solve(_source(nl, odd))
        if np.any(even < low - _slack(low)):
            fail(MonotonicityViolation, f"lower iterate {it} decreased", iteration=it)
        if high is not None and np.any(odd > high + _slack(high)):
            fail(MonotonicityViolation, f"upper iterate {it} increased", iteration=it)
        if np.any(even > odd + _slack(odd)):
            fail(MonotonicityViolation, f"lower iterate {it} crossed the upper envelope", iteration=it)
        update = float(np.max(np.abs(even - low)))
        gap = float(np.max(odd - even))
        trace.lower.append(even)
        trace.upper.append(odd)
        trace.updates.append(update)
        logger.debug("paired sweep %d: update %.3g envelope gap %.3g", it, update, gap)
        low, high = even, odd
        if gap <= scale:
            return _monotone_result(spec, nl, r, even, up_even, trace, "monotone", {"envelope_gap": gap}), trace
    fail(NonConvergenceError, f"monotone iteration did not converge in {max_iterations} paired sweeps",
         last_update=trace.updates[-1])


def _monotone_result(spec: ProblemSpec, nl: Nonlinearity, r: np.ndarray, u: np.ndarray, up: np.ndarray,
                     trace: IterationTrace, method: str, extra: Dict[str, Any]) -> DirichletSolution:
    residual = divergence_residual(spec, nl, r, u, up)
    info = {"grid": r.size - 1, "iterations": trace.iterations,
            "final_update": trace.updates[-1] if trace.updates else 0.0, "nonlinearity": nl.to_dict()}
    info.update(extra)
    logger.info("%s N=%d k=%d: %d iterations, residual %.3g", method, spec.N, spec.k, trace.iterations, residual)
    return DirichletSolution(spec=spec, method=method, r=r, u=u, up=up, residual=residual, info=info)


def comparison_check(sub_profile: RadialProfile, super_profile: RadialProfile,
                     slack: float = config.COMPARISON_SLACK) -> bool:
    """True iff sub <= super pointwise within slack * max(1, |u|).

    Raises:
        GridMismatchError: the profiles are sampled on different grids.
    """
    a, b = sub_profile, super_profile
    if a.r.shape != b.r.shape or not np.allclose(a.r, b.r, rtol=1e-12, atol=1e-14):
        raise GridMismatchError(
            "profiles must share one grid",
            diagnostics={"sub_points": int(a.r.size), "super_points": int(b.r.size)},
        )
    with np.errstate(invalid="ignore"):
        finite = np.isfinite(b.u)
        ok = np.where(finite, a.u <= b.u + slack * np.maximum(1.0, np.abs(np.where(finite, b.u, 0.0))), True)
    return bool(np.all(ok))


@dataclass(frozen=True)
class LargeSolutionSequence:
    n_values: List[float]
    solutions: List[DirichletSolution]
    cauchy: List[float]
    center_cauchy: List[float]
    interior: np.ndarray
    bound: RadialProfile
    monotone: bool
    bounded: bool

    @property
    def limit_profile(self) -> RadialProfile:
        last = self.solutions[-1]
        return RadialProfile(last.r[self.interior], last.u[self.interior], "large_solution_limit")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n_values": self.n_values,
            "central_values": [float(s.u[0]) for s in self.solutions],
            "cauchy": self.cauchy,
            "center_cauchy": self.center_cauchy,
            "monotone": self.monotone,
            "bounded": self.bounded,
            "bound_beta": self.bound.metadata.get("beta"),
        }


def ordered_in_n(solutions: Sequence[DirichletSolution]) -> bool:
    """True when consecutive solutions are pointwise non-decreasing up to the comparison slack."""
    ordered = True
    for prev, nxt in zip(solutions, solutions[1:]):
        if np.any(nxt.u < prev.u - _slack(prev.u)):
            logger.warning("u_n decreased between n = %g and n = %g", prev.spec.c, nxt.spec.c)
            ordered = False
    return ordered


def large_solution_sequence(
    spec: ProblemSpec,
    nl: Nonlinearity,
    n_values: Sequence[float],
    grid: Optional[Sequence[float]] = None,
    interior_fraction: float = 0.9,
) -> LargeSolutionSequence:
    """Dirichlet solutions with boundary values n, their monotonicity in n and an explosive radial bound.

    The bound is the radial solution exploding inside the closed ball
    (blow-up bracket ending at or before R), compared on the radii it was
    integrated to.

    Raises:
        DomainError: the Keller-Osserman condition fails, or n_values is not increasing.

    `monotone` is False when some u_n exceeds u_(n+1) beyond the comparison
    slack; the offending pairs are logged.
    """
    if spec.R is None:
        raise DomainError("large-solution sequence needs a ball radius R")
    if nl.k != spec.k:
        nl = nl.with_order(spec.k)
    ns = [float(n) for n in n_values]
    if not ns or any(n <= 0 for n in ns) or any(b <= a for a, b in zip(ns, ns[1:])):
        raise DomainError("n_values must be positive and strictly increasing")
    if ko_classify(nl) is not KOClass.HOLDS:
        raise DomainError("Keller-Osserman condition fails; no uniform interior bound exists")
    base = spec.with_boundary(c=ns[0])
    r = _check_grid(base, grid)
    interior = r <= interior_fraction * spec.radius() + 1e-12
    solutions = [solve_shooting(spec.with_boundary(c=n), nl, r) for n in ns]
    monotone = ordered_in_n(solutions)
    cauchy = [float(np.max(np.abs(b.u[interior] - a.u[interior]))) for a, b in zip(solutions, solutions[1:])]
    center = [float(b.u[0] - a.u[0]) for a, b in zip(solutions, solutions[1:])]
    est = beta_for_radius(ProblemSpec(spec.N, spec.k, spec.R), nl, spec.radius(), side="high")
    traj = integrate_ivp(ProblemSpec(spec.N, spec.k, spec.R), nl, est.beta, spec.radius(), r_eval=r)
    bound = _profile_from_trajectory(
        traj, r, "explosive_radial_bound", {"beta": est.beta, "rho_low": est.rho_low, "rho_high": est.rho_high},
    )
    bounded = all(comparison_check(s.profile(), bound) for s in solutions)
    logger.info("large-solution sequence n=%s: cauchy=%s bounded=%s", ns, cauchy, bounded)
    return LargeSolutionSequence(ns, solutions, cauchy, center, interior, bound, monotone, bounded)
