"""Nonlinearities g, the antiderivative G(t) = int_0^t g^k and the Keller-Osserman integral.

A `Nonlinearity` is an immutable value: one of the concrete kinds below
with the Hessian order `k` it is paired with and an optional positive
multiplier `scale` (g -> scale * g). Library functions take it as their
first argument:

    nl = nonlinearity_from_json('{"kind": "power", "p": 2}', k=1)
    ko_integral(nl, beta=1.0).value

The Keller-Osserman integral

    K(beta) = int_beta^inf dt / ((k+1) (G(t) - G(beta)))^(1/(k+1))

has an integrable endpoint singularity of order 1/(k+1) at t = beta and a
tail decided by the growth of G. The endpoint is removed by the
substitution t = beta + s^((k+1)/k); the tail is decided by the log-log
slope of G over two decades and truncated once a two-sided power-tail
bound on the remainder is tight enough.
"""
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union
import json
import logging
import math
import warnings

import numpy as np
from scipy import integrate
from scipy.interpolate import PchipInterpolator

from . import config
from .errors import BudgetExceededError, DomainError, InsufficientDataError
from .validation import validate_document

logger = logging.getLogger(__name__)

ArrayLike = Union[float, Sequence[float], np.ndarray]

# largest exponent with exp(x) representable in double precision, with headroom
_EXP_LIMIT = 700.0


def _to_array(u: ArrayLike) -> Tuple[np.ndarray, bool]:
    arr = np.asarray(u, dtype=float)
    return arr, arr.ndim == 0


def _from_array(arr: np.ndarray, scalar: bool) -> Any:
    return float(arr) if scalar else arr


def _quad(func, a: float, b: float, epsabs: float, limit: int = config.QUAD_PIECE_LIMIT,
          points: Optional[Sequence[float]] = None) -> Tuple[float, float, int, int]:
    """scipy.integrate.quad returning (value, abserr, subintervals, ier)."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        out = integrate.quad(func, a, b, epsabs=epsabs, epsrel=config.QUAD_REL_TOL,
                             limit=limit, full_output=1, points=points)
    value, abserr, info = out[0], out[1], out[2]
    ier = 0 if len(out) == 3 else 1
    return float(value), float(abserr), int(info.get("last", 1)), ier


class Nonlinearity:
    """Interface for the admissible nonlinearities g.

    Concrete kinds implement `_base` (g without the multiplier),
    `_base_derivative` and, where a closed form exists, `G_span`.
    """

    kind = "abstract"
    k: int = 1
    scale: float = 1.0
    # Constant is a test-only kind and never enters KO classification
    ko_eligible = True
    # regularity of g^k (C^{2+alpha}) cannot be certified for sampled data
    regularity_checked = True

    def _base(self, u: np.ndarray) -> np.ndarray:
        raise NotImplementedError()

    def _base_derivative(self, u: np.ndarray) -> np.ndarray:
        raise NotImplementedError()

    @property
    def upper(self) -> float:
        """Largest argument at which g may be evaluated."""
        return math.inf

    def _check_order(self) -> None:
        if int(self.k) != self.k or self.k < 1:
            raise DomainError(f"Hessian order k must be a positive integer, got {self.k}")
        if not self.scale > 0 or not math.isfinite(self.scale):
            raise DomainError(f"scale must be positive and finite, got {self.scale}")

    def _check_range(self, arr: np.ndarray) -> None:
        if np.any(arr < 0):
            raise DomainError("nonlinearity evaluated at a negative argument")
        if np.any(arr > self.upper):
            raise DomainError(
                f"argument beyond the tabulated range [0, {self.upper}]; extrapolation is not allowed"
            )

    def g(self, u: ArrayLike) -> Any:
        arr, scalar = _to_array(u)
        self._check_range(arr)
        with np.errstate(over="ignore"):
            out = self.scale * self._base(arr)
        return _from_array(out, scalar)

    def derivative(self, u: ArrayLike) -> Any:
        arr, scalar = _to_array(u)
        self._check_range(arr)
        with np.errstate(over="ignore"):
            out = self.scale * self._base_derivative(arr)
        return _from_array(out, scalar)

    def g_power(self, u: ArrayLike) -> Any:
        """g(u)**k, overflowing to inf rather than raising."""
        arr, scalar = _to_array(u)
        with np.errstate(over="ignore"):
            out = np.power(np.asarray(self.g(arr), dtype=float), self.k)
        return _from_array(out, scalar)

    def G_span(self, a: float, h: float) -> float:
        """int_a^{a+h} g^k(z) dz by adaptive quadrature in the offset variable z."""
        if h <= 0:
            return 0.0
        self._check_range(np.asarray([a, a + h]))
        value, _, _, _ = _quad(lambda z: float(self.g_power(a + z)), 0.0, h,
                               epsabs=1e-14 * max(1.0, float(self.g_power(a + h)) * h))
        return value

    def G(self, t: float) -> float:
        return self.G_span(0.0, t)

    def G_increment(self, a: float, b: float) -> float:
        return self.G_span(a, b - a)

    def scaled(self, c: float) -> "Nonlinearity":
        """The nonlinearity c * g with the same order."""
        return replace(self, scale=self.scale * c)  # type: ignore[type-var]

    def with_order(self, k: int) -> "Nonlinearity":
        return replace(self, k=k)  # type: ignore[type-var]

    def parameters(self) -> Dict[str, Any]:
        raise NotImplementedError()

    def to_dict(self) -> Dict[str, Any]:
        d: Dict[str, Any] = {"kind": self.kind}
        d.update(self.parameters())
        d["k"] = int(self.k)
        if self.scale != 1.0:
            d["scale"] = self.scale
        return d

    def describe(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


@dataclass(frozen=True)
class PowerLaw(Nonlinearity):
    """g(u) = u**p with p >= 1; G has the closed form t**(pk+1) / (pk+1)."""

    p: float = 2.0
    k: int = 1
    scale: float = 1.0
    kind = "power"

    def __post_init__(self) -> None:
        self._check_order()
        if not self.p >= 1:
            raise DomainError(f"power-law exponent must be >= 1, got {self.p}")

    def _base(self, u: np.ndarray) -> np.ndarray:
        return np.power(u, self.p)

    def _base_derivative(self, u: np.ndarray) -> np.ndarray:
        return self.p * np.power(u, self.p - 1.0)

    def G_span(self, a: float, h: float) -> float:
        if h <= 0:
            return 0.0
        self._check_range(np.asarray([a, a + h]))
        m = self.p * self.k + 1.0
        factor = self.scale ** self.k / m
        with np.errstate(over="ignore"):
            if a <= 0:
                return float(factor * np.power(np.float64(h), m))
            # a^m ((1 + h/a)^m - 1) without cancellation for small h
            return float(factor * np.power(np.float64(a), m) * np.expm1(m * np.log1p(h / a)))

    def parameters(self) -> Dict[str, Any]:
        return {"p": self.p}


@dataclass(frozen=True)
class ExpMinusOne(Nonlinearity):
    """g(u) = exp(a u) - 1."""

    a: float = 1.0
    k: int = 1
    scale: float = 1.0
    kind = "expm1"

    def __post_init__(self) -> None:
        self._check_order()
        if not self.a > 0:
            raise DomainError(f"rate a must be positive, got {self.a}")

    def _base(self, u: np.ndarray) -> np.ndarray:
        return np.expm1(self.a * u)

    def _base_derivative(self, u: np.ndarray) -> np.ndarray:
        return self.a * np.exp(self.a * u)

    @property
    def overflow_point(self) -> float:
        """Argument beyond which g^k is not representable."""
        return (_EXP_LIMIT - self.k * math.log(self.scale)) / (self.a * self.k)

    def G_span(self, a: float, h: float) -> float:
        if a + h >= self.overflow_point:
            return math.inf
        return super().G_span(a, h)

    def parameters(self) -> Dict[str, Any]:
        return {"a": self.a}


@dataclass(frozen=True)
class Constant(Nonlinearity):
    """g(u) = c. Only for exact-solution tests; violates g(0) = 0."""

    c: float = 1.0
    k: int = 1
    scale: float = 1.0
    kind = "constant"
    ko_eligible = False

    def __post_init__(self) -> None:
        self._check_order()
        if not self.c > 0:
            raise DomainError(f"constant value must be positive, got {self.c}")

    def _base(self, u: np.ndarray) -> np.ndarray:
        return np.full_like(u, self.c, dtype=float)

    def _base_derivative(self, u: np.ndarray) -> np.ndarray:
        return np.zeros_like(u, dtype=float)

    def G_span(self, a: float, h: float) -> float:
        if h <= 0:
            return 0.0
        self._check_range(np.asarray([a, a + h]))
        return (self.scale * self.c) ** self.k * h

    def parameters(self) -> Dict[str, Any]:
        return {"c": self.c}


@dataclass(frozen=True)
class Tabulated(Nonlinearity):
    """Sampled g on a grid starting at 0, interpolated by monotone cubics.

    Evaluation beyond the last node is an error: the tail of the table is
    all the Keller-Osserman analysis can see.
    """

    u: Tuple[float, ...] = ()
    values: Tuple[float, ...] = ()
    k: int = 1
    scale: float = 1.0
    kind = "table"
    regularity_checked = False
    _interp: Any = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        self._check_order()
        u = np.asarray(self.u, dtype=float)
        g = np.asarray(self.values, dtype=float)
        if u.ndim != 1 or u.shape != g.shape or u.size < 3:
            raise DomainError("table needs matching u and g arrays with at least 3 samples")
        if u[0] != 0.0 or g[0] != 0.0:
            raise DomainError("table must start at u = 0 with g(0) = 0")
        if np.any(np.diff(u) <= 0):
            raise DomainError("table abscissae must be strictly increasing")
        if np.any(g[1:] <= 0):
            raise DomainError("g must be positive for u > 0")
        if np.any(np.diff(g) < 0):
            raise DomainError("g must be non-decreasing")
        slopes = np.diff(g) / np.diff(u)
        if np.any(np.diff(slopes) < -1e-12 * max(1.0, float(np.max(np.abs(slopes))))):
            raise DomainError("g must be convex (segment slopes non-decreasing)")
        object.__setattr__(self, "u", tuple(float(x) for x in u))
        object.__setattr__(self, "values", tuple(float(x) for x in g))
        object.__setattr__(self, "_interp", PchipInterpolator(u, g, extrapolate=False))

    @property
    def upper(self) -> float:
        return self.u[-1]

    def _base(self, u: np.ndarray) -> np.ndarray:
        return np.asarray(self._interp(u), dtype=float)

    def _base_derivative(self, u: np.ndarray) -> np.ndarray:
        return np.asarray(self._interp.derivative()(u), dtype=float)

    def G_span(self, a: float, h: float) -> float:
        if h <= 0:
            return 0.0
        self._check_range(np.asarray([a, a + h]))
        # breakpoints keep quad from straddling cubic pieces
        points = [x - a for x in self.u if a < x < a + h]
        limit = max(config.QUAD_PIECE_LIMIT, 2 * len(points) + 50)
        value, _, _, _ = _quad(lambda z: float(self.g_power(a + z)), 0.0, h,
                               epsabs=1e-14 * max(1.0, float(self.g_power(a + h)) * h),
                               limit=limit, points=points or None)
        return value

    def parameters(self) -> Dict[str, Any]:
        return {"u": list(self.u), "g": list(self.values)}


def _fallback_check(doc: Any) -> Optional[str]:
    if not isinstance(doc, dict) or "kind" not in doc:
        return "kind"
    required = {"power": ["p"], "expm1": ["a"], "constant": ["c"], "table": ["u", "g"]}
    if doc["kind"] not in required:
        return "kind"
    for name in required[doc["kind"]]:
        if name not in doc:
            return name
    return None


def nonlinearity_from_json(desc: Union[str, Dict[str, Any]], k: Optional[int] = None) -> Nonlinearity:
    """Build a Nonlinearity from its JSON description.

    Args:
        desc: JSON text or parsed mapping, e.g. {"kind": "power", "p": 2}.
        k: Hessian order; overrides a "k" entry in the description.

    Returns:
        The concrete Nonlinearity.
    """
    doc = json.loads(desc) if isinstance(desc, str) else dict(desc)
    validate_document(doc, "nonlinearity.json", _fallback_check)
    order = int(k if k is not None else doc.get("k", 1))
    scale = float(doc.get("scale", 1.0))
    kind = doc["kind"]
    nl: Nonlinearity
    if kind == "power":
        nl = PowerLaw(p=float(doc["p"]), k=order, scale=scale)
    elif kind == "expm1":
        nl = ExpMinusOne(a=float(doc["a"]), k=order, scale=scale)
    elif kind == "constant":
        nl = Constant(c=float(doc["c"]), k=order, scale=scale)
    else:
        nl = Tabulated(u=tuple(doc["u"]), values=tuple(doc["g"]), k=order, scale=scale)
    validate_g1(nl)
    return nl


def eval_g(nl: Nonlinearity, u: ArrayLike) -> Any:
    """g(u) for u >= 0 (scalar or array)."""
    return nl.g(u)


def eval_G(nl: Nonlinearity, t: float) -> float:
    """G(t) = int_0^t g^k(z) dz for t >= 0."""
    if t < 0:
        raise DomainError(f"G evaluated at negative t = {t}")
    return nl.G(t)


def validate_g1(nl: Nonlinearity, upper: Optional[float] = None, samples: int = 257) -> None:
    """Sampled check that g vanishes at 0, is positive, non-decreasing and convex.

    Raises:
        DomainError: naming the first violated property.
    """
    if upper is None:
        upper = nl.upper if math.isfinite(nl.upper) else 10.0
    s = np.linspace(0.0, upper, samples)
    g = np.asarray(nl.g(s), dtype=float)
    scale = max(1.0, float(np.max(np.abs(g[np.isfinite(g)]))) if np.any(np.isfinite(g)) else 1.0)
    tol = 1e-12 * scale
    if nl.ko_eligible:
        if abs(g[0]) > tol:
            raise DomainError("g(0) must vanish")
        if np.any(g[1:] <= 0):
            raise DomainError("g must be positive on (0, upper]")
    if np.any(np.diff(g) < -tol):
        raise DomainError("g must be non-decreasing")
    # midpoint convexity on consecutive sample triples
    if np.any(g[1:-1] - 0.5 * (g[:-2] + g[2:]) > tol):
        raise DomainError("g must be convex")


class KOVerdict(str, Enum):
    CONVERGES = "converges"
    DIVERGES = "diverges"


class DivergenceReason(str, Enum):
    TAIL = "tail"
    NONE = "none"


class KOClass(str, Enum):
    HOLDS = "holds"
    FAILS = "fails"


@dataclass(frozen=True)
class KOReport:
    beta: float
    verdict: KOVerdict
    value: Optional[float] = None
    error_bound: Optional[float] = None
    reason: Optional[DivergenceReason] = None
    tail_cutoff: float = math.inf
    singular_substitution_used: bool = False
    tail_exponent: float = math.nan
    offset: float = 0.0
    subintervals: int = 0

    @property
    def converges(self) -> bool:
        return self.verdict is KOVerdict.CONVERGES

    def to_dict(self) -> Dict[str, Any]:
        return {
            "beta": self.beta,
            "verdict": self.verdict.value,
            "value": self.value,
            "error_bound": self.error_bound,
            "reason": self.reason.value if self.reason else None,
            "tail_cutoff": self.tail_cutoff,
            "singular_substitution_used": self.singular_substitution_used,
            "tail_exponent": self.tail_exponent,
            "offset": self.offset,
            "subintervals": self.subintervals,
        }


def _log_slope(g_lo: float, g_hi: float, ratio: float) -> float:
    if not math.isfinite(g_hi):
        return math.inf
    if g_lo <= 0 or g_hi <= g_lo:
        return 0.0
    return math.log(g_hi / g_lo) / math.log(ratio)


def _tail_window(nl: Nonlinearity, beta: float) -> Tuple[float, float]:
    if math.isfinite(nl.upper):
        hi = nl.upper
        lo = hi / 100.0
        if lo <= beta:
            raise InsufficientDataError(
                f"table ends at {hi}; tail analysis needs two decades above beta = {beta}",
                diagnostics={"upper": hi, "beta": beta},
            )
        return lo, hi
    hi = max(config.KO_TAIL_SAMPLE_MAX, 100.0 * beta)
    return hi / 100.0, hi


def tail_exponent(nl: Nonlinearity, beta: float = config.KO_CANONICAL_BETA) -> Tuple[float, float]:
    """Fitted asymptotic exponents over the last two sampled decades.

    Returns:
        (integrand exponent, log-log slope of G). The integrand of K decays
        like t**exponent with exponent = -slope / (k+1).
    """
    lo, hi = _tail_window(nl, beta)
    slope = _log_slope(nl.G(lo), nl.G(hi), hi / lo)
    return -slope / (nl.k + 1), slope


class _KOQuadrature:
    """Piecewise quadrature of int_beta^upper dt / ((k+1)(G(t) - G(beta) + offset))^(1/(k+1)).

    The first piece [beta, 2 beta] is integrated in s with t = beta + s^((k+1)/k);
    later pieces grow geometrically by KO_TAIL_GROWTH. The running state
    (value, error, cumulative G increment, boundary) is kept between pieces
    so the tail loop can stop at any boundary.
    """

    def __init__(self, nl: Nonlinearity, beta: float, offset: float, tol: float):
        self.nl = nl
        self.beta = beta
        self.offset = offset
        self.tol = tol
        self.k = nl.k
        self.e = 1.0 / (nl.k + 1)
        self.G_beta = nl.G(beta)
        self.value = 0.0
        self.error = 0.0
        self.subintervals = 0
        self.boundary = beta
        self.dG = 0.0
        self.boundary_history: List[Tuple[float, float]] = []

    def _accumulate(self, value: float, err: float, last: int, ier: int) -> None:
        self.value += value
        self.error += err
        self.subintervals += last
        if self.subintervals > config.KO_SUBINTERVAL_BUDGET or (ier and err > self.tol):
            raise BudgetExceededError(
                "quadrature did not converge within the evaluation budget",
                partial=self.value,
                diagnostics={"beta": self.beta, "subintervals": self.subintervals,
                             "boundary": self.boundary, "error": self.error},
            )

    def _power(self, d: float) -> float:
        if not math.isfinite(d):
            return 0.0
        return ((self.k + 1) * d) ** (-self.e)

    def singular_piece(self, end: float) -> None:
        beta, k = self.beta, self.k
        expo = (k + 1) / k
        smax = (end - beta) ** (k / (k + 1))
        gk_beta = float(self.nl.g_power(beta))
        limit_value = ((k + 1) / k) * ((k + 1) * gk_beta) ** (-self.e) if gk_beta > 0 else 0.0

        def integrand(s: float) -> float:
            h = s ** expo
            d = self.nl.G_span(beta, h) + self.offset
            if d <= 0:
                return limit_value if self.offset == 0 else 0.0
            return ((k + 1) / k) * s ** (1.0 / k) * self._power(d)

        self._accumulate(*_quad(integrand, 0.0, smax, epsabs=0.25 * self.tol))
        self.dG = self.nl.G_span(beta, end - beta)
        self.boundary = end
        self.boundary_history.append((end, self.G_beta + self.dG))

    def regular_piece(self, end: float) -> None:
        start, dG0 = self.boundary, self.dG

        def integrand(t: float) -> float:
            return self._power(dG0 + self.nl.G_span(start, t - start) + self.offset)

        self._accumulate(*_quad(integrand, start, end, epsabs=0.25 * self.tol))
        self.dG = dG0 + self.nl.G_span(start, end - start)
        self.boundary = end
        self.boundary_history.append((end, self.G_beta + self.dG))

    def remainder_bounds(self, slope: float, stable: bool) -> Tuple[float, float]:
        """Bounds on int_T^inf for the current boundary T given the log-slope of G beyond T."""
        T = self.boundary
        G_T = self.G_beta + self.dG
        if not math.isfinite(G_T) or slope == math.inf:
            return 0.0, 0.0
        q = slope / (self.k + 1)
        if q <= 1.0 + config.KO_TAIL_MARGIN:
            return 0.0, math.inf
        # G(t) >= G(T)(t/T)^slope beyond T, so G(t) - G(beta) + D >= base (t/T)^slope
        base = min(self.dG + self.offset, G_T)
        upper = self._power(base) * T / (q - 1.0)
        lower = 0.0
        if stable:
            lower = self._power(G_T + max(0.0, self.offset - self.G_beta)) * T / (q - 1.0)
        return lower, upper

    def last_slope(self) -> Tuple[float, bool]:
        h = self.boundary_history
        if len(h) < 2:
            return 0.0, False
        (t1, g1), (t2, g2) = h[-2], h[-1]
        slope = _log_slope(g1, g2, t2 / t1)
        stable = False
        if len(h) >= 3 and math.isfinite(slope):
            t0, g0 = h[-3]
            prev = _log_slope(g0, g1, t1 / t0)
            stable = abs(slope - prev) <= 1e-6 * max(1.0, abs(slope))
        return slope, stable


def _integrate_tail(nl: Nonlinearity, beta: float, offset: float, tol: float,
                    fitted_slope: float, min_cutoff: Optional[float]) -> KOReport:
    quad = _KOQuadrature(nl, beta, offset, tol)
    table_end = nl.upper
    first_end = min(2.0 * beta, table_end)
    quad.singular_piece(first_end)
    cap = config.KO_TAIL_CAP * max(1.0, beta)
    lower, upper = 0.0, math.inf
    while True:
        T = quad.boundary
        if T >= table_end:
            # past the table the fitted tail exponent stands in for the data
            lower, upper = quad.remainder_bounds(fitted_slope, stable=True)
        else:
            slope, stable = quad.last_slope()
            lower, upper = quad.remainder_bounds(slope, stable)
        done = 0.5 * (upper - lower) <= 0.5 * tol and (min_cutoff is None or T >= min_cutoff)
        if done or T >= table_end:
            break
        nxt = min(T * config.KO_TAIL_GROWTH, table_end)
        if nxt > cap:
            partial = quad.value + (0.5 * (upper + lower) if math.isfinite(upper) else 0.0)
            raise BudgetExceededError(
                f"tail cutoff reached the cap {cap:g} before the remainder bound met tol",
                partial=partial,
                diagnostics={"beta": beta, "cutoff": T, "remainder_upper": upper},
            )
        logger.debug("KO tail piece [%g, %g] beta=%g value=%g", T, nxt, beta, quad.value)
        quad.regular_piece(nxt)
    if not math.isfinite(upper):
        raise BudgetExceededError(
            "remainder beyond the tabulated range could not be bounded",
            partial=quad.value, diagnostics={"beta": beta, "cutoff": quad.boundary},
        )
    value = quad.value + 0.5 * (upper + lower)
    error = quad.error + 0.5 * (upper - lower)
    return KOReport(
        beta=beta,
        verdict=KOVerdict.CONVERGES,
        value=value,
        error_bound=error,
        tail_cutoff=quad.boundary,
        singular_substitution_used=True,
        tail_exponent=-fitted_slope / (nl.k + 1),
        offset=offset,
        subintervals=quad.subintervals,
    )


def shifted_ko_integral(nl: Nonlinearity, beta: float, offset: float = 0.0,
                        tol: float = config.KO_TOL, min_cutoff: Optional[float] = None) -> KOReport:
    """int_beta^inf dt / ((k+1)(G(t) - G(beta) + offset))^(1/(k+1)) for offset >= 0.

    offset = 0 is K(beta). A positive offset models an energy already
    present at t = beta and removes the endpoint singularity.
    """
    if not beta > 0:
        raise DomainError(f"beta must be positive, got {beta}")
    if offset < 0:
        raise DomainError("offset must be non-negative")
    if not nl.ko_eligible:
        raise DomainError(f"{nl.kind} nonlinearity is excluded from Keller-Osserman analysis")
    if beta >= nl.upper:
        raise DomainError(f"beta = {beta} lies beyond the tabulated range")
    exponent, slope = tail_exponent(nl, beta)
    if exponent >= -1.0 - config.KO_TAIL_MARGIN:
        reason = DivergenceReason.NONE if slope <= 0 else DivergenceReason.TAIL
        logger.debug("KO integral diverges at beta=%g (integrand exponent %.6g)", beta, exponent)
        return KOReport(beta=beta, verdict=KOVerdict.DIVERGES, reason=reason,
                        tail_exponent=exponent, offset=offset)
    return _integrate_tail(nl, beta, offset, tol, slope, min_cutoff)


def ko_integral(nl: Nonlinearity, beta: float = config.KO_CANONICAL_BETA, tol: float = config.KO_TOL,
                min_cutoff: Optional[float] = None) -> KOReport:
    """Evaluate or classify K(beta).

    Args:
        nl: Nonlinearity (not the Constant kind).
        beta: Lower limit, > 0.
        tol: Absolute tolerance on the reported value.
        min_cutoff: Smallest accepted truncation point; used to check that
            the value is insensitive to the cutoff.

    Returns:
        KOReport with a Converges or Diverges verdict.

    Raises:
        BudgetExceededError: quadrature did not converge; carries the partial value.
    """
    report = shifted_ko_integral(nl, beta, 0.0, tol, min_cutoff)
    if report.converges:
        logger.debug("K(%g) = %.12g +- %.3g", beta, report.value, report.error_bound)
    return report


def truncated_ko_integral(nl: Nonlinearity, beta: float, upper: float,
                          tol: float = config.KO_TOL) -> Tuple[float, float]:
    """int_beta^upper dt / ((k+1)(G(t) - G(beta)))^(1/(k+1)) and its error bound."""
    if not 0 < beta:
        raise DomainError(f"beta must be positive, got {beta}")
    if upper <= beta:
        return 0.0, 0.0
    quad = _KOQuadrature(nl, beta, 0.0, tol)
    quad.singular_piece(min(2.0 * beta, upper))
    while quad.boundary < upper:
        quad.regular_piece(min(quad.boundary * config.KO_TAIL_GROWTH, upper))
    return quad.value, quad.error


def ko_classify(nl: Nonlinearity) -> KOClass:
    """Holds iff K(beta) is finite, decided at the canonical beta = 1.

    Raises:
        DomainError: for the Constant kind, or g fails the sampled vanishing,
            positivity, monotonicity or convexity check.
        InsufficientDataError: tables that do not reach two decades past beta.
    """
    if not nl.ko_eligible:
        raise DomainError(f"{nl.kind} nonlinearity is excluded from Keller-Osserman classification")
    validate_g1(nl)
    report = ko_integral(nl, config.KO_CANONICAL_BETA)
    verdict = KOClass.HOLDS if report.converges else KOClass.FAILS
    logger.info("KO classification of %s: %s", nl.describe(), verdict.value)
    return verdict


def sharpened_ko_scan(nl: Nonlinearity, betas: Sequence[float], tol: float = config.KO_TOL) -> List[KOReport]:
    """K(beta) along an increasing sequence of betas."""
    betas = [float(b) for b in betas]
    if not betas or any(b <= 0 for b in betas):
        raise DomainError("betas must be positive")
    if any(b2 <= b1 for b1, b2 in zip(betas, betas[1:])):
        raise DomainError("betas must be strictly increasing")
    return [ko_integral(nl, b, tol) for b in betas]


def running_minimum(reports: Sequence[KOReport]) -> List[float]:
    """Running minimum of K over a scan; diverging entries count as +inf."""
    out: List[float] = []
    best = math.inf
    for r in reports:
        if r.converges and r.value is not None:
            best = min(best, r.value)
        out.append(best)
    return out
