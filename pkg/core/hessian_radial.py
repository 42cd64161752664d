"""The k-Hessian operator on eigenvalue vectors and on radial profiles.

sigma_k is read off the coefficients of prod_i (1 + lambda_i x), which
costs O(N k) and never enumerates subsets. For a radial function
u(x) = phi(|x|) the Hessian eigenvalues are (phi'', phi'/r, ..., phi'/r),
so sigma_k has the closed form

    C(N-1, k-1) phi'' (phi'/r)^(k-1) + C(N-1, k-1) (N-k)/k (phi'/r)^k

with the value C(N, k) phi''(0)^k at the origin.
"""
from dataclasses import dataclass
from itertools import combinations
from math import comb
from typing import Any, Dict, Optional, Sequence, Union
import logging

import numpy as np

from . import config
from .errors import AdmissibilityError, DomainError, InconsistentProfileError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ProblemSpec:
    """Dimension N, Hessian order k and, for ball problems, radius R and boundary value c."""

    N: int
    k: int
    R: Optional[float] = None
    c: Optional[float] = None

    def __post_init__(self) -> None:
        if int(self.N) != self.N or self.N < 2:
            raise DomainError(f"dimension N must be an integer >= 2, got {self.N}")
        if int(self.k) != self.k or not 1 <= self.k <= self.N:
            raise DomainError(f"Hessian order k must satisfy 1 <= k <= N = {self.N}, got {self.k}")
        if self.R is not None and not self.R > 0:
            raise DomainError(f"ball radius R must be positive, got {self.R}")
        if self.c is not None and not self.c > 0:
            raise DomainError(f"boundary value c must be positive, got {self.c}")

    @property
    def length(self) -> float:
        """Length scale for step sizes and origin cutoffs: R when set, else 1."""
        return float(self.R) if self.R is not None else 1.0

    @property
    def c_nk(self) -> int:
        return comb(self.N, self.k)

    @property
    def c_radial(self) -> int:
        """C(N-1, k-1), the factor in the radial form."""
        return comb(self.N - 1, self.k - 1)

    @property
    def flux_exponent(self) -> float:
        """q = N/k - 1, so that E = (r^q xi')^(k+1) is the radial energy."""
        return self.N / self.k - 1.0

    @property
    def weight_exponent(self) -> float:
        """m = N + N/k - 2, the power of r weighting G in the energy identity."""
        return self.N + self.N / self.k - 2.0

    def require_ball(self) -> None:
        if self.R is None or self.c is None:
            raise DomainError("this operation needs a ball radius R and a boundary value c")

    def radius(self) -> float:
        if self.R is None:
            raise DomainError("this operation needs a ball radius R")
        return float(self.R)

    def boundary_value(self) -> float:
        if self.c is None:
            raise DomainError("this operation needs a boundary value c")
        return float(self.c)

    def with_boundary(self, R: Optional[float] = None, c: Optional[float] = None) -> "ProblemSpec":
        return ProblemSpec(self.N, self.k, self.R if R is None else R, self.c if c is None else c)

    def to_dict(self) -> Dict[str, Any]:
        d: Dict[str, Any] = {"N": self.N, "k": self.k}
        if self.R is not None:
            d["R"] = self.R
        if self.c is not None:
            d["c"] = self.c
        return d


@dataclass(frozen=True)
class EigenProfile:
    """Eigenvalue vector of a Hessian."""

    lam: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.lam, dtype=float)
        if arr.ndim != 1 or arr.size == 0:
            raise DomainError("eigenvalue profile must be a non-empty vector")
        object.__setattr__(self, "lam", arr)

    @property
    def N(self) -> int:
        return int(self.lam.size)

    def __len__(self) -> int:
        return self.N


LambdaLike = Union[EigenProfile, Sequence[float], np.ndarray]


def _as_array(lam: LambdaLike) -> np.ndarray:
    if isinstance(lam, EigenProfile):
        return lam.lam
    return EigenProfile(np.asarray(lam, dtype=float)).lam


def _check_order(k: int, N: int) -> None:
    if int(k) != k or not 1 <= k <= N:
        raise DomainError(f"order k must satisfy 1 <= k <= {N}, got {k}")


def elementary_symmetric(lam: LambdaLike, k: int) -> np.ndarray:
    """[sigma_0, ..., sigma_k] from the coefficients of prod (1 + lambda_i x)."""
    arr = _as_array(lam)
    _check_order(k, arr.size)
    e = np.zeros(k + 1)
    e[0] = 1.0
    for x in arr:
        # update high orders first so each lambda enters once
        e[1:] = e[1:] + x * e[:-1]
    return e


def sigma_k(lam: LambdaLike, k: int) -> float:
    """k-th elementary symmetric polynomial of the eigenvalues.

    Raises:
        DomainError: k outside 1..N.
    """
    return float(elementary_symmetric(lam, k)[k])


def sigma_k_by_subsets(lam: LambdaLike, k: int) -> float:
    """Reference value by explicit subset enumeration (N <= 10)."""
    arr = _as_array(lam)
    _check_order(k, arr.size)
    if arr.size > 10:
        raise DomainError("subset enumeration is limited to N <= 10")
    return float(sum(np.prod(arr[list(idx)]) for idx in combinations(range(arr.size), k)))


def _near_origin(r: float, length: Optional[float]) -> bool:
    return r < config.ORIGIN_FRACTION * (length if length else 1.0)


def _slope_ratio(r: float, phi1: float, phi2: float, length: Optional[float]) -> float:
    if r < 0:
        raise DomainError(f"radius must be non-negative, got {r}")
    if r == 0:
        if phi1 != 0:
            raise InconsistentProfileError(
                f"a radial C^2 profile has zero slope at the origin, got phi'(0) = {phi1}",
                diagnostics={"phi1": phi1},
            )
        return phi2
    if _near_origin(r, length):
        return phi2
    return phi1 / r


def radial_eigenvalues(r: float, phi1: float, phi2: float, N: int, length: Optional[float] = None) -> EigenProfile:
    """(phi'', phi'/r, ..., phi'/r); below 1e-8 * length, phi'/r is replaced by phi''.

    Raises:
        InconsistentProfileError: r = 0 with phi1 != 0.
    """
    if int(N) != N or N < 1:
        raise DomainError(f"dimension must be a positive integer, got {N}")
    w = _slope_ratio(r, phi1, phi2, length)
    lam = np.full(N, w, dtype=float)
    lam[0] = phi2
    return EigenProfile(lam)


def sigma_k_radial(r: float, phi1: float, phi2: float, spec: ProblemSpec) -> float:
    """Closed-form sigma_k of a radial profile; C(N, k) phi''^k at the origin."""
    w = _slope_ratio(r, phi1, phi2, spec.R)
    if r == 0 or _near_origin(r, spec.R):
        return spec.c_nk * phi2 ** spec.k
    C = spec.c_radial
    return C * phi2 * w ** (spec.k - 1) + C * (spec.N - spec.k) / spec.k * w ** spec.k


def _admissibility_threshold(arr: np.ndarray, j: int) -> float:
    return config.ADMISSIBILITY_TOL * max(1.0, float(np.linalg.norm(arr)) ** j)


def first_nonadmissible_order(lam: LambdaLike, k: int) -> Optional[int]:
    """Smallest j <= k with sigma_j not strictly positive, or None."""
    arr = _as_array(lam)
    e = elementary_symmetric(arr, k)
    for j in range(1, k + 1):
        if not e[j] > _admissibility_threshold(arr, j):
            return j
    return None


def is_k_admissible(lam: LambdaLike, k: int) -> bool:
    """True iff sigma_j(lambda) > 0 for every j = 1..k (the Garding cone)."""
    return first_nonadmissible_order(lam, k) is None


def maclaurin_gap(lam: LambdaLike, k: int) -> float:
    """sigma_1/N - (sigma_k / C(N, k))^(1/k), non-negative on the admissible cone.

    Raises:
        AdmissibilityError: naming the first order j with sigma_j <= 0.
    """
    arr = _as_array(lam)
    j = first_nonadmissible_order(arr, k)
    if j is not None:
        raise AdmissibilityError(f"eigenvalues are not {k}-admissible: sigma_{j} <= 0", order=j)
    e = elementary_symmetric(arr, k)
    N = arr.size
    return float(e[1] / N - (e[k] / comb(N, k)) ** (1.0 / k))
