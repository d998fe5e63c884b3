"""Linear (affine) normalization of maxima and the attraction criterion.

The whole linear theory is parametrized by the family

    k_rho(u) = (u**rho - 1)/rho   (rho != 0),      k_0(u) = log(u),

strictly increasing in u with k_rho(1) = 0.  A law F lies in a linear
domain of attraction iff the ratio of upper-quantile increments

    [Q(1 - eps*u) - Q(1 - eps)] / [Q(1 - eps*v) - Q(1 - eps)]

converges as eps -> 0, in which case the limit is k_rho(u)/k_rho(v) and the
tail increment r(eps) = Q(1-eps) - Q(1-2eps) is regularly varying of index
rho, which is how ``estimate_rho`` reads rho off a scale sweep.  With the
canonical constants b_n = Q(1-1/n) and a_n = Q(1-2/n) - b_n (note a_n <= 0),
(M_n - b_n)/a_n converges in law to k_rho(omega)/k_rho(2) with omega
standard exponential; ``limit_cdf`` is that limit law.  The sign of rho
separates the three classical types: rho < 0 heavy tail (frechet), rho = 0
(gumbel), rho > 0 bounded tail (weibull).
"""

import math
from dataclasses import dataclass

import numpy as np

from .dist import Distribution, quantile
from .errors import (
    ContractViolationError,
    DegenerateNormalizationError,
    DegenerateTailError,
    DomainError,
    InconsistentTailError,
)
from .reports import CAUCHY_WINDOW, ConvergenceReport, build_report

__all__ = [
    "RHO_SERIES_BAND",
    "DEFAULT_UV_GRID",
    "DEFAULT_CAUCHY_TOL",
    "DEFAULT_CLASSIFY_TOL",
    "default_eps_grid",
    "k_rho",
    "dehaan_ratio",
    "dehaan_test",
    "RhoEstimate",
    "estimate_rho",
    "NormingConstants",
    "norming_constants",
    "limit_cdf",
    "TypeClass",
    "classify_type",
]

# |rho| at or below this band uses a 3-term series in z = rho*log(u); the
# closed form loses all significance there.
RHO_SERIES_BAND = 1e-6

DEFAULT_UV_GRID = tuple(
    (u, v) for u in (0.25, 0.5, 2.0, 4.0) for v in (0.25, 0.5, 2.0, 4.0) if u != v
)
DEFAULT_CAUCHY_TOL = 1e-3
DEFAULT_CLASSIFY_TOL = 1e-2


def default_eps_grid(start: float = 1e-2, stop: float = 1e-6, count: int = 16):
    """Strictly decreasing geometric scale grid."""
    return np.geomspace(start, stop, count)


def k_rho(rho: float, u):
    """k_rho(u) = (u**rho - 1)/rho, continuously extended through rho = 0."""
    if math.isnan(rho):
        raise DomainError("rho must be a real number")
    arr = np.asarray(u, dtype=float)
    if np.any(np.isnan(arr)) or np.any(arr <= 0.0):
        raise DomainError("u must be positive")
    log_u = np.log(arr)
    if rho == 0.0:
        out = log_u
    elif abs(rho) > RHO_SERIES_BAND:
        out = (arr**rho - 1.0) / rho
    else:
        z = rho * log_u
        out = log_u * (1.0 + z / 2.0 + z * z / 6.0)
    if np.ndim(u) == 0:
        return float(out)
    return out


def _k_rho_inverse(rho: float, y):
    # inverse of k_rho on its range; callers clamp outside 1 + rho*y > 0
    y = np.asarray(y, dtype=float)
    if rho == 0.0:
        return np.exp(y)
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.exp(np.log1p(rho * y) / rho)


def _tail_increment(dist: Distribution, eps_lo: float, eps_hi: float) -> float:
    # Q(1 - eps_lo) - Q(1 - eps_hi) for eps_lo < eps_hi
    return quantile(dist, 1.0 - eps_lo) - quantile(dist, 1.0 - eps_hi)


def _validate_eps(eps: float, factor: float = 1.0):
    if not isinstance(eps, (int, float)) or math.isnan(eps) or eps <= 0.0:
        raise DomainError(f"eps must be positive, got {eps!r}")
    if eps * factor >= 1.0:
        raise DomainError(f"eps * {factor} must stay below 1, got eps={eps}")


def dehaan_ratio(dist: Distribution, u: float, v: float, eps: float) -> float:
    """[Q(1-eps*u) - Q(1-eps)] / [Q(1-eps*v) - Q(1-eps)] at scale eps.

    The denominator vanishing (flat upper quantile between the two tail
    masses) raises ``DegenerateTailError``.
    """
    for name, val in (("u", u), ("v", v)):
        if not isinstance(val, (int, float)) or math.isnan(val) or val <= 0.0:
            raise DomainError(f"{name} must be positive, got {val!r}")
    if v == 1.0:
        raise DomainError("v = 1 makes the denominator identically zero")
    _validate_eps(eps, max(u, v, 1.0))
    q0 = quantile(dist, 1.0 - eps)
    num = quantile(dist, 1.0 - eps * u) - q0
    den = quantile(dist, 1.0 - eps * v) - q0
    if den == 0.0:
        raise DegenerateTailError(
            f"flat upper quantile: Q(1-{eps}*{v}) == Q(1-{eps}) for {dist.name}"
        )
    return float(num / den)


def dehaan_test(
    dist: Distribution,
    eps_grid=None,
    uv_grid=DEFAULT_UV_GRID,
    tol: float = DEFAULT_CAUCHY_TOL,
) -> ConvergenceReport:
    """Evaluate the attraction criterion on a scale sweep.

    Ratios are tabulated per (u, v) pair across the strictly decreasing
    ``eps_grid``; a pair converges when its last three values sit within
    ``tol`` of each other, and the report's limit table holds the value at
    the smallest scale.  A degenerate tail is re-raised with the offending
    (u, v, eps) attached.
    """
    scales = np.asarray(
        default_eps_grid() if eps_grid is None else eps_grid, dtype=float
    )
    if scales.size < 4:
        raise DomainError("eps_grid needs at least 4 scales")
    if np.any(np.diff(scales) >= 0.0) or np.any(scales <= 0.0):
        raise DomainError("eps_grid must be strictly decreasing and positive")
    pairs = [(float(u), float(v)) for u, v in uv_grid]
    if not pairs:
        raise DomainError("uv_grid must be nonempty")
    values = np.empty((len(pairs), scales.size))
    for i, (u, v) in enumerate(pairs):
        for j, eps in enumerate(scales):
            try:
                values[i, j] = dehaan_ratio(dist, u, v, float(eps))
            except DegenerateTailError as exc:
                raise DegenerateTailError(
                    f"{exc} at (u, v, eps) = ({u}, {v}, {eps})"
                ) from exc
    return build_report(
        "eps", scales.tolist(), "uv", pairs, values, tol, CAUCHY_WINDOW
    )


@dataclass(frozen=True)
class RhoEstimate:
    """Per-scale index estimates; ``rho`` is the value at the finest scale,
    ``spread`` the max-min over the stabilized (second) half of the sweep."""

    rho: float
    per_scale: tuple  # (eps, rho_hat) pairs, coarse to fine
    spread: float

    def to_csv_rows(self):
        return ["eps", "rho_hat"], [(float(e), float(r)) for e, r in self.per_scale]

    def to_json_dict(self) -> dict:
        return {
            "rho": self.rho,
            "spread": self.spread,
            "per_scale": [[float(e), float(r)] for e, r in self.per_scale],
        }


def estimate_rho(dist: Distribution, eps_grid=None, w: float = 2.0) -> RhoEstimate:
    """Read rho off the regular variation of r(eps) = Q(1-eps) - Q(1-2eps).

    Per scale, rho_hat(eps) = log(r(eps*w)/r(eps)) / log(w).  A vanishing
    r raises ``DegenerateTailError``; r changing sign across scales raises
    ``InconsistentTailError`` (it cannot for a true quantile).
    """
    if not isinstance(w, (int, float)) or math.isnan(w) or w <= 1.0:
        raise DomainError(f"w must exceed 1, got {w!r}")
    scales = np.asarray(
        default_eps_grid() if eps_grid is None else eps_grid, dtype=float
    )
    if scales.size < 1:
        raise DomainError("eps_grid must be nonempty")
    if np.any(np.diff(scales) >= 0.0) or np.any(scales <= 0.0):
        raise DomainError("eps_grid must be strictly decreasing and positive")
    _validate_eps(float(scales[0]), 2.0 * w)
    r_vals = {}
    for eps in scales:
        for e in (float(eps), float(eps) * w):
            r = _tail_increment(dist, e, 2.0 * e)
            if r == 0.0:
                raise DegenerateTailError(
                    f"tail increment r({e}) = 0 for {dist.name}"
                )
            r_vals[e] = r
    signs = {math.copysign(1.0, r) for r in r_vals.values()}
    if len(signs) > 1:
        raise InconsistentTailError("tail increment changed sign across scales")
    per_scale = []
    for eps in scales:
        e = float(eps)
        rho_hat = math.log(r_vals[e * w] / r_vals[e]) / math.log(w)
        per_scale.append((e, rho_hat))
    ests = [r for _, r in per_scale]
    tail = ests[len(ests) // 2 :]
    return RhoEstimate(
        rho=float(ests[-1]),
        per_scale=tuple(per_scale),
        spread=float(max(tail) - min(tail)),
    )


@dataclass(frozen=True)
class NormingConstants:
    """b_n = Q(1 - 1/n) and a_n = Q(1 - 2/n) - b_n; a_n is always <= 0."""

    n: int
    a_n: float
    b_n: float

    def to_csv_rows(self):
        return ["n", "a_n", "b_n"], [(self.n, self.a_n, self.b_n)]

    def to_json_dict(self) -> dict:
        return {"n": self.n, "a_n": self.a_n, "b_n": self.b_n}


def norming_constants(dist: Distribution, n: int) -> NormingConstants:
    """Canonical affine constants at index n (requires n >= 3 so 2/n < 1)."""
    if not isinstance(n, (int, np.integer)) or n < 3:
        raise DomainError(f"n must be an integer >= 3, got {n!r}")
    b = quantile(dist, 1.0 - 1.0 / n)
    a = quantile(dist, 1.0 - 2.0 / n) - b
    if a == 0.0:
        raise DegenerateNormalizationError(
            f"a_n = 0 at n = {n} for {dist.name}: the upper quantile is flat "
            "between tail masses 2/n and 1/n"
        )
    if a > 0.0:
        raise ContractViolationError(
            f"quantile is not monotone: a_n = {a} > 0 at n = {n}"
        )
    return NormingConstants(n=int(n), a_n=float(a), b_n=float(b))


def limit_cdf(rho: float, x):
    """cdf of k_rho(omega)/k_rho(2), omega standard exponential.

    G_rho(x) = 1 - exp(-k_rho^{-1}(x * k_rho(2))); outside the inverse's
    range the value clamps to 0 (rho > 0) or 1 (rho < 0).  G_rho(0) equals
    1 - 1/e for every rho.
    """
    if math.isnan(rho):
        raise DomainError("rho must be a real number")
    arr = np.asarray(x, dtype=float)
    if np.any(np.isnan(arr)):
        raise DomainError("x must not be NaN")
    y = arr * k_rho(rho, 2.0)
    if rho == 0.0:
        out = 1.0 - np.exp(-np.exp(y))
    else:
        inside = 1.0 + rho * y > 0.0
        out = np.where(inside, 1.0 - np.exp(-_k_rho_inverse(rho, np.where(inside, y, 0.0))), 0.0)
        out = np.where(inside, out, 0.0 if rho > 0.0 else 1.0)
    if np.ndim(x) == 0:
        return float(out)
    return out


@dataclass(frozen=True)
class TypeClass:
    """Classical type read off the sign of rho."""

    kind: str  # "frechet" | "gumbel" | "weibull"
    rho: float


def classify_type(rho: float, tol: float = DEFAULT_CLASSIFY_TOL) -> TypeClass:
    """rho < -tol: frechet; |rho| <= tol: gumbel; rho > tol: weibull."""
    if math.isnan(rho):
        raise DomainError("rho must be a real number")
    if math.isnan(tol) or tol < 0.0:
        raise DomainError(f"tol must be >= 0, got {tol!r}")
    if rho < -tol:
        kind = "frechet"
    elif rho > tol:
        kind = "weibull"
    else:
        kind = "gumbel"
    return TypeClass(kind=kind, rho=float(rho))
