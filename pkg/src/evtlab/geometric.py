"""The geometric law and its oscillating maxima.

For success parameter p the cdf is the step function F(t) = 1 - p**floor(t+1)
on t >= 0, whose upper quantiles move in integer jumps of size governed by
theta = -1/log(p).  Because frac(theta * log n) is dense in [0, 1] but never
settles, the probability P{M_n <= floor(theta log n) + q} oscillates
persistently between exp(-p**(q+1)) and exp(-p**q); no choice of constants
removes the oscillation.  This module provides the closed-form cdf/quantile
pair, a hardened floor of theta*log n, a constructive search for fractional
parts, the oscillation scan itself, and the geometrically spaced
subsequences along which the probe does converge.

Floor hardening: whenever theta*log n (or log u / log p) lands within 1e-9
of an integer k, the ambiguity is resolved by exact rational comparison of
n * p**k against 1 (respectively u against p**k) using the exact binary
values of p and u, so dyadic cases such as p = 1/2, n = 2**k come out exact.
"""

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import DomainError, SearchHorizonError

__all__ = [
    "GeometricParams",
    "geom_cdf",
    "geom_quantile",
    "floor_theta_log_n",
    "frac_log_search",
    "OscillationReport",
    "oscillation_scan",
    "subsequence_generator",
]

NEAR_INTEGER_BAND = 1e-9
_THETA_IDENTITY_TOL = 1e-12
# Beyond this exponent the exact rational comparison is pointless (and slow);
# the float floor is unambiguous anyway at such scales.
_EXACT_POW_LIMIT = 200_000


@dataclass(frozen=True)
class GeometricParams:
    """Success parameter p in (0, 1) and the step scale theta = -1/log(p).

    theta must satisfy theta * log(1/p) == 1 to within 1e-12; omit it to have
    it derived from p.
    """

    p: float
    theta: float = field(default=None)

    def __post_init__(self):
        if not isinstance(self.p, (int, float)) or math.isnan(self.p):
            raise DomainError(f"p must be a real number in (0, 1), got {self.p!r}")
        if not 0.0 < self.p < 1.0:
            raise DomainError(f"p must lie in (0, 1), got {self.p}")
        derived = -1.0 / math.log(self.p)
        if self.theta is None:
            object.__setattr__(self, "theta", derived)
        elif abs(self.theta * math.log(1.0 / self.p) - 1.0) > _THETA_IDENTITY_TOL:
            raise DomainError(
                f"theta={self.theta} inconsistent with p={self.p}: "
                f"theta * log(1/p) must equal 1 to {_THETA_IDENTITY_TOL}"
            )


def geom_cdf(params: GeometricParams, t):
    """F(t) = 1 - p**floor(t+1) for t >= 0, and 0 for t < 0."""
    p = params.p
    arr = np.asarray(t, dtype=float)
    if np.any(np.isnan(arr)):
        raise DomainError("t must not be NaN")
    exponent = np.where(arr < 0.0, 1.0, np.floor(arr + 1.0))
    out = np.where(arr < 0.0, 0.0, 1.0 - p**exponent)
    if np.ndim(t) == 0:
        return float(out)
    return out


def _exact_floor_of_log_ratio(u: float, p: float, k: int) -> int:
    # floor(log u / log p) when the float ratio is within the guard band of k:
    # log u <= k log p  <=>  u <= p**k  (log p < 0), decided exactly on the
    # binary values of u and p.
    if 0 <= k <= _EXACT_POW_LIMIT:
        if Fraction(u) <= Fraction(p) ** k:
            return k
        return k - 1
    return int(math.floor(math.log(u) / math.log(p)))


def geom_quantile(params: GeometricParams, u):
    """Upper quantile at tail mass u: the smallest t with p**floor(t+1) < u.

    Note the argument is the tail mass, not the cdf level; the value equals
    floor(log u / log p).  Ratios within 1e-9 of an integer are resolved by
    exact comparison of u against p**k.
    """
    p = params.p
    scalar = np.ndim(u) == 0
    arr = np.asarray(u, dtype=float)
    if np.any(np.isnan(arr)) or np.any(arr <= 0.0) or np.any(arr >= 1.0):
        raise DomainError("tail mass u must lie in (0, 1)")
    ratio = np.log(arr) / math.log(p)
    out = np.floor(ratio)
    nearest = np.rint(ratio)
    guard = np.abs(ratio - nearest) < NEAR_INTEGER_BAND
    if np.any(guard):
        flat_u = np.atleast_1d(arr)
        flat_near = np.atleast_1d(nearest)
        flat_out = np.atleast_1d(out)
        for idx in np.flatnonzero(np.atleast_1d(guard)):
            flat_out[idx] = _exact_floor_of_log_ratio(
                float(flat_u[idx]), p, int(flat_near[idx])
            )
        out = flat_out.reshape(out.shape) if not scalar else flat_out[0]
    if scalar:
        return float(out)
    return out


def floor_theta_log_n(params: GeometricParams, n: int) -> int:
    """floor(theta * log n) with the near-integer guard resolved exactly.

    theta * log n >= k  <=>  n * p**k >= 1, which is decided in exact
    rational arithmetic when the float product sits within 1e-9 of k.
    """
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise DomainError(f"n must be a positive integer, got {n!r}")
    t = params.theta * math.log(n)
    k = round(t)
    if abs(t - k) >= NEAR_INTEGER_BAND or not 0 <= k <= _EXACT_POW_LIMIT:
        return int(math.floor(t))
    if int(n) * Fraction(params.p) ** k >= 1:
        return k
    return k - 1


_SEARCH_CHUNK = 1 << 16


def sufficient_horizon(theta: float, x: float, y: float) -> int:
    """A horizon guaranteed to contain some n with frac(theta log n) in [x, y].

    Once q >= theta*log(1/(exp((y-x)/theta) - 1)) - x, the real interval
    [exp((q+x)/theta), exp((q+y)/theta)] has length >= 1 and so contains an
    integer witness; the bound is the right endpoint of the first such
    interval.
    """
    growth = math.expm1((y - x) / theta)
    q_star = theta * math.log(1.0 / growth) - x
    q_hat = max(0, math.ceil(q_star))
    return int(math.ceil(math.exp((q_hat + y) / theta)))


def frac_log_search(theta: float, x: float, y: float, n_max: int):
    """Smallest n <= n_max with frac(theta * log n) in [x, y].

    Returns ``(n, frac_value, horizon)`` where ``horizon`` is the precomputed
    sufficient bound.  If ``n_max`` is below the bound a warning is issued
    before scanning; exhausting the scan raises ``SearchHorizonError``
    carrying the bound.
    """
    if not (isinstance(theta, (int, float)) and theta > 0.0) or math.isnan(theta):
        raise DomainError(f"theta must be positive, got {theta!r}")
    if not 0.0 <= x < y <= 1.0:
        raise DomainError(f"need 0 <= x < y <= 1, got x={x}, y={y}")
    if not isinstance(n_max, (int, np.integer)) or n_max < 1:
        raise DomainError(f"n_max must be a positive integer, got {n_max!r}")
    horizon = sufficient_horizon(theta, x, y)
    if n_max < horizon:
        warnings.warn(
            f"n_max={n_max} is below the sufficient horizon {horizon}; "
            "the search may fail",
            stacklevel=2,
        )
    for lo in range(1, int(n_max) + 1, _SEARCH_CHUNK):
        hi = min(lo + _SEARCH_CHUNK, int(n_max) + 1)
        ns = np.arange(lo, hi, dtype=np.int64)
        t = theta * np.log(ns)
        frac = t - np.floor(t)
        hits = np.flatnonzero((frac >= x) & (frac <= y))
        if hits.size:
            n = int(ns[hits[0]])
            return n, float(frac[hits[0]]), horizon
    raise SearchHorizonError(
        f"no n <= {n_max} with frac(theta log n) in [{x}, {y}]; "
        f"a horizon of {horizon} suffices",
        sufficient_horizon=horizon,
    )


@dataclass(frozen=True)
class OscillationReport:
    """Scan of P{M_n <= floor(theta log n) + q} over a grid of n.

    ``levels`` holds the probed integer level for each n, ``probs`` the exact
    probability (1 - p**(level+1))**n.  The lim inf / lim sup estimates are
    taken over the tail half of the grid; ``cluster_points`` pairs each
    requested fractional-part value c with its analytic cluster limit
    exp(-p**(q+1-c)).
    """

    params: GeometricParams
    q: int
    n_values: np.ndarray
    levels: np.ndarray
    probs: np.ndarray
    lim_inf_est: float
    lim_sup_est: float
    cluster_points: tuple

    @property
    def probe(self) -> list:
        return list(zip(self.n_values.tolist(), self.probs.tolist()))

    def to_csv_rows(self):
        header = ["n", "m", "probability"]
        rows = [
            (int(n), int(m), float(pr))
            for n, m, pr in zip(self.n_values, self.levels, self.probs)
        ]
        return header, rows

    def to_json_dict(self) -> dict:
        return {
            "p": self.params.p,
            "theta": self.params.theta,
            "q": self.q,
            "n": [int(v) for v in self.n_values],
            "m": [int(v) for v in self.levels],
            "probability": [float(v) for v in self.probs],
            "lim_inf_est": self.lim_inf_est,
            "lim_sup_est": self.lim_sup_est,
            "cluster_points": [[float(c), float(v)] for c, v in self.cluster_points],
        }


def cluster_limit(params: GeometricParams, q: int, c: float) -> float:
    """Limit of the probe along subsequences with frac(theta log n) -> c."""
    if not 0.0 <= c < 1.0:
        raise DomainError(f"c must lie in [0, 1), got {c}")
    return math.exp(-params.p ** (q + 1 - c))


def oscillation_scan(
    params: GeometricParams,
    q: int,
    n_values,
    cluster_cs=(0.0, 0.5, 0.9),
) -> OscillationReport:
    """Probe P{M_n <= floor(theta log n) + q} across ``n_values``.

    Probabilities are computed as exp(n * log1p(-p**(m+1))) to keep large-n
    values exact to machine precision; a probed level below zero has
    probability exactly 0 and is recorded as such.
    """
    ns = np.asarray(n_values, dtype=np.int64)
    if ns.size == 0:
        raise DomainError("n_values must be nonempty")
    if np.any(ns < 1):
        raise DomainError("n_values must be positive integers")
    if np.any(np.diff(ns) <= 0):
        raise DomainError("n_values must be strictly increasing")
    p = params.p
    levels = np.empty(ns.size, dtype=np.int64)
    probs = np.empty(ns.size, dtype=float)
    for i, n in enumerate(ns):
        m = floor_theta_log_n(params, int(n)) + int(q)
        levels[i] = m
        probs[i] = 0.0 if m < 0 else math.exp(n * math.log1p(-(p ** (m + 1))))
    tail = probs[probs.size // 2 :]
    cluster = tuple((float(c), cluster_limit(params, int(q), float(c))) for c in cluster_cs)
    return OscillationReport(
        params=params,
        q=int(q),
        n_values=ns,
        levels=levels,
        probs=probs,
        lim_inf_est=float(np.min(tail)),
        lim_sup_est=float(np.max(tail)),
        cluster_points=cluster,
    )


def subsequence_generator(params: GeometricParams, c: float, k_range) -> np.ndarray:
    """n_k = round(exp((k+c)/theta)): along these, frac(theta log n_k) -> c.

    Consecutive entries grow by the factor 1/p, so the gaps n_{k+1} - n_k
    grow geometrically.  Rounding collisions (two k mapping to one n) are
    reported via a warning and deduplicated.
    """
    if not 0.0 <= c < 1.0:
        raise DomainError(f"c must lie in [0, 1), got {c}")
    ks = np.asarray(k_range, dtype=np.int64)
    if ks.size == 0:
        raise DomainError("k_range must be nonempty")
    log_inv_p = math.log(1.0 / params.p)
    vals = np.array([math.exp((int(k) + c) * log_inv_p) for k in ks])
    if np.any(vals < 1.0):
        raise DomainError("k_range entries must satisfy (k + c)/theta >= 0")
    if np.any(vals > 2**62):
        raise DomainError("k_range entries overflow the integer range")
    ns = np.rint(vals).astype(np.int64)
    unique = np.unique(ns)
    if unique.size < ns.size:
        warnings.warn(
            f"{ns.size - unique.size} rounding collision(s) in the subsequence; "
            "deduplicated",
            stacklevel=2,
        )
    return unique
