"""Distribution models with generalized-inverse quantiles.

The quantile convention throughout is the strict generalized inverse
Q(u) = inf{x : F(x) > u}.  For continuous strictly increasing laws this is
the ordinary inverse; at an atom it picks the atom's location for every u
in the closed step [F(x-), F(x)), which is what makes the step-law algebra
in the geometric module come out exactly.

Distribution values are immutable; their cdf/quantile callables are pure,
numpy-vectorized, and safe to share across threads.  Built-in families use
closed forms (the normal law delegates to scipy's ndtr/ndtri);
``numeric_quantile`` provides an independent bisection route for arbitrary
monotone cdfs.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import ndtr, ndtri

from . import geometric as _geom
from .errors import BracketingError, ContractViolationError, DomainError
from .stats import uniform_open

__all__ = [
    "Distribution",
    "BracketPolicy",
    "uniform",
    "exponential",
    "pareto",
    "normal",
    "degenerate",
    "geometric",
    "quantile",
    "numeric_quantile",
    "sample_quantile_transform",
    "parse_distribution",
    "spec_string",
    "CONTINUOUS",
    "DISCRETE",
]

CONTINUOUS = "continuous"
DISCRETE = "discrete"


@dataclass(frozen=True)
class Distribution:
    """A named law: vectorized cdf, strict generalized-inverse quantile,
    support interval, and kind tag ('continuous' or 'discrete')."""

    name: str
    cdf: callable
    quantile: callable
    support: tuple
    kind: str
    params: dict = field(default_factory=dict)

    def __repr__(self) -> str:  # params only; callables are noise
        return f"Distribution({spec_string(self)!r})"


def _validate_u(u):
    arr = np.asarray(u, dtype=float)
    if np.any(np.isnan(arr)) or np.any(arr <= 0.0) or np.any(arr >= 1.0):
        raise DomainError("quantile argument u must lie in the open interval (0, 1)")
    return arr


def quantile(dist: Distribution, u):
    """Q(u) = inf{x : F(x) > u} for u in (0, 1); endpoints are rejected."""
    arr = _validate_u(u)
    out = dist.quantile(arr)
    if np.ndim(u) == 0:
        return float(out)
    return np.asarray(out, dtype=float)


def uniform(a: float = 0.0, b: float = 1.0) -> Distribution:
    if not (math.isfinite(a) and math.isfinite(b)) or b <= a:
        raise DomainError(f"uniform requires a < b, got a={a}, b={b}")
    width = b - a

    def cdf(x):
        return np.clip((np.asarray(x, dtype=float) - a) / width, 0.0, 1.0)

    def q(u):
        return a + np.asarray(u, dtype=float) * width

    return Distribution("uniform", cdf, q, (a, b), CONTINUOUS, {"a": a, "b": b})


def exponential(rate: float = 1.0) -> Distribution:
    if not (math.isfinite(rate) and rate > 0.0):
        raise DomainError(f"exponential requires rate > 0, got {rate}")

    def cdf(x):
        arr = np.asarray(x, dtype=float)
        return np.where(arr < 0.0, 0.0, -np.expm1(-rate * np.maximum(arr, 0.0)))

    def q(u):
        return -np.log1p(-np.asarray(u, dtype=float)) / rate

    return Distribution(
        "exponential", cdf, q, (0.0, math.inf), CONTINUOUS, {"rate": rate}
    )


def pareto(alpha: float = 1.0) -> Distribution:
    if not (math.isfinite(alpha) and alpha > 0.0):
        raise DomainError(f"pareto requires alpha > 0, got {alpha}")

    def cdf(x):
        arr = np.asarray(x, dtype=float)
        return np.where(arr < 1.0, 0.0, 1.0 - np.maximum(arr, 1.0) ** (-alpha))

    def q(u):
        return (1.0 - np.asarray(u, dtype=float)) ** (-1.0 / alpha)

    return Distribution(
        "pareto", cdf, q, (1.0, math.inf), CONTINUOUS, {"alpha": alpha}
    )


def normal(mu: float = 0.0, sigma: float = 1.0) -> Distribution:
    if not math.isfinite(mu) or not (math.isfinite(sigma) and sigma > 0.0):
        raise DomainError(f"normal requires finite mu and sigma > 0, got {mu}, {sigma}")

    def cdf(x):
        return ndtr((np.asarray(x, dtype=float) - mu) / sigma)

    def q(u):
        return mu + sigma * ndtri(np.asarray(u, dtype=float))

    return Distribution(
        "normal", cdf, q, (-math.inf, math.inf), CONTINUOUS, {"mu": mu, "sigma": sigma}
    )


def degenerate(c: float = 0.0) -> Distribution:
    if not math.isfinite(c):
        raise DomainError(f"degenerate requires finite c, got {c}")

    def cdf(x):
        return np.where(np.asarray(x, dtype=float) >= c, 1.0, 0.0)

    def q(u):
        return np.full_like(np.asarray(u, dtype=float), c)

    return Distribution("degenerate", cdf, q, (c, c), DISCRETE, {"c": c})


def geometric(p: float = 0.5) -> Distribution:
    params = _geom.GeometricParams(p)

    def cdf(x):
        return _geom.geom_cdf(params, x)

    def q(u):
        # tail-mass orientation: Q(u) = geom_quantile at tail mass 1 - u
        return _geom.geom_quantile(params, 1.0 - np.asarray(u, dtype=float))

    return Distribution("geometric", cdf, q, (0.0, math.inf), DISCRETE, {"p": p})


@dataclass(frozen=True)
class BracketPolicy:
    """Geometric bracket expansion for numeric quantile inversion."""

    lo: float = -1.0
    hi: float = 1.0
    growth: float = 2.0
    max_expansions: int = 1100

    def __post_init__(self):
        if not self.lo < self.hi:
            raise DomainError("bracket requires lo < hi")
        if self.growth <= 1.0:
            raise DomainError("bracket growth factor must exceed 1")


_PROB_TOL = 1e-12
_X_RTOL = 1e-12
_MONOTONE_SLACK = 1e-12


def _checked_cdf(cdf, x: float) -> float:
    v = float(cdf(x))
    if math.isnan(v) or v < 0.0 or v > 1.0:
        raise ContractViolationError(f"cdf({x}) = {v} is outside [0, 1]")
    return v


def numeric_quantile(cdf, u: float, bracket: BracketPolicy | None = None) -> float:
    """Invert a monotone cdf by bisection: the infimum-side root of F(x) > u.

    The bracket [lo, hi] is expanded geometrically until it straddles level
    u, then bisected until either the probability gap across the bracket is
    below 1e-12 or the bracket width is below 1e-12 relative.  The returned
    point always satisfies F(x) > u, so at a jump it converges to the jump
    location from above.  A cdf value that breaks monotonicity along the way
    raises ``ContractViolationError``.
    """
    u = float(u)
    if math.isnan(u) or not 0.0 < u < 1.0:
        raise DomainError("quantile argument u must lie in the open interval (0, 1)")
    policy = bracket if bracket is not None else BracketPolicy()
    lo, hi = float(policy.lo), float(policy.hi)
    f_lo, f_hi = _checked_cdf(cdf, lo), _checked_cdf(cdf, hi)
    step = hi - lo
    for _ in range(policy.max_expansions):
        if f_hi > u:
            break
        lo, f_lo = hi, f_hi
        step *= policy.growth
        hi = hi + step
        f_hi = _checked_cdf(cdf, hi)
    else:
        raise BracketingError(
            f"cdf never exceeded u={u} after {policy.max_expansions} expansions"
        )
    step = hi - lo
    for _ in range(policy.max_expansions):
        if f_lo <= u:
            break
        hi, f_hi = lo, f_lo
        step *= policy.growth
        lo = lo - step
        f_lo = _checked_cdf(cdf, lo)
    else:
        raise BracketingError(
            f"cdf never fell to u={u} after {policy.max_expansions} expansions"
        )
    # invariant: f_lo <= u < f_hi
    for _ in range(20000):
        if f_hi - f_lo <= _PROB_TOL:
            return hi
        if hi - lo <= _X_RTOL * max(1.0, abs(lo), abs(hi)):
            return hi
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:  # bracket exhausted float resolution
            return hi
        f_mid = _checked_cdf(cdf, mid)
        if f_mid < f_lo - _MONOTONE_SLACK or f_mid > f_hi + _MONOTONE_SLACK:
            raise ContractViolationError(
                f"cdf is not monotone: F({mid}) = {f_mid} outside "
                f"[F({lo}) = {f_lo}, F({hi}) = {f_hi}]"
            )
        if f_mid <= u:
            lo, f_lo = mid, f_mid
        else:
            hi, f_hi = mid, f_mid
    raise BracketingError("bisection failed to converge")


def sample_quantile_transform(dist: Distribution, rng, count: int):
    """``count`` draws of Q(U) with U uniform on (0, 1) from ``rng``.

    For uniform(0, 1) the output is bit-identical to the raw uniform stream;
    discrete laws are sampled exactly through the same route.
    """
    if not isinstance(count, (int, np.integer)) or count < 1:
        raise DomainError(f"count must be a positive integer, got {count!r}")
    u = uniform_open(rng, int(count))
    return np.asarray(dist.quantile(u), dtype=float)


_FAMILIES = {
    "uniform": (uniform, ("a", "b")),
    "exponential": (exponential, ("rate",)),
    "pareto": (pareto, ("alpha",)),
    "normal": (normal, ("mu", "sigma")),
    "degenerate": (degenerate, ("c",)),
    "geometric": (geometric, ("p",)),
}


def parse_distribution(text: str) -> Distribution:
    """Parse ``family:param=value[,param=value]``, e.g. ``pareto:alpha=2``.

    Parameters are optional and default per family; ``uniform:`` and plain
    ``uniform`` both denote uniform(0, 1).
    """
    if not isinstance(text, str) or not text.strip():
        raise DomainError("distribution spec must be a nonempty string")
    name, _, rest = text.strip().partition(":")
    name = name.strip()
    if name not in _FAMILIES:
        raise DomainError(
            f"unknown family {name!r}; choose from {sorted(_FAMILIES)}"
        )
    factory, keys = _FAMILIES[name]
    kwargs = {}
    if rest.strip():
        for item in rest.split(","):
            key, eq, value = item.partition("=")
            key = key.strip()
            if not eq or key not in keys:
                raise DomainError(
                    f"bad parameter {item!r} for family {name!r}; "
                    f"valid keys: {list(keys)}"
                )
            try:
                kwargs[key] = float(value)
            except ValueError:
                raise DomainError(f"parameter {key!r} has non-numeric value {value!r}")
    return factory(**kwargs)


def spec_string(dist: Distribution) -> str:
    """Canonical ``family:param=value`` form; parses back to an equal law."""
    body = ",".join(f"{k}={v:.17g}" for k, v in dist.params.items())
    return f"{dist.name}:{body}"
