"""Laws of maxima and their normalized evaluation forms.

For M_n the maximum of n iid draws from a base law F, the cdf is F(x)**n,
and M_n has the exact single-draw representation Q(exp(-omega/n)) with
omega standard exponential and Q the strict generalized inverse of F.  Both
samplers below consume uniforms from the same stream contract, so they can
be compared seed-for-seed; the exponential-representation route is the one
that stays cheap at large n.

``h_n_eval`` evaluates a monotone normalizer g against the base quantile in
three algebraically equivalent forms that differ in how the tail argument is
parametrized:

* ``exp_form``       g(Q(exp(-x/n)))
* ``linear_form``    g(Q(1 - x/n))
* ``epsilon_form``   g(Q(1 - eps*x)) with the index n = floor(1/eps)

The two parametrizations agree as n grows (exp_form >= linear_form for
nondecreasing g); the gap at fixed x shrinks like x**2/(2n).
"""

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

import numpy as np

from .dist import Distribution, quantile
from .errors import ContractViolationError, DomainError
from .stats import make_rng, standard_exponential, uniform_open

__all__ = [
    "MaxLaw",
    "max_cdf",
    "sample_max_direct",
    "sample_max_exponential_rep",
    "HnVariant",
    "h_n_eval",
    "floor_reciprocal",
    "spot_check_monotone",
]


@dataclass(frozen=True)
class MaxLaw:
    """The law of the maximum of ``n`` iid draws from ``base``."""

    base: Distribution
    n: int

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or self.n < 1:
            raise DomainError(f"n must be a positive integer, got {self.n!r}")


def max_cdf(law: MaxLaw, x):
    """P{M_n <= x} = F(x)**n."""
    arr = np.asarray(x, dtype=float)
    if np.any(np.isnan(arr)):
        raise DomainError("x must not be NaN")
    out = np.asarray(law.base.cdf(arr), dtype=float) ** law.n
    if np.ndim(x) == 0:
        return float(out)
    return out


def sample_max_direct(law: MaxLaw, rng, count: int | None = None):
    """Maximum of n quantile-transform draws, ``count`` times.

    Q is nondecreasing, so Q(max U_i) is pointwise identical to the maximum
    of the per-draw transforms.  Memory is O(count * n); use the exponential
    representation for large n.
    """
    size = 1 if count is None else int(count)
    if size < 1:
        raise DomainError(f"count must be a positive integer, got {count!r}")
    u = uniform_open(rng, (size, law.n)).max(axis=1)
    x = np.asarray(law.base.quantile(u), dtype=float)
    return float(x[0]) if count is None else x


def sample_max_exponential_rep(law: MaxLaw, rng, count: int | None = None):
    """M_n sampled as Q(exp(-omega/n)), omega = -log(1 - U).

    Draws whose exp(-omega/n) rounds to 1.0 (omega numerically 0 at scale n)
    are redrawn; this is a zero-probability guard, not a truncation.
    """
    size = 1 if count is None else int(count)
    if size < 1:
        raise DomainError(f"count must be a positive integer, got {count!r}")
    omega = standard_exponential(rng, size)
    v = np.exp(-omega / law.n)
    bad = (v <= 0.0) | (v >= 1.0)
    while np.any(bad):
        omega = standard_exponential(rng, int(bad.sum()))
        v[bad] = np.exp(-omega / law.n)
        bad = (v <= 0.0) | (v >= 1.0)
    x = np.asarray(law.base.quantile(v), dtype=float)
    return float(x[0]) if count is None else x


class HnVariant(str, Enum):
    EXP_FORM = "exp_form"
    LINEAR_FORM = "linear_form"
    EPSILON_FORM = "epsilon_form"


def floor_reciprocal(eps: float) -> int:
    """floor(1/eps) on the exact binary value of eps, with intent guard.

    Computed in exact rational arithmetic, so the sandwich
    1/(n+1) < eps <= 1/n holds for the value returned.  When 1/eps lands
    within 1e-9 below the next integer (eps entered as a rounded 1/n), that
    integer is returned instead.
    """
    if not isinstance(eps, (int, float)) or math.isnan(eps) or not 0.0 < eps <= 1.0:
        raise DomainError(f"eps must lie in (0, 1], got {eps!r}")
    r = 1 / Fraction(eps)
    n = int(r)  # exact floor for positive rationals
    if (n + 1) - r < Fraction(1, 10**9):
        return n + 1
    return n


def h_n_eval(
    g,
    base: Distribution,
    n: int,
    x: float,
    variant: HnVariant = HnVariant.EXP_FORM,
    eps: float | None = None,
) -> float:
    """Evaluate the normalized maximum profile h_n(x) = g(Q(.)) at one point.

    ``g`` must be monotone on the base quantile's range (use
    ``spot_check_monotone`` to validate a candidate).  For ``epsilon_form``,
    omit ``eps`` to use the exact rational 1/n; a supplied eps must satisfy
    floor(1/eps) == n so that g is evaluated at its own index.
    """
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise DomainError(f"n must be a positive integer, got {n!r}")
    if not isinstance(x, (int, float)) or math.isnan(x) or x <= 0.0:
        raise DomainError(f"x must be a positive real, got {x!r}")
    variant = HnVariant(variant)
    if variant is HnVariant.EXP_FORM:
        arg = math.exp(-x / n)
        if not 0.0 < arg < 1.0:
            raise DomainError(
                f"exp_form: exp(-x/n) = {arg} left (0, 1) for x={x}, n={n}"
            )
    elif variant is HnVariant.LINEAR_FORM:
        arg = 1.0 - x / n
        if not 0.0 < arg < 1.0:
            raise DomainError(f"linear_form: x must lie in (0, n), got x={x}, n={n}")
    else:
        if eps is None:
            arg = 1.0 - x / n
        else:
            idx = floor_reciprocal(eps)
            if idx != n:
                raise DomainError(
                    f"epsilon_form: floor(1/eps) = {idx} does not match n = {n}"
                )
            arg = 1.0 - eps * x
        if not 0.0 < arg < 1.0:
            raise DomainError(
                f"epsilon_form: 1 - eps*x = {arg} left (0, 1) for x={x}, n={n}"
            )
    return float(g(quantile(base, arg)))


_SPOT_CHECK_SEED = 0x6D6F6E6F  # fixed: the check must not perturb caller streams


def spot_check_monotone(
    g,
    lo: float,
    hi: float,
    direction: str = "nondecreasing",
    pairs: int = 100,
    rng=None,
) -> None:
    """Spot-check monotonicity of ``g`` on [lo, hi] at ``pairs`` random points.

    Raises ``ContractViolationError`` on a violation beyond float slack.
    The default generator is fixed-seed so results are deterministic.
    """
    if direction not in ("nondecreasing", "nonincreasing"):
        raise DomainError(f"unknown direction {direction!r}")
    if not (math.isfinite(lo) and math.isfinite(hi)) or not lo < hi:
        raise DomainError(f"need finite lo < hi, got [{lo}, {hi}]")
    r = rng if rng is not None else make_rng(_SPOT_CHECK_SEED)
    pts = np.sort(lo + (hi - lo) * r.random(2 * int(pairs)))
    vals = np.asarray(g(pts), dtype=float)
    diffs = np.diff(vals)
    tol = 1e-9 * np.maximum(1.0, np.maximum(np.abs(vals[:-1]), np.abs(vals[1:])))
    bad = diffs < -tol if direction == "nondecreasing" else diffs > tol
    if np.any(bad):
        i = int(np.flatnonzero(bad)[0])
        raise ContractViolationError(
            f"g is not {direction}: g({pts[i]}) = {vals[i]} vs "
            f"g({pts[i + 1]}) = {vals[i + 1]}"
        )
