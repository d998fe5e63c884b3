"""Nonlinear normalization: g_n(M_n) can converge to any prescribed law.

For a uniform base, g_n(x) = G_inv(exp(-n(1-x))) maps the maximum of n
uniforms into a sample whose law converges to the target G; for a general
continuous base the same works through F, g_n(x) = G_inv(exp(-n(1-F(x)))).
Discrete bases are refused: their cdf never takes the intermediate values
the construction needs, which is exactly the obstruction the geometric law
exhibits.

``convergence_diagnostic`` tabulates the normalized profiles h_n over an
(x, n) grid, applies the Cauchy verdict per x, and checks that the limit
profile is nondegenerate; the overall verdict is the conjunction.
"""

import math
from dataclasses import dataclass

import numpy as np

from .dist import CONTINUOUS, Distribution
from .errors import DomainError, UnsupportedBaseError
from .linear_evt import norming_constants
from .maxima import HnVariant, h_n_eval, spot_check_monotone
from .reports import CAUCHY_WINDOW, ConvergenceReport, build_report

__all__ = [
    "DEFAULT_NONDEG_TOL",
    "default_x_grid",
    "build_g_n",
    "build_g_n_general",
    "NormalizerSequence",
    "nondegeneracy_check",
    "convergence_diagnostic",
]

DEFAULT_NONDEG_TOL = 1e-6

_TINY = np.nextafter(0.0, 1.0)
_BELOW_ONE = np.nextafter(1.0, 0.0)


def default_x_grid(count: int = 32):
    """Geometric grid on [1/16, 16], the scale window the diagnostics use."""
    return np.geomspace(1.0 / 16.0, 16.0, count)


def _validate_n(n):
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise DomainError(f"n must be a positive integer, got {n!r}")


def build_g_n(target: Distribution, n: int):
    """g_n(x) = G_inv(exp(-n(1-x))) for x < 1; nondecreasing in x.

    The exponential argument is mathematically in (0, 1) for every x < 1;
    if it underflows to 0 it is floored at the smallest positive double so
    the map stays total and monotone.
    """
    _validate_n(n)

    def g(x):
        arr = np.asarray(x, dtype=float)
        if np.any(np.isnan(arr)) or np.any(arr >= 1.0):
            raise DomainError(f"g_{n}: x must satisfy x < 1")
        arg = np.maximum(np.exp(-float(n) * (1.0 - arr)), _TINY)
        out = target.quantile(arg)
        if np.ndim(x) == 0:
            return float(out)
        return np.asarray(out, dtype=float)

    return g


def build_g_n_general(target: Distribution, base: Distribution, n: int):
    """g_n(x) = G_inv(exp(-n(1-F(x)))) through a continuous base cdf F.

    Refuses a discrete base: a step cdf skips the levels the construction
    must pass through, so no such g_n can work.
    """
    _validate_n(n)
    if base.kind != CONTINUOUS:
        raise UnsupportedBaseError(
            f"base {base.name!r} is {base.kind}; the construction needs a "
            "continuous cdf"
        )

    def g(x):
        arr = np.asarray(x, dtype=float)
        if np.any(np.isnan(arr)):
            raise DomainError(f"g_{n}: x must not be NaN")
        s = np.asarray(base.cdf(arr), dtype=float)
        arg = np.clip(np.exp(-float(n) * (1.0 - s)), _TINY, _BELOW_ONE)
        out = target.quantile(arg)
        if np.ndim(x) == 0:
            return float(out)
        return np.asarray(out, dtype=float)

    return g


@dataclass(frozen=True)
class NormalizerSequence:
    """A base law plus a builder n -> g_n of monotone normalizers.

    ``target`` records the intended limit law when known (None for affine
    normalizers, whose limit depends on the base's attraction index).
    """

    base: Distribution
    builder: callable
    target: Distribution | None = None
    direction: str = "nondecreasing"

    @classmethod
    def from_target(cls, target: Distribution, base: Distribution) -> "NormalizerSequence":
        return cls(
            base=base,
            builder=lambda n: build_g_n_general(target, base, n),
            target=target,
        )

    @classmethod
    def affine(cls, base: Distribution) -> "NormalizerSequence":
        def builder(n):
            nc = norming_constants(base, n)

            def g(x):
                return (np.asarray(x, dtype=float) - nc.b_n) / nc.a_n

            return g

        # a_n < 0 flips orientation
        return cls(base=base, builder=builder, target=None, direction="nonincreasing")


def nondegeneracy_check(values, tol: float) -> bool:
    """True iff the profile {(x, h(x))} varies by more than ``tol``.

    Needs at least two points with distinct x to be meaningful.
    """
    pts = [(float(x), float(h)) for x, h in values]
    if len({x for x, _ in pts}) < 2:
        raise DomainError("nondegeneracy check needs >= 2 distinct x values")
    hs = [h for _, h in pts]
    return (max(hs) - min(hs)) > tol


def convergence_diagnostic(
    normalizer: NormalizerSequence,
    x_grid=None,
    n_grid=(100, 1000, 10000, 100000),
    variant: HnVariant = HnVariant.LINEAR_FORM,
    tol: float = 1e-3,
    nondeg_tol: float = DEFAULT_NONDEG_TOL,
) -> ConvergenceReport:
    """Tabulate h_n(x) = g_n(Q_base(.)) over (x, n) and judge convergence.

    Each x row gets the Cauchy verdict over the last three n; the limit
    estimate is the value at the largest n, and the limit profile must be
    nondegenerate at ``nondeg_tol``.  The g_n at the smallest and largest n
    are monotonicity spot-checked on their actual evaluation range before
    use.
    """
    xs = np.asarray(default_x_grid() if x_grid is None else x_grid, dtype=float)
    ns = [int(n) for n in n_grid]
    if xs.size == 0 or len(ns) == 0:
        raise DomainError("x_grid and n_grid must be nonempty")
    if np.any(np.isnan(xs)) or np.any(xs <= 0.0):
        raise DomainError("x_grid must be positive")
    if any(b <= a for a, b in zip(ns, ns[1:])):
        raise DomainError("n_grid must be strictly increasing")
    variant = HnVariant(variant)
    values = np.empty((xs.size, len(ns)))
    for j, n in enumerate(ns):
        g = normalizer.builder(n)
        for i, x in enumerate(xs):
            values[i, j] = h_n_eval(g, normalizer.base, n, float(x), variant)
        if n in (ns[0], ns[-1]):
            col = _quantile_range(normalizer.base, n, xs, variant)
            if col is not None:
                spot_check_monotone(g, col[0], col[1], normalizer.direction)
    limits = values[:, -1]
    nondeg = nondegeneracy_check(zip(xs, limits), nondeg_tol)
    return build_report(
        "n", ns, "x", [float(x) for x in xs], values, tol, CAUCHY_WINDOW,
        nondegenerate=nondeg,
    )


def _quantile_range(base, n, xs, variant):
    # the interval of base-quantile values g actually sees on this grid
    if variant is HnVariant.EXP_FORM:
        args = np.exp(-xs / n)
    else:
        args = 1.0 - xs / n
    qs = np.asarray(base.quantile(args), dtype=float)
    lo, hi = float(np.min(qs)), float(np.max(qs))
    if not (math.isfinite(lo) and math.isfinite(hi)) or lo >= hi:
        return None
    return lo, hi
