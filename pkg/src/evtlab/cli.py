"""Command-line front end.

Every subcommand writes a single CSV or JSON report that embeds the fully
resolved configuration (including the seed), so identical invocations
produce byte-identical output.  Exit codes: 0 success, 1 usage error,
2 domain/precondition error, 3 negative mathematical verdict (a diagnostic
that did not converge or degenerated), 4 unwritable output path.
"""

import argparse
import json
import os
import sys

import numpy as np

from .dist import parse_distribution, sample_quantile_transform, spec_string
from .errors import DomainError, EvtLabError
from .geometric import GeometricParams, frac_log_search, oscillation_scan
from .linear_evt import (
    DEFAULT_UV_GRID,
    dehaan_test,
    estimate_rho,
    limit_cdf,
    norming_constants,
)
from .maxima import HnVariant, MaxLaw, sample_max_direct, sample_max_exponential_rep
from .nonlinear_evt import NormalizerSequence, convergence_diagnostic, default_x_grid
from .stats import make_rng

__all__ = ["main", "run"]

SEED_ENV_VAR = "EVTLAB_SEED"
DEFAULT_RANGE_POINTS = 16

_VARIANTS = {
    "exp": HnVariant.EXP_FORM,
    "linear": HnVariant.LINEAR_FORM,
    "epsilon": HnVariant.EPSILON_FORM,
}


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad usage; the contract here is 1
    def error(self, message):
        raise _UsageError(f"{self.prog}: {message}")


def _parse_range(text: str, count: int = DEFAULT_RANGE_POINTS, spacing: str = "geometric"):
    """``start:stop[:count]`` grids; geometric spacing unless told otherwise."""
    parts = text.split(":")
    if len(parts) == 1:
        return np.array([float(parts[0])])
    if len(parts) == 3:
        count = int(parts[2])
    elif len(parts) != 2:
        raise ValueError(f"bad range {text!r}; expected start:stop[:count]")
    start, stop = float(parts[0]), float(parts[1])
    if count < 2:
        raise ValueError("range needs at least 2 points")
    if spacing == "geometric":
        if start <= 0.0 or stop <= 0.0:
            raise ValueError("geometric range endpoints must be positive")
        return np.geomspace(start, stop, count)
    return np.linspace(start, stop, count)


def _geometric_range(text: str):
    return _parse_range(text, spacing="geometric")


def _linear_range(text: str):
    return _parse_range(text, spacing="linear")


def _int_range(text: str):
    vals = np.unique(np.rint(_parse_range(text)).astype(np.int64))
    return vals


def _uv_pair(text: str):
    parts = text.split(",")
    if len(parts) != 2:
        raise ValueError(f"bad pair {text!r}; expected u,v")
    return float(parts[0]), float(parts[1])


def _float_list(text: str):
    return tuple(float(v) for v in text.split(","))


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.17g}"
    return str(v)


def _range_str(values) -> str:
    return ",".join(_fmt(float(v)) for v in np.asarray(values).ravel())


def _emit(path: str, fmt: str, config: dict, header, rows, json_body: dict) -> None:
    if fmt == "json":
        text = json.dumps({"config": config, **json_body}, indent=2) + "\n"
    else:
        lines = [f"# {k}={_fmt(v)}" for k, v in config.items()]
        lines.append(",".join(header))
        lines.extend(",".join(_fmt(v) for v in row) for row in rows)
        text = "\n".join(lines) + "\n"
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)


def _resolve_seed(args) -> int:
    if args.seed is not None:
        return args.seed
    raw = os.environ.get(SEED_ENV_VAR, "0")
    try:
        return int(raw)
    except ValueError:
        raise DomainError(f"{SEED_ENV_VAR} must be an integer, got {raw!r}")


def _base_config(args, seed: int) -> dict:
    return {"subcommand": args.command, "seed": seed, "format": args.format}


def _samples_payload(samples):
    header = ["index", "value"]
    rows = list(enumerate(float(x) for x in samples))
    return header, rows, {"samples": [float(x) for x in samples]}


def _cmd_sample(args) -> int:
    seed = _resolve_seed(args)
    dist = parse_distribution(args.dist)
    xs = sample_quantile_transform(dist, make_rng(seed), args.count)
    config = _base_config(args, seed) | {"dist": spec_string(dist), "count": args.count}
    header, rows, body = _samples_payload(xs)
    _emit(args.out, args.format, config, header, rows, body)
    return 0


def _cmd_max(args) -> int:
    seed = _resolve_seed(args)
    law = MaxLaw(parse_distribution(args.dist), args.n)
    sampler = sample_max_direct if args.method == "direct" else sample_max_exponential_rep
    xs = sampler(law, make_rng(seed), args.count)
    config = _base_config(args, seed) | {
        "dist": spec_string(law.base),
        "n": args.n,
        "count": args.count,
        "method": args.method,
    }
    header, rows, body = _samples_payload(xs)
    _emit(args.out, args.format, config, header, rows, body)
    return 0


def _cmd_dehaan(args) -> int:
    seed = _resolve_seed(args)
    dist = parse_distribution(args.dist)
    pairs = tuple(args.uv) if args.uv else DEFAULT_UV_GRID
    report = dehaan_test(dist, args.eps, pairs, args.tol)
    config = _base_config(args, seed) | {
        "dist": spec_string(dist),
        "eps": _range_str(args.eps),
        "uv": ";".join(f"{u:g},{v:g}" for u, v in pairs),
        "tol": args.tol,
    }
    header, rows = report.to_csv_rows()
    _emit(args.out, args.format, config, header, rows, report.to_json_dict())
    return 0 if report.converged else 3


def _cmd_rho(args) -> int:
    seed = _resolve_seed(args)
    dist = parse_distribution(args.dist)
    est = estimate_rho(dist, args.eps, args.w)
    config = _base_config(args, seed) | {
        "dist": spec_string(dist),
        "eps": _range_str(args.eps),
        "w": args.w,
    }
    header, rows = est.to_csv_rows()
    _emit(args.out, args.format, config, header, rows, est.to_json_dict())
    return 0


def _cmd_norming(args) -> int:
    seed = _resolve_seed(args)
    dist = parse_distribution(args.dist)
    nc = norming_constants(dist, args.n)
    config = _base_config(args, seed) | {"dist": spec_string(dist), "n": args.n}
    header, rows = nc.to_csv_rows()
    _emit(args.out, args.format, config, header, rows, nc.to_json_dict())
    return 0


def _cmd_limit_law(args) -> int:
    seed = _resolve_seed(args)
    xs = np.asarray(args.x, dtype=float)
    gs = limit_cdf(args.rho, xs)
    config = _base_config(args, seed) | {"rho": args.rho, "x": _range_str(xs)}
    header = ["x", "G"]
    rows = [(float(x), float(g)) for x, g in zip(xs, gs)]
    body = {"rho": args.rho, "x": [float(v) for v in xs], "G": [float(v) for v in gs]}
    _emit(args.out, args.format, config, header, rows, body)
    return 0


def _cmd_nonlinear(args) -> int:
    seed = _resolve_seed(args)
    base = parse_distribution(args.base)
    if args.normalizer == "affine":
        seq = NormalizerSequence.affine(base)
        target_str = ""
    else:
        if args.target is None:
            raise DomainError("--target is required for the construction normalizer")
        target = parse_distribution(args.target)
        seq = NormalizerSequence.from_target(target, base)
        target_str = spec_string(target)
    x_grid = args.x if args.x is not None else default_x_grid()
    report = convergence_diagnostic(
        seq, x_grid, args.n, _VARIANTS[args.variant], args.tol, args.nondeg_tol
    )
    config = _base_config(args, seed) | {
        "base": spec_string(base),
        "target": target_str,
        "normalizer": args.normalizer,
        "variant": args.variant,
        "x": _range_str(x_grid),
        "n": _range_str(args.n),
        "tol": args.tol,
        "nondeg_tol": args.nondeg_tol,
    }
    header, rows = report.to_csv_rows()
    _emit(args.out, args.format, config, header, rows, report.to_json_dict())
    return 0 if report.verdict else 3


def _cmd_geom_oscillate(args) -> int:
    seed = _resolve_seed(args)
    params = GeometricParams(args.p)
    report = oscillation_scan(params, args.q, args.n, args.cluster_c)
    spread = report.lim_sup_est - report.lim_inf_est
    config = _base_config(args, seed) | {
        "p": args.p,
        "q": args.q,
        "n": _range_str(args.n),
        "tol": args.tol,
        "cluster_c": ",".join(_fmt(c) for c in args.cluster_c),
    }
    body = report.to_json_dict() | {"spread": spread, "converged": spread <= args.tol}
    header, rows = report.to_csv_rows()
    _emit(args.out, args.format, config, header, rows, body)
    return 3 if spread > args.tol else 0


def _cmd_geom_density(args) -> int:
    seed = _resolve_seed(args)
    n, frac, horizon = frac_log_search(args.theta, args.x, args.y, args.n_max)
    config = _base_config(args, seed) | {
        "theta": args.theta,
        "x": args.x,
        "y": args.y,
        "n_max": args.n_max,
    }
    header = ["n", "frac", "sufficient_horizon"]
    rows = [(n, frac, horizon)]
    body = {"n": n, "frac": frac, "sufficient_horizon": horizon}
    _emit(args.out, args.format, config, header, rows, body)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="evtlab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("--seed", type=int, default=None,
                       help=f"random seed (default: ${SEED_ENV_VAR} or 0)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--out", default="-", help="output path, or - for stdout")

    p = sub.add_parser("sample", help="quantile-transform sampling")
    p.add_argument("--dist", required=True)
    p.add_argument("--count", type=int, default=1000)
    common(p)

    p = sub.add_parser("max", help="sample maxima of n iid draws")
    p.add_argument("--dist", required=True)
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--count", type=int, default=1000)
    p.add_argument("--method", choices=("direct", "exprep"), default="direct")
    common(p)

    p = sub.add_parser("dehaan", help="attraction criterion scale sweep")
    p.add_argument("--dist", required=True)
    p.add_argument("--eps", type=_geometric_range, default=_geometric_range("1e-2:1e-6"),
                   help="geometric scale grid start:stop[:count]")
    p.add_argument("--uv", type=_uv_pair, action="append",
                   help="u,v pair (repeatable; default: a 12-pair grid)")
    p.add_argument("--tol", type=float, default=1e-3)
    common(p)

    p = sub.add_parser("rho", help="estimate the attraction index rho")
    p.add_argument("--dist", required=True)
    p.add_argument("--eps", type=_geometric_range, default=_geometric_range("1e-2:1e-6"))
    p.add_argument("--w", type=float, default=2.0)
    common(p)

    p = sub.add_parser("norming", help="canonical affine constants a_n, b_n")
    p.add_argument("--dist", required=True)
    p.add_argument("--n", type=int, required=True)
    common(p)

    p = sub.add_parser("limit-law", help="tabulate the limit cdf for a given rho")
    p.add_argument("--rho", type=float, required=True)
    p.add_argument("--x", type=_linear_range, default=_linear_range("-2:6:33"),
                   help="linear grid start:stop[:count]")
    common(p)

    p = sub.add_parser("nonlinear", help="normalizer-sequence convergence diagnostic")
    p.add_argument("--base", required=True)
    p.add_argument("--target", default=None)
    p.add_argument("--normalizer", choices=("construction", "affine"),
                   default="construction")
    p.add_argument("--variant", choices=sorted(_VARIANTS), default="linear")
    p.add_argument("--x", type=_geometric_range, default=None,
                   help="geometric grid (default: 32 points on [1/16, 16])")
    p.add_argument("--n", type=_int_range, default=_int_range("100:100000:4"))
    p.add_argument("--tol", type=float, default=1e-3)
    p.add_argument("--nondeg-tol", type=float, default=1e-6)
    common(p)

    p = sub.add_parser("geom-oscillate", help="oscillating maxima probe (geometric law)")
    p.add_argument("--p", type=float, default=0.5)
    p.add_argument("--q", type=int, default=0)
    p.add_argument("--n", type=_int_range, default=_int_range("1e3:1e6:64"))
    p.add_argument("--tol", type=float, default=1e-2,
                   help="spread above which the probe counts as oscillating")
    p.add_argument("--cluster-c", type=_float_list, default=(0.0, 0.5, 0.9))
    common(p)

    p = sub.add_parser("geom-density", help="find n with frac(theta log n) in [x, y]")
    p.add_argument("--theta", type=float, required=True)
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--y", type=float, required=True)
    p.add_argument("--n-max", type=int, default=1_000_000)
    common(p)

    return parser


_HANDLERS = {
    "sample": _cmd_sample,
    "max": _cmd_max,
    "dehaan": _cmd_dehaan,
    "rho": _cmd_rho,
    "norming": _cmd_norming,
    "limit-law": _cmd_limit_law,
    "nonlinear": _cmd_nonlinear,
    "geom-oscillate": _cmd_geom_oscillate,
    "geom-density": _cmd_geom_density,
}


def run(argv) -> int:
    """Parse argv (no program name) and execute; returns the exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    try:
        return _HANDLERS[args.command](args)
    except EvtLabError as exc:
        print(f"evtlab {args.command}: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"evtlab {args.command}: cannot write output: {exc}", file=sys.stderr)
        return 4


def main() -> int:
    return run(sys.argv[1:])
