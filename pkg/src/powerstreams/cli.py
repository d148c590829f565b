"""Command-line experiment runner writing CSV series plus a manifest sidecar.

Subcommands: ``lattice``, ``streams``, ``ode`` and ``pde``.  Every CSV has
LF line endings and 17-significant-digit floats; next to it a
``<out>.manifest`` file lists every parameter as ``key=value``, with
defaulted assumptions flagged under ``assumed.*``.
"""

import argparse
import csv
import datetime as _dt
import math
import os
import sys
import warnings

import numpy as np

from . import __version__
from .lattice import (
    Boundary,
    LatticeConfig,
    build_stream_table,
    evaluate_solution,
    indicator,
    poisson_tail_bound,
    stream_values,
    truncation_bound,
)
from .oracles import (
    DomainError,
    MultivaluedSolutionError,
    analytic,
    burgers_breakdown_time,
    burgers_characteristics,
)
from .pde import (
    DirichletSpec,
    LinearPdeSpec,
    burgers_cascade,
    burgers_sum,
    dirichlet_solution_eval,
    linear_solution_eval,
)
from .scalar_ode import (
    LogDomainError,
    QuadOdeSpec,
    decompose_linear_time_coeff,
    decompose_quadratic,
    log_series_eval,
)
from .spatial import DerivOracle, TrigPoly
from .stochastic import SimConfig, ensemble_average

SEED_ENV = "POWERSTREAMS_SEED"
DEFAULT_N_SITES = 60
DEFAULT_LATTICE_BETA = 1.0
# exact exponential-polynomial cascades stay small up to this many streams
EXACT_QUADRATIC_LIMIT = 8
BURGERS_DEFAULT_TRUNC = 7


class UsageError(Exception):
    pass


def fmt(v):
    return "" if v is None else format(float(v), ".17g")


# -- argument parsing helpers --------------------------------------------------

def parse_range(text, n_sites=None):
    """``a:b`` as 1-based inclusive site labels; ``0:0`` is empty."""
    try:
        a, b = (int(s) for s in text.split(":"))
    except ValueError:
        raise UsageError(f"bad range {text!r}; expected a:b") from None
    if a == 0 and b == 0:
        return []
    if a < 1 or b < a or (n_sites is not None and b > n_sites):
        hi = n_sites if n_sites is not None else "N"
        raise UsageError(f"range {text!r} must satisfy 1 <= a <= b <= {hi}")
    return list(range(a - 1, b))


def parse_floats(text):
    try:
        return [float(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise UsageError(f"bad number list {text!r}") from None


def parse_grid(text):
    """``start:stop:count`` (inclusive) or a comma list."""
    if ":" in text:
        try:
            start, stop, count = text.split(":")
            return np.linspace(float(start), float(stop), int(count))
        except ValueError:
            raise UsageError(f"bad grid {text!r}; expected start:stop:count") from None
    return np.array(parse_floats(text))


def resolve_seed(arg):
    if arg is not None:
        return arg
    return int(os.environ.get(SEED_ENV, "0"))


def notice(msg):
    print(f"notice: {msg}", file=sys.stderr)


# -- output --------------------------------------------------------------------

def write_outputs(path, header, rows, manifest):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    manifest = {
        "version": __version__,
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
        **manifest,
    }
    with open(f"{path}.manifest", "w", newline="\n") as fh:
        for k in sorted(manifest):
            fh.write(f"{k}={manifest[k]}\n")


def _lattice_config(args, beta):
    n_sites = args.n_sites
    assumed = {}
    if n_sites is None:
        n_sites = DEFAULT_N_SITES
        assumed["assumed.n_sites"] = n_sites
        notice(f"--n-sites not given; assuming N = {n_sites}")
    sites = parse_range(args.init, n_sites)
    try:
        cfg = LatticeConfig(n_sites, args.pm, beta, Boundary(args.bc), indicator(n_sites, sites))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return cfg, sites, assumed


def _lattice_beta(args):
    if args.beta is None:
        notice(f"--beta not given; assuming beta = {DEFAULT_LATTICE_BETA}")
        return DEFAULT_LATTICE_BETA, {"assumed.beta": DEFAULT_LATTICE_BETA}
    return args.beta, {}


# -- subcommands ---------------------------------------------------------------

def cmd_lattice(args):
    beta, assumed_b = _lattice_beta(args)
    cfg, sites, assumed = _lattice_config(args, beta)
    assumed.update(assumed_b)
    times = parse_floats(args.times)
    if any(t < 0 for t in times) or times != sorted(times):
        raise UsageError("--times must be sorted and non-negative")
    table = build_stream_table(cfg, args.trunc)
    series = [evaluate_solution(table, cfg, t) for t in times]
    ens = None
    seed = resolve_seed(args.seed)
    if args.replicates:
        sim = SimConfig(cfg.N, cfg.Pm, cfg.bc, sites, times, args.replicates, seed)
        ens = ensemble_average(sim, workers=args.workers)
    rows = []
    for k, t in enumerate(times):
        for i in range(cfg.N):
            row = [fmt(t), i + 1, fmt(series[k][i])]
            if ens is not None:
                row += [fmt(ens.occupancy[k, i]), fmt(ens.stderr[k, i])]
            rows.append(row)
    header = ["t", "site", "series"] + (["ensemble", "stderr"] if ens is not None else [])
    manifest = {
        "subcommand": "lattice",
        "n_sites": cfg.N,
        "pm": cfg.Pm,
        "beta": cfg.beta,
        "bc": cfg.bc.value,
        "init": args.init,
        "site_labels": "1-based",
        "trunc": args.trunc,
        "times": ",".join(fmt(t) for t in times),
        "lattice_spacing": 1,
        **assumed,
    }
    for t in times:
        manifest[f"tail.poisson@{fmt(t)}"] = fmt(poisson_tail_bound(cfg, t, args.trunc))
        manifest[f"tail.bound@{fmt(t)}"] = fmt(truncation_bound(cfg, t, args.trunc))
    if ens is not None:
        manifest.update(replicates=args.replicates, seed=seed, rng=ens.metadata["rng"])
    write_outputs(args.out, header, rows, manifest)


def cmd_streams(args):
    betas = parse_floats(args.beta)
    cfg0, _, assumed = _lattice_config(args, betas[0] if betas else 0.0)
    if not 1 <= args.site <= cfg0.N:
        raise UsageError(f"--site must lie in 1..{cfg0.N}")
    lo, hi = (int(s) for s in args.n_range.split(":"))
    if lo < 0 or hi < lo:
        raise UsageError("--n-range must satisfy 0 <= lo <= hi")
    t_grid = parse_grid(args.t_grid)
    rows = []
    for beta in betas:
        cfg = cfg0.with_beta(beta)
        table = build_stream_table(cfg, hi)
        vals = stream_values(table, cfg, args.site - 1, t_grid, range(lo, hi + 1))
        for r, n in enumerate(range(lo, hi + 1)):
            rows += [[fmt(beta), n, fmt(t), fmt(v)] for t, v in zip(t_grid, vals[r])]
    manifest = {
        "subcommand": "streams",
        "n_sites": cfg0.N,
        "pm": cfg0.Pm,
        "bc": cfg0.bc.value,
        "init": args.init,
        "site": args.site,
        "site_labels": "1-based",
        "betas": ",".join(fmt(b) for b in betas),
        "n_range": args.n_range,
        "t_grid": args.t_grid,
        **assumed,
    }
    write_outputs(args.out, ["beta", "n", "t", "value"], rows, manifest)


def _blowup_time(args):
    """First singular time of the square model, or infinity."""
    if args.model in ("square", "log-series") and args.alpha * args.y0 > 0:
        return 1.0 / (args.alpha * args.y0)
    return np.inf


def _ode_series(args, t_grid):
    """Series values per grid point (``None`` at or past a blow-up)."""
    m = args.model
    valid = t_grid < _blowup_time(args)
    backend = "exact"
    if m == "log-series":
        vals = []
        for t in t_grid:
            try:
                vals.append(log_series_eval(args.y0, args.alpha, t, args.trunc)[0])
            except LogDomainError:
                vals.append(None)
        return vals, backend
    if m == "linear-time":
        streams = decompose_linear_time_coeff(args.c2, args.beta, args.trunc)
    else:
        spec = (
            QuadOdeSpec.logistic(args.gamma, args.c1, args.beta)
            if m == "logistic"
            else QuadOdeSpec.square(args.alpha, args.y0, args.beta)
        )
        if args.trunc <= EXACT_QUADRATIC_LIMIT:
            streams = decompose_quadratic(spec, args.trunc)
        else:
            horizon = float(t_grid[valid].max(initial=0.0)) or 1.0
            backend = f"chebyshev(horizon={horizon:g})"
            streams = decompose_quadratic(spec, args.trunc, horizon=horizon)
    vals = []
    for t, ok in zip(t_grid, valid):
        v = streams(t) if ok else None
        vals.append(v if v is not None and math.isfinite(v) else None)
    return vals, backend


def _ode_reference(args, t):
    if args.model == "logistic":
        return analytic("logistic", {"C1": args.c1, "gamma": args.gamma}, t)
    if args.model == "linear-time":
        return analytic("linear-time", {"C2": args.c2}, t)
    return analytic("reciprocal", {"A": args.y0, "alpha": args.alpha}, t)


def cmd_ode(args):
    t_grid = parse_grid(args.t_grid)
    if np.any(t_grid < 0):
        raise UsageError("--t-grid must be non-negative")
    series, backend = _ode_series(args, t_grid)
    rows, flagged = [], 0
    for t, s in zip(t_grid, series):
        try:
            ref = _ode_reference(args, t)
        except DomainError:
            ref = None
        err = None if ref is None or s is None else abs(s - ref)
        flagged += ref is None or s is None
        rows.append([fmt(t), fmt(s), fmt(ref), fmt(err)])
    if flagged:
        warnings.warn(f"{flagged} rows fall at or past the analytic singularity; left blank")
    manifest = {
        "subcommand": "ode",
        "model": args.model,
        "beta": args.beta,
        "trunc": args.trunc,
        "t_grid": args.t_grid,
        "backend": backend,
        "singular_rows": flagged,
    }
    manifest.update(
        {
            "logistic": {"gamma": args.gamma, "c1": args.c1},
            "square": {"alpha": args.alpha, "y0": args.y0},
            "log-series": {"alpha": args.alpha, "y0": args.y0},
            "linear-time": {"c2": args.c2},
        }[args.model]
    )
    write_outputs(args.out, ["t", "series", "analytic", "abs_err"], rows, manifest)


def _pde_rows(args, times):
    m, n = args.model, args.grid
    rows, extra = [], {}
    if m == "diffusion2d":
        x = np.linspace(0, 2 * np.pi, n, endpoint=False)
        X, Y = np.meshgrid(x, x, indexing="ij")
        sine = DerivOracle.sine()
        spec = LinearPdeSpec("diffusion2d", args.D, args.beta, sine, sine)
        for t in times:
            u = linear_solution_eval(spec, X, t, args.trunc, y=Y)[0]
            ref = analytic("diffusion2d-sine", {"D": args.D}, X, Y, t) if args.oracle else None
            for idx in np.ndindex(X.shape):
                r = None if ref is None else ref[idx]
                rows.append([fmt(t), fmt(X[idx]), fmt(Y[idx]), fmt(u[idx]), fmt(r),
                             fmt(None if r is None else abs(u[idx] - r))])
        return rows, extra

    if m in ("wave", "diffusion"):
        x = np.linspace(0, 2 * np.pi, n, endpoint=False)
        coef = args.c if m == "wave" else args.D
        spec = LinearPdeSpec(m, coef, args.beta, DerivOracle.sine())
        key, params = ("wave-sine", {"c": coef}) if m == "wave" else ("diffusion-sine", {"D": coef})

        def solve(t):
            return linear_solution_eval(spec, x, t, args.trunc)[0]

        def oracle(t):
            return analytic(key, params, x, t)

    elif m == "dirichlet":
        x = np.linspace(0, args.L, n)
        spec = DirichletSpec(args.gamma, args.lam, args.L, args.D, args.beta)

        def solve(t):
            return dirichlet_solution_eval(spec, x, t, args.trunc)

        def oracle(t):
            return analytic("dirichlet-linear", {"gamma": args.gamma, "lam": args.lam}, x, t)

    else:  # burgers
        x = np.linspace(0, np.pi, n)
        A = TrigPoly.sin()
        streams = burgers_cascade(args.alpha, args.beta, A, args.trunc)
        U = burgers_sum(streams)
        t_star = burgers_breakdown_time(A, args.alpha)
        extra["breakdown_time"] = fmt(t_star)

        def solve(t):
            return U.eval(x, t)

        def oracle(t):
            try:
                return np.array([burgers_characteristics(A, args.alpha, xi, t) for xi in x])
            except MultivaluedSolutionError:
                warnings.warn(f"t={t:g} is past the characteristic crossing time; oracle left blank")
                return None

    for t in times:
        u = solve(t)
        ref = oracle(t) if args.oracle else None
        for i, xi in enumerate(x):
            r = None if ref is None else ref[i]
            rows.append([fmt(t), fmt(xi), fmt(u[i]), fmt(r), fmt(None if r is None else abs(u[i] - r))])
    return rows, extra


def cmd_pde(args):
    if args.trunc is None:
        # Burgers harmonics double per stream, so deep cascades are out of reach
        args.trunc = BURGERS_DEFAULT_TRUNC if args.model == "burgers" else 20
    times = parse_floats(args.times)
    if any(t < 0 for t in times):
        raise UsageError("--times must be non-negative")
    if args.grid < 2:
        raise UsageError("--grid must be at least 2")
    rows, extra = _pde_rows(args, times)
    header = ["t", "x"] + (["y"] if args.model == "diffusion2d" else []) + ["series", "oracle", "abs_err"]
    manifest = {
        "subcommand": "pde",
        "model": args.model,
        "beta": args.beta,
        "trunc": args.trunc,
        "grid": args.grid,
        "times": ",".join(fmt(t) for t in times),
        "oracle": "on" if args.oracle else "off",
        **extra,
    }
    manifest.update(
        {
            "wave": {"c": args.c, "initial": "sin(x)", "domain": "[0,2pi)"},
            "diffusion": {"D": args.D, "initial": "sin(x)", "domain": "[0,2pi)"},
            "diffusion2d": {"D": args.D, "initial": "sin(x)sin(y)", "domain": "[0,2pi)^2"},
            "dirichlet": {"gamma": args.gamma, "lam": args.lam, "L": args.L, "D": args.D},
            "burgers": {"alpha": args.alpha, "initial": "sin(x)", "domain": "[0,pi]"},
        }[args.model]
    )
    write_outputs(args.out, header, rows, manifest)


# -- parser --------------------------------------------------------------------

def build_parser():
    p = argparse.ArgumentParser(prog="powerstreams", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def lattice_flags(sp):
        sp.add_argument("--n-sites", type=int, default=None)
        sp.add_argument("--pm", type=float, default=1.0)
        sp.add_argument("--bc", choices=[b.value for b in Boundary], default="periodic")
        sp.add_argument("--init", default="27:33", help="occupied sites a:b, 1-based inclusive")
        sp.add_argument("--out", required=True)

    sp = sub.add_parser("lattice", help="lattice series (and optional ensemble average)")
    lattice_flags(sp)
    sp.add_argument("--beta", type=float, default=None)
    sp.add_argument("--trunc", type=int, default=60)
    sp.add_argument("--times", default="0,5,10")
    sp.add_argument("--replicates", type=int, default=0)
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--workers", type=int, default=1)
    sp.set_defaults(func=cmd_lattice)

    sp = sub.add_parser("streams", help="individual lattice streams across beta values")
    lattice_flags(sp)
    sp.add_argument("--beta", default="0,0.5,0.9,1,2,10", help="comma list")
    sp.add_argument("--site", type=int, default=30, help="1-based site label")
    sp.add_argument("--n-range", default="0:10")
    sp.add_argument("--t-grid", default="0:10:101")
    sp.set_defaults(func=cmd_streams)

    sp = sub.add_parser("ode", help="scalar ODE series against the analytic solution")
    sp.add_argument("--model", choices=["logistic", "square", "linear-time", "log-series"], required=True)
    sp.add_argument("--gamma", type=float, default=3.0)
    sp.add_argument("--c1", type=float, default=0.1)
    sp.add_argument("--alpha", type=float, default=1.0)
    sp.add_argument("--y0", type=float, default=1.0)
    sp.add_argument("--c2", type=float, default=1.0)
    sp.add_argument("--beta", type=float, default=10.0)
    sp.add_argument("--trunc", type=int, default=25)
    sp.add_argument("--t-grid", default="0:1.5:151")
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_ode)

    sp = sub.add_parser("pde", help="PDE series against oracles")
    sp.add_argument("--model", choices=["wave", "diffusion", "diffusion2d", "dirichlet", "burgers"], required=True)
    sp.add_argument("--c", type=float, default=1.0)
    sp.add_argument("--D", type=float, default=1.0)
    sp.add_argument("--alpha", type=float, default=-0.5)
    sp.add_argument("--gamma", type=float, default=1.0)
    sp.add_argument("--lam", type=float, default=0.5)
    sp.add_argument("--L", type=float, default=1.0)
    sp.add_argument("--beta", type=float, default=0.0)
    sp.add_argument("--grid", type=int, default=128)
    sp.add_argument("--times", default="0,0.1,0.3")
    sp.add_argument("--trunc", type=int, default=None, help="default 20, or 7 for burgers")
    sp.add_argument("--oracle", choices=["on", "off"], default="on")
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_pde)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if hasattr(args, "oracle"):
        args.oracle = args.oracle == "on"
    try:
        args.func(args)
    except UsageError as exc:
        parser.error(str(exc))
    except (ValueError, OverflowError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
