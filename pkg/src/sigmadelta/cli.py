"""Command-line front end.

Subcommands write CSV (or JSON for single objects) to ``--out`` or stdout.
Exit status is 0 on success, 1 when ``validate`` finds a failing group and
2 for invalid parameters.  Random inputs come from numpy's PCG64 generator
seeded with ``--seed``, so equal arguments give byte-identical output.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from functools import lru_cache

import numpy as np

from . import filters as fl
from . import modulator as md
from . import rates as rt
from . import reconstruction as rc
from .relaxed import gamma_from_sigma

EXIT_OK, EXIT_VALIDATION, EXIT_PARAMS = 0, 1, 2


class ParameterError(ValueError):
    pass


@contextlib.contextmanager
def _output(path):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            yield fh


def _level(args):
    if args.gamma is not None:
        gamma = args.gamma
    else:
        if args.sigma <= 0:
            raise ParameterError("sigma must be positive")
        gamma = gamma_from_sigma(args.sigma)
    L = args.levels
    if L < 2:
        raise ParameterError("need at least 2 levels")
    if not 1.0 < gamma <= L:
        raise ParameterError(f"gamma must lie in (1, {L}], got {gamma:.17g}")
    return gamma


def _level_options(p, required=True):
    g = p.add_mutually_exclusive_group(required=required)
    g.add_argument("--gamma", type=float, help="constraint level ||h||_1 <= gamma")
    g.add_argument("--sigma", type=float, help="level given as sigma, gamma = cosh(pi/sqrt(sigma))")
    p.add_argument("--levels", type=int, default=2, help="alphabet size L (default 2)")


# -- design -------------------------------------------------------------------

def cmd_design(args):
    if args.m < 1:
        raise ParameterError("order must be >= 1")
    gamma = _level(args)
    design = fl.design_filter(args.m, gamma)
    with _output(args.out) as fh:
        fh.write(design.to_json() + "\n")
    return EXIT_OK


# -- simulate -----------------------------------------------------------------

def cmd_simulate(args):
    if args.m < 1 or args.samples < 0:
        raise ParameterError("order must be >= 1 and samples >= 0")
    gamma = _level(args)
    design = fl.design_filter(args.m, gamma)
    margin = md.stability_margin(design, 0.0, args.levels)
    mu = margin * (1 - 1e-9) if args.mu is None else args.mu
    if mu < 0 or mu > margin:
        raise ParameterError(f"input bound {mu:.6g} outside the stable range [0, {margin:.6g}]")
    rng = np.random.default_rng(args.seed)
    y = rng.uniform(-mu, mu, args.samples)
    h = fl.h_from_design(design)
    trace = md.run_greedy(h, y, args.levels)
    u = None
    if args.m <= 20:
        u = md.canonical_state(fl.g_from_h(args.m, h), trace)
    with _output(args.out) as fh:
        md.write_trace_csv(trace, fh, u)
    return EXIT_OK


# -- sweep --------------------------------------------------------------------

@lru_cache(maxsize=4)
def _kernel(epsilon):
    return rc.design_kernel(0.5, epsilon)


def _sweep_row(task):
    m, lam, gamma, L, eps, mu, seed, window = task
    design = fl.design_filter(m, gamma)
    kern = _kernel(eps)
    phases = np.random.default_rng(seed).uniform(0.0, 2 * np.pi, 2)
    base = rc.two_tone(mu)
    sig = rc.SignalSpec(omega=0.5, frequencies=base.frequencies,
                        amplitudes=base.amplitudes, phases=tuple(phases), mu=mu)
    tau = 1.0 / lam
    bound = 2.0 ** rt.log2_error_bound(m, lam, design.log_g1, math.log(kern.l1_norm), eps)
    try:
        N = int(math.ceil((window + 2 * kern.t_max + 2) / tau))
        y = rc.eval_signal(sig, np.arange(N) * tau)
        trace = md.run_greedy(fl.h_from_design(design), y, L)
        t0 = kern.t_max + 1.0
        rep = rc.sup_error(sig, trace, tau, kern, (t0, t0 + window))
    except (rc.WindowError, rc.KernelMismatchError):
        return (lam, m, math.nan, bound, math.nan)
    return (lam, m, rep.measured, bound, rep.budget)


def _lambda_grid(args):
    if not 0 < args.lambda_min <= args.lambda_max or args.lambda_steps < 1:
        raise ParameterError("need 0 < lambda-min <= lambda-max and lambda-steps >= 1")
    if args.lambda_steps == 1:
        return [args.lambda_min]
    # 12 significant digits keeps round grid values (16, 32, ...) exact
    grid = np.geomspace(args.lambda_min, args.lambda_max, args.lambda_steps)
    return [float(f"{x:.12g}") for x in grid]


def cmd_sweep(args):
    gamma = _level(args)
    lams = _lambda_grid(args)
    if args.epsilon <= 0:
        raise ParameterError("epsilon must be positive")
    if args.bound_curve:
        curve = rt.bound_curve(lams, gamma, args.epsilon, args.m_max)
        with _output(args.out) as fh:
            rt.write_bound_curve_csv(curve, fh)
        return EXIT_OK
    orders = args.m or [1, 2, 3]
    for m in orders:
        if m < 1:
            raise ParameterError("orders must be >= 1")
        h1 = fl.design_filter(m, gamma).h_one_norm
        if h1 + args.mu > args.levels:
            raise ParameterError(f"m={m}: ||h||_1 + mu = {h1 + args.mu:.6g} exceeds {args.levels}")
    for lam in lams:
        if (1 + args.epsilon) * 0.5 > 0.5 * lam:
            raise ParameterError(f"lambda={lam:g} too small for epsilon={args.epsilon:g}")
    tasks = [(m, float(lam), gamma, args.levels, args.epsilon, args.mu, args.seed, args.window)
             for lam in lams for m in orders]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(_sweep_row, tasks))
    else:
        rows = [_sweep_row(t) for t in tasks]
    bad = sum(1 for r in rows if math.isnan(r[2]))
    if bad:
        print(f"warning: {bad} row(s) could not be evaluated", file=sys.stderr)
    with _output(args.out) as fh:
        rc.write_sweep_csv(rows, fh)
    return EXIT_OK


# -- table / efficiency ---------------------------------------------------------

def cmd_table(args):
    if any(L < 2 for L in args.levels):
        raise ParameterError("alphabet sizes must be >= 2")
    with _output(args.out) as fh:
        rt.write_rate_table_csv(rt.multilevel_table(args.levels), fh)
    return EXIT_OK


def _efficiency_point(task):
    sigma, m_est = task
    return rt.efficiency_curve([sigma], m_est)[0]


def cmd_efficiency(args):
    if any(s <= 0 for s in args.sigma) or args.m_est < 100:
        raise ParameterError("sigma values must be positive and m-est >= 100")
    tasks = [(s, args.m_est) for s in args.sigma]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            points = list(pool.map(_efficiency_point, tasks))
    else:
        points = [_efficiency_point(t) for t in tasks]
    slow = [p.sigma for p in points if not p.converged]
    if slow:
        print(f"warning: limit not settled at m={args.m_est} for sigma={slow}", file=sys.stderr)
    with _output(args.out) as fh:
        rt.write_efficiency_csv(points, fh)
    return EXIT_OK


# -- validate -------------------------------------------------------------------

def cmd_validate(args):
    from .validation import GROUPS, run_groups

    names = args.groups or list(GROUPS)
    unknown = [n for n in names if n not in GROUPS]
    if unknown:
        raise ParameterError(f"unknown group(s) {unknown}; choose from {list(GROUPS)}")
    results = run_groups(names, seed=args.seed)
    doc = {
        "passed": all(r.passed for r in results),
        "groups": [{"name": r.name, "passed": r.passed, "score": r.score,
                    "detail": r.detail} for r in results],
    }
    with _output(args.out) as fh:
        fh.write(json.dumps(doc, indent=2) + "\n")
    return EXIT_OK if doc["passed"] else EXIT_VALIDATION


def build_parser():
    ap = argparse.ArgumentParser(prog="sigmadelta", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("design", help="integer filter design as JSON")
    p.add_argument("--m", type=int, required=True)
    _level_options(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_design)

    p = sub.add_parser("simulate", help="greedy quantizer trace on random input, CSV")
    p.add_argument("--m", type=int, required=True)
    _level_options(p)
    p.add_argument("--mu", type=float, help="input bound (default: the largest stable one)")
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="sup error and bound over a lambda grid, CSV")
    p.add_argument("--m", type=int, nargs="+", help="orders to simulate (default 1 2 3)")
    _level_options(p)
    p.add_argument("--lambda-min", type=float, default=32.0)
    p.add_argument("--lambda-max", type=float, default=256.0)
    p.add_argument("--lambda-steps", type=int, default=4)
    p.add_argument("--epsilon", type=float, default=0.01)
    p.add_argument("--mu", type=float, default=0.3, help="test signal amplitude")
    p.add_argument("--window", type=float, default=16.0, help="evaluation window length")
    p.add_argument("--bound-curve", action="store_true",
                   help="only tabulate the order-optimized bound (no simulation)")
    p.add_argument("--m-max", type=int, default=1000, help="largest order scanned by --bound-curve")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("table", help="multi-level rate table, CSV")
    p.add_argument("--levels", type=int, nargs="+", default=[2, 3, 4, 5, 12])
    p.add_argument("--out")
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("efficiency", help="coding efficiency against sigma, CSV")
    p.add_argument("--sigma", type=float, nargs="+", default=[1.0, 2.0, 3.0, 4.0, 6.0])
    p.add_argument("--m-est", type=int, default=2000)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_efficiency)

    p = sub.add_parser("validate", help="run the self-check groups, JSON report")
    p.add_argument("--groups", nargs="+")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_validate)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValueError as exc:  # library contract violations are parameter errors here
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARAMS


if __name__ == "__main__":
    sys.exit(main())
