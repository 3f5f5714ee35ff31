"""Command-line front end.

Exit codes: 0 success, 2 invalid input, 3 numerical contract failure.
Errors are reported as one line on stderr: ``kgwigner: error: <message>``.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import warnings

import numpy as np

from . import io
from .grid import make_grid
from .states import evolve_free, make_gaussian
from .stats import (
    RouteMismatchError,
    coordinate_moment,
    dispersion_threshold,
    fig2_curve,
    purity_criterion_residual,
    purity_functional,
    second_moment_corrected,
)
from .wigner import (
    constraint_residual,
    fv_wigner_components,
    momentum_marginal,
    reality_report,
)

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 2, 3


class ContractError(RuntimeError):
    """An invariant check failed."""


def _grid_args(parser, n=1024, p_max=16.0):
    g = parser.add_argument_group("grid")
    g.add_argument("--nodes", type=int, default=n, help=f"grid size n (default {n})")
    g.add_argument("--p-max", type=float, default=p_max, help=f"momentum window (default {p_max:g})")
    g.add_argument("--hbar", type=float, default=1.0)
    g.add_argument("--mass", type=float, default=1.0)
    g.add_argument("--c", type=float, default=1.0)


def _grid_from(args):
    return make_grid(args.nodes, args.p_max, args.hbar, args.mass, args.c)


def _emit_json(obj, path=None):
    text = json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"
    if path:
        with open(path, "w", encoding="ascii", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _finite(x):
    return None if x is None or not math.isfinite(x) else float(x)


def cmd_gaussian(args):
    if args.charge not in (1, -1):
        raise ValueError(f"--charge must be +1 or -1, got {args.charge}")
    state = make_gaussian(_grid_from(args), args.sigma2, args.charge, args.p0, args.q0)
    io.write_state(state, args.output)
    return EXIT_OK


def cmd_wigner(args):
    state = io.read_state(args.state)
    io.write_wigner_csv(fv_wigner_components(state), args.output, state)
    return EXIT_OK


def cmd_evolve(args):
    state = io.read_state(args.state)
    io.write_state(evolve_free(state, args.t), args.output)
    return EXIT_OK


def cmd_moments(args):
    state = io.read_state(args.state)
    report = coordinate_moment(state, args.n)
    usual, corr = second_moment_corrected(state)
    _emit_json(
        {
            "order": report.order,
            "formula_value": report.value,
            "grid_value": report.grid_value,
            "usual_term": usual,
            "correction_term": corr,
            "second_moment": usual - corr,
        },
        args.output,
    )
    return EXIT_OK


def cmd_purity(args):
    if args.input.endswith(".csv"):
        w = io.read_wigner_csv(args.input)
    else:
        w = fv_wigner_components(io.read_state(args.input))
    bound = 1.0 / (2.0 * math.pi * w.grid.hbar)
    value = purity_functional(w)
    try:
        crit = float(np.nanmax(purity_criterion_residual(w, "even")))
    except ValueError:
        crit = None
    _emit_json(
        {
            "purity_functional": value,
            "pure_state_bound": bound,
            "ratio_to_bound": value / bound,
            "constraint_residual": constraint_residual(w),
            "criterion_even_max_residual": crit,
        },
        args.output,
    )
    return EXIT_OK


def cmd_fig2(args):
    grid = _grid_from(args)
    if not (0 < args.sigma2_min < args.sigma2_max):
        raise ValueError("need 0 < --sigma2-min < --sigma2-max")
    if args.points < 2:
        raise ValueError("--points must be >= 2")
    sigma2 = np.geomspace(args.sigma2_min, args.sigma2_max, args.points)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        rows = fig2_curve(sigma2, grid)
    for w in caught:
        sys.stderr.write(f"kgwigner: warning: {w.message}\n")
    with open(args.output, "w", encoding="ascii", newline="\n") as fh:
        fh.write("sigma_p,dx2_usual,dx2_corrected,reference_dx2\n")
        for r in rows:
            fh.write(",".join(io.fmt(x) for x in (r.sigma_p, r.dx2_usual, r.dx2_corrected, r.reference_dx2)))
            fh.write("\n")
    try:
        threshold = dispersion_threshold(
            grid, math.sqrt(args.sigma2_min), math.sqrt(args.sigma2_max), xtol=1e-5
        )
    except ValueError:
        threshold = None
    valid = [r for r in rows if math.isfinite(r.dx2_corrected)]
    below = all(r.dx2_corrected < r.reference_dx2 for r in valid)
    signs = [r.dx2_corrected > 0 for r in valid]
    changes = sum(a != b for a, b in zip(signs, signs[1:]))
    if args.figure:
        from .plotting import plot_fig2

        plot_fig2(valid, args.figure, threshold)
    _emit_json(
        {
            "rows": len(rows),
            "adapted_rows": sum(r.adapted for r in rows),
            "all_below_reference": below,
            "sign_changes": changes,
            "threshold_sigma_p": _finite(threshold),
            "dx_dp_at_min_sigma": _finite(
                math.sqrt(valid[0].dx2_corrected) * valid[0].sigma_p
                if valid and valid[0].dx2_corrected > 0
                else None
            ),
        }
    )
    return EXIT_OK


def _state_checks(state):
    w = fv_wigner_components(state)
    im, herm = reality_report(w)
    checks = {"reality_even_max_imag": (im, 1e-12), "odd_hermiticity": (herm, 1e-12)}
    g = state.grid
    ints = w.integrals()
    if state.charge != 0:
        dens = np.abs(state.psi_plus if state.charge == 1 else state.psi_minus) ** 2
        checks["momentum_marginal"] = (float(np.abs(momentum_marginal(w) - dens).max()), 1e-12)
        for order in (1, 2):
            try:
                rep = coordinate_moment(state, order, w)
                checks[f"moment_route_q{order}"] = (rep.mismatch, 1e-6 * max(1.0, abs(rep.value)))
            except RouteMismatchError:
                checks[f"moment_route_q{order}"] = (math.inf, 1e-6)
    else:
        checks["constraint_residual"] = (constraint_residual(w), 1e-8)
    charge_norm = state.charge_norm()
    checks["even_integral"] = (abs((ints["w_pp"] + ints["w_mm"]).real - charge_norm), 1e-10)
    checks["odd_integral"] = (abs(ints["w_pm"]), 1e-10)
    purity = purity_functional(w) * 2 * math.pi * g.hbar
    checks["purity"] = (abs(purity - state.norm() ** 2), 1e-8)
    return checks


def cmd_check(args):
    state = io.read_state(args.state)
    checks = _state_checks(state)
    report = {
        name: {"value": _finite(v), "tolerance": tol, "pass": bool(v <= tol)}
        for name, (v, tol) in checks.items()
    }
    _emit_json({"checks": report, "all_pass": all(r["pass"] for r in report.values())})
    failed = [k for k, r in report.items() if not r["pass"]]
    if failed:
        raise ContractError("invariant checks failed: " + ", ".join(failed))
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="kgwigner", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gaussian", help="write a Gaussian single-charge state")
    _grid_args(p)
    p.add_argument("--sigma2", type=float, default=1.0, help="momentum variance")
    p.add_argument("--charge", type=int, default=1)
    p.add_argument("--p0", type=float, default=0.0)
    p.add_argument("--q0", type=float, default=0.0)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_gaussian)

    p = sub.add_parser("wigner", help="tabulate Wigner components as CSV")
    p.add_argument("state")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_wigner)

    p = sub.add_parser("evolve", help="free evolution of a state file")
    p.add_argument("state")
    p.add_argument("--t", type=float, required=True)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("moments", help="coordinate moment by two routes (JSON)")
    p.add_argument("state")
    p.add_argument("--n", type=int, default=2, help="moment order 1..4")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_moments)

    p = sub.add_parser("purity", help="purity diagnostics of a state or Wigner CSV (JSON)")
    p.add_argument("input")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_purity)

    p = sub.add_parser("fig2", help="position dispersion against momentum spread (CSV)")
    _grid_args(p, n=4096, p_max=64.0)
    p.add_argument("--sigma2-min", type=float, default=1e-4)
    p.add_argument("--sigma2-max", type=float, default=16.0)
    p.add_argument("--points", type=int, default=60)
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--figure", help="also render a PNG to this path")
    p.set_defaults(func=cmd_fig2)

    p = sub.add_parser("check", help="invariant report for a state file (JSON)")
    p.add_argument("state")
    p.set_defaults(func=cmd_check)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (RouteMismatchError, ContractError) as exc:
        sys.stderr.write(f"kgwigner: error: {exc}\n")
        return EXIT_NUMERIC
    except (ValueError, OSError) as exc:
        msg = " ".join(str(exc).split())
        sys.stderr.write(f"kgwigner: error: {msg}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
