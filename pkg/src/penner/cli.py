"""Command-line front end: CSV/JSON tables for every engine.

Exit codes: 0 success, 1 verification failure, 2 usage error,
3 numerical-regime error (criticality, convergence, merging cuts).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
from mpmath import mp

from . import __version__
from .errors import (ConsistencyError, PennerError, PrecisionError, RegimeError)
from .model import PRESETS, load_config, preset
from .numerics import FLOAT, RATIONAL, fmt_scalar, parse_rational, to_mpf
from .series import LogSeries, TruncatedSeries

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_REGIME = 0, 1, 2, 3


class UsageError(Exception):
    pass


@dataclass
class Table:
    columns: list
    rows: list
    notes: list = field(default_factory=list)
    failed: bool = False


# ---------------------------------------------------------------- output

def _cell(v, digits):
    if v is None:
        return "-"
    if isinstance(v, str):
        return v
    if isinstance(v, (Fraction, int, mpmath.mpf, mpmath.mpc, float)) and not isinstance(v, bool):
        return fmt_scalar(v, digits)
    return str(v)


def render(table: Table, config: dict, fmt: str, digits: int) -> str:
    rows = [[_cell(v, digits) for v in r] for r in table.rows]
    if fmt == "json":
        rows = [[v if isinstance(v, int) and not isinstance(v, bool) else c
                 for v, c in zip(r, cr)] for r, cr in zip(table.rows, rows)]
        out = {"config": config, "columns": table.columns,
               "rows": [dict(zip(table.columns, r)) for r in rows]}
        if table.notes:
            out["notes"] = table.notes
        return json.dumps(out, indent=2, sort_keys=False) + "\n"
    buf = io.StringIO()
    buf.write("# " + json.dumps(config, sort_keys=True) + "\n")
    for n in table.notes:
        buf.write(f"# note: {n}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(table.columns)
    w.writerows(rows)
    return buf.getvalue()


# ------------------------------------------------------------- helpers

def _rational(text, name):
    """p/q literals, with plain decimals ("0.25") read exactly."""
    try:
        return parse_rational(text)
    except (PennerError, ValueError):
        pass
    try:
        return Fraction(text.strip())
    except (ValueError, AttributeError):
        raise UsageError(f"--{name}: not a number: {text!r}") from None


def _potential(args, need_N=False):
    """(Potential, N, descriptor) from --model/--potential and --N."""
    if args.model and args.potential:
        raise UsageError("give either --model or --potential, not both")
    N = _rational(args.N, "N") if args.N is not None else None
    if args.potential:
        p, fileN = load_config(args.potential)
        N = N if N is not None else fileN
        desc = {"potential": p.to_config()}
    elif args.model:
        if args.model not in PRESETS:
            raise UsageError(f"unknown model {args.model!r}; choose from {', '.join(PRESETS)}")
        mu = {}
        if args.model == "double_penner":
            a0 = _rational(args.alpha0, "alpha0") if args.alpha0 else Fraction(1)
            a1 = _rational(args.alpha1, "alpha1") if args.alpha1 else Fraction(1)
            N = N if N is not None else Fraction(1)
            mu = {"mu0": a0 / N, "mu1": a1 / N}
        p = preset(args.model, **mu)
        desc = {"model": args.model}
    else:
        raise UsageError("one of --model or --potential is required")
    if need_N and N is None:
        raise UsageError("--N is required")
    if N is not None and N <= 0:
        raise UsageError("--N must be positive")
    return p, N, desc


def _x_grid(text):
    return [_rational(t, "x") for t in text.split(",") if t.strip()]


def _logseries_rows(name, f, order):
    """Long-format rows (quantity, term, j, coefficient); zero entries skipped
    except that every quantity gets at least its x^0 row."""
    if isinstance(f, TruncatedSeries):
        f = LogSeries(f)
    rows = []
    for term, s in (("x^j", f.p), ("x^j*log(x)", f.q)):
        lo = min(0, s.val)
        for j in range(lo, order + 1):
            c = s.coeff(j)
            if c != 0 or (term == "x^j" and j == 0):
                rows.append([name, term, j, c])
    return rows


SERIES_COLUMNS = ["quantity", "term", "j", "coefficient"]


# -------------------------------------------------------------- commands

def cmd_exact(args):
    from .solvable import SOLVABLE, exact_row
    if args.model not in SOLVABLE:
        raise UsageError(f"--model must be one of {', '.join(SOLVABLE)}")
    N = _rational(args.N, "N") if args.N is not None else Fraction(1)
    a0 = _rational(args.alpha0, "alpha0") if args.alpha0 else Fraction(1)
    a1 = _rational(args.alpha1, "alpha1") if args.alpha1 else Fraction(1)
    rows = []
    for n in range(args.n_max + 1):
        r = exact_row(args.model, n, N, a0, a1, args.backend, args.precision)
        rows.append([n, r.r if n else None, r.s, r.logZ, str(r.Z)])
    return Table(["n", "r_n", "s_n", "logZ_n", "Z_n"], rows)


def cmd_recurrence(args):
    from .oracle import log_partition, recurrence_table
    p, N, _ = _potential(args, need_N=True)
    rt = recurrence_table(p, N, args.n_max, args.backend, args.precision)
    rows = []
    for n in range(args.n_max + 1):
        rows.append([n, rt.h[n], rt.r[n] if n else None, rt.s[n],
                     log_partition(rt, n, args.precision)])
    return Table(["n", "h_n", "r_n", "s_n", "logZ_n"], rows)


def cmd_verify(args):
    from .oracle import (RecurrenceTable, identity_residual_table, off_contour_points,
                         recurrence_table, resolvents, string_residuals)
    p, N, _ = _potential(args)
    N = N if N is not None else Fraction(1)
    n_max = args.n_max
    rt = recurrence_table(p, N, n_max + p.degree + 2, args.backend, args.precision)
    notes = []
    if args.perturb_r1:
        d = _rational(args.perturb_r1, "perturb-r1")
        r = list(rt.r)
        r[1] = r[1] + (d if rt.backend == RATIONAL else to_mpf(d))
        rt = RecurrenceTable(rt.N, rt.h, tuple(r), rt.s, rt.backend, p, rt.prec)
        notes.append(f"r_1 perturbed by {fmt_scalar(d)}")
    tol = Fraction(0) if args.backend == RATIONAL else mpmath.mpf(10) ** (-(args.precision - 15))
    id_tol = mpmath.mpf(10) ** (-(args.precision - 15))
    rows = []
    s1 = s2 = 0
    for n in range(1, n_max + 1):
        a, b = string_residuals(rt, p, N, n, args.precision)
        s1, s2 = max(s1, a), max(s2, b)
    rows.append(["string_1", s1, tol, "pass" if s1 <= tol else "FAIL"])
    rows.append(["string_2", s2, tol, "pass" if s2 <= tol else "FAIL"])
    if p.z2:
        notes.append("Z2 potential: the second string equation holds identically by symmetry")
    w1 = w2 = agree = mpmath.mpf(0)
    with mp.workdps(args.precision + 10):
        for z in off_contour_points(p):
            R, T = resolvents(rt, p, N, z, n_max + 1, "quadrature", args.precision)
            a, b = identity_residual_table(R, T, rt, z, n_max)
            w1, w2 = max(w1, a), max(w2, b)
            if not args.perturb_r1:
                R2, T2 = resolvents(rt, p, N, z, n_max + 1, "tridiagonal", args.precision)
                agree = max(agree, max(abs(x - y) for x, y in zip(R + T, R2 + T2)))
    rows.append(["identity_1", w1, id_tol, "pass" if w1 <= id_tol else "FAIL"])
    rows.append(["identity_2", w2, id_tol, "pass" if w2 <= id_tol else "FAIL"])
    if not args.perturb_r1:
        rows.append(["two_path_agreement", agree, id_tol, "pass" if agree <= id_tol else "FAIL"])
    failed = any(r[-1] == "FAIL" for r in rows)
    return Table(["check", "max_residual", "tolerance", "status"], rows, notes, failed)


def cmd_genus(args):
    from .onecut import genus_free_energy, perturbative_coeffs
    p, _, _ = _potential(args)
    seed = _rational(args.seed, "seed") if args.seed else None
    backend = None if args.backend == "auto" else args.backend
    o = args.x_order
    # ρ_k/ρ₀ costs one order per genus; compute ahead and truncate on output
    exp = perturbative_coeffs(p, o + 2 * args.k_max, args.k_max, seed, backend, args.precision)
    rows = []
    for k, r in enumerate(exp.rho):
        rows += _logseries_rows(f"rho{k}", r, o)
    for k, s in enumerate(exp.sigma):
        rows += _logseries_rows(f"sigma{k}", s, o)
    rows += _logseries_rows("jacobian_det", exp.jacobian_det, o)
    try:
        genus = genus_free_energy(exp, args.regularized)
        for k, g in enumerate(genus):
            rows += _logseries_rows(f"F{k}", g, o)
        notes = []
    except PennerError as exc:
        notes = [f"free energy not computed: {exc}"]
    return Table(SERIES_COLUMNS, rows, notes)


def cmd_planar(args):
    from .onecut import planar_residuals, planar_solve_numeric
    p, _, _ = _potential(args)
    seed = _rational(args.seed, "seed") if args.seed else None
    rows = []
    for x in _x_grid(args.x):
        st = planar_solve_numeric(p, x, None, args.precision, sigma_at_zero=seed)
        res = planar_residuals(p, x, st.sigma0, st.rho0, args.precision)
        a, b = st.endpoints
        rows.append([x, st.sigma0, st.rho0, a, b, st.jacobian_det, max(res)])
    return Table(["x", "sigma0", "rho0", "a", "b", "jacobian_det", "residual"], rows)


def cmd_twocut(args):
    from .twocut import twocut_perturbative, twocut_planar_solve, twocut_residuals
    p, _, _ = _potential(args)
    if args.x_order is not None:
        backend = None if args.backend == "auto" else args.backend
        exp = twocut_perturbative(p, args.x_order, args.k_max, None, backend, args.precision)
        rows = []
        for k, (a, b) in enumerate(zip(exp.alpha, exp.beta)):
            rows += _logseries_rows(f"alpha{k}", a, args.x_order)
            rows += _logseries_rows(f"beta{k}", b, args.x_order)
        return Table(SERIES_COLUMNS, rows)
    rows = []
    for x in _x_grid(args.x):
        st = twocut_planar_solve(p, x, None, args.precision)
        res = twocut_residuals(p, x, st.alpha0, st.beta0, args.precision)
        rows.append([x, st.alpha0, st.beta0, st.endpoints[0], st.endpoints[1],
                     st.jacobian_det, max(res)])
    return Table(["x", "alpha0", "beta0", "a", "b", "jacobian_det", "residual"], rows)


def cmd_figure1(args):
    from .twocut import figure1_data
    N = _rational(args.N, "N") if args.N is not None else Fraction(4)
    if N.denominator != 1 or N <= 0:
        raise UsageError("--N must be a positive integer for figure1")
    data = figure1_data(int(N), args.n_max, args.branch_order, args.precision)
    rows = [[r.n, r.X, r.F_exact, r.A, r.B, r.nearest, r.own_residual] for r in data]
    if args.plot:
        from .plotting import plot_figure1
        plot_figure1(data, int(N), args.branch_order, args.plot, args.precision)
    return Table(["n", "X", "F_exact", "A", "B", "nearest", "residual"], rows,
                 [f"plot written to {args.plot}"] if args.plot else [])


COMMANDS = {
    "exact": cmd_exact, "recurrence": cmd_recurrence, "verify": cmd_verify,
    "genus": cmd_genus, "planar": cmd_planar, "twocut": cmd_twocut, "figure1": cmd_figure1,
}


# ---------------------------------------------------------------- parser

def _common(sp, backend_choices=(RATIONAL, FLOAT), backend_default=RATIONAL):
    sp.add_argument("--backend", choices=backend_choices, default=backend_default)
    sp.add_argument("--precision", type=int, default=50, help="decimal digits")
    sp.add_argument("--format", choices=("csv", "json"), default="csv")
    sp.add_argument("--out", help="output file (default stdout)")


def _model_args(sp):
    sp.add_argument("--model")
    sp.add_argument("--potential", help="JSON potential file")
    sp.add_argument("--N")
    # double_penner: alpha_i = mu_i N (N defaults to 1, so alpha_i = mu_i in the continuum commands)
    sp.add_argument("--alpha0")
    sp.add_argument("--alpha1")


def build_parser():
    ap = argparse.ArgumentParser(prog="penner", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("exact", help="closed-form tables for solvable presets")
    _model_args(sp)
    sp.add_argument("--n-max", type=int, default=8)
    _common(sp)

    sp = sub.add_parser("recurrence", help="recurrence coefficients from the moment oracle")
    _model_args(sp)
    sp.add_argument("--n-max", type=int, default=8)
    _common(sp)

    sp = sub.add_parser("verify", help="string-equation and resolvent-identity residuals")
    _model_args(sp)
    sp.add_argument("--n-max", type=int, default=6)
    sp.add_argument("--perturb-r1", help="add this amount to r_1 before checking")
    _common(sp, backend_default=FLOAT)

    sp = sub.add_parser("genus", help="one-cut series coefficients and genus free energies")
    _model_args(sp)
    sp.add_argument("--x-order", type=int, default=4)
    sp.add_argument("--k-max", type=int, default=1, choices=(0, 1, 2))
    sp.add_argument("--seed", help="sigma0 at x = 0")
    sp.add_argument("--regularized", action="store_true")
    _common(sp, (RATIONAL, FLOAT, "auto"), "auto")

    sp = sub.add_parser("planar", help="numeric one-cut planar solution on an x grid")
    _model_args(sp)
    sp.add_argument("--x", default="0.1,0.5,1")
    sp.add_argument("--seed")
    _common(sp, backend_default=FLOAT)

    sp = sub.add_parser("twocut", help="two-cut planar solution or branch series")
    _model_args(sp)
    sp.add_argument("--x", default="0.25,0.5,1")
    sp.add_argument("--x-order", type=int, help="emit alpha_k, beta_k series instead")
    sp.add_argument("--k-max", type=int, default=1, choices=(0, 1))
    _common(sp, (RATIONAL, FLOAT, "auto"), "auto")

    sp = sub.add_parser("figure1", help="gaussian Penner exact values against both branches")
    sp.add_argument("--N", default="4")
    sp.add_argument("--n-max", type=int, default=8)
    sp.add_argument("--branch-order", type=int, default=1, choices=(0, 1))
    sp.add_argument("--plot", metavar="PATH", help="also draw the figure (needs matplotlib)")
    _common(sp, backend_default=FLOAT)
    return ap


def _config(args):
    cfg = {k: v for k, v in sorted(vars(args).items()) if k not in ("out", "format")}
    cfg["version"] = __version__
    return cfg


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.precision < 15:
        print("error: --precision must be at least 15", file=sys.stderr)
        return EXIT_USAGE
    if getattr(args, "n_max", 0) < 0:
        print("error: --n-max must be nonnegative", file=sys.stderr)
        return EXIT_USAGE
    try:
        with mp.workdps(args.precision):
            table = COMMANDS[args.command](args)
            text = render(table, _config(args), args.format, args.precision)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (RegimeError, PrecisionError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_REGIME
    except ConsistencyError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except PennerError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, ImportError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_VERIFY if table.failed else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
