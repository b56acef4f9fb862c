"""Command-line front end.

Exit codes: 0 on success, 1 when a verification exceeds its tolerance, 2 on
usage or configuration errors.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import json
import os
import sys
from pathlib import Path

import numpy as np

from .dirichlet import (DirichletProblem, Grid1D, boundary_trace, fit_boundary_exponent,
                        solve_dirichlet, verify_pohozaev)
from .errors import ConfigError, StableToolError
from .evaluator import apply_to_power, bump
from .exponent import exponent_report, kappa_1d, kappa_1d_half, kappa_profile
from .halfspace import verify_flat_ibp
from .kernel import load_kernel, validate
from .symbol import sqrt_pair, symbol

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    """ArgumentParser that raises instead of exiting, so ``run`` owns exit codes."""

    def error(self, message):
        raise _UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


class _UsageError(Exception):
    pass


def fmt(x):
    """Floats with 17 significant digits for exact round-trips."""
    if isinstance(x, (float, np.floating)):
        return "%.17g" % x
    return str(x)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


# --------------------------------------------------------------------------
# argument helpers
# --------------------------------------------------------------------------

def parse_grid(text):
    """``a:b:n`` -> ``linspace(a, b, n)``; a comma list is taken literally."""
    try:
        if ":" not in text:
            vals = np.array([float(t) for t in text.split(",")])
            if vals.size == 0:
                raise ValueError
            return vals
        a, b, n = text.split(":")
        n = int(n)
        if n < 1:
            raise ValueError
        return np.linspace(float(a), float(b), n)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a:b:n or a comma list, got {text!r}") from None


def parse_interval(text):
    try:
        a, b = (float(t) for t in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a,b, got {text!r}") from None
    if not a < b:
        raise argparse.ArgumentTypeError("interval needs a < b")
    return a, b


def parse_floats(text):
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def parse_vectors(text, n):
    """``'1,0;0,1'`` -> list of vectors.  For n = 1 a comma list is a list of scalars."""
    out = []
    for chunk in text.split(";"):
        vals = parse_floats(chunk)
        if n == 1:
            out.extend([v] for v in vals)
        elif len(vals) == n:
            out.append(vals)
        else:
            raise ConfigError(f"--nu: vector {chunk!r} does not have {n} components")
    if not out:
        raise ConfigError("--nu: no directions given")
    return out


def poly_callable(coeffs):
    p = np.polynomial.Polynomial(coeffs)
    d = p.deriv()
    return (lambda x: p(np.asarray(x, dtype=float))), (lambda x: d(np.asarray(x, dtype=float)))


def _kernel(args):
    if not args.kernel:
        raise ConfigError("--kernel is required")
    path = Path(args.kernel)
    if not path.exists():
        raise ConfigError(f"kernel file {path} does not exist")
    return load_kernel(path)


@contextlib.contextmanager
def _output(path):
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _emit_table(args, header, rows):
    with _output(args.out) as fh:
        if args.format == "json":
            json.dump(_jsonable([dict(zip(header, r)) for r in rows]), fh, indent=2)
            fh.write("\n")
        else:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for r in rows:
                w.writerow([fmt(v) for v in r])


def _emit_json(args, obj):
    with _output(args.out) as fh:
        json.dump(_jsonable(obj), fh, indent=2, sort_keys=True)
        fh.write("\n")


# --------------------------------------------------------------------------
# subcommands
# --------------------------------------------------------------------------

def cmd_validate(args):
    K = _kernel(args)
    rep = validate(K)
    _emit_json(args, rep.as_dict())
    return EXIT_OK if rep.ok else EXIT_FAIL


def cmd_symbol(args):
    K = _kernel(args)
    rows = []
    for xi in parse_vectors(args.nu or "1", K.dimension):
        sv = symbol(K, xi)
        a_sh, b_sh = sqrt_pair(sv.a_part, sv.b_part)
        rows.append([*xi, sv.a_part, sv.b_part, a_sh, b_sh])
    header = [f"xi{i}" for i in range(K.dimension)] + ["A", "B", "A_sharp", "B_sharp"]
    _emit_table(args, header, rows)
    return EXIT_OK


def cmd_exponent(args):
    K = _kernel(args)
    rows = []
    for nu in parse_vectors(args.nu or "1", K.dimension):
        rep = exponent_report(K, nu)
        rows.append([*rep.normal, rep.gamma, rep.gamma_star, rep.ibp_constant])
    header = [f"nu{i}" for i in range(K.dimension)] + ["gamma", "gamma_star", "c"]
    _emit_table(args, header, rows)
    return EXIT_OK


def cmd_kappa(args):
    betas = args.beta_grid if args.beta_grid is not None else np.linspace(0.05, 0.95, 19) * 2 * args.s
    rows = []
    for beta in betas:
        if args.s == 0.5:
            k = kappa_1d_half(args.a, args.b, beta)
        else:
            k = kappa_1d(args.a, args.b, args.s, beta)
        rows.append([float(beta), k])
    _emit_table(args, ["beta", "kappa"], rows)
    return EXIT_OK


def cmd_verify_power(args):
    K = _kernel(args)
    if K.dimension != 1:
        raise ConfigError("verify-power needs a one-dimensional kernel")
    s = K.order
    betas = args.beta_grid if args.beta_grid is not None else np.linspace(0.1, 0.9, 5) * 2 * s
    xs = args.x or [0.5, 1.0, 2.0]
    tol = args.tol if args.tol is not None else 1e-4
    rows, worst = [], 0.0
    for beta in betas:
        kap = kappa_profile(K, [1.0], beta)
        for x in xs:
            num = apply_to_power(K, beta, x)
            ref = kap * x ** (beta - 2 * s)
            rel = abs(num - ref) / max(abs(ref), 1e-300)
            worst = max(worst, rel)
            rows.append([float(beta), x, num, ref, rel])
    _emit_table(args, ["beta", "x", "numeric", "closed_form", "rel_err"], rows)
    return EXIT_OK if worst <= tol else EXIT_FAIL


def cmd_verify_ibp(args):
    K = _kernel(args)
    tol = args.tol if args.tol is not None else 1e-3
    cut = bump(args.radius)
    rep = verify_flat_ibp(K, cut, cut)
    out = rep.as_dict()
    out["tol"] = tol
    out["passed"] = bool(rep.rel_err <= tol)
    _emit_json(args, out)
    return EXIT_OK if out["passed"] else EXIT_FAIL


def cmd_solve(args):
    K = _kernel(args)
    a, b = args.interval or (-1.0, 1.0)
    f, _ = poly_callable(args.f or [1.0])
    grid = Grid1D(a, b, args.nodes or 512)
    sol = solve_dirichlet(DirichletProblem(K, f, grid))
    rep = exponent_report(K, [1.0]) if K.dimension == 1 else None
    diag = {"N": grid.n_cells, "h": grid.h, "gamma_pred_left": rep.gamma,
            "gamma_pred_right": rep.gamma_star}
    for end, g in (("left", rep.gamma), ("right", rep.gamma_star)):
        try:
            diag[f"gamma_fit_{end}"] = fit_boundary_exponent(sol, end)[0]
            diag[f"trace_{end}"] = boundary_trace(sol, end, g)
        except StableToolError as exc:
            diag[f"gamma_fit_{end}"] = None
            diag[f"note_{end}"] = str(exc)
    x = grid.nodes
    if args.format == "json":
        _emit_json(args, {"x": x, "u": sol.values, "diagnostics": diag})
        return EXIT_OK
    _emit_table(args, ["x", "u"], list(zip(x.tolist(), sol.values.tolist())))
    if args.diagnostics:
        Path(args.diagnostics).write_text(json.dumps(_jsonable(diag), indent=2, sort_keys=True))
    elif args.out:
        Path(str(args.out) + ".diagnostics.json").write_text(
            json.dumps(_jsonable(diag), indent=2, sort_keys=True))
    else:
        sys.stderr.write(json.dumps(_jsonable(diag), sort_keys=True) + "\n")
    return EXIT_OK


def cmd_pohozaev(args):
    K = _kernel(args)
    interval = args.interval or (-1.0, 1.0)
    f, fp = poly_callable(args.f or [1.0, 0.5])
    g, gp = poly_callable(args.g or [1.0])
    tol = args.tol if args.tol is not None else 5e-2
    n0 = args.nodes or 512
    table = []
    for k in range(args.refine or 3):
        rep = verify_pohozaev(K, f, g, interval, args.e, n0 * 2 ** k, fprime=fp, gprime=gp)
        table.append(rep.as_dict())
    errs = [r["rel_err"] for r in table]
    monotone = all(e2 < e1 for e1, e2 in zip(errs, errs[1:]))
    passed = errs[-1] <= tol and monotone
    _emit_json(args, {"table": table, "monotone": monotone, "tol": tol, "passed": passed})
    return EXIT_OK if passed else EXIT_FAIL


# --------------------------------------------------------------------------
# parser
# --------------------------------------------------------------------------

def build_parser():
    p = _Parser(prog="stabletool", description="Numerics for non-symmetric stable operators.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    def common(sp, kernel=True):
        if kernel:
            sp.add_argument("--kernel", metavar="PATH")
        sp.add_argument("--out", metavar="PATH")
        sp.add_argument("--format", choices=("csv", "json"), default="csv")
        sp.add_argument("--tol", type=float)

    sp = sub.add_parser("validate-kernel", help="check the structural assumptions")
    common(sp)
    sp.set_defaults(func=cmd_validate)

    sp = sub.add_parser("symbol", help="Fourier symbol and its square root")
    common(sp)
    sp.add_argument("--nu", metavar="CSV", help="frequencies, ';' between vectors")
    sp.set_defaults(func=cmd_symbol)

    sp = sub.add_parser("exponent", help="boundary exponents and IBP constant")
    common(sp)
    sp.add_argument("--nu", metavar="CSV", help="normals, ';' between vectors")
    sp.set_defaults(func=cmd_exponent)

    sp = sub.add_parser("kappa", help="1D constant kappa on a beta grid")
    common(sp, kernel=False)
    sp.add_argument("--a", type=float, default=1.0)
    sp.add_argument("--b", type=float, default=0.0)
    sp.add_argument("--s", type=float, required=True)
    sp.add_argument("--beta-grid", type=parse_grid)
    sp.set_defaults(func=cmd_kappa)

    sp = sub.add_parser("verify-power", help="quadrature of L on (x_+)^beta vs kappa")
    common(sp)
    sp.add_argument("--beta-grid", type=parse_grid)
    sp.add_argument("--x", type=parse_floats)
    sp.set_defaults(func=cmd_verify_power)

    sp = sub.add_parser("verify-ibp", help="flat integration-by-parts identity")
    common(sp)
    sp.add_argument("--radius", type=float, default=4.0)
    sp.set_defaults(func=cmd_verify_ibp)

    sp = sub.add_parser("solve", help="1D Dirichlet problem with zero exterior data")
    common(sp)
    sp.add_argument("--interval", type=parse_interval)
    sp.add_argument("--nodes", type=int, help="number of cells N")
    sp.add_argument("--f", type=parse_floats, help="polynomial coefficients of f")
    sp.add_argument("--diagnostics", metavar="PATH")
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("pohozaev", help="Pohozaev identity under refinement")
    common(sp)
    sp.add_argument("--interval", type=parse_interval)
    sp.add_argument("--nodes", type=int, help="coarsest number of cells")
    sp.add_argument("--refine", type=int, help="number of refinement levels")
    sp.add_argument("--f", type=parse_floats, help="polynomial coefficients of f")
    sp.add_argument("--g", type=parse_floats, help="polynomial coefficients of g")
    sp.add_argument("--e", type=int, choices=(1, -1), default=1)
    sp.set_defaults(func=cmd_pohozaev)
    return p


def _thread_limit():
    value = os.environ.get("STABLETOOL_THREADS")
    if not value:
        return contextlib.nullcontext()
    try:
        n = int(value)
    except ValueError:
        raise ConfigError(f"STABLETOOL_THREADS must be an integer, got {value!r}") from None
    from threadpoolctl import threadpool_limits
    return threadpool_limits(limits=max(1, n))


def run(argv=None):
    """Parse ``argv`` and execute one subcommand; returns the exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        sys.stderr.write(str(exc) + "\n")
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    if args.command is None:
        sys.stderr.write(parser.format_help())
        return EXIT_USAGE
    if args.tol is not None and not args.tol > 0:
        sys.stderr.write("--tol must be positive\n")
        return EXIT_USAGE
    try:
        with _thread_limit():
            return args.func(args)
    except (ConfigError, FileNotFoundError, StableToolError) as exc:
        sys.stderr.write(f"stabletool {args.command}: {exc}\n")
        return EXIT_USAGE


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
