"""Command-line front end: method inspection, stability scans, derivation,
integration, and convergence studies, all emitting deterministic text or CSV.

Exit codes: 0 success, 1 when the requested method carries a normalization
inconsistency flag (the report is still printed), 2 on usage errors.
"""
from __future__ import annotations

import argparse
import sys

import numpy as np

from . import hevi
from .construct import DerivationError, derive_imkg3_q4
from .integrate import (
    NewtonConfig,
    convergence_study,
    integrate,
    write_convergence_csv,
    write_trajectory_csv,
)
from .order import check_order3_general
from .problems import (
    acoustic_column,
    dahlquist_split,
    default_background,
    hevi_problem,
    hydrostatic_state,
    perturb_phi,
)
from .registry import PUBLISHED_PROPERTIES, UnknownMethodError, lookup, registry
from .stability import imaginary_axis_limit, imkg_explicit_polynomial, stability_report
from .tableau import expand_imkg, write_tableau_file


def _fmt(v: float) -> str:
    return f"{v:.17g}"


def _yn(flag: bool) -> str:
    return "Y" if flag else "N"


def _resolve(name: str, need_tableau: bool = False):
    try:
        entry = lookup(name)
    except UnknownMethodError:
        print(f"unknown method {name!r}; try 'imexkg methods list'", file=sys.stderr)
        raise SystemExit(2)
    if need_tableau and entry.tableau is None:
        print(f"method {name} has no usable tableau: {entry.violations}", file=sys.stderr)
        raise SystemExit(1)
    return entry


def _cmd_methods_list(args) -> int:
    for entry in registry():
        status = "ok" if entry.clean else ",".join(entry.flags)
        rec = entry.record
        print(f"{entry.name}  order={rec.order} q={rec.explicit_stages} "
              f"implicit={rec.implicit_stages}  {status}")
    return 0


def _cmd_methods_check(args) -> int:
    entry = _resolve(args.name)
    rec = entry.record
    print(f"method {entry.name}")
    print(f"q {rec.explicit_stages}  stages {rec.explicit_stages + 1}  "
          f"claimed_order {rec.order}  claimed_implicit_stages {rec.implicit_stages}")
    if entry.coefficients is None:
        print("normalization failed:")
        for v in entry.violations:
            print(f"  {v}")
        return 1
    print(f"normalization {'clean' if entry.clean else 'flagged'}")
    for v in entry.violations:
        print(f"  violated: {v}")
    rep_order = entry.order_report
    print(f"order residual max {_fmt(rep_order.max_abs_residual)}")
    poly = imkg_explicit_polynomial(entry.coefficients)
    print("explicit polynomial " + " ".join(_fmt(c) for c in poly.coefficients))
    rep = stability_report(entry.coefficients, entry.name)
    print(f"imag_axis_limit {_fmt(rep.explicit_imag_limit)}")
    print(f"kg_class {rep.kg_class}")
    print(f"I_stable {_yn(rep.i_stable)}  A_stable {_yn(rep.a_stable)}  "
          f"VI {_yn(rep.vi)}  L_stable {_yn(rep.l_stable)}  SD {_yn(rep.sd)}")
    pub = PUBLISHED_PROPERTIES.get(entry.name)
    if pub:
        print(f"published I_or_A {pub['i_or_a']}  VI {_yn(pub['vi'])}  SD {_yn(pub['sd'])}")
    for d in rep.diagnostics:
        print(f"note: {d}")
    return 0 if entry.clean else 1


def _cmd_stability_poly(args) -> int:
    entry = _resolve(args.name, need_tableau=True)
    if entry.coefficients is None:
        print("method has no normalized coefficients", file=sys.stderr)
        return 1
    poly = imkg_explicit_polynomial(entry.coefficients)
    rep = stability_report(entry.coefficients, entry.name)
    print("coefficients " + " ".join(_fmt(c) for c in poly.coefficients))
    print(f"imag_axis_limit {_fmt(imaginary_axis_limit(poly))}")
    print(f"kg_class {rep.kg_class}")
    return 0 if entry.clean else 1


def _cmd_stability_hmap(args) -> int:
    entry = _resolve(args.name, need_tableau=True)
    grid = hevi.scan_grid(entry.tableau, args.xmax, args.zmax, args.nx, args.nz)
    hevi.write_grid_csv(grid, args.output)
    print(f"wrote {args.nx * args.nz} samples to {args.output}")
    return 0 if entry.clean else 1


def _cmd_stability_region(args) -> int:
    entry = _resolve(args.name, need_tableau=True)
    poly = imkg_explicit_polynomial(entry.coefficients)
    r0 = imaginary_axis_limit(poly)
    grid = hevi.scan_grid(
        entry.tableau,
        max(args.n0, r0) + 0.5,
        50.0,
        401,
        501,
        hevi.DEFAULT_EXTRA_Z,
    )
    contained = hevi.region_T_contained(grid, args.n0)
    print(f"imag_axis_limit {_fmt(r0)}")
    print(f"T_contained(n0={_fmt(args.n0)}) {_yn(contained)}")
    if contained:
        print("gamma_min 0")
    else:
        gamma = hevi.min_gamma(grid, args.n0)
        print("gamma_min " + ("none" if gamma is None else _fmt(gamma)))
    return 0 if entry.clean else 1


def _cmd_derive(args) -> int:
    try:
        coeffs = derive_imkg3_q4(args.d2, args.d3, args.alpha2, args.beta1)
    except DerivationError as exc:
        print(f"derivation failed: {exc}", file=sys.stderr)
        return 2
    tableau = expand_imkg(coeffs, "imkg3q4-derived")
    write_tableau_file(tableau, args.output)
    report = check_order3_general(tableau)
    print(f"wrote {args.output}")
    print(f"order3 residual max {_fmt(report.max_abs_residual)}")
    return 0


_PROBLEMS = ("dahlquist", "hevi", "column")


def _make_problem(kind: str):
    if kind == "dahlquist":
        problem = dahlquist_split(1j, -1.0 + 0.0j)
        return problem, np.array([1.0 + 0.0j]), None
    if kind == "hevi":
        problem = hevi_problem(1.0, 10.0)
        return problem, problem.exact_solution(0.0), None
    if kind == "column":
        bg = default_background(20)
        x0 = perturb_phi(hydrostatic_state(bg), 50.0, 10)
        return acoustic_column(bg), x0, NewtonConfig(
            eps_r=1e-10, eps_a=1e-4, epsilon=1e-4, max_iters=50
        )
    raise SystemExit(2)


def _cmd_integrate(args) -> int:
    entry = _resolve(args.name, need_tableau=True)
    problem, x0, cfg = _make_problem(args.problem)
    traj = integrate(entry.tableau, problem, x0, 0.0, args.tend, args.dt, cfg)
    write_trajectory_csv(traj, args.output)
    print(f"wrote {len(traj.times)} states to {args.output}")
    return 0 if entry.clean else 1


def _cmd_converge(args) -> int:
    entry = _resolve(args.name, need_tableau=True)
    problem, x0, cfg = _make_problem(args.problem)
    try:
        dts = [float(tok) for tok in args.dts.split(",") if tok]
    except ValueError:
        print("--dts must be a comma-separated list of step sizes", file=sys.stderr)
        return 2
    if len(dts) < 2:
        print("--dts needs at least two step sizes", file=sys.stderr)
        return 2
    table = convergence_study(entry.tableau, problem, dts, args.tend, cfg, x0=x0)
    write_convergence_csv(table, args.output)
    print(f"fitted_order {_fmt(table.fitted_order)}")
    print(f"wrote {table.dts.size} rows to {args.output}")
    return 0 if entry.clean else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="imexkg",
        description="IMEX Runge-Kutta pair analysis and integration toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    methods = sub.add_parser("methods", help="inspect the shipped method registry")
    msub = methods.add_subparsers(dest="subcommand", required=True)
    msub.add_parser("list", help="list methods and normalization status").set_defaults(
        func=_cmd_methods_list
    )
    check = msub.add_parser("check", help="order and stability report for one method")
    check.add_argument("name")
    check.set_defaults(func=_cmd_methods_check)

    stab = sub.add_parser("stability", help="stability polynomials, scans, regions")
    ssub = stab.add_subparsers(dest="subcommand", required=True)
    poly = ssub.add_parser("poly", help="explicit polynomial, axis limit, class")
    poly.add_argument("name")
    poly.set_defaults(func=_cmd_stability_poly)
    hmap = ssub.add_parser("hmap", help="spectral-radius grid scan to CSV")
    hmap.add_argument("name")
    hmap.add_argument("--xmax", type=float, required=True)
    hmap.add_argument("--zmax", type=float, required=True)
    hmap.add_argument("--nx", type=int, required=True)
    hmap.add_argument("--nz", type=int, required=True)
    hmap.add_argument("-o", "--output", required=True)
    hmap.set_defaults(func=_cmd_stability_hmap)
    region = ssub.add_parser("region", help="containment and cone slope queries")
    region.add_argument("name")
    region.add_argument("--n0", type=float, required=True)
    region.set_defaults(func=_cmd_stability_region)

    derive = sub.add_parser("derive", help="derive coefficient sets")
    dsub = derive.add_subparsers(dest="subcommand", required=True)
    d34 = dsub.add_parser("imkg3q4", help="third-order five-stage derivation")
    d34.add_argument("--d2", type=float, required=True)
    d34.add_argument("--d3", type=float, required=True)
    d34.add_argument("--alpha2", type=float, required=True)
    d34.add_argument("--beta1", type=float, required=True)
    d34.add_argument("-o", "--output", required=True)
    d34.set_defaults(func=_cmd_derive)

    integ = sub.add_parser("integrate", help="run one trajectory to CSV")
    integ.add_argument("problem", choices=_PROBLEMS)
    integ.add_argument("name")
    integ.add_argument("--dt", type=float, required=True)
    integ.add_argument("--tend", type=float, required=True)
    integ.add_argument("-o", "--output", required=True)
    integ.set_defaults(func=_cmd_integrate)

    conv = sub.add_parser("converge", help="step-size sweep to CSV")
    conv.add_argument("problem", choices=_PROBLEMS)
    conv.add_argument("name")
    conv.add_argument("--dts", required=True, help="comma-separated step sizes")
    conv.add_argument("--tend", type=float, required=True)
    conv.add_argument("-o", "--output", required=True)
    conv.set_defaults(func=_cmd_converge)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
