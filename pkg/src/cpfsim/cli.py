"""Command-line interface: sweeps, slope fits, exact tables, compile checks,
and figure-reproduction presets."""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .compilers import (
    compile_recipe,
    compiled_alpha_slope,
    compile_Ck,
    compilation_error,
)
from .exact import bernoulli_half, format_fraction, solve_vandermonde_b
from .harness import (
    filter_rows,
    load_config,
    read_csv_rows,
    run_preset,
    run_sweep,
    slope_of_rows,
)
from .lattice import build_heisenberg, build_tfim


def _cmd_sweep(args) -> int:
    cfg = load_config(args.config)
    result = run_sweep(cfg, jobs=args.jobs)
    out = args.output or cfg.output
    if out:
        result.write(out, as_json=args.json)
        print(f"wrote {len(result.rows)} rows to {out}")
    else:
        sys.stdout.write(result.to_json() if args.json else result.to_csv())
    return 0


def _cmd_slope(args) -> int:
    rows = filter_rows(read_csv_rows(args.input), args.filter)
    if not rows:
        print("no rows match the filter", file=sys.stderr)
        return 1
    slope, intercept, r2 = slope_of_rows(rows, x=args.x)
    print(f"slope={slope:.4f} intercept={intercept:.4f} r2={r2:.6f} "
          f"({len(rows)} rows, x={args.x})")
    return 0


def _cmd_tables(args) -> int:
    which = args.which
    if which in (None, "bernoulli"):
        vals = ", ".join(
            f"B_{j}(1/2) = {format_fraction(bernoulli_half(j))}"
            for j in range(0, 12, 2)
        )
        print(f"bernoulli: {vals}")
    if which in (None, "vandermonde"):
        for k in range(1, 6):
            sol = ", ".join(format_fraction(b) for b in solve_vandermonde_b(k))
            print(f"k={k}: {sol}")
    return 0


def _cmd_compile_check(args) -> int:
    heis = build_heisenberg(4)
    rows = [
        ("sym-pair", {"c2": "-1/4", "c3": "1/12"}, 4.0),
        ("symp-adab", {"c2": "-1/24"}, 4.0),
        ("sym-adb2a", {"c3": "-1/48"}, 5.0),
        ("symp-b-plus-adab", {"c1": "1/2", "c2": "1/12"}, 4.0),
    ]
    print(f"{'row':<20}{'declared':>10}{'measured':>10}  status")
    failures = 0
    for row, params, declared in rows:
        cc = compile_recipe(row, params, -1j * 1e-2)
        _, slope = compilation_error(cc, heis)
        ok = abs(slope - declared) <= 0.25
        failures += 0 if ok else 1
        print(f"{row:<20}{declared:>10.1f}{slope:>10.2f}  "
              f"{'PASS' if ok else 'FAIL'}")
    a_slope = compiled_alpha_slope(
        lambda lam, al: compile_Ck(2, lam, al),
        lambda al: build_tfim(4, J=al, regime="weak-coupling"),
        lam=0.2,
    )
    ok = abs(a_slope - 3.0) <= 0.25
    failures += 0 if ok else 1
    print(f"{'high-order-Ck (alpha)':<20}{3.0:>8.1f}{a_slope:>10.2f}  "
          f"{'PASS' if ok else 'FAIL'}")
    return 1 if failures else 0


def _cmd_repro(args) -> int:
    if args.name == "fig-compile":
        return _repro_fig_compile(args)
    result = run_preset(args.name, full=args.full, jobs=args.jobs)
    out = args.out or f"{args.name}.csv"
    result.write(out, as_json=args.json)
    print(f"wrote {len(result.rows)} rows to {out}")
    return 0


def _repro_fig_compile(args) -> int:
    """Compilation-error curves for the table recipes, harness CSV schema."""
    from .harness import SweepResult, SweepRow

    heis = build_heisenberg(4)
    rows = []
    for row, params in [
        ("sym-pair", {"c2": "-1/4", "c3": "1/12"}),
        ("symp-adab", {"c2": "-1/24"}),
        ("sym-adb2a", {"c3": "-1/48"}),
        ("symp-b-plus-adab", {"c1": "1/2", "c2": "1/12"}),
    ]:
        cc = compile_recipe(row, params, -1j * 1e-2)
        table, _ = compilation_error(cc, heis, np.geomspace(1e-3, 1e-1, 25))
        for lam_abs, err in table:
            rows.append(SweepRow("heisenberg", f"compile:{row}", 1.0, lam_abs,
                                 1, lam_abs, err, cc.exp_cost, 0.0))
    result = SweepResult(rows)
    out = args.out or "fig-compile.csv"
    result.write(out, as_json=args.json)
    print(f"wrote {len(result.rows)} rows to {out}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="cpfsim",
        description="Corrected product formulas: sweeps, tables, compile checks",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", help="run a sweep from a key-value config file")
    p.add_argument("--config", required=True)
    p.add_argument("--full", action="store_true",
                   help="accepted for parity with repro; configs control scale")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--json", action="store_true")
    p.add_argument("--output")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("slope", help="log-log slope of filtered CSV rows")
    p.add_argument("--input", required=True)
    p.add_argument("--filter", default="",
                   help="comma-separated key=value clauses, e.g. formula=pf2,alpha=0.001")
    p.add_argument("--x", default="t", choices=["t", "tau", "alpha", "r"])
    p.set_defaults(func=_cmd_slope)

    p = sub.add_parser("tables", help="print the exact coefficient tables")
    p.add_argument("which", nargs="?", choices=["bernoulli", "vandermonde"])
    p.set_defaults(func=_cmd_tables)

    p = sub.add_parser("compile-check",
                       help="measured vs declared compilation error orders")
    p.set_defaults(func=_cmd_compile_check)

    p = sub.add_parser("repro", help="run a figure-reproduction preset")
    p.add_argument("name", choices=["fig-nonpert", "fig-pert", "fig-compile"])
    p.add_argument("--full", action="store_true",
                   help="paper-scale n=8, r=10000, 1<=t<=1000")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--json", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_repro)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
