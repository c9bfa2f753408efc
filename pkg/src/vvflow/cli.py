"""Command line entry points.

Subcommands: run, sweep, verify, taylor-green, gronwall-table.  Every config
file key is mirrored as --section.key (same string converters as the file;
command line wins), so any run is reproducible from its manifest alone.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from dataclasses import replace

from .config import CONFIG_SCHEMA, ConfigError, SimConfig, load_config
from .diagnostics import DiagnosticsRecord, lp_norm, write_diagnostics_csv
from .gronwall import GronwallFamily, case_bounds, r_star, r_star_star
from .harness import BOUND_TABLE_HEADER, SweepGateError, run_single, rung_label, sweep
from .scenarios import ScenarioSpec, taylor_green
from .spectral import Grid, SolverInstabilityError
from .verify import verify_suite

TWO_PI_SQ = 2.0 * math.pi ** 2


def _add_config_flags(parser: argparse.ArgumentParser):
    for section, keys in CONFIG_SCHEMA.items():
        for key in keys:
            parser.add_argument(f"--{section}.{key}", dest=f"{section}.{key}",
                                metavar="V", help=argparse.SUPPRESS)


def _overrides_from(args: argparse.Namespace) -> dict:
    out = {}
    for section, keys in CONFIG_SCHEMA.items():
        for key in keys:
            val = getattr(args, f"{section}.{key}", None)
            if val is not None:
                out[(section, key)] = val
    return out


def _nu_list(text: str) -> list:
    try:
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad nu list {text!r}: {exc}") from None
    if not values:
        raise argparse.ArgumentTypeError("empty nu list")
    return values


def _print_gates(gates: dict) -> bool:
    ok = True
    for name, g in gates.items():
        status = "PASS" if g["passed"] else "FAIL"
        ok &= g["passed"]
        print(f"  {name:<18} {status}  value {g['value']:.3e}  threshold {g['threshold']:.1e}")
    return ok


def _cmd_run(args) -> int:
    cfg = load_config(args.config, _overrides_from(args))
    if cfg.outdir is None:
        stem = os.path.splitext(os.path.basename(args.config))[0]
        cfg = replace(cfg, outdir=stem + "_out")
    try:
        res = run_single(cfg)
    except SolverInstabilityError as exc:
        print(f"unstable: {exc}", file=sys.stderr)
        return 1
    last = res.records[-1]
    print(f"run finished: {res.n_steps} steps, t = {last.t:g}, "
          f"energy {last.energy:.6g}, enstrophy {last.enstrophy:.6g}")
    print(f"artifacts in {cfg.outdir}")
    return 0 if _print_gates(res.gates) else 1


def _cmd_sweep(args) -> int:
    cfg = load_config(args.config, _overrides_from(args))
    if cfg.outdir is None:
        stem = os.path.splitext(os.path.basename(args.config))[0]
        cfg = replace(cfg, outdir=stem + "_sweep")
    try:
        res = sweep(cfg, args.nu, parallel=not args.serial)
    except SolverInstabilityError as exc:
        print(f"unstable: {exc}", file=sys.stderr)
        return 1
    except SweepGateError as exc:
        print(f"bound check failed: {exc}", file=sys.stderr)
        return 1
    print(f"sweep case {res.case_label.name}, fitted slope {res.slope:.6f} "
          f"(rms residual {res.slope_residual:.2e})")
    for rung in res.rungs:
        print(f"  nu {rung.nu:<8g} {rung.label.name:<8} z0 {rung.z0:<12.6g} "
              f"bound {rung.bound:<12.6g} measured {rung.measured_dissipation:.6g}")
    print(f"artifacts in {cfg.outdir}")
    return 0


def _cmd_verify(args) -> int:
    report = verify_suite(full=args.full, outdir=args.outdir)
    print(report.format_table())
    return 0 if report.passed else 1


def _cmd_taylor_green(args) -> int:
    outdir = args.outdir
    os.makedirs(outdir, exist_ok=True)
    cfg = SimConfig(n=args.n, nu=args.nu, t_final=args.T, samples=args.samples,
                    outdir=outdir, scenario=ScenarioSpec("taylor_green"))
    try:
        res = run_single(cfg)
    except SolverInstabilityError as exc:
        print(f"unstable: {exc}", file=sys.stderr)
        return 1

    # closed-form twin of diagnostics.csv: all integrals done exactly
    omega0, _, _ = taylor_green(Grid(args.n), 0.0, 0.0)
    lp0 = lp_norm(omega0, cfg.p)
    analytic = []
    for t in cfg.sample_times:
        decay = math.exp(-4.0 * args.nu * t)
        analytic.append(DiagnosticsRecord(
            t=t, energy=TWO_PI_SQ * decay, enstrophy=2.0 * TWO_PI_SQ * decay,
            lp_norm=lp0 * math.exp(-2.0 * args.nu * t),
            cum_dissipation=TWO_PI_SQ * (1.0 - decay), cum_work=0.0,
            balance_residual=0.0))
    write_diagnostics_csv(os.path.join(outdir, "analytic.csv"), analytic)
    worst = max(abs(m.energy - a.energy) / TWO_PI_SQ
                for m, a in zip(res.records, analytic))
    print(f"measured diagnostics.csv and analytic.csv written to {outdir}")
    print(f"worst energy deviation {worst:.3e} relative to 2 pi^2")
    return 0 if _print_gates(res.gates) else 1


def _cmd_gronwall_table(args) -> int:
    fam = GronwallFamily(A=args.A, B=args.B, alpha=2.0 / (2.0 - args.p))
    lines = [BOUND_TABLE_HEADER]
    for nu in args.nu:
        params = fam.at_nu(nu)
        label = rung_label(params, args.z0)
        bound = case_bounds(label, args.t, params, z0=args.z0)
        lines.append(f"{nu:.17g},{label.name},{r_star(params):.17g},"
                     f"{r_star_star(params):.17g},{args.z0:.17g},{bound:.17g},nan")
    text = "\n".join(lines) + "\n"
    if args.out is None:
        sys.stdout.write(text)
    else:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
        print(f"bound table written to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vvflow",
        description="2D spectral vorticity solver with dissipation bounds "
                    "along viscosity ladders")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="integrate one config and write artifacts")
    p_run.add_argument("config", help="INI-style config file")
    _add_config_flags(p_run)
    p_run.set_defaults(fn=_cmd_run)

    p_sweep = sub.add_parser("sweep", help="run a strictly decreasing nu ladder")
    p_sweep.add_argument("config", help="INI-style config file (nu is taken from --nu)")
    p_sweep.add_argument("--nu", required=True, type=_nu_list,
                         metavar="NU1,NU2,...", help="comma-separated ladder, >= 4 rungs")
    p_sweep.add_argument("--serial", action="store_true",
                         help="disable the per-nu process pool")
    _add_config_flags(p_sweep)
    p_sweep.set_defaults(fn=_cmd_sweep)

    p_verify = sub.add_parser("verify", help="run the self-check suite")
    p_verify.add_argument("--full", action="store_true",
                          help="include the acceptance-scale experiments (slow)")
    p_verify.add_argument("--outdir", default=None,
                          help="keep acceptance artifacts in this directory")
    p_verify.set_defaults(fn=_cmd_verify)

    p_tg = sub.add_parser("taylor-green",
                          help="decaying cellular flow with its closed-form twin CSV")
    p_tg.add_argument("--n", type=int, default=64)
    p_tg.add_argument("--nu", type=float, default=0.01)
    p_tg.add_argument("--T", type=float, default=1.0)
    p_tg.add_argument("--samples", type=int, default=100)
    p_tg.add_argument("--outdir", default="taylor_green_out")
    p_tg.set_defaults(fn=_cmd_taylor_green)

    p_gt = sub.add_parser("gronwall-table",
                          help="bound table for given coefficients, no simulation")
    p_gt.add_argument("--p", type=float, required=True, help="vorticity integrability, in (1, 2)")
    p_gt.add_argument("--A", type=float, required=True)
    p_gt.add_argument("--B", type=float, required=True)
    p_gt.add_argument("--nu", required=True, type=_nu_list, metavar="NU1,NU2,...")
    p_gt.add_argument("--z0", type=float, default=math.inf,
                      help="starting enstrophy level (default: inf)")
    p_gt.add_argument("--t", type=float, default=1.0, help="bound horizon (default: 1)")
    p_gt.add_argument("--out", default=None, help="write CSV here instead of stdout")
    p_gt.set_defaults(fn=_cmd_gronwall_table)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
