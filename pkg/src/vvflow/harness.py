"""Deterministic run and sweep drivers wiring the solver to the bounds.

run() integrates one configuration and samples diagnostics on a fixed
cadence; run_single() adds artifact files and invariant gates; sweep() runs a
strictly decreasing viscosity ladder, estimates the comparison coefficients
from measured data norms, and checks the measured dissipation 2 nu int ||w||^2
against twice the per-rung Gronwall bound (the factor 2 converts the bound on
nu int z into one on the dissipation term of the energy balance).
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import cumulative_trapezoid

from . import __version__
from .config import SimConfig, with_nu
from .diagnostics import (DiagnosticsRecord, assemble_records, enstrophy, kinetic_energy,
                          lp_bound_check, lp_norm, velocity_inner, velocity_l2_distance,
                          write_diagnostics_csv)
from .gronwall import (CaseLabel, GronwallFamily, GronwallParams, classify_case,
                       case_bounds, default_gn_constant, estimate_params, r_star,
                       r_star_star, supersolution_m)
from .scenarios import ForcingModel, build_initial_vorticity
from .spectral import (Grid, SimState, SpectralField, dealias, max_speed, step,
                       write_snapshot)

BOUND_TABLE_HEADER = "nu,case,r_star,r_star_star,z0,bound,measured_dissipation"


class SweepGateError(RuntimeError):
    """A sweep rung's measured dissipation exceeded its Gronwall bound."""


@dataclass
class RunResult:
    config: SimConfig
    records: list
    gates: dict
    final_omega: np.ndarray          # spectral coefficients at t = T
    omega0_lp: float
    cum_forcing_lp: list
    n_steps: int

    @property
    def passed(self) -> bool:
        return all(g["passed"] for g in self.gates.values())


def run(config: SimConfig):
    """Integrate one configuration; returns (records, final_state, extras).

    dt is re-evaluated every step as c_cfl * dx / max|u|, hard-capped at
    T/1000 (and any configured dt_cap), and truncated to land exactly on the
    sample cadence, so a run is a pure function of its config.
    """
    grid = Grid(config.n)
    omega0 = dealias(build_initial_vorticity(config.scenario, grid, config.nu))
    model = ForcingModel(config.forcing, grid)
    forcing = None if config.forcing.kind == "none" else model.vorticity_source
    state = SimState(0.0, omega0, config.nu)

    cap = config.effective_dt_cap
    times, energies, enstrophies, lps = [], [], [], []
    diss, work, g_lp = [], [], []
    n_steps = 0

    def take_sample(t):
        omega = state.omega
        times.append(t)
        energies.append(kinetic_energy(omega))
        enstrophies.append(enstrophy(omega))
        lps.append(lp_norm(omega, config.p))
        diss.append(2.0 * config.nu * enstrophies[-1])
        if forcing is None:
            work.append(0.0)
            g_lp.append(0.0)
        else:
            gsrc = model.vorticity_source(t)
            work.append(2.0 * velocity_inner(gsrc, omega))
            g_lp.append(lp_norm(gsrc, config.p))

    take_sample(0.0)
    for target in config.sample_times[1:]:
        while state.t < target:
            dt = min(config.c_cfl * grid.dx / max(max_speed(state.omega), 1e-12), cap)
            if state.t + dt >= target - 1e-12 * config.t_final:
                dt = target - state.t
            state = step(state, dt, forcing)
            n_steps += 1
        state = SimState(target, state.omega, state.nu)
        take_sample(target)

    records = assemble_records(times, energies, enstrophies, lps, diss, work)
    cum_g_lp = cumulative_trapezoid(np.asarray(g_lp), np.asarray(times), initial=0.0)
    extras = {"model": model, "cum_forcing_lp": list(map(float, cum_g_lp)),
              "n_steps": n_steps, "grid": grid}
    return records, state, extras


def _evaluate_gates(config: SimConfig, records, cum_forcing_lp) -> dict:
    e0 = records[0].energy
    scale = e0 if e0 > 0 else max(r.energy for r in records) or 1.0
    worst_res = max(abs(r.balance_residual) for r in records)
    lp_res = lp_bound_check(records, records[0].lp_norm, cum_forcing_lp,
                            rel_tol=config.lp_gate_rel)
    return {
        "balance_residual": {
            "passed": bool(worst_res <= config.gate_residual * scale),
            "value": worst_res / scale,
            "threshold": config.gate_residual,
        },
        "lp_bound": {
            "passed": bool(lp_res.passed),
            "value": lp_res.max_excess,
            "threshold": config.lp_gate_rel,
            "first_violation": lp_res.first_violation,
        },
    }


def _write_lp_bound_csv(path, records, omega0_lp, cum_forcing_lp):
    with open(path, "w", newline="") as fh:
        fh.write("t,lp_norm,bound\n")
        for r, cg in zip(records, cum_forcing_lp):
            fh.write(f"{r.t:.17g},{r.lp_norm:.17g},{omega0_lp + cg:.17g}\n")


def run_single(config: SimConfig) -> RunResult:
    """Run one config and write diagnostics.csv, lp_bound.csv, manifest.json
    (and a final-state snapshot when save_snapshots is set) under outdir."""
    records, state, extras = run(config)
    gates = _evaluate_gates(config, records, extras["cum_forcing_lp"])
    result = RunResult(config=config, records=records, gates=gates,
                       final_omega=state.omega.coeff, omega0_lp=records[0].lp_norm,
                       cum_forcing_lp=extras["cum_forcing_lp"], n_steps=extras["n_steps"])
    if config.outdir is not None:
        os.makedirs(config.outdir, exist_ok=True)
        write_diagnostics_csv(os.path.join(config.outdir, "diagnostics.csv"), records)
        _write_lp_bound_csv(os.path.join(config.outdir, "lp_bound.csv"), records,
                            result.omega0_lp, result.cum_forcing_lp)
        if config.save_snapshots:
            write_snapshot(os.path.join(config.outdir, "final_omega.vvf"),
                           state.omega, state.t, config.nu)
        manifest = {
            "tool": {"name": "vvflow", "version": __version__},
            "config": config.to_mapping(),
            "n_steps": extras["n_steps"],
            "gates": gates,
        }
        with open(os.path.join(config.outdir, "manifest.json"), "w") as fh:
            json.dump(manifest, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return result


def rung_label(params: GronwallParams, z0: float) -> CaseLabel:
    """Pointwise-sound regime for one rung: z stays below r_star if it starts
    there; below 2 r_star the critical argument applies; above that the
    starting level exceeds r_star_star and the explicit supersolution bound
    holds."""
    rs = r_star(params)
    if z0 <= rs:
        return CaseLabel.BELOW
    if z0 <= 2.0 * rs:
        return CaseLabel.CRITICAL
    return CaseLabel.ABOVE


@dataclass
class SweepRung:
    nu: float
    label: CaseLabel
    r_star: float
    r_star_star: float
    z0: float
    bound: float
    measured_dissipation: float
    terminal: DiagnosticsRecord
    gates: dict


@dataclass
class SweepResult:
    ladder: list
    case_label: CaseLabel
    family: GronwallFamily
    c_gn: float
    rungs: list
    slope: float
    slope_residual: float
    velocity_distances: list
    bound_violations: list = field(default_factory=list)

    @property
    def measured(self) -> list:
        return [r.measured_dissipation for r in self.rungs]

    @property
    def bounds(self) -> list:
        return [r.bound for r in self.rungs]


def _sweep_worker(config: SimConfig) -> RunResult:
    return run_single(config)


def _fit_slope(nus, values):
    """OLS slope of log(value) against log(nu), with RMS fit residual."""
    x = np.log(np.asarray(nus, dtype=float))
    y = np.log(np.asarray(values, dtype=float))
    coeffs = np.polyfit(x, y, 1)
    fit = np.polyval(coeffs, x)
    rms = float(np.sqrt(np.mean((y - fit) ** 2)))
    return float(coeffs[0]), rms


def _write_bound_table(path, rungs):
    with open(path, "w", newline="") as fh:
        fh.write(BOUND_TABLE_HEADER + "\n")
        for r in rungs:
            fh.write(f"{r.nu:.17g},{r.label.name},{r.r_star:.17g},{r.r_star_star:.17g},"
                     f"{r.z0:.17g},{r.bound:.17g},{r.measured_dissipation:.17g}\n")


def _write_comparison_csv(path, records, params, max_points=101):
    """t, enstrophy, supersolution m(t).

    m is anchored at the first sample after t = 0 (delta = records[1].t,
    m(delta) = measured enstrophy there), so rows start at delta.
    """
    delta = records[1].t
    z_delta = records[1].enstrophy
    tail = records[1:]
    idx = np.unique(np.linspace(0, len(tail) - 1, min(max_points, len(tail))).astype(int))
    with open(path, "w", newline="") as fh:
        fh.write("t,enstrophy,supersolution\n")
        for i in idx:
            r = tail[i]
            m = supersolution_m(r.t, z_delta, delta, params)
            fh.write(f"{r.t:.17g},{r.enstrophy:.17g},{m:.17g}\n")


def sweep(config: SimConfig, nu_ladder, outdir=None, parallel: bool = True,
          max_workers: int | None = None) -> SweepResult:
    """Run a strictly decreasing viscosity ladder and bound its dissipation.

    Coefficients A, B, alpha are estimated once from the measured data norms
    across the ladder (sup ||w0||_p, forcing L1Lp and LinfL2), each rung is
    labeled by its own z0 / r_star regime, and the measured dissipation must
    satisfy D(nu) <= 2 * bound * (1 + 1e-3); violations raise SweepGateError
    after all artifacts are written.  Results are identical whether rungs run
    in the process pool or serially.
    """
    nu_ladder = [float(v) for v in nu_ladder]
    if len(nu_ladder) < 4:
        raise ValueError(f"ladder has {len(nu_ladder)} rungs, need at least 4")
    if any(b >= a for a, b in zip(nu_ladder, nu_ladder[1:])):
        raise ValueError("ladder viscosities must be strictly decreasing")
    if outdir is None:
        outdir = config.outdir
    configs = []
    for nu in nu_ladder:
        sub = None if outdir is None else os.path.join(outdir, f"nu_{nu:g}")
        configs.append(with_nu(config, nu, outdir=sub))

    workers = min(len(configs), max_workers or os.cpu_count() or 1)
    if parallel and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_sweep_worker, configs))
    else:
        results = [_sweep_worker(c) for c in configs]

    grid = Grid(config.n)
    p = config.p
    model = ForcingModel(config.forcing, grid)
    omega0_lp_sup = max(res.omega0_lp for res in results)
    g_l1lp = model.integral_lp(config.t_final, p)
    g_linfl2 = model.sup_l2(config.t_final)
    c_gn = config.c_gn if config.c_gn is not None else default_gn_constant(p)
    family = estimate_params(p, omega0_lp_sup, g_l1lp, g_linfl2, c_gn)

    rungs = []
    violations = []
    for nu, res in zip(nu_ladder, results):
        params = family.at_nu(nu)
        z0 = res.records[0].enstrophy
        label = rung_label(params, z0)
        bound = case_bounds(label, config.t_final, params, z0=z0)
        measured = res.records[-1].cum_dissipation
        if measured > 2.0 * bound * (1.0 + 1e-3):
            violations.append((nu, measured, 2.0 * bound))
        rungs.append(SweepRung(nu=nu, label=label, r_star=r_star(params),
                               r_star_star=r_star_star(params), z0=z0, bound=bound,
                               measured_dissipation=measured, terminal=res.records[-1],
                               gates=res.gates))
        if res.config.outdir is not None:
            _write_comparison_csv(os.path.join(res.config.outdir, "comparison.csv"),
                                  res.records, params)

    case = classify_case([(r.nu, r.z0) for r in rungs], family)
    slope, slope_rms = _fit_slope(nu_ladder, [max(r.measured_dissipation, 1e-300)
                                              for r in rungs])
    dists = []
    for a, b in zip(results, results[1:]):
        fa = SpectralField(grid, a.final_omega)
        fb = SpectralField(grid, b.final_omega)
        dists.append(velocity_l2_distance(fb, fa))

    result = SweepResult(ladder=nu_ladder, case_label=case, family=family, c_gn=c_gn,
                         rungs=rungs, slope=slope, slope_residual=slope_rms,
                         velocity_distances=dists, bound_violations=violations)

    if outdir is not None:
        os.makedirs(outdir, exist_ok=True)
        _write_bound_table(os.path.join(outdir, "bound_table.csv"), rungs)
        manifest = {
            "tool": {"name": "vvflow", "version": __version__},
            "config": config.to_mapping(),
            "ladder": nu_ladder,
            "case": case.name,
            "coefficients": {"A": family.A, "B": family.B, "alpha": family.alpha,
                             "c_gn": c_gn},
            "fitted_slope": slope,
            "slope_residual": slope_rms,
            "velocity_distances": dists,
            "measured_dissipation": [r.measured_dissipation for r in rungs],
            "bounds": [r.bound for r in rungs],
            "cases": [r.label.name for r in rungs],
            "gates": {f"nu_{r.nu:g}": r.gates for r in rungs},
            "bound_check_passed": not violations,
        }
        with open(os.path.join(outdir, "manifest.json"), "w") as fh:
            json.dump(manifest, fh, indent=2, sort_keys=True)
            fh.write("\n")

    if violations:
        lines = ", ".join(f"nu={nu:g}: D={d:.6g} > {b:.6g}" for nu, d, b in violations)
        raise SweepGateError(f"dissipation bound violated at {lines}")
    return result
