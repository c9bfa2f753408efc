"""Self-check suite: named desk-scale fixtures for every module, plus the
acceptance-scale experiments (run with full=True or from the acceptance
tests).  Each check either returns a short detail string or raises; the
report collects one pass/fail row per check."""

from __future__ import annotations

import math
import os
import tempfile
import time
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad, solve_ivp

from .config import ConfigError, SimConfig, build_config
from .diagnostics import (assemble_records, enstrophy, kinetic_energy, lp_norm,
                          read_diagnostics_csv, velocity_inner, write_diagnostics_csv)
from .gronwall import (CaseLabel, GronwallFamily, GronwallParams, capital_phi,
                       capital_phi_inverse, case_bounds, classify_case,
                       comparison_check, dissipation_bound_step4, estimate_params,
                       integral_of_capital_phi, phi, r_star, r_star_star,
                       supersolution_m)
from .harness import run, run_single, sweep
from .scenarios import (ForcingModel, ForcingSpec, ScenarioSpec, power_spectrum_vorticity,
                        singular_vortex, taylor_green)
from .spectral import (Grid, SimState, SpectralField, biot_savart, dealias,
                       hermitian_defect, nonlinear_term, read_snapshot, step,
                       write_snapshot)

TWO_PI_SQ = 2.0 * math.pi ** 2
R_RATIO = 2.0 ** (2.0 / 7.0)    # r_star_star / r_star at alpha = 4


@dataclass
class CheckOutcome:
    name: str
    passed: bool
    detail: str


@dataclass
class VerifyReport:
    outcomes: list

    @property
    def passed(self) -> bool:
        return all(o.passed for o in self.outcomes)

    def format_table(self) -> str:
        width = max(len(o.name) for o in self.outcomes)
        lines = [f"{o.name:<{width}}  {'PASS' if o.passed else 'FAIL'}  {o.detail}"
                 for o in self.outcomes]
        n_fail = sum(not o.passed for o in self.outcomes)
        lines.append(f"{len(self.outcomes)} checks, {n_fail} failed")
        return "\n".join(lines)


_CHECKS: list = []


def _check(name):
    def deco(fn):
        _CHECKS.append((name, fn))
        return fn
    return deco


def _rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


# ---------------------------------------------------------------- spectral

@_check("spectral.velocity_orientation")
def _c_velocity_orientation():
    g = Grid(32)
    w = SpectralField.from_physical(g, np.sin(g.x), mean_zero=True)
    u1, u2 = biot_savart(w)
    e1 = np.max(np.abs(u1.to_physical() - 0.0))
    e2 = np.max(np.abs(u2.to_physical() + np.cos(g.x)))
    assert max(e1, e2) < 1e-13, f"w = sin x gave velocity errors {e1:.2e}, {e2:.2e}"
    w = SpectralField.from_physical(g, 2.0 * np.sin(g.x) * np.sin(g.y), mean_zero=True)
    u1, u2 = biot_savart(w)
    e1 = np.max(np.abs(u1.to_physical() - np.sin(g.x) * np.cos(g.y)))
    e2 = np.max(np.abs(u2.to_physical() + np.cos(g.x) * np.sin(g.y)))
    assert max(e1, e2) < 1e-13, f"cellular datum gave velocity errors {e1:.2e}, {e2:.2e}"
    return "two analytic vorticity data give the expected velocities"


@_check("spectral.curl_of_velocity_identity")
def _c_curl_identity():
    g = Grid(48)
    w = dealias(power_spectrum_vorticity(g, 2.0, seed=7))
    u1, u2 = biot_savart(w)
    curl = 1j * g.k1d * u2.coeff - 1j * g.k2d * u1.coeff
    err = np.max(np.abs(curl - w.coeff)) / np.max(np.abs(w.coeff))
    assert err < 1e-12, f"curl(velocity) missed the vorticity by {err:.2e}"
    return f"curl of induced velocity returns the vorticity (rel {err:.1e})"


@_check("spectral.incompressibility")
def _c_incompressibility():
    g = Grid(48)
    w = power_spectrum_vorticity(g, 1.5, seed=3)
    u1, u2 = biot_savart(w)
    div = 1j * g.k1d * u1.coeff + 1j * g.k2d * u2.coeff
    worst = np.max(np.abs(div)) / np.max(np.abs(w.coeff))
    assert worst < 1e-13, f"relative velocity divergence reached {worst:.2e}"
    return f"induced velocity is divergence-free (rel {worst:.1e})"


@_check("spectral.dealias_idempotent")
def _c_dealias():
    g = Grid(32)
    w = power_spectrum_vorticity(g, 1.0, seed=1)
    once = dealias(w)
    twice = dealias(once)
    assert np.array_equal(once.coeff, twice.coeff), "second mask application changed data"
    kept = int(np.count_nonzero(g.dealias_mask))
    return f"mask is a projection ({kept}/{g.n * g.n} modes kept)"


@_check("spectral.advection_neutrality")
def _c_advection_neutrality():
    g = Grid(64)
    w = dealias(power_spectrum_vorticity(g, 1.2, seed=5))
    adv = nonlinear_term(w)
    scale = math.sqrt(enstrophy(w) * enstrophy(adv))
    ens_defect = abs((2.0 * math.pi) ** 2 *
                     float(np.sum((w.coeff.conj() * adv.coeff).real)) / g.n ** 4) / scale
    en_defect = abs(velocity_inner(w, adv)) / scale
    assert ens_defect < 1e-12 and en_defect < 1e-12, \
        f"defects {ens_defect:.2e}, {en_defect:.2e}"
    return f"truncated advection conserves energy and enstrophy (defect {max(ens_defect, en_defect):.1e})"


@_check("spectral.exact_decay_step")
def _c_exact_decay():
    g = Grid(32)
    nu, t_final = 0.05, 0.25
    w0, _, _ = taylor_green(g, nu, 0.0)
    state = SimState(0.0, dealias(w0), nu)
    for _ in range(250):
        state = step(state, t_final / 250.0)
    exact = 2.0 * math.exp(-2.0 * nu * state.t) * np.sin(g.x) * np.sin(g.y)
    err = np.max(np.abs(state.omega.to_physical() - exact))
    assert err < 1e-10, f"pointwise error {err:.2e} after {state.t:.2f} time units"
    return f"cellular flow decays by the heat semigroup (pointwise err {err:.1e})"


@_check("spectral.inviscid_conservation")
def _c_inviscid():
    g = Grid(32)
    w = dealias(power_spectrum_vorticity(g, 3.0, seed=11))
    state = SimState(0.0, w, 0.0)
    e0, z0 = kinetic_energy(w), enstrophy(w)
    for _ in range(400):
        state = step(state, 2.5e-4)
    de = _rel(kinetic_energy(state.omega), e0)
    dz = _rel(enstrophy(state.omega), z0)
    assert de < 1e-8 and dz < 1e-8, f"drifts energy {de:.2e}, enstrophy {dz:.2e}"
    return f"nu = 0 run conserves energy/enstrophy (drift {max(de, dz):.1e})"


@_check("spectral.snapshot_round_trip")
def _c_snapshot():
    g = Grid(16)
    w = power_spectrum_vorticity(g, 2.0, seed=2)
    with tempfile.TemporaryDirectory() as d:
        path = os.path.join(d, "w.vvf")
        write_snapshot(path, w, t=0.625, nu=1e-3)
        vals, t, nu = read_snapshot(path)
    assert t == 0.625 and nu == 1e-3
    err = np.max(np.abs(vals - w.to_physical()))
    assert err == 0.0, f"payload changed by {err:.2e}"
    return "binary snapshot round-trips bit-exactly"


# ------------------------------------------------------------- diagnostics

@_check("diagnostics.cellular_flow_norms")
def _c_cellular_norms():
    g = Grid(64)
    w, _, _ = taylor_green(g, 0.0, 0.0)
    de = _rel(kinetic_energy(w), TWO_PI_SQ)
    dz = _rel(enstrophy(w), 2.0 * TWO_PI_SQ)
    assert de < 1e-12 and dz < 1e-12, f"energy off by {de:.2e}, enstrophy by {dz:.2e}"
    return "energy 2 pi^2 and enstrophy 4 pi^2 reproduced"


@_check("diagnostics.parseval_p2")
def _c_parseval():
    g = Grid(48)
    w = power_spectrum_vorticity(g, 1.7, seed=9)
    d = _rel(lp_norm(w, 2.0), math.sqrt(enstrophy(w)))
    assert d < 1e-12, f"L2 norm vs sqrt(enstrophy) differ by {d:.2e}"
    return f"grid L2 norm matches spectral enstrophy (rel {d:.1e})"


@_check("diagnostics.lp_constant_field")
def _c_lp_constant():
    g = Grid(16)
    w = SpectralField.from_physical(g, np.full((16, 16), -2.5))
    p = 1.3
    d = _rel(lp_norm(w, p), 2.5 * (2.0 * math.pi) ** (2.0 / p))
    assert d < 1e-12, f"constant-field Lp norm off by {d:.2e}"
    return "constant field has Lp norm |c| (2 pi)^(2/p)"


@_check("diagnostics.residual_identity")
def _c_residual_identity():
    ts = [0.0, 0.5, 1.0, 1.5]
    recs = assemble_records(ts, [4.0, 3.5, 3.25, 3.2], [2.0, 1.5, 1.0, 0.5],
                            [1.0] * 4, [0.4, 0.3, 0.2, 0.1], [0.1, 0.1, 0.1, 0.1])
    for r in recs:
        expect = r.energy - 4.0 + r.cum_dissipation - r.cum_work
        assert r.balance_residual == expect, "stored residual disagrees with its definition"
    return "assembled residual equals energy drift + dissipation - work"


@_check("diagnostics.csv_round_trip")
def _c_csv_round_trip():
    ts = list(np.linspace(0.0, 1.0, 11))
    recs = assemble_records(ts, list(2.0 + np.cos(ts)), list(1.0 + np.sin(ts)),
                            [1.1] * 11, list(np.exp(ts)), [0.0] * 11)
    with tempfile.TemporaryDirectory() as d:
        path = os.path.join(d, "diag.csv")
        write_diagnostics_csv(path, recs)
        back = read_diagnostics_csv(path)
        write_diagnostics_csv(path + ".2", back)
        b1 = open(path, "rb").read()
        b2 = open(path + ".2", "rb").read()
    assert recs == back, "records changed across CSV round trip"
    assert b1 == b2, "re-serialization is not byte-identical"
    return "17-significant-digit CSV round-trips float64 exactly"


# ---------------------------------------------------------------- gronwall

def _params(A=0.7, B=1.3, alpha=4.0, nu=1e-3) -> GronwallParams:
    return GronwallParams(A=A, B=B, alpha=alpha, nu=nu)


@_check("gronwall.root_and_thresholds")
def _c_root():
    pr = _params()
    rs, rss = r_star(pr), r_star_star(pr)
    assert abs(phi(rs, pr)) < 1e-12 * pr.B * math.sqrt(rs), "phi(r_star) not ~ 0"
    assert _rel(rss / rs, R_RATIO) < 1e-14, f"threshold ratio {rss / rs} != 2^(2/7)"
    for r in (rss, 2.0 * rss, 10.0 * rss):
        assert phi(r, pr) <= -0.5 * pr.A * pr.nu * r ** pr.alpha * (1.0 - 1e-12), \
            f"phi({r}) above -A nu r^alpha / 2"
    return "phi root, 2^(2/7) threshold ratio, and half-decay domination hold"


@_check("gronwall.inverse_round_trip")
def _c_inverse_round_trip():
    rng = np.random.default_rng(20240817)
    worst = 0.0
    for _ in range(25):
        pr = GronwallParams(A=10.0 ** rng.uniform(-3, 3), B=10.0 ** rng.uniform(-3, 3),
                            alpha=rng.uniform(2.1, 8.0), nu=10.0 ** rng.uniform(-6, -1))
        rs = r_star(pr)
        r = rs * (1.0 + 10.0 ** rng.uniform(-6, 3))
        y = capital_phi(r, pr)
        worst = max(worst, _rel(capital_phi_inverse(y, pr), r))
    assert worst < 1e-8, f"round-trip error {worst:.2e}"
    return f"25 random inverse round trips, worst rel {worst:.1e}"


@_check("gronwall.supersolution_vs_ode")
def _c_supersolution_ode():
    pr = _params(A=0.3, B=0.9, alpha=4.0, nu=3e-3)
    rs = r_star(pr)
    for z0 in (4.0 * rs, 0.4 * rs):
        sol = solve_ivp(lambda t, y: [phi(y[0], pr)], (0.0, 2.0), [z0],
                        rtol=1e-11, atol=1e-12 * z0, dense_output=True)
        worst = max(_rel(supersolution_m(t, z0, 0.0, pr), sol.sol(t)[0])
                    for t in (0.05, 0.3, 1.0, 2.0))
        assert worst < 1e-6, f"representation vs ODE differ by {worst:.2e} from z0 = {z0:.3g}"
    return "representation matches direct ODE integration above and below the root"


@_check("gronwall.comparison_on_sink_ode")
def _c_comparison_sink():
    pr = _params(A=0.5, B=0.8, alpha=4.0, nu=2e-3)
    rs = r_star(pr)
    rng = np.random.default_rng(11)
    for _ in range(10):
        z0 = rs * 10.0 ** rng.uniform(-1, 0.7)
        sink = 10.0 ** rng.uniform(-2, 0)
        wfreq = rng.uniform(0.5, 6.0)
        # clamp keeps phi's domain when the sink drags the trajectory under 0
        sol = solve_ivp(lambda t, y: [phi(max(y[0], 0.0), pr)
                                      - sink * (1.0 + math.cos(wfreq * t))],
                        (0.0, 1.0), [z0], rtol=1e-9, atol=1e-10 * z0, dense_output=True)
        ts = np.linspace(0.0, 1.0, 41)
        z_series = [float(sol.sol(t)[0]) for t in ts]
        m_series = [z0] + [supersolution_m(float(t), z0, 0.0, pr) for t in ts[1:]]
        res = comparison_check(z_series, m_series)
        assert res.passed, f"sink ODE escaped its supersolution: {res}"
    return "10 sink-perturbed trajectories stay below the supersolution"


@_check("gronwall.step4_bound_vs_quadrature")
def _c_step4():
    pr = _params(A=0.4, B=1.1, alpha=4.0, nu=5e-3)
    rss = r_star_star(pr)
    z0, t_final = 6.0 * rss, 1.5
    sol = solve_ivp(lambda t, y: [phi(y[0], pr)], (0.0, t_final), [z0],
                    rtol=1e-11, atol=1e-12 * z0, dense_output=True)
    quad_val = pr.nu * quad(lambda t: sol.sol(t)[0], 0.0, t_final, limit=200,
                            epsabs=0.0, epsrel=1e-10)[0]
    bound = dissipation_bound_step4(t_final, z0, pr)
    assert quad_val <= bound * (1.0 + 1e-9), f"nu int m = {quad_val} > bound {bound}"
    return f"explicit bound {bound:.4g} dominates nu int m = {quad_val:.4g}"


@_check("gronwall.tail_closed_form")
def _c_tail():
    rng = np.random.default_rng(4)
    for _ in range(10):
        pr = GronwallParams(A=10.0 ** rng.uniform(-2, 2), B=10.0 ** rng.uniform(-2, 2),
                            alpha=rng.uniform(2.2, 6.0), nu=10.0 ** rng.uniform(-5, -1))
        rss = r_star_star(pr)
        tail = pr.nu * integral_of_capital_phi(rss, math.inf, pr)
        closed = 2.0 * rss ** (2.0 - pr.alpha) / (pr.A * (pr.alpha - 1.0) * (pr.alpha - 2.0))
        assert tail <= closed * (1.0 + 1e-9), f"tail {tail} exceeds closed form {closed}"
    return "closed-form tail dominates the quadrature tail on 10 parameter sets"


@_check("gronwall.b_zero_closed_form")
def _c_b_zero():
    pr = GronwallParams(A=0.9, B=0.0, alpha=3.4, nu=2e-3)
    z0, t_final = 5.0, 1.2
    sol = solve_ivp(lambda t, y: [phi(y[0], pr)], (0.0, t_final), [z0],
                    rtol=1e-12, atol=1e-14, dense_output=True)
    quad_val = pr.nu * quad(lambda t: sol.sol(t)[0], 0.0, t_final, limit=200,
                            epsabs=0.0, epsrel=1e-12)[0]
    closed = dissipation_bound_step4(t_final, z0, pr)
    d = _rel(closed, quad_val)
    assert d < 1e-9, f"B = 0 closed form off by {d:.2e}"
    return f"B = 0 bound equals nu int m to rel {d:.1e}"


@_check("gronwall.case_classification")
def _c_classify():
    fam = GronwallFamily(A=1.0, B=1.0, alpha=4.0)
    nus = [10.0 ** (-k) for k in range(1, 9)]
    below = classify_case([(nu, 5.0) for nu in nus], fam)
    above = classify_case([(nu, 3.0 * r_star(fam.at_nu(nu))) for nu in nus], fam)
    deep = [10.0 ** (-k) for k in range(1, 31)]
    crit = classify_case([(nu, r_star(fam.at_nu(nu)) * (1.0 + 1.0 / abs(math.log(nu))))
                          for nu in deep], fam)
    assert below is CaseLabel.BELOW, f"constant z0 classified {below}"
    assert above is CaseLabel.ABOVE, f"z0 = 3 r_star classified {above}"
    assert crit is CaseLabel.CRITICAL, f"z0 = r_star (1 + 1/|log nu|) classified {crit}"
    return "constant / 3x / (1 + 1/|log nu|) ladders classify BELOW / ABOVE / CRITICAL"


@_check("gronwall.case_bound_scalings")
def _c_case_scalings():
    fam = GronwallFamily(A=1.0, B=1.0, alpha=4.0)
    nus = [10.0 ** (-k) for k in range(1, 6)]
    lo = [case_bounds(CaseLabel.BELOW, 1.0, fam.at_nu(nu)) for nu in nus]
    x = np.log(nus)
    slope = float(np.polyfit(x, np.log(lo), 1)[0])
    assert _rel(slope, 5.0 / 7.0) < 0.01, f"BELOW slope {slope} not 5/7"
    for nu, b in zip(nus, lo):
        c = case_bounds(CaseLabel.CRITICAL, 1.0, fam.at_nu(nu))
        assert _rel(c, 2.0 * b) < 1e-14, "CRITICAL bound is not exactly twice BELOW"
    hi = [case_bounds(CaseLabel.ABOVE, 1.0, fam.at_nu(nu), z0=math.inf) for nu in nus]
    assert all(b > c for b, c in zip(hi, hi[1:])), "ABOVE bounds not decreasing"
    assert hi[-1] < 0.3 * hi[0], "ABOVE bound not trending to zero"
    return f"BELOW slope {slope:.4f}, CRITICAL = 2x, ABOVE to 0 with z0 = inf"


@_check("gronwall.coefficients_from_norms")
def _c_estimate():
    fam = estimate_params(1.5, 1.6, 0.4, 0.35, c_gn=0.25)
    assert fam.alpha == 4.0, f"alpha {fam.alpha} != 4 at p = 3/2"
    assert _rel(fam.A, 2.0 * 0.25 * 2.0 ** -6.0) < 1e-14, f"A = {fam.A}"
    assert fam.B == 0.7, f"B = {fam.B}"
    return "p = 3/2 gives alpha 4, A = 2 c (data)^-6, B = 2 sup L2"


@_check("gronwall.bound_monotone_in_forcing")
def _c_bound_in_forcing():
    t_final = 1.0
    for nu in (1e-2, 1e-3, 1e-4):
        p0 = GronwallParams(A=0.5, B=0.0, alpha=4.0, nu=nu)
        p1 = GronwallParams(A=0.5, B=0.6, alpha=4.0, nu=nu)
        z0 = 4.0 * r_star_star(p1)
        b0 = dissipation_bound_step4(t_final, z0, p0)
        b1 = dissipation_bound_step4(t_final, z0, p1)
        assert b0 <= b1 * (1.0 + 1e-12), f"B = 0 bound {b0} above B > 0 bound {b1} at nu = {nu}"
    return "unforced bound never exceeds the forced bound at equal nu and z0"


# --------------------------------------------------------------- scenarios

@_check("scenarios.cellular_flow_consistency")
def _c_tg_consistency():
    g = Grid(32)
    w, (u1, u2), energy = taylor_green(g, 0.02, 0.7)
    curl = 1j * g.k1d * u2.coeff - 1j * g.k2d * u1.coeff
    err = np.max(np.abs(curl - w.coeff)) / np.max(np.abs(w.coeff))
    div = np.max(np.abs(1j * g.k1d * u1.coeff + 1j * g.k2d * u2.coeff))
    de = _rel(kinetic_energy(w), energy)
    assert err < 1e-12 and div < 1e-10 and de < 1e-12, \
        f"curl err {err:.2e}, div {div:.2e}, energy {de:.2e}"
    return "returned velocity has the right curl, zero divergence, stated energy"


@_check("scenarios.vortex_admissibility")
def _c_vortex():
    g = Grid(128)
    p, a = 1.4, 1.3
    deltas = (0.4, 0.2, 0.1, 0.05)
    fields = [singular_vortex(g, p, a, d) for d in deltas]
    assert all(abs(w.mean()) < 1e-13 for w in fields), "vortex mean not removed"
    zs = [enstrophy(w) for w in fields]
    assert all(b > 1.1 * a_ for a_, b in zip(zs, zs[1:])), \
        f"enstrophy not blowing up along {zs}"
    lps = [lp_norm(w, p) for w in fields]
    incs = [b - a_ for a_, b in zip(lps, lps[1:])]
    assert all(b < 0.8 * a_ for a_, b in zip(incs, incs[1:])), \
        f"Lp increments not Cauchy: {incs}"
    assert incs[-1] / lps[-1] < 0.08, f"last Lp increment {incs[-1] / lps[-1]:.2%}"
    return (f"delta 0.4 -> 0.05: enstrophy x{zs[-1] / zs[0]:.1f}, "
            f"Lp increments shrink {incs[0]:.3f} -> {incs[-1]:.3f}")


@_check("scenarios.vortex_parameter_validation")
def _c_vortex_validation():
    g = Grid(32)
    for bad in (dict(p=1.5, a=1.4, mollify_delta=0.5),      # a >= 2/p
                dict(p=1.5, a=0.9, mollify_delta=0.5),      # a < 1
                dict(p=1.5, a=1.2, mollify_delta=0.01)):    # delta < dx
        try:
            singular_vortex(g, **bad)
        except ValueError:
            continue
        raise AssertionError(f"accepted inadmissible parameters {bad}")
    return "out-of-range exponents and under-resolved delta are rejected"


@_check("scenarios.power_spectrum_profile")
def _c_power_profile():
    g = Grid(64)
    gamma = 2.25
    w = power_spectrum_vorticity(g, gamma, seed=6)
    unit = np.abs(w.coeff) / g.n ** 2
    for kk in ((0, 3), (5, 2), (10, 10), (1, 17)):
        iy, ix = kk[1] % g.n, kk[0] % g.n
        expect = (kk[0] ** 2 + kk[1] ** 2) ** (-0.5 * gamma)
        assert _rel(unit[iy, ix], expect) < 1e-12, f"mode {kk} amplitude off"
    again = power_spectrum_vorticity(g, gamma, seed=6)
    other = power_spectrum_vorticity(g, gamma, seed=7)
    assert np.array_equal(w.coeff, again.coeff), "same seed changed the field"
    assert not np.array_equal(w.coeff, other.coeff), "different seed gave the same field"
    return "per-mode amplitude law |k|^-gamma and seed determinism hold"


@_check("scenarios.forcing_norms")
def _c_forcing_norms():
    g = Grid(64)
    lm = ForcingModel(ForcingSpec(kind="low_mode", amplitude=0.37, modulation="cosine",
                                  mod_freq=2.0), g)
    for t in (0.0, 0.3, 1.1):
        d = _rel(lp_norm(lm.vorticity_source(t), 2.0), 0.37 * abs(math.cos(2.0 * t)))
        assert d < 1e-12, f"low-mode L2 norm off by {d:.2e} at t = {t}"
    rough = ForcingModel(ForcingSpec(kind="rough", amplitude=0.2, gamma=2.5, seed=3), g)
    gt = rough.vorticity_source(0.37)
    d = _rel(lp_norm(gt, 2.0), 0.2)
    defect = hermitian_defect(gt) / np.max(np.abs(gt.coeff))
    assert d < 1e-12, f"rough L2 norm off by {d:.2e}"
    assert defect < 1e-12, f"rotated rough forcing lost realness ({defect:.2e})"
    assert lm.sup_l2(2.0) == 0.37 and _rel(rough.sup_l2(5.0), 0.2) < 1e-12
    return "closed-form L2 norms and realness of the rotated rough force hold"


# ----------------------------------------------------------------- harness

@_check("harness.config_errors_name_field")
def _c_config_errors():
    for values, needle in ((((("sim", "n"), "96"),), "sim.n"),
                           (((("sim", "c_cfl"), "1.5"),), "sim.c_cfl"),
                           (((("scenario", "nope"), "1"),), "scenario.nope"),
                           (((("forcing", "amplitude"), "abc"),), "forcing.amplitude")):
        try:
            build_config(dict(values))
        except ConfigError as exc:
            assert needle in str(exc), f"error {exc!r} does not name {needle}"
            continue
        raise AssertionError(f"accepted malformed config {values}")
    return "malformed values raise ConfigError naming section.key"


# residual is dominated by the trapezoid sampling of the dissipation integral,
# so the 1e-8 gate needs the finer 100-sample cadence
_DESK_RUN = SimConfig(n=32, nu=0.02, t_final=0.5, samples=100, gate_residual=1e-8,
                      scenario=ScenarioSpec("taylor_green"))


@_check("harness.decaying_run_gates")
def _c_run_gates():
    res = run_single(_DESK_RUN)
    assert res.passed, f"gates failed: {res.gates}"
    worst = res.gates["balance_residual"]["value"]
    assert worst < 1e-8, f"residual {worst:.2e} above the desk gate"
    return f"unforced decay run passes the 1e-8 residual gate ({worst:.1e} of E0)"


@_check("harness.deterministic_artifacts")
def _c_deterministic():
    with tempfile.TemporaryDirectory() as d:
        cfg1 = SimConfig(n=32, nu=5e-3, t_final=0.3, samples=12, outdir=os.path.join(d, "a"),
                         scenario=ScenarioSpec("power_spectrum", gamma=3.0, seed=4),
                         forcing=ForcingSpec(kind="low_mode", amplitude=0.05))
        cfg2 = SimConfig(n=32, nu=5e-3, t_final=0.3, samples=12, outdir=os.path.join(d, "b"),
                         scenario=ScenarioSpec("power_spectrum", gamma=3.0, seed=4),
                         forcing=ForcingSpec(kind="low_mode", amplitude=0.05))
        run_single(cfg1)
        run_single(cfg2)
        b1 = open(os.path.join(d, "a", "diagnostics.csv"), "rb").read()
        b2 = open(os.path.join(d, "b", "diagnostics.csv"), "rb").read()
    assert b1 == b2, "identical configs produced different diagnostics bytes"
    return "re-running an identical config is byte-identical"


@_check("harness.inviscid_run_gates")
def _c_inviscid_gates():
    cfg = SimConfig(n=32, nu=0.0, t_final=0.3, samples=10,
                    scenario=ScenarioSpec("power_spectrum", gamma=3.0, seed=8))
    res = run_single(cfg)
    assert res.passed, f"nu = 0 gates failed: {res.gates}"
    drift = _rel(res.records[-1].energy, res.records[0].energy)
    assert drift < 1e-8, f"inviscid energy drifted {drift:.2e}"
    return f"nu = 0 run conserves energy through the gates (drift {drift:.1e})"


@_check("harness.mini_sweep")
def _c_mini_sweep():
    with tempfile.TemporaryDirectory() as d:
        cfg = SimConfig(n=32, nu=1e-1, t_final=0.2, samples=10, outdir=None,
                        scenario=ScenarioSpec("taylor_green"),
                        forcing=ForcingSpec(kind="low_mode", amplitude=0.05))
        res = sweep(cfg, [1e-1, 3e-2, 1e-2, 3e-3], outdir=d, parallel=False)
        assert os.path.exists(os.path.join(d, "bound_table.csv"))
        assert os.path.exists(os.path.join(d, "manifest.json"))
        assert os.path.exists(os.path.join(d, "nu_0.003", "comparison.csv"))
    meas = res.measured
    assert all(a > b for a, b in zip(meas, meas[1:])), f"dissipation not decreasing: {meas}"
    assert not res.bound_violations
    return (f"4-rung sweep bounded and decreasing "
            f"(D {meas[0]:.3g} -> {meas[-1]:.3g}, case {res.case_label.name})")


def verify_suite(full: bool = False, outdir: str | None = None) -> VerifyReport:
    """Run every registered check (plus the acceptance experiments when full)
    and return the pass/fail report."""
    outcomes = []
    for name, fn in _CHECKS:
        try:
            detail = fn()
            outcomes.append(CheckOutcome(name, True, detail or ""))
        except Exception as exc:   # noqa: BLE001 - a check failure is data here
            outcomes.append(CheckOutcome(name, False, f"{type(exc).__name__}: {exc}"))
    if full:
        for name, fn in _ACCEPTANCE:
            try:
                detail = fn(outdir)
                outcomes.append(CheckOutcome(name, True, detail or ""))
            except Exception as exc:   # noqa: BLE001
                outcomes.append(CheckOutcome(name, False, f"{type(exc).__name__}: {exc}"))
    return VerifyReport(outcomes)


# ------------------------------------------------- acceptance-scale fixtures
#
# These are the criteria the acceptance tests assert on; each returns a dict
# of measured quantities so callers can apply the stated tolerances.

def acceptance_taylor_green() -> dict:
    """n = 64, nu = 0.01, T = 1: pointwise and energy error at 10 samples."""
    t0 = time.perf_counter()
    g = Grid(64)
    nu, t_final = 0.01, 1.0
    w0, _, _ = taylor_green(g, nu, 0.0)
    state = SimState(0.0, dealias(w0), nu)
    cap = t_final / 1000.0
    max_point, max_energy_rel = 0.0, 0.0
    for i in range(1, 11):
        target = i * t_final / 10.0
        while state.t < target:
            dt = min(cap, target - state.t)
            state = step(state, dt)
        state = SimState(target, state.omega, nu)
        decay = math.exp(-2.0 * nu * target)
        exact = 2.0 * decay * np.sin(g.x) * np.sin(g.y)
        max_point = max(max_point, float(np.max(np.abs(state.omega.to_physical() - exact))))
        max_energy_rel = max(max_energy_rel,
                             _rel(kinetic_energy(state.omega), TWO_PI_SQ * decay ** 2))
    res = run_single(SimConfig(n=64, nu=nu, t_final=t_final, samples=10,
                               scenario=ScenarioSpec("taylor_green")))
    return {"max_pointwise_error": max_point, "max_energy_rel_error": max_energy_rel,
            "lp_gate_passed": res.gates["lp_bound"]["passed"],
            "gates": res.gates, "elapsed": time.perf_counter() - t0}


def acceptance_energy_balance(outdir: str | None = None) -> dict:
    """Forced low-mode run, n = 256, nu = 1e-3, T = 2: worst residual / E0."""
    t0 = time.perf_counter()
    cfg = SimConfig(n=256, nu=1e-3, t_final=2.0, samples=400, outdir=outdir,
                    scenario=ScenarioSpec("taylor_green"),
                    forcing=ForcingSpec(kind="low_mode", amplitude=0.1,
                                        modulation="cosine", mod_freq=1.0))
    res = run_single(cfg)
    e0 = res.records[0].energy
    worst = max(abs(r.balance_residual) for r in res.records) / e0
    return {"max_residual_rel": worst, "lp_gate_passed": res.gates["lp_bound"]["passed"],
            "gates": res.gates, "result": res, "elapsed": time.perf_counter() - t0}


def acceptance_gronwall_selftest(n_sets: int = 100, seed: int = 20240817) -> dict:
    """Inverse round trips, representation vs ODE, sink comparisons, and the
    closed-form tail, each over randomized parameter sets."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed)

    worst_rt = 0.0
    for _ in range(n_sets):
        pr = GronwallParams(A=10.0 ** rng.uniform(-3, 3), B=10.0 ** rng.uniform(-3, 3),
                            alpha=rng.uniform(2.1, 8.0), nu=10.0 ** rng.uniform(-6, -1))
        r = r_star(pr) * (1.0 + 10.0 ** rng.uniform(-6, 3))
        worst_rt = max(worst_rt, _rel(capital_phi_inverse(capital_phi(r, pr), pr), r))

    worst_rep = 0.0
    for _ in range(20):
        pr = GronwallParams(A=10.0 ** rng.uniform(-1, 1), B=10.0 ** rng.uniform(-1, 1),
                            alpha=rng.uniform(2.5, 6.0), nu=10.0 ** rng.uniform(-4, -2))
        rs = r_star(pr)
        z0 = rs * 10.0 ** rng.uniform(-0.8, 0.8)
        sol = solve_ivp(lambda t, y: [phi(y[0], pr)], (0.0, 1.0), [z0],
                        rtol=1e-11, atol=1e-13 * z0, dense_output=True)
        for t in (0.1, 0.4, 1.0):
            worst_rep = max(worst_rep, _rel(supersolution_m(t, z0, 0.0, pr),
                                            float(sol.sol(t)[0])))

    n_cmp_failed = 0
    for _ in range(n_sets):
        pr = GronwallParams(A=10.0 ** rng.uniform(-1, 1), B=10.0 ** rng.uniform(-1, 1),
                            alpha=rng.uniform(2.5, 6.0), nu=10.0 ** rng.uniform(-4, -2))
        rs = r_star(pr)
        z0 = rs * 10.0 ** rng.uniform(-1.0, 0.7)
        sink = 10.0 ** rng.uniform(-3, 0)
        wfreq = rng.uniform(0.5, 8.0)
        sol = solve_ivp(lambda t, y: [phi(max(y[0], 0.0), pr)
                                      - sink * (1.0 + math.sin(wfreq * t))],
                        (0.0, 1.0), [z0], rtol=1e-9, atol=1e-11 * z0, dense_output=True)
        ts = np.linspace(0.0, 1.0, 33)
        z_series = [float(sol.sol(t)[0]) for t in ts]
        m_series = [z0] + [supersolution_m(float(t), z0, 0.0, pr) for t in ts[1:]]
        if not comparison_check(z_series, m_series).passed:
            n_cmp_failed += 1

    n_tail_failed = 0
    for _ in range(n_sets):
        pr = GronwallParams(A=10.0 ** rng.uniform(-2, 2), B=10.0 ** rng.uniform(-2, 2),
                            alpha=rng.uniform(2.2, 7.0), nu=10.0 ** rng.uniform(-5, -1))
        rss = r_star_star(pr)
        tail = pr.nu * integral_of_capital_phi(rss, math.inf, pr)
        closed = 2.0 * rss ** (2.0 - pr.alpha) / (pr.A * (pr.alpha - 1.0) * (pr.alpha - 2.0))
        if not tail <= closed * (1.0 + 1e-9):
            n_tail_failed += 1

    return {"worst_round_trip": worst_rt, "worst_representation": worst_rep,
            "comparison_failures": n_cmp_failed, "tail_failures": n_tail_failed,
            "n_sets": n_sets, "elapsed": time.perf_counter() - t0}


def acceptance_case_slope() -> dict:
    """BELOW-case bound slope over nu in {1e-1, ..., 1e-5} at alpha = 4."""
    fam = estimate_params(1.5, 1.0, 0.0, 0.5, c_gn=0.5)
    nus = [10.0 ** (-k) for k in range(1, 6)]
    bounds = [case_bounds(CaseLabel.BELOW, 1.0, fam.at_nu(nu)) for nu in nus]
    slope = float(np.polyfit(np.log(nus), np.log(bounds), 1)[0])
    return {"slope": slope, "target": 5.0 / 7.0,
            "rel_error": _rel(slope, 5.0 / 7.0), "alpha": fam.alpha}


def acceptance_dissipation_sweep(outdir: str | None = None, parallel: bool = True) -> dict:
    """singular_vortex p = 1.5, n = 512, T = 1 over {1e-2, 3e-3, 1e-3, 3e-4}."""
    t0 = time.perf_counter()
    cfg = SimConfig(n=512, nu=1e-2, t_final=1.0, samples=100, outdir=outdir,
                    scenario=ScenarioSpec("singular_vortex", p=1.5, a=7.0 / 6.0),
                    forcing=ForcingSpec(kind="low_mode", amplitude=0.1))
    res = sweep(cfg, [1e-2, 3e-3, 1e-3, 3e-4], outdir=outdir, parallel=parallel)
    return {"result": res, "measured": res.measured, "bounds": res.bounds,
            "velocity_distances": res.velocity_distances,
            "lp_gates_passed": all(r.gates["lp_bound"]["passed"] for r in res.rungs),
            "balance_gates_passed": all(r.gates["balance_residual"]["passed"]
                                        for r in res.rungs),
            "elapsed": time.perf_counter() - t0}


def _acc_row_taylor_green(outdir):
    d = acceptance_taylor_green()
    assert d["max_pointwise_error"] <= 1e-6 and d["max_energy_rel_error"] <= 1e-8
    return (f"pointwise {d['max_pointwise_error']:.1e}, "
            f"energy rel {d['max_energy_rel_error']:.1e}, {d['elapsed']:.1f} s")


def _acc_row_balance(outdir):
    d = acceptance_energy_balance(None if outdir is None
                                  else os.path.join(outdir, "balance"))
    assert d["max_residual_rel"] <= 1e-6 and d["lp_gate_passed"]
    return f"residual {d['max_residual_rel']:.1e} of E0, {d['elapsed']:.0f} s"


def _acc_row_gronwall(outdir):
    d = acceptance_gronwall_selftest()
    assert d["worst_round_trip"] <= 1e-8 and d["worst_representation"] <= 1e-6
    assert d["comparison_failures"] == 0 and d["tail_failures"] == 0
    return (f"round trip {d['worst_round_trip']:.1e}, representation "
            f"{d['worst_representation']:.1e}, {d['elapsed']:.0f} s")


def _acc_row_slope(outdir):
    d = acceptance_case_slope()
    assert d["rel_error"] <= 0.01
    return f"slope {d['slope']:.6f} vs 5/7 (rel {d['rel_error']:.1e})"


def _acc_row_sweep(outdir):
    d = acceptance_dissipation_sweep(None if outdir is None
                                     else os.path.join(outdir, "sweep"))
    meas, dists = d["measured"], d["velocity_distances"]
    assert all(a > b for a, b in zip(meas, meas[1:]))
    assert meas[-1] <= 0.5 * meas[0]
    assert all(a > b for a, b in zip(dists, dists[1:]))
    assert d["lp_gates_passed"]
    return (f"D {meas[0]:.3g} -> {meas[-1]:.3g}, distances decreasing, "
            f"{d['elapsed']:.0f} s")


_ACCEPTANCE = [
    ("acceptance.exact_decay", _acc_row_taylor_green),
    ("acceptance.energy_balance", _acc_row_balance),
    ("acceptance.comparison_selftest", _acc_row_gronwall),
    ("acceptance.case_slope", _acc_row_slope),
    ("acceptance.dissipation_sweep", _acc_row_sweep),
]
