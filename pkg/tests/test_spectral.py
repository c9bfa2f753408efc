"""Solver core: velocity recovery, dealiasing, stepping, snapshots.

The two analytic velocity examples are certified symbolically (curl and
divergence recomputed with sympy) before the grid comparison, so the sign
convention is pinned by an independent oracle rather than by the code
under test.
"""

import math
import struct

import numpy as np
import pytest
import sympy as sp

from vvflow import (Grid, SimState, SolverInstabilityError, SpectralField,
                    biot_savart, curl_of_force, dealias, enstrophy,
                    force_from_vorticity_source, hermitian_defect, kinetic_energy,
                    max_speed, nonlinear_term, read_snapshot, step, velocity_inner,
                    write_snapshot)
from vvflow.scenarios import power_spectrum_vorticity, taylor_green
from vvflow.spectral import SNAPSHOT_MAGIC

X, Y = sp.symbols("x y")


def _sympy_certify(omega_expr, u1_expr, u2_expr):
    """Check curl(u) = omega and div(u) = 0 symbolically."""
    assert sp.simplify(sp.diff(u2_expr, X) - sp.diff(u1_expr, Y) - omega_expr) == 0
    assert sp.simplify(sp.diff(u1_expr, X) + sp.diff(u2_expr, Y)) == 0


def _grid_eval(grid, expr):
    fn = sp.lambdify((X, Y), expr, "numpy")
    return np.broadcast_to(fn(grid.x, grid.y), (grid.n, grid.n)).astype(float)


@pytest.mark.parametrize("omega_expr,u1_expr,u2_expr", [
    (sp.sin(X), sp.Integer(0), -sp.cos(X)),
    (2 * sp.sin(X) * sp.sin(Y), sp.sin(X) * sp.cos(Y), -sp.cos(X) * sp.sin(Y)),
])
def test_biot_savart_analytic(omega_expr, u1_expr, u2_expr):
    _sympy_certify(omega_expr, u1_expr, u2_expr)
    g = Grid(32)
    w = SpectralField.from_physical(g, _grid_eval(g, omega_expr), mean_zero=True)
    u1, u2 = biot_savart(w)
    assert np.max(np.abs(u1.to_physical() - _grid_eval(g, u1_expr))) < 1e-13
    assert np.max(np.abs(u2.to_physical() - _grid_eval(g, u2_expr))) < 1e-13


def test_biot_savart_sign_is_not_flipped():
    # the opposite orientation would give u2 = +cos x for w = sin x
    g = Grid(32)
    w = SpectralField.from_physical(g, np.sin(g.x), mean_zero=True)
    _, u2 = biot_savart(w)
    assert np.max(np.abs(u2.to_physical() - np.cos(g.x))) > 1.9


def test_biot_savart_requires_mean_zero():
    g = Grid(16)
    w = SpectralField.from_physical(g, 1.0 + np.sin(g.x))
    with pytest.raises(ValueError):
        biot_savart(w)


def test_induced_velocity_divergence_free():
    g = Grid(64)
    w = power_spectrum_vorticity(g, 1.5, seed=3)
    u1, u2 = biot_savart(w)
    div = 1j * g.k1d * u1.coeff + 1j * g.k2d * u2.coeff
    assert np.max(np.abs(div)) < 1e-13 * np.max(np.abs(w.coeff))


def test_curl_of_induced_velocity_is_identity():
    g = Grid(64)
    w = dealias(power_spectrum_vorticity(g, 2.0, seed=7))
    u1, u2 = biot_savart(w)
    back = curl_of_force(u1, u2)
    assert np.max(np.abs(back.coeff - w.coeff)) < 1e-12 * np.max(np.abs(w.coeff))


def test_force_reconstruction_inverts_curl():
    g = Grid(64)
    src = dealias(power_spectrum_vorticity(g, 2.0, seed=21))
    f1, f2 = force_from_vorticity_source(src)
    div = 1j * g.k1d * f1.coeff + 1j * g.k2d * f2.coeff
    back = curl_of_force(f1, f2)
    scale = np.max(np.abs(src.coeff))
    assert np.max(np.abs(div)) < 1e-13 * scale
    assert np.max(np.abs(back.coeff - src.coeff)) < 1e-12 * scale


def test_grid_wavenumber_tables():
    g = Grid(16)
    assert g.k1[0, 3] == 3 and g.k1[0, 13] == -3
    assert g.k1[0, 8] == 8 and g.k1d[0, 8] == 0      # Nyquist: kept in |k|^2, dropped in d/dx
    assert g.k2[5, 0] == 5 and g.k_sq[0, 0] == 0.0
    assert g.inv_k_sq[0, 0] == 0.0
    assert g.dealias_mask[0, 5] and not g.dealias_mask[0, 6]    # 3*6 > 16


@pytest.mark.parametrize("n", [7, 6, 9])
def test_grid_rejects_bad_sizes(n):
    with pytest.raises(ValueError):
        Grid(n)


def test_mean_zero_is_enforced_in_place():
    g = Grid(16)
    w = SpectralField.from_physical(g, 3.0 + np.sin(g.x), mean_zero=True)
    assert w.coeff[0, 0] == 0.0
    assert abs(w.mean()) == 0.0


def test_dealias_idempotent_and_hermitian():
    g = Grid(32)
    w = power_spectrum_vorticity(g, 1.0, seed=1)
    once = dealias(w)
    assert np.array_equal(once.coeff, dealias(once).coeff)
    assert hermitian_defect(once) < 1e-12 * np.max(np.abs(w.coeff))


def test_truncated_advection_is_energy_and_enstrophy_neutral():
    g = Grid(64)
    w = dealias(power_spectrum_vorticity(g, 1.2, seed=5))
    adv = nonlinear_term(w)
    scale = math.sqrt(enstrophy(w) * enstrophy(adv))
    ens = (2.0 * math.pi) ** 2 * float(np.sum((w.coeff.conj() * adv.coeff).real)) / g.n ** 4
    assert abs(ens) < 1e-12 * scale
    assert abs(velocity_inner(w, adv)) < 1e-12 * scale


def test_nonlinear_term_is_real_and_dealiased():
    g = Grid(32)
    w = power_spectrum_vorticity(g, 1.5, seed=9)
    adv = nonlinear_term(w)
    assert hermitian_defect(adv) < 1e-12 * max(np.max(np.abs(adv.coeff)), 1.0)
    assert np.array_equal(adv.coeff, dealias(adv).coeff)
    assert adv.coeff[0, 0] == 0.0


def test_cellular_flow_decays_by_heat_semigroup():
    g = Grid(32)
    nu = 0.05
    w0, _, _ = taylor_green(g, nu, 0.0)
    state = SimState(0.0, dealias(w0), nu)
    for _ in range(200):
        state = step(state, 1e-3)
    exact = 2.0 * math.exp(-2.0 * nu * 0.2) * np.sin(g.x) * np.sin(g.y)
    assert np.max(np.abs(state.omega.to_physical() - exact)) < 1e-10


def test_inviscid_step_conserves_energy_and_enstrophy():
    g = Grid(32)
    w = dealias(power_spectrum_vorticity(g, 3.0, seed=11))
    state = SimState(0.0, w, 0.0)
    e0, z0 = kinetic_energy(w), enstrophy(w)
    for _ in range(400):
        state = step(state, 2.5e-4)
    assert abs(kinetic_energy(state.omega) - e0) < 1e-8 * e0
    assert abs(enstrophy(state.omega) - z0) < 1e-8 * z0


def test_viscous_enstrophy_monotone_without_forcing():
    g = Grid(32)
    state = SimState(0.0, dealias(power_spectrum_vorticity(g, 2.0, seed=13)), 0.05)
    series = [enstrophy(state.omega)]
    for _ in range(10):
        for _ in range(20):
            state = step(state, 5e-4)
        series.append(enstrophy(state.omega))
    assert all(b < a for a, b in zip(series, series[1:]))


def test_forced_step_matches_duhamel_on_linear_problem():
    # nonlinearity vanishes for this datum, so the forced run must reproduce
    # the exact variation-of-constants solution of dw/dt = nu Lap w + g
    g = Grid(32)
    nu = 0.04
    w0, _, _ = taylor_green(g, nu, 0.0)     # modes (+-1, +-1), |k|^2 = 2
    gsrc = SpectralField.from_physical(g, 0.3 * np.sin(g.x) * np.sin(g.y), mean_zero=True)
    state = SimState(0.0, dealias(w0), nu)
    t_final, steps = 0.5, 500
    for _ in range(steps):
        state = step(state, t_final / steps, lambda t: gsrc)
    lam = 2.0 * nu
    decay = math.exp(-lam * t_final)
    exact = (2.0 * decay + 0.3 / lam * (1.0 - decay)) * np.sin(g.x) * np.sin(g.y)
    assert np.max(np.abs(state.omega.to_physical() - exact)) < 1e-9


def test_step_rejects_nonpositive_dt():
    g = Grid(16)
    state = SimState(0.0, SpectralField.zeros(g), 0.1)
    with pytest.raises(ValueError):
        step(state, 0.0)


@pytest.mark.filterwarnings("ignore::RuntimeWarning")   # overflow is the point
def test_instability_raises_with_failure_time():
    g = Grid(16)
    w = SpectralField(g, power_spectrum_vorticity(g, 0.5, seed=1).coeff * 1e8,
                      mean_zero=True)
    state = SimState(0.25, w, 0.0)
    with pytest.raises(SolverInstabilityError) as err:
        for _ in range(50):
            state = step(state, 10.0)
    assert err.value.t > 0.25
    assert "unstable" in str(err.value)


def test_simstate_rejects_negative_viscosity():
    g = Grid(16)
    with pytest.raises(ValueError):
        SimState(0.0, SpectralField.zeros(g), -1e-3)


def test_max_speed_of_known_flow():
    g = Grid(64)
    w0, _, _ = taylor_green(g, 0.0, 0.0)    # |u|^2 = sin^2 x cos^2 y + cos^2 x sin^2 y
    assert abs(max_speed(w0) - 1.0) < 1e-12


def test_snapshot_round_trip_and_layout(tmp_path):
    g = Grid(16)
    w = power_spectrum_vorticity(g, 2.0, seed=2)
    path = tmp_path / "field.vvf"
    write_snapshot(path, w, t=0.625, nu=2.5e-3)

    raw = path.read_bytes()
    assert raw[:4] == SNAPSHOT_MAGIC
    n, = struct.unpack_from("<I", raw, 4)
    t, nu = struct.unpack_from("<dd", raw, 8)
    assert (n, t, nu) == (16, 0.625, 2.5e-3)
    payload = np.frombuffer(raw[24:], dtype="<f8").reshape(16, 16)
    assert np.array_equal(payload, w.to_physical())

    vals, t2, nu2 = read_snapshot(path)
    assert (t2, nu2) == (0.625, 2.5e-3)
    assert np.array_equal(vals, w.to_physical())


def test_snapshot_rejects_bad_magic(tmp_path):
    path = tmp_path / "bad.vvf"
    path.write_bytes(b"NOPE" + b"\x00" * 32)
    with pytest.raises(ValueError):
        read_snapshot(path)


def test_integrating_factor_reduces_to_rk4_at_nu_zero():
    g = Grid(16)
    w = dealias(power_spectrum_vorticity(g, 2.0, seed=4))
    dt = 1e-3

    def rhs(c):
        return -nonlinear_term(SpectralField(g, c)).coeff

    k1 = rhs(w.coeff)
    k2 = rhs(w.coeff + 0.5 * dt * k1)
    k3 = rhs(w.coeff + 0.5 * dt * k2)
    k4 = rhs(w.coeff + dt * k3)
    manual = w.coeff + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    manual[0, 0] = 0.0
    stepped = step(SimState(0.0, w, 0.0), dt).omega.coeff
    assert np.max(np.abs(stepped - manual)) < 1e-14 * np.max(np.abs(w.coeff))
