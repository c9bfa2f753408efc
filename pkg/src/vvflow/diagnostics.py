"""Integral diagnostics and the energy-balance bookkeeping.

Norm conventions (unit-normalized coefficients c(k) = fft2(w)/n^2):
    energy     ||u||_L2^2   = (2pi)^2 sum_{k != 0} |c(k)|^2 / |k|^2
    enstrophy  ||w||_L2^2   = (2pi)^2 sum_k |c(k)|^2
    lp_norm    ||w||_Lp     = rectangle rule on the physical grid
The exact balance  ||u(t)||^2 = ||u0||^2 - 2 nu int ||w||^2 + 2 int int F.u
is tracked through cumulative trapezoid columns on the sample cadence, and
balance_residual is the defect of that identity at each sample.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from typing import NamedTuple, Sequence

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .spectral import SpectralField

DIAGNOSTICS_HEADER = "t,energy,enstrophy,lp_norm,cum_dissipation,cum_work,balance_residual"
FOUR_PI_SQ = (2.0 * np.pi) ** 2


def enstrophy(omega: SpectralField) -> float:
    """||w||_L2^2 by Parseval."""
    n4 = float(omega.grid.n) ** 4
    return FOUR_PI_SQ * float(np.sum(np.abs(omega.coeff) ** 2)) / n4


def velocity_inner(a: SpectralField, b: SpectralField) -> float:
    """L2 inner product <biot_savart(a), biot_savart(b)> of induced velocities."""
    g = a.grid
    n4 = float(g.n) ** 4
    s = np.sum((a.coeff * np.conj(b.coeff)).real * g.inv_k_sq)
    return FOUR_PI_SQ * float(s) / n4


def kinetic_energy(omega: SpectralField) -> float:
    """||u||_L2^2 of the velocity induced by omega."""
    return velocity_inner(omega, omega)


def velocity_l2_distance(a: SpectralField, b: SpectralField) -> float:
    """||u_a - u_b||_L2 for the velocities induced by two vorticity fields."""
    g = a.grid
    n4 = float(g.n) ** 4
    s = np.sum(np.abs(a.coeff - b.coeff) ** 2 * g.inv_k_sq)
    return float(np.sqrt(FOUR_PI_SQ * s / n4))


def lp_norm(omega: SpectralField, p: float) -> float:
    """||w||_Lp by the rectangle rule; requires p > 1."""
    if p <= 1:
        raise ValueError(f"p = {p} not supported, need p > 1")
    phys = omega.to_physical()
    cell = omega.grid.dx ** 2
    return float((np.sum(np.abs(phys) ** p) * cell) ** (1.0 / p))


@dataclass
class DiagnosticsRecord:
    t: float
    energy: float
    enstrophy: float
    lp_norm: float
    cum_dissipation: float
    cum_work: float
    balance_residual: float


def balance_residual(records: Sequence[DiagnosticsRecord], initial_energy: float) -> np.ndarray:
    """Defect of the energy balance at each sample:
    energy(t) - E0 + cum_dissipation(t) - cum_work(t)."""
    return np.array([r.energy - initial_energy + r.cum_dissipation - r.cum_work
                     for r in records])


def assemble_records(times, energies, enstrophies, lp_norms,
                     dissipation_integrand, work_integrand) -> list:
    """Build the record series from per-sample values.

    dissipation_integrand and work_integrand are samples of 2 nu ||w||^2 and
    2 int F.u dx; the cumulative columns integrate them by the trapezoid rule
    on the sample cadence.
    """
    times = np.asarray(times, dtype=float)
    cum_diss = cumulative_trapezoid(np.asarray(dissipation_integrand, dtype=float),
                                    times, initial=0.0)
    cum_work = cumulative_trapezoid(np.asarray(work_integrand, dtype=float),
                                    times, initial=0.0)
    records = [DiagnosticsRecord(t=float(times[i]), energy=float(energies[i]),
                                 enstrophy=float(enstrophies[i]), lp_norm=float(lp_norms[i]),
                                 cum_dissipation=float(cum_diss[i]), cum_work=float(cum_work[i]),
                                 balance_residual=0.0)
               for i in range(len(times))]
    res = balance_residual(records, records[0].energy)
    for r, v in zip(records, res):
        r.balance_residual = float(v)
    return records


class LpBoundResult(NamedTuple):
    passed: bool
    first_violation: int | None
    max_excess: float


def lp_bound_check(records: Sequence[DiagnosticsRecord], omega0_lp: float,
                   cum_forcing_lp: Sequence[float], rel_tol: float = 1e-6) -> LpBoundResult:
    """Check ||w(t)||_p <= ||w0||_p + int_0^t ||g||_p ds + rel_tol * ||w0||_p.

    cum_forcing_lp holds int_0^{t_i} ||g||_p ds for each sample.  Returns the
    first violating sample index (if any) and the worst signed excess over the
    bound, normalized by ||w0||_p.
    """
    slack = rel_tol * omega0_lp
    first = None
    worst = -np.inf
    for i, r in enumerate(records):
        excess = r.lp_norm - (omega0_lp + float(cum_forcing_lp[i]) + slack)
        worst = max(worst, excess / omega0_lp if omega0_lp > 0 else excess)
        if excess > 0 and first is None:
            first = i
    return LpBoundResult(first is None, first, float(worst))


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def write_diagnostics_csv(path, records: Sequence[DiagnosticsRecord]):
    cols = [f.name for f in fields(DiagnosticsRecord)]
    with open(path, "w", newline="") as fh:
        fh.write(DIAGNOSTICS_HEADER + "\n")
        for r in records:
            fh.write(",".join(_fmt(getattr(r, c)) for c in cols) + "\n")


def read_diagnostics_csv(path) -> list:
    with open(path) as fh:
        header = fh.readline().strip()
        if header != DIAGNOSTICS_HEADER:
            raise ValueError(f"{path}: unexpected header {header!r}")
        records = []
        for line in fh:
            vals = [float(v) for v in line.strip().split(",")]
            records.append(DiagnosticsRecord(*vals))
    return records
