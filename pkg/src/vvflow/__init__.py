"""Pseudo-spectral 2D incompressible flow on the torus with a Gronwall-type
comparison machinery that bounds the viscous energy dissipation 2 nu int ||w||^2
along viscosity ladders for rough (L^p, 1 < p < 2) initial vorticity."""

__version__ = "0.1.0"

from .config import ConfigError, SimConfig, build_config, load_config, read_config_file, with_nu
from .diagnostics import (DIAGNOSTICS_HEADER, DiagnosticsRecord, LpBoundResult,
                          assemble_records, balance_residual, enstrophy, kinetic_energy,
                          lp_bound_check, lp_norm, read_diagnostics_csv, velocity_inner,
                          velocity_l2_distance, write_diagnostics_csv)
from .gronwall import (CaseLabel, ComparisonResult, GronwallFamily, GronwallParams,
                       capital_phi, capital_phi_inverse, case_bounds, classify_case,
                       comparison_check, default_gn_constant, dissipation_bound_step4,
                       estimate_params, integral_of_capital_phi, phi, phi_prime,
                       r_star, r_star_star, supersolution_m)
from .harness import (BOUND_TABLE_HEADER, RunResult, SweepGateError, SweepResult,
                      run, run_single, rung_label, sweep)
from .scenarios import (FORCING_KINDS, SCENARIO_KINDS, ForcingModel, ForcingSpec,
                        ScenarioSpec, build_initial_vorticity, make_forcing,
                        power_spectrum_vorticity, singular_vortex, taylor_green)
from .spectral import (SNAPSHOT_MAGIC, Grid, SimState, SolverInstabilityError,
                       SpectralField, biot_savart, curl_of_force, dealias,
                       force_from_vorticity_source, hermitian_defect, max_speed,
                       nonlinear_term, read_snapshot, step, write_snapshot)
from .verify import (VerifyReport, acceptance_case_slope, acceptance_dissipation_sweep,
                     acceptance_energy_balance, acceptance_gronwall_selftest,
                     acceptance_taylor_green, verify_suite)

import types as _types

__all__ = sorted(name for name, obj in globals().items()
                 if not name.startswith("_") and not isinstance(obj, _types.ModuleType))
