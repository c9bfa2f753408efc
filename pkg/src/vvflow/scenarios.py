"""Initial vorticity families and forcing constructions.

The singular_vortex family realizes Lp (p < 2) vorticity that escapes L2:
a radial profile |x - x0|^(-a) with 1 <= a < 2/p under a C^2 cutoff,
convolved with a Gaussian mollifier of width mollify_delta.  Shrinking the
mollification with viscosity (default delta(nu) = nu^(1/4)) makes the L2
norm blow up like delta^(1-a) while the Lp norm stays Cauchy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .spectral import Grid, SpectralField

SCENARIO_KINDS = ("taylor_green", "singular_vortex", "power_spectrum")
FORCING_KINDS = ("none", "low_mode", "rough")
MODULATIONS = ("constant", "cosine")

# fixed low-mode force pattern: orthogonal modes with |k| <= 2, unit L2 norm
_LOW_MODE_COEFFS = (1.0, 0.8, 0.6, 0.4, 0.3)


def taylor_green(grid: Grid, nu: float, t: float):
    """Exact decaying solution: w = 2 e^(-2 nu t) sin x sin y.

    Returns (omega, (u1, u2), energy); the nonlinear term vanishes for this
    flow, so it decays by the heat semigroup alone with ||u||^2 = 2 pi^2
    e^(-4 nu t).
    """
    decay = math.exp(-2.0 * nu * t)
    w = 2.0 * decay * np.sin(grid.x) * np.sin(grid.y)
    u1 = decay * np.sin(grid.x) * np.cos(grid.y)
    u2 = -decay * np.cos(grid.x) * np.sin(grid.y)
    omega = SpectralField.from_physical(grid, w, mean_zero=True)
    vel = (SpectralField.from_physical(grid, u1, mean_zero=True),
           SpectralField.from_physical(grid, u2, mean_zero=True))
    energy = 2.0 * math.pi ** 2 * decay ** 2
    return omega, vel, energy


def _radial_bump(r: np.ndarray) -> np.ndarray:
    """C^2 cutoff: 1 on r <= 1/2, 0 on r >= 1, quintic smoothstep between."""
    s = np.clip((r - 0.5) * 2.0, 0.0, 1.0)
    return 1.0 - s ** 3 * (10.0 - 15.0 * s + 6.0 * s ** 2)


def singular_vortex(grid: Grid, p: float, a: float, mollify_delta: float) -> SpectralField:
    """Mollified cutoff power vortex |x - x0|^(-a), mean-adjusted to zero.

    Requires 1 <= a < 2/p (so the profile is in Lp but not L2) and a
    mollification width no smaller than the grid spacing.
    """
    if not (1.0 < p < 2.0):
        raise ValueError(f"p = {p} must lie in (1, 2)")
    if not (1.0 <= a < 2.0 / p):
        raise ValueError(f"singularity exponent a = {a} must lie in [1, 2/p) = [1, {2.0 / p:.6g})")
    if mollify_delta < grid.dx:
        raise ValueError(f"mollify_delta = {mollify_delta:.6g} under-resolves the grid "
                         f"(spacing {grid.dx:.6g})")
    # center offset by half a cell so no sample sits on the singular point
    cx = math.pi + 0.5 * grid.dx
    cy = math.pi + 0.5 * grid.dx
    r = np.hypot(grid.x - cx, grid.y - cy)
    r_eff = np.maximum(r, 0.25 * grid.dx)
    profile = r_eff ** (-a) * _radial_bump(r)
    coeff = np.fft.fft2(profile)
    coeff *= np.exp(-grid.k_sq * (0.5 * mollify_delta ** 2))
    return SpectralField(grid, coeff, mean_zero=True)


def power_spectrum_vorticity(grid: Grid, gamma: float, seed: int) -> SpectralField:
    """Random-phase field with |w_hat(k)| = |k|^(-gamma) exactly (unit
    coefficients), zero mean and zero Nyquist lines; deterministic in seed."""
    n = grid.n
    rng = np.random.default_rng(seed)
    noise = np.fft.fft2(rng.standard_normal((n, n)))
    mag = np.abs(noise)
    mag[mag == 0] = 1.0
    phases = noise / mag
    with np.errstate(divide="ignore"):
        amp = grid.k_sq ** (-0.5 * gamma)
    amp[0, 0] = 0.0
    amp[np.abs(grid.k1) == n // 2] = 0.0
    amp[np.abs(grid.k2) == n // 2] = 0.0
    return SpectralField(grid, phases * amp * n ** 2, mean_zero=True)


@dataclass(frozen=True)
class ScenarioSpec:
    """Initial vorticity family plus its parameters.

    delta_coeff / delta_exp define the mollification schedule
    delta(nu) = delta_coeff * nu^delta_exp for the singular vortex.
    """

    kind: str
    p: float = 1.5
    a: float = 7.0 / 6.0
    gamma: float = 3.0
    seed: int = 0
    delta_coeff: float = 1.0
    delta_exp: float = 0.25

    def __post_init__(self):
        if self.kind not in SCENARIO_KINDS:
            raise ValueError(f"scenario.kind = {self.kind!r} not one of {SCENARIO_KINDS}")
        if not (1.0 < self.p < 2.0):
            raise ValueError(f"scenario.p = {self.p} must lie in (1, 2)")

    def mollify_delta(self, nu: float) -> float:
        return self.delta_coeff * nu ** self.delta_exp


def build_initial_vorticity(spec: ScenarioSpec, grid: Grid, nu: float) -> SpectralField:
    if spec.kind == "taylor_green":
        omega, _, _ = taylor_green(grid, nu, 0.0)
        return omega
    if spec.kind == "singular_vortex":
        return singular_vortex(grid, spec.p, spec.a, spec.mollify_delta(nu))
    return power_spectrum_vorticity(grid, spec.gamma, spec.seed)


@dataclass(frozen=True)
class ForcingSpec:
    kind: str = "none"
    amplitude: float = 0.1
    modulation: str = "constant"
    mod_freq: float = 1.0
    gamma: float = 2.5
    seed: int = 0
    rotation_rate: float = 1.0

    def __post_init__(self):
        if self.kind not in FORCING_KINDS:
            raise ValueError(f"forcing.kind = {self.kind!r} not one of {FORCING_KINDS}")
        if self.modulation not in MODULATIONS:
            raise ValueError(f"forcing.modulation = {self.modulation!r} not one of {MODULATIONS}")
        if self.amplitude < 0:
            raise ValueError(f"forcing.amplitude = {self.amplitude} must be >= 0")


class ForcingModel:
    """Time-dependent vorticity source g(t) with measured norm reporting.

    low_mode: a fixed pattern on modes |k| <= 2 with unit L2 norm, scaled by
    amplitude and a smooth temporal modulation s(t), so ||g(t)||_L2 =
    amplitude |s(t)| in closed form.  rough: a band-limited power-law field
    normalized to L2 = amplitude whose mode phases rotate deterministically
    in time (an odd phase speed per mode keeps the field real); the L2 norm
    is time-independent, the Lp norms are evaluated numerically.
    """

    def __init__(self, spec: ForcingSpec, grid: Grid):
        self.spec = spec
        self.grid = grid
        self._base = None
        self._phase_speed = None
        if spec.kind == "low_mode":
            n = grid.n
            norm = 2.0 * math.pi * math.sqrt(sum(c * c for c in _LOW_MODE_COEFFS) / 2.0)
            c1, c2, c3, c4, c5 = (c / norm for c in _LOW_MODE_COEFFS)
            pattern = (c1 * np.cos(grid.x) + c2 * np.sin(grid.y)
                       + c3 * np.cos(grid.x + grid.y)
                       + c4 * np.sin(2.0 * grid.x) + c5 * np.cos(2.0 * grid.y))
            self._base = SpectralField.from_physical(grid, spec.amplitude * pattern,
                                                     mean_zero=True).coeff
        elif spec.kind == "rough":
            base = power_spectrum_vorticity(grid, spec.gamma, spec.seed)
            base = SpectralField(grid, base.coeff * grid.dealias_mask, mean_zero=True)
            from .diagnostics import lp_norm  # local import to avoid a cycle at module load
            l2 = lp_norm(base, 2.0)
            scale = spec.amplitude / l2 if l2 > 0 else 0.0
            self._base = base.coeff * scale
            rng = np.random.default_rng(spec.seed + 1)
            h = rng.uniform(-1.0, 1.0, size=(grid.n, grid.n))
            neg = (-np.arange(grid.n)) % grid.n
            self._phase_speed = spec.rotation_rate * (h - h[np.ix_(neg, neg)])

    def modulation(self, t: float) -> float:
        if self.spec.modulation == "cosine":
            return math.cos(self.spec.mod_freq * t)
        return 1.0

    def vorticity_source(self, t: float) -> SpectralField:
        if self.spec.kind == "none":
            return SpectralField.zeros(self.grid)
        if self.spec.kind == "low_mode":
            return SpectralField(self.grid, self.modulation(t) * self._base, mean_zero=True)
        rot = np.exp(1j * (t * self._phase_speed))
        return SpectralField(self.grid, self.modulation(t) * (self._base * rot),
                             mean_zero=True)

    def sup_l2(self, t_final: float) -> float:
        """sup over [0, t_final] of ||g(t)||_L2.

        Both modulations attain |s| = 1 at t = 0 and the spatial L2 norm is
        time-independent, so this is exactly the amplitude (0 for no forcing).
        """
        if self.spec.kind == "none":
            return 0.0
        return self.spec.amplitude

    def integral_lp(self, t_final: float, p: float, samples: int = 257) -> float:
        """int_0^T ||g(t)||_Lp dt by trapezoid on a fine time grid.

        The low_mode force is separable, so only the scalar modulation needs
        a (dense) quadrature; the rough force changes shape under the phase
        rotation and is sampled as a field.
        """
        if self.spec.kind == "none":
            return 0.0
        from .diagnostics import lp_norm
        if self.spec.kind == "low_mode":
            base_lp = lp_norm(SpectralField(self.grid, self._base.copy(), mean_zero=True), p)
            ts = np.linspace(0.0, t_final, 8193)
            mod = np.abs(np.cos(self.spec.mod_freq * ts)) \
                if self.spec.modulation == "cosine" else np.ones_like(ts)
            return float(base_lp * np.trapezoid(mod, ts))
        ts = np.linspace(0.0, t_final, samples)
        vals = [lp_norm(self.vorticity_source(float(t)), p) for t in ts]
        return float(np.trapezoid(vals, ts))


@lru_cache(maxsize=16)
def _cached_model(spec: ForcingSpec, grid: Grid) -> ForcingModel:
    return ForcingModel(spec, grid)


def make_forcing(spec: ForcingSpec, grid: Grid, t: float) -> SpectralField:
    """Vorticity source g(., t) for the given forcing spec."""
    return _cached_model(spec, grid).vorticity_source(t)
