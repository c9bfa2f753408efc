"""Spectral building blocks for 2D incompressible flow on the torus [0, 2pi)^2.

Vorticity form of the dynamics: the scalar vorticity w = curl u = d_x u2 - d_y u1
evolves by  dw/dt + u . grad w = nu Lap w + g,  and the velocity is recovered
from w through the streamfunction psi with  Lap psi = w,  u = (-d_y psi, d_x psi).
That orientation is pinned by the requirement curl(biot_savart(w)) = w; see
test_spectral.py for the w = sin(x) check that fixes the sign once and for all.

Conventions used throughout the package:
  * physical arrays are (n, n) float64 indexed [y, x] (row-major, x fastest);
  * spectral coefficients use numpy's fft2 layout, ifft2(coeff).real = field;
  * integer wavenumbers run over {-n/2+1, ..., n/2}; first-derivative symbols
    drop the n/2 (Nyquist) line so every operation maps real fields to real
    fields, while |k|^2 keeps the full Nyquist value;
  * the nonlinear term is 2/3-rule dealiased: modes with 3|k1| > n or
    3|k2| > n are zeroed, which makes the truncated advection exactly
    energy- and enstrophy-neutral.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

SNAPSHOT_MAGIC = b"VVF1"


class SolverInstabilityError(RuntimeError):
    """A time step produced non-finite coefficients."""

    # args carries t (not the message) so the exception survives pickling
    # across the sweep worker pool
    def __init__(self, t: float):
        super().__init__(t)
        self.t = t

    def __str__(self):
        return (f"non-finite vorticity coefficients at t = {self.t:.6g}; "
                "the run is unstable (reduce dt or refine the grid)")


class Grid:
    """Uniform n x n grid on [0, 2pi)^2 with integer wavenumber tables."""

    def __init__(self, n: int):
        if n < 8:
            raise ValueError(f"grid size n = {n} too small, need n >= 8")
        if n % 2:
            raise ValueError(f"grid size n = {n} must be even")
        self.n = n
        self.dx = 2.0 * np.pi / n
        axis = np.arange(n) * self.dx
        # x varies along axis 1, y along axis 0
        self.x, self.y = np.meshgrid(axis, axis)

        k = np.fft.fftfreq(n, d=1.0 / n).astype(np.int64)
        k[n // 2] = n // 2          # report the Nyquist wavenumber as +n/2
        kd = k.copy()
        kd[n // 2] = 0              # derivative symbol: Nyquist line dropped
        self.k1, self.k2 = np.meshgrid(k, k)
        self.k1d, self.k2d = np.meshgrid(kd, kd)
        self.k_sq = (self.k1 ** 2 + self.k2 ** 2).astype(np.float64)
        with np.errstate(divide="ignore"):
            inv = 1.0 / self.k_sq
        inv[0, 0] = 0.0
        self.inv_k_sq = inv
        self.dealias_mask = (3 * np.abs(self.k1) <= n) & (3 * np.abs(self.k2) <= n)

    def __repr__(self):
        return f"Grid(n={self.n})"


class SpectralField:
    """Real scalar field on a Grid, stored as complex fft2 coefficients.

    When mean_zero is true the k = 0 coefficient is zeroed in place at
    construction, so the flag is an enforced invariant rather than a claim.
    """

    __slots__ = ("grid", "coeff", "mean_zero")

    def __init__(self, grid: Grid, coeff: np.ndarray, mean_zero: bool = False):
        if coeff.shape != (grid.n, grid.n):
            raise ValueError(f"coefficient shape {coeff.shape} does not match grid n = {grid.n}")
        self.grid = grid
        self.coeff = coeff
        self.mean_zero = mean_zero
        if mean_zero:
            self.coeff[0, 0] = 0.0

    @classmethod
    def from_physical(cls, grid: Grid, values: np.ndarray, mean_zero: bool = False):
        values = np.asarray(values, dtype=np.float64)
        return cls(grid, np.fft.fft2(values), mean_zero=mean_zero)

    @classmethod
    def zeros(cls, grid: Grid, mean_zero: bool = True):
        return cls(grid, np.zeros((grid.n, grid.n), dtype=np.complex128), mean_zero=mean_zero)

    def to_physical(self) -> np.ndarray:
        return np.fft.ifft2(self.coeff).real

    def copy(self) -> "SpectralField":
        return SpectralField(self.grid, self.coeff.copy(), mean_zero=self.mean_zero)

    def mean(self) -> float:
        """Spatial mean of the field."""
        return self.coeff[0, 0].real / self.grid.n ** 2

    def require_mean_zero(self, what: str = "field"):
        if self.coeff[0, 0] != 0:
            raise ValueError(f"{what} must be mean-zero, got mean {self.mean():.6g}")


def hermitian_defect(field: SpectralField) -> float:
    """Max |c(k) - conj(c(-k))| over all modes; 0 for a real field."""
    c = field.coeff
    n = field.grid.n
    neg = (-np.arange(n)) % n
    return float(np.abs(c - np.conj(c[np.ix_(neg, neg)])).max())


def dealias(field: SpectralField) -> SpectralField:
    """Zero every mode with 3|k1| > n or 3|k2| > n (2/3 rule)."""
    return SpectralField(field.grid, field.coeff * field.grid.dealias_mask,
                         mean_zero=field.mean_zero)


def _perp_grad_inv_lap(src: SpectralField):
    """Solve Lap psi = src and return grad_perp psi = (-d_y psi, d_x psi)."""
    g = src.grid
    psi = -src.coeff * g.inv_k_sq
    c1 = -1j * g.k2d * psi
    c2 = 1j * g.k1d * psi
    return SpectralField(g, c1, mean_zero=True), SpectralField(g, c2, mean_zero=True)


def biot_savart(omega: SpectralField):
    """Velocity (u1, u2) induced by mean-zero vorticity omega.

    Spectrally u_hat = (i k2, -i k1) w_hat / |k|^2, which satisfies
    k . u_hat = 0 exactly and curl u = w.
    """
    omega.require_mean_zero("vorticity")
    return _perp_grad_inv_lap(omega)


def curl_of_force(f1: SpectralField, f2: SpectralField) -> SpectralField:
    """Scalar curl d_x f2 - d_y f1 of a force field; always mean-zero."""
    g = f1.grid
    coeff = 1j * g.k1d * f2.coeff - 1j * g.k2d * f1.coeff
    return SpectralField(g, coeff, mean_zero=True)


def force_from_vorticity_source(gsrc: SpectralField):
    """Divergence-free force (f1, f2) with curl f = gsrc.

    Inverse of curl_of_force on divergence-free fields; any gradient part of
    the original force is unrecoverable (and does no work on the flow).
    """
    gsrc.require_mean_zero("vorticity source")
    return _perp_grad_inv_lap(gsrc)


def nonlinear_term(omega: SpectralField) -> SpectralField:
    """Advection u . grad w for the induced velocity, 2/3-dealiased, mean-zero."""
    g = omega.grid
    u1, u2 = biot_savart(omega)
    wx = 1j * g.k1d * omega.coeff
    wy = 1j * g.k2d * omega.coeff
    adv = (np.fft.ifft2(u1.coeff).real * np.fft.ifft2(wx).real
           + np.fft.ifft2(u2.coeff).real * np.fft.ifft2(wy).real)
    coeff = np.fft.fft2(adv)
    coeff *= g.dealias_mask
    return SpectralField(g, coeff, mean_zero=True)


def max_speed(omega: SpectralField) -> float:
    """Max pointwise |u| of the induced velocity (CFL input)."""
    u1, u2 = biot_savart(omega)
    u1p = u1.to_physical()
    u2p = u2.to_physical()
    return float(np.sqrt(u1p ** 2 + u2p ** 2).max())


@dataclass
class SimState:
    """Instantaneous solver state: time, vorticity, viscosity."""
    t: float
    omega: SpectralField
    nu: float

    def __post_init__(self):
        if self.nu < 0:
            raise ValueError(f"viscosity nu = {self.nu} must be >= 0")


# cache of integrating-factor arrays keyed by (n, nu, dt); dt is usually
# pinned at the T/1000 cap so the same arrays serve the whole run
_IF_CACHE: dict = {}


def _integrating_factors(grid: Grid, nu: float, dt: float):
    key = (grid.n, nu, dt)
    hit = _IF_CACHE.get(key)
    if hit is None:
        if len(_IF_CACHE) > 64:
            _IF_CACHE.clear()
        e_half = np.exp(-nu * grid.k_sq * (0.5 * dt))
        hit = (e_half, e_half ** 2)
        _IF_CACHE[key] = hit
    return hit


def _rhs(grid: Grid, coeff: np.ndarray, t: float, forcing) -> np.ndarray:
    w = SpectralField(grid, coeff)
    out = -nonlinear_term(w).coeff
    if forcing is not None:
        gsrc = forcing(t)
        if gsrc is not None:
            out = out + gsrc.coeff
    return out


def step(state: SimState, dt: float, forcing=None) -> SimState:
    """Advance one step of Lawson integrating-factor RK4.

    The diffusion semigroup exp(-nu |k|^2 dt) is applied exactly and the
    advection/forcing terms are advanced by classical RK4 in the transformed
    variable, so nu = 0 degenerates to plain RK4.  forcing, if given, is a
    callable t -> SpectralField with the vorticity source at that time.
    Raises SolverInstabilityError if the new coefficients are not all finite.
    """
    if dt <= 0:
        raise ValueError(f"dt = {dt} must be positive")
    g = state.omega.grid
    e1, e2 = _integrating_factors(g, state.nu, dt)
    w = state.omega.coeff
    t = state.t

    k1 = _rhs(g, w, t, forcing)
    k2 = _rhs(g, e1 * (w + (0.5 * dt) * k1), t + 0.5 * dt, forcing)
    k3 = _rhs(g, e1 * w + (0.5 * dt) * k2, t + 0.5 * dt, forcing)
    k4 = _rhs(g, e2 * w + dt * (e1 * k3), t + dt, forcing)
    w_new = e2 * w + (dt / 6.0) * (e2 * k1 + 2.0 * (e1 * (k2 + k3)) + k4)

    if not np.all(np.isfinite(w_new.view(np.float64))):
        raise SolverInstabilityError(t + dt)
    return SimState(t + dt, SpectralField(g, w_new, mean_zero=True), state.nu)


def write_snapshot(path, field: SpectralField, t: float, nu: float):
    """Binary snapshot: magic 'VVF1', u32 n, f64 t, f64 nu, then n*n float64
    physical values (row-major, x fastest), all little-endian."""
    phys = np.ascontiguousarray(field.to_physical(), dtype="<f8")
    with open(path, "wb") as fh:
        fh.write(SNAPSHOT_MAGIC)
        fh.write(struct.pack("<I", field.grid.n))
        fh.write(struct.pack("<d", t))
        fh.write(struct.pack("<d", nu))
        fh.write(phys.tobytes(order="C"))


def read_snapshot(path):
    """Read a snapshot written by write_snapshot; returns (values, t, nu)."""
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != SNAPSHOT_MAGIC:
            raise ValueError(f"{path}: bad magic {magic!r}, expected {SNAPSHOT_MAGIC!r}")
        (n,) = struct.unpack("<I", fh.read(4))
        (t,) = struct.unpack("<d", fh.read(8))
        (nu,) = struct.unpack("<d", fh.read(8))
        payload = fh.read(8 * n * n)
        if len(payload) != 8 * n * n:
            raise ValueError(f"{path}: truncated payload, expected {n}x{n} float64")
    values = np.frombuffer(payload, dtype="<f8").reshape(n, n).copy()
    return values, t, nu
