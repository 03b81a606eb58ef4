"""Split-step Fourier propagator for the 1D Schrodinger / Gross-Pitaevskii
equation, used as an independent check of the analytic model.

    i dpsi/dt = [-1/2 d^2/dx^2 + V(x) + g |psi|^2] psi      (hbar = m = omega_x = 1)

The full protocol is simulated: ground state in the trap, sudden shift of the
trap by d, dipole oscillation for t1, release, free expansion for t, and an
instantaneous Bragg kick.
"""
from __future__ import annotations

import csv
import math
import struct
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.fft as sfft

from . import kernels
from .interference import BraggConfig
from .wavepacket import InitialProfile, Regime, scaling_evolve

MAX_DT = 0.01  # stability heuristic, in units of 1/omega_x
BOUNDARY_TOL = 1e-10


class BoundaryError(RuntimeError):
    """Density reached the edge of the periodic box."""


class ConvergenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class GridSpec:
    """Periodic grid x_j = x_min + j dx, j = 0..n-1, dx = (x_max - x_min)/n."""

    n_points: int
    x_min: float
    x_max: float
    dt: float = 1e-3

    def __post_init__(self):
        n = self.n_points
        if n < 16 or n & (n - 1):
            raise ValueError(f"n_points must be a power of two >= 16, got {n}")
        if not self.x_max > self.x_min:
            raise ValueError("x_max must exceed x_min")

    @classmethod
    def centered(cls, n_points, span, center=0.0, dt=1e-3):
        return cls(n_points, center - 0.5 * span, center + 0.5 * span, dt)

    @property
    def dx(self):
        return (self.x_max - self.x_min) / self.n_points

    @property
    def x(self):
        return self.x_min + self.dx * np.arange(self.n_points)

    @property
    def k(self):
        return 2.0 * np.pi * sfft.fftfreq(self.n_points, d=self.dx)


@dataclass(frozen=True)
class Harmonic:
    center: float = 0.0
    omega: float = 1.0

    def values(self, x):
        return 0.5 * self.omega**2 * (x - self.center) ** 2


@dataclass(frozen=True)
class Free:
    def values(self, x):
        return np.zeros_like(x)


@dataclass
class SimState:
    grid: GridSpec
    psi: np.ndarray
    time: float = 0.0
    potential: object = field(default_factory=Free)
    g: float = 0.0

    @property
    def x(self):
        return self.grid.x

    @property
    def density(self):
        return self.psi.real**2 + self.psi.imag**2

    @property
    def norm(self):
        return float(np.sum(self.density) * self.grid.dx)

    def copy(self):
        return replace(self, psi=self.psi.copy())


# ------------------------------------------------------------------ helpers


def derivative(psi, grid: GridSpec):
    return sfft.ifft(1j * grid.k * sfft.fft(psi))


def energy(state: SimState, potential=None):
    pot = state.potential if potential is None else potential
    dpsi = derivative(state.psi, state.grid)
    rho = state.density
    e = 0.5 * (dpsi.real**2 + dpsi.imag**2) + pot.values(state.x) * rho + 0.5 * state.g * rho * rho
    return float(np.sum(e) * state.grid.dx)


def measure_current(state: SimState):
    """J = Im(psi* dpsi/dx) with a spectral derivative."""
    dpsi = derivative(state.psi, state.grid)
    return kernels.probability_current(np.ascontiguousarray(state.psi), np.ascontiguousarray(dpsi))


def momentum_distribution(state: SimState):
    """(k, n(k)) sorted by k, with sum n(k) dk equal to the norm."""
    grid = state.grid
    phik = sfft.fft(state.psi) * grid.dx / math.sqrt(2.0 * math.pi)
    k = grid.k
    order = np.argsort(k)
    return k[order], np.abs(phik[order]) ** 2


def check_boundary(state: SimState, tol=BOUNDARY_TOL):
    rho = state.density
    edge = max(4, state.grid.n_points // 100)
    peak = float(rho.max())
    worst = float(max(rho[:edge].max(), rho[-edge:].max()))
    if worst > tol * peak:
        raise BoundaryError(
            f"density at the box edge is {worst / peak:.3g} of peak at t={state.time:.4g}; "
            f"enlarge x_span (currently {state.grid.x_max - state.grid.x_min:.4g})"
        )


# ------------------------------------------------------------------ stepping


def _strang(psi, v, g, k2, dt, n_steps, kernel_mod):
    """n_steps Strang steps (half V, full T, half V) with merged potential halves."""
    kin = np.exp(-0.5j * k2 * dt)
    kernel_mod.potential_phase(psi, v, g, 0.5 * dt)
    for i in range(n_steps):
        psi[:] = sfft.ifft(sfft.fft(psi, overwrite_x=True) * kin, overwrite_x=True)
        kernel_mod.potential_phase(psi, v, g, dt if i < n_steps - 1 else 0.5 * dt)
    return psi


def evolve(state: SimState, duration, potential=None, dt=None, check_every=2000, backend=None) -> SimState:
    """Real-time evolution over ``duration`` in ``potential`` (defaults to the
    state's own). Negative durations step backwards in time."""
    pot = state.potential if potential is None else potential
    dt = state.grid.dt if dt is None else dt
    if not 0 < dt <= MAX_DT:
        raise ValueError(f"dt={dt:g} violates the stability heuristic 0 < dt <= {MAX_DT:g}/omega_x")
    kmod = kernels if backend is None else kernels.backend_module(backend)
    n_total = max(1, int(round(abs(duration) / dt)))
    step = duration / n_total
    grid = state.grid
    v = np.ascontiguousarray(pot.values(grid.x), dtype=np.float64)
    k2 = grid.k**2
    psi = np.array(state.psi, dtype=np.complex128, copy=True)
    out = SimState(grid, psi, state.time, pot, state.g)
    done = 0
    while done < n_total:
        chunk = min(check_every, n_total - done)
        _strang(psi, v, state.g, k2, step, chunk, kmod)
        done += chunk
        out.time = state.time + done * step
        check_boundary(out)
    out.time = state.time + duration
    return out


def single_step(state: SimState, dt, potential=None) -> SimState:
    """One Strang step of arbitrary sign and size (no stability check)."""
    pot = state.potential if potential is None else potential
    v = np.ascontiguousarray(pot.values(state.x), dtype=np.float64)
    psi = np.array(state.psi, dtype=np.complex128, copy=True)
    _strang(psi, v, state.g, state.grid.k**2, dt, 1, kernels)
    return SimState(state.grid, psi, state.time + dt, pot, state.g)


def _initial_guess(grid, potential, g, norm):
    x = grid.x
    c = getattr(potential, "center", 0.0)
    w = getattr(potential, "omega", 1.0)
    if g > 0:
        prof = InitialProfile.thomas_fermi(g, norm)
        tf = prof.psi0((x - c) * w)
        gauss = np.exp(-0.5 * w * (x - c) ** 2)
        return (tf + 1e-3 * gauss).astype(np.complex128)
    return np.exp(-0.5 * w * (x - c) ** 2).astype(np.complex128)


def ground_state(grid: GridSpec, potential, g=0.0, norm=1.0, dt_schedule=(1e-2, 1e-3, 3e-4), tol=1e-12,
                 psi_tol=1e-9, max_iter=400_000, check_every=50, guess=None) -> SimState:
    """Imaginary-time relaxation to the ground state.

    Each stage of ``dt_schedule`` runs until the energy changes by less than
    ``tol`` per step and max|dpsi/dtau| < ``psi_tol`` (both measured every
    ``check_every`` steps). The energy alone is a poor stopping rule: it is
    quadratic in the remaining error. The last, small dt removes the O(dt^2)
    bias of the split fixed point.
    """
    psi = np.array(_initial_guess(grid, potential, g, norm) if guess is None else guess,
                   dtype=np.complex128, copy=True)
    v = np.ascontiguousarray(potential.values(grid.x), dtype=np.float64)
    k2 = grid.k**2
    dx = grid.dx

    def renorm():
        psi[:] *= math.sqrt(norm / (np.sum(psi.real**2 + psi.imag**2) * dx))

    renorm()
    state = SimState(grid, psi, 0.0, potential, g)
    e_old = energy(state)
    it = 0
    for dt in dt_schedule:
        kin = np.exp(-0.5 * k2 * dt)
        while True:
            prev = psi.copy()
            for _ in range(check_every):
                kernels.potential_decay(psi, v, g, 0.5 * dt)
                psi[:] = sfft.ifft(sfft.fft(psi, overwrite_x=True) * kin, overwrite_x=True)
                kernels.potential_decay(psi, v, g, 0.5 * dt)
                renorm()
            it += check_every
            e_new = energy(state)
            change = abs(e_new - e_old) / check_every
            drift = float(np.max(np.abs(psi - prev))) / (check_every * dt)
            e_old = e_new
            if change < tol and drift < psi_tol:
                break
            if it >= max_iter:
                raise ConvergenceError(
                    f"imaginary time did not converge in {max_iter} steps; energy change per step "
                    f"{change:.3g}, max|dpsi/dtau| {drift:.3g}"
                )
    # fix the global phase so the state is real and positive at its peak
    i = int(np.argmax(state.density))
    psi *= np.exp(-1j * np.angle(psi[i]))
    return state


def bragg_kick(state: SimState, bragg: BraggConfig, x_origin=0.0) -> SimState:
    """Instantaneous pulse: psi -> psi (A1 + A2 exp[i(q(x - x_origin) + varphi)]),
    renormalised to the incoming norm."""
    n0 = state.norm
    x = state.x - x_origin
    psi = state.psi * (bragg.A1 + bragg.A2 * np.exp(1j * (bragg.q * x + bragg.varphi)))
    out = SimState(state.grid, psi, state.time, state.potential, state.g)
    out.psi *= math.sqrt(n0 / out.norm)
    return out


def continuity_residual(state: SimState, delta=1e-4, potential=None):
    """max|drho/dt + dJ/dx| / max|drho/dt| with centred time differences."""
    fwd = single_step(state, delta, potential)
    bwd = single_step(state, -delta, potential)
    drho = (fwd.density - bwd.density) / (2.0 * delta)
    J = measure_current(state)
    dJ = sfft.ifft(1j * state.grid.k * sfft.fft(J)).real
    return float(np.max(np.abs(drho + dJ)) / np.max(np.abs(drho)))


def coherent_displacement(state: SimState, shift_d, t1, omega=1.0) -> SimState:
    """Exact evolution of the g = 0 harmonic ground state in a trap shifted by
    ``shift_d``: a rigid displacement with momentum d omega sin(omega t1)."""
    if state.g != 0:
        raise ValueError("coherent displacement is exact only for g = 0")
    xc = shift_d * (1.0 - math.cos(omega * t1))
    p = shift_d * omega * math.sin(omega * t1)
    grid = state.grid
    # translate with a Fourier phase, then imprint the momentum
    shifted = sfft.ifft(sfft.fft(state.psi) * np.exp(-1j * grid.k * xc))
    psi = shifted * np.exp(1j * p * (grid.x - xc))
    return SimState(grid, psi, state.time + t1, Harmonic(shift_d, omega), 0.0)


# ------------------------------------------------------------------ protocol


@dataclass(frozen=True)
class ProtocolSpec:
    """Full protocol in dimensionless units."""

    shift_d: float
    t1: float
    t_expand: float
    bragg: BraggConfig | None
    g: float = 0.0
    n_points: int = 8192
    dt: float = 1e-3
    fast_dipole: bool = False
    pad: float | None = None

    @property
    def release_center(self):
        return self.shift_d * (1.0 - math.cos(self.t1))

    @property
    def k1(self):
        return self.shift_d * math.sin(self.t1)


@dataclass
class ProtocolResult:
    spec: ProtocolSpec
    ground: SimState
    released: SimState
    expanded: SimState
    kicked: SimState | None

    @property
    def x_origin(self):
        return self.spec.release_center


def protocol_grid(spec: ProtocolSpec) -> GridSpec:
    if spec.g > 0:
        R0 = InitialProfile.thomas_fermi(spec.g).width_R0
        regime = Regime.THOMAS_FERMI
        pad = 2.5 if spec.pad is None else spec.pad
    else:
        R0 = 1.0
        regime = Regime.NON_INTERACTING
        pad = 8.0 if spec.pad is None else spec.pad
    b = scaling_evolve(regime, spec.t_expand).b
    xc = spec.release_center + spec.k1 * spec.t_expand
    lo = min(-pad * R0, spec.shift_d - pad * R0, xc - pad * b * R0)
    hi = max(pad * R0, spec.shift_d + pad * R0, xc + pad * b * R0)
    return GridSpec(spec.n_points, lo, hi, spec.dt)


def run_protocol(spec: ProtocolSpec, grid: GridSpec | None = None) -> ProtocolResult:
    grid = protocol_grid(spec) if grid is None else grid
    gs = ground_state(grid, Harmonic(0.0), spec.g)
    if spec.fast_dipole and spec.g == 0:
        released = coherent_displacement(gs, spec.shift_d, spec.t1)
    else:
        released = evolve(gs, spec.t1, Harmonic(spec.shift_d))
    expanded = evolve(released, spec.t_expand, Free())
    kicked = None if spec.bragg is None else bragg_kick(expanded, spec.bragg, spec.release_center)
    return ProtocolResult(spec, gs, released, expanded, kicked)


@dataclass(frozen=True)
class Comparison:
    density_linf: float  # max |rho_num - rho_an| / max rho_an
    current_linf: float  # max |J_num - J_an| / max |J_an|


def compare_with_analytic(result: ProtocolResult, wp, bragg) -> Comparison:
    from .interference import total_current, total_density

    st = result.kicked
    xr = st.x - result.x_origin
    rho_an = total_density(xr, wp, bragg)
    J_an = total_current(xr, wp, bragg)
    return Comparison(
        float(np.max(np.abs(st.density - rho_an)) / np.max(rho_an)),
        float(np.max(np.abs(measure_current(st) - J_an)) / np.max(np.abs(J_an))),
    )


# ------------------------------------------------------------------ I/O

SNAPSHOT_COLUMNS = ["x", "re_psi", "im_psi", "rho", "J"]


def write_snapshot(state: SimState, path):
    """CSV snapshot in simulation units."""
    J = measure_current(state)
    rho = state.density
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SNAPSHOT_COLUMNS)
        for row in zip(state.x, state.psi.real, state.psi.imag, rho, J):
            w.writerow([format(float(v), ".17g") for v in row])


_MAGIC = b"BFCKPT01"
_HEADER = struct.Struct("<8sQdddddddd")


def save_checkpoint(state: SimState, path):
    """Binary checkpoint, little-endian.

    Header: 8-byte magic ``BFCKPT01``, uint64 n_points, then float64 x_min,
    x_max, dt, time, g, trap_omega (0 for free space), trap_center, and a
    reserved float64. Body: n_points (re, im) float64 pairs.
    """
    pot = state.potential
    omega = getattr(pot, "omega", 0.0) if isinstance(pot, Harmonic) else 0.0
    center = getattr(pot, "center", 0.0) if isinstance(pot, Harmonic) else 0.0
    g = state.grid
    header = _HEADER.pack(_MAGIC, g.n_points, g.x_min, g.x_max, g.dt, state.time, state.g, omega, center, 0.0)
    body = np.ascontiguousarray(state.psi, dtype="<c16").tobytes()
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(body)


def load_checkpoint(path) -> SimState:
    with open(path, "rb") as fh:
        raw = fh.read()
    magic, n, x_min, x_max, dt, time, g, omega, center, _ = _HEADER.unpack_from(raw)
    if magic != _MAGIC:
        raise ValueError(f"{path}: not a checkpoint file")
    psi = np.frombuffer(raw, dtype="<c16", count=n, offset=_HEADER.size).astype(np.complex128)
    pot = Harmonic(center, omega) if omega > 0 else Free()
    return SimState(GridSpec(int(n), x_min, x_max, dt), psi, time, pot, g)
