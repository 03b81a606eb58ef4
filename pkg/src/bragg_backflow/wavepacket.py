"""Analytic expansion of the released condensate (dimensionless units).

The packet is centred at the origin at release (t = 0) and moves with
velocity k1. Its shape follows the scaling law

    psi(x, t) = b^{-1/2} psi0((x - k1 t) / b) exp(i theta(x, t)),
    theta = x^2 bdot / (2 b) + k1 x (1 - bdot t / b),

with b(t) = sqrt(1 + t^2) for the ideal gas and bddot = 1/b^2 in the
Thomas-Fermi limit. The global phase is dropped; it cancels from every
density and current.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp


class Regime(enum.Enum):
    NON_INTERACTING = "noninteracting"
    THOMAS_FERMI = "thomas-fermi"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("_", "-")
        aliases = {"noninteracting": cls.NON_INTERACTING, "non-interacting": cls.NON_INTERACTING,
                   "ideal": cls.NON_INTERACTING, "gaussian": cls.NON_INTERACTING,
                   "thomas-fermi": cls.THOMAS_FERMI, "tf": cls.THOMAS_FERMI}
        try:
            return aliases[key]
        except KeyError:
            raise ValueError(f"unknown regime {value!r}") from None

    @property
    def classical_factor(self):
        """f in the asymptotic no-classical-backflow condition R0 < f v1 / omega_x."""
        return 1.0 if self is Regime.NON_INTERACTING else 1.0 / math.sqrt(2.0)


@dataclass(frozen=True)
class InitialProfile:
    """Ground state in the axial trap before the shift.

    ``width_R0`` is a_x (= 1) for the Gaussian and R_TF for the Thomas-Fermi
    parabola. ``g`` is the 1D coupling and ``norm`` the atom number the
    profile integrates to.
    """

    regime: Regime
    width_R0: float = 1.0
    chem_potential_mu: float = 0.5
    g: float = 0.0
    norm: float = 1.0

    @classmethod
    def gaussian(cls):
        return cls(Regime.NON_INTERACTING, 1.0, 0.5, 0.0, 1.0)

    @classmethod
    def thomas_fermi(cls, g, norm=1.0):
        if g <= 0:
            raise ValueError("Thomas-Fermi profile needs g > 0")
        # int (mu - x^2/2)/g dx over |x| < sqrt(2 mu) = (4/3) mu sqrt(2 mu) / g = N
        mu = (3.0 * g * norm / (4.0 * math.sqrt(2.0))) ** (2.0 / 3.0)
        return cls(Regime.THOMAS_FERMI, math.sqrt(2.0 * mu), mu, g, norm)

    def psi0(self, x):
        x = np.asarray(x, dtype=float)
        if self.regime is Regime.NON_INTERACTING:
            return np.sqrt(self.norm) * math.pi**-0.25 * np.exp(-0.5 * x * x)
        return np.sqrt(np.maximum(self.chem_potential_mu - 0.5 * x * x, 0.0) / self.g)


@dataclass(frozen=True)
class ScalingState:
    b: float
    b_dot: float
    time: float


@dataclass(frozen=True)
class WavepacketState:
    profile: InitialProfile
    scaling: ScalingState
    k1: float

    @property
    def time(self):
        return self.scaling.time

    @property
    def center(self):
        return self.k1 * self.scaling.time

    @property
    def width(self):
        return self.scaling.b * self.profile.width_R0


def _tf_rhs(t, y):
    return [y[1], 1.0 / (y[0] * y[0])]


def scaling_evolve(regime, t, rtol=1e-10) -> ScalingState:
    """Scaling parameter (b, bdot) at time ``t`` after release."""
    regime = Regime.parse(regime)
    if t < 0:
        raise ValueError(f"time must be >= 0, got {t}")
    if regime is Regime.NON_INTERACTING:
        b = math.sqrt(1.0 + t * t)
        return ScalingState(b, t / b, t)
    if t == 0:
        return ScalingState(1.0, 0.0, 0.0)
    sol = solve_ivp(_tf_rhs, (0.0, t), [1.0, 0.0], method="RK45", rtol=rtol, atol=rtol * 1e-2)
    if not sol.success:
        raise RuntimeError(f"scaling ODE failed: {sol.message}")
    return ScalingState(float(sol.y[0, -1]), float(sol.y[1, -1]), t)


def tf_energy_monitor(state: ScalingState):
    """bdot^2/2 + 1/b, conserved (= 1) by the Thomas-Fermi scaling law."""
    return 0.5 * state.b_dot**2 + 1.0 / state.b


def make_wavepacket(profile: InitialProfile, k1, t) -> WavepacketState:
    return WavepacketState(profile, scaling_evolve(profile.regime, t), k1)


def envelope(x, state: WavepacketState):
    s = state.scaling
    return state.profile.psi0((np.asarray(x, dtype=float) - state.center) / s.b) / math.sqrt(s.b)


def phase(x, state: WavepacketState):
    s = state.scaling
    x = np.asarray(x, dtype=float)
    rate = s.b_dot / s.b
    return 0.5 * x * x * rate + state.k1 * x * (1.0 - rate * s.time)


def phase_gradient(x, state: WavepacketState):
    s = state.scaling
    rate = s.b_dot / s.b
    return np.asarray(x, dtype=float) * rate + state.k1 * (1.0 - rate * s.time)


def wavefunction(x, state: WavepacketState):
    return envelope(x, state) * np.exp(1j * phase(x, state))


def single_packet_current(x, state: WavepacketState):
    return envelope(x, state) ** 2 * phase_gradient(x, state)


def x_minus(state: WavepacketState):
    """Position below which the single-packet flux is negative.

    Returns ``-inf`` when bdot = 0 (no negative-flux region).
    """
    s = state.scaling
    if s.b_dot <= 0.0:
        return -math.inf
    return state.k1 * (s.time - s.b / s.b_dot)


def norm(state: WavepacketState, n_points=20001, half_widths=12.0):
    """Numerical int |phi|^2 dx over the support (Simpson)."""
    from scipy.integrate import simpson

    if state.profile.regime is Regime.THOMAS_FERMI:
        half = state.width
    else:
        half = half_widths * state.width
    x = np.linspace(state.center - half, state.center + half, n_points)
    return float(simpson(envelope(x, state) ** 2, x=x))
