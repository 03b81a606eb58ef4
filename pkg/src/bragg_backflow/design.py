"""Experiment design: backflow strength F(alpha, A2), the optimal Bragg
amplitude, and the guard conditions that keep the effect purely quantum."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .config import ExperimentParams, derive_scales
from .wavepacket import InitialProfile, Regime, scaling_evolve


def F(alpha, A2):
    """1 + alpha A2^2 - (2 + alpha) A2 sqrt(1 - A2^2); negative means backflow
    at the packet centre for the least favourable fringe phase."""
    A2 = np.asarray(A2, dtype=float)
    if np.any((A2 < 0) | (A2 > 1)):
        raise ValueError("A2 must lie in [0, 1]")
    if not alpha > 0:
        raise ValueError("alpha must be > 0")
    out = 1.0 + alpha * A2 * A2 - (2.0 + alpha) * A2 * np.sqrt(1.0 - A2 * A2)
    return float(out) if out.ndim == 0 else out


def dF_dA2(alpha, A2):
    s = math.sqrt(1.0 - A2 * A2)
    return 2.0 * alpha * A2 - (2.0 + alpha) * (s - A2 * A2 / s)


def optimality_residual(alpha, A2):
    """2 alpha A2 sqrt(1 - A2^2) + (2 + alpha)(2 A2^2 - 1); zero at the optimum."""
    return 2.0 * alpha * A2 * math.sqrt(1.0 - A2 * A2) + (2.0 + alpha) * (2.0 * A2 * A2 - 1.0)


def optimal_A2(alpha):
    """A2 minimising F at fixed alpha.

    Substituting A2 = sin u turns the stationarity condition into
    tan 2u = (2 + alpha) / alpha.
    """
    if not alpha > 0:
        raise ValueError("alpha must be > 0")
    return math.sin(0.5 * math.atan2(2.0 + alpha, alpha))


def optimal_A2_bracketed(alpha, xtol=1e-14):
    """Root of the stationarity condition on (0, 1/sqrt 2) by Brent's method."""
    if not alpha > 0:
        raise ValueError("alpha must be > 0")
    return brentq(lambda a: optimality_residual(alpha, a), 0.0, math.sqrt(0.5), xtol=xtol, rtol=1e-15)


@dataclass(frozen=True)
class Guard:
    name: str
    passed: bool
    margin: float  # ratio > 1 means satisfied
    detail: str = ""


@dataclass
class DesignReport:
    alpha: float
    A2_opt: float
    F_min: float
    population_transfer: float
    guards: list = field(default_factory=list)

    @property
    def all_passed(self):
        return all(g.passed for g in self.guards)

    def as_text(self):
        lines = [
            f"alpha               = {self.alpha:.6g}",
            f"A2_opt              = {self.A2_opt:.6g}",
            f"A1                  = {math.sqrt(1 - self.A2_opt**2):.6g}",
            f"F_min               = {self.F_min:.6g}",
            f"population_transfer = {self.population_transfer:.6g}",
        ]
        for g in self.guards:
            lines.append(f"[{'PASS' if g.passed else 'FAIL'}] {g.name}: margin {g.margin:.4g}  {g.detail}")
        return "\n".join(lines) + "\n"

    def as_keyvalue(self):
        kv = {
            "alpha": self.alpha,
            "A2_opt": self.A2_opt,
            "F_min": self.F_min,
            "population_transfer": self.population_transfer,
        }
        for g in self.guards:
            kv[f"guard.{g.name}.passed"] = int(g.passed)
            kv[f"guard.{g.name}.margin"] = g.margin
        return "".join(f"{k} = {format(float(v), '.17g')}\n" for k, v in kv.items())


def initial_profile_for(params: ExperimentParams, regime) -> InitialProfile:
    from .config import g1d_dimensionless

    regime = Regime.parse(regime)
    if regime is Regime.NON_INTERACTING:
        return InitialProfile.gaussian()
    g = g1d_dimensionless(params)
    if g <= 0:
        raise ValueError("Thomas-Fermi regime needs g3d > 0")
    return InitialProfile.thomas_fermi(g)


def classical_guard(params: ExperimentParams, regime, t=None, ratio=2.0, profile=None):
    """Guards against classical backflow and negative initial momenta.

    Lengths are compared in units of a_x. ``t`` is the expansion time in
    seconds (defaults to the configured one). ``profile`` overrides the
    initial width taken from ``params``.
    """
    regime = Regime.parse(regime)
    sc = derive_scales(params)
    prof = profile or initial_profile_for(params, regime)
    R0 = prof.width_R0
    v1 = sc.v1 / (sc.x_unit / sc.t_unit)
    t = params.expansion_time_t if t is None else t
    st = scaling_evolve(regime, t / sc.t_unit)
    f = regime.classical_factor
    guards = []
    if st.b_dot > 0:
        lim = v1 / st.b_dot
        guards.append(Guard("classical_backflow_finite_t", R0 < lim, lim / R0,
                            f"R0={R0:.4g} a_x vs v1/bdot={lim:.4g} a_x"))
    else:
        guards.append(Guard("classical_backflow_finite_t", True, math.inf, "bdot = 0, packet not expanding"))
    lim = f * v1
    guards.append(Guard("classical_backflow_asymptotic", R0 < lim, lim / R0,
                        f"R0={R0:.4g} a_x vs f v1/omega_x={lim:.4g} a_x (f={f:.4g})"))
    k1ax = sc.k1 * sc.a_x
    guards.append(Guard("negligible_negative_momenta", k1ax >= ratio, k1ax / ratio,
                        f"k1 a_x = d/a_x = {k1ax:.4g} vs required {ratio:g}"))
    return guards


def hierarchy_check(params: ExperimentParams, alpha, sigma_r=None, margin=2.0):
    """1 << d/a_x << (2 pi/alpha)(a_x/sigma_r), with "<<" read as a factor ``margin``."""
    sc = derive_scales(params)
    sigma_r = params.sigma_r if sigma_r is None else sigma_r
    if not sigma_r > 0:
        raise ValueError("sigma_r must be > 0 for the hierarchy check")
    r1 = params.shift_d / sc.a_x
    upper = (2.0 * math.pi / alpha) * (sc.a_x / sigma_r)
    r2 = upper / r1 if r1 > 0 else math.inf
    return [
        Guard("hierarchy_lower", r1 >= margin, r1 / margin, f"d/a_x = {r1:.4g}"),
        Guard("hierarchy_upper", r2 >= margin, r2 / margin,
              f"(2pi/alpha)(a_x/sigma_r) = {upper:.4g}, ratio to d/a_x = {r2:.4g}"),
    ]


def design_report(alpha, params: ExperimentParams | None = None, regime=Regime.NON_INTERACTING,
                  ratio=2.0, margin=2.0) -> DesignReport:
    A2 = optimal_A2(alpha)
    rep = DesignReport(alpha, A2, F(alpha, A2), A2 * A2)
    if params is not None:
        rep.guards.extend(classical_guard(params, regime, ratio=ratio))
        if params.sigma_r > 0:
            rep.guards.extend(hierarchy_check(params, alpha, margin=margin))
    return rep
