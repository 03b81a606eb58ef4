"""A complete, validated scenario: experiment parameters plus Bragg, grid and
imaging options, resolved into the dimensionless objects the modules use."""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

from .config import (
    ConfigError,
    DerivedScales,
    ExperimentParams,
    derive_scales,
    g1d_dimensionless,
    load_scenario_values,
    params_from_mapping,
)
from .interference import BraggConfig, FieldProfile, profile
from .oracle import ProtocolSpec
from .wavepacket import InitialProfile, Regime, WavepacketState, make_wavepacket


def _float(values, key):
    try:
        return float(values[key])
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"{key}: expected a number, got {values.get(key)!r}") from exc


@dataclass(frozen=True)
class Scenario:
    params: ExperimentParams
    regime: Regime
    alpha: float
    A2: float | None
    varphi: float
    grid_points: int = 4096
    grid_half_widths: float = 5.0
    center_window: float = 0.1
    guard_ratio: float = 2.0
    hierarchy_margin: float = 2.0
    oracle_points: int = 8192
    oracle_dt: float = 1e-3

    def __post_init__(self):
        if not self.alpha > 0:
            raise ConfigError(f"alpha must be > 0, got {self.alpha}")
        if self.A2 is not None and not 0 <= self.A2 <= 1:
            raise ConfigError(f"A2 must lie in [0, 1], got {self.A2}")
        if self.params.shift_d <= 0:
            raise ConfigError("shift_d must be > 0: the Bragg kick is defined relative to k1")
        if self.regime is Regime.THOMAS_FERMI and self.params.g3d <= 0:
            raise ConfigError("regime thomas-fermi needs g3d > 0")

    @classmethod
    def from_values(cls, values) -> "Scenario":
        params = params_from_mapping(values)
        try:
            regime = Regime.parse(values.get("regime", "noninteracting"))
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        A2 = values.get("A2", "")
        return cls(
            params=params,
            regime=regime,
            alpha=_float(values, "alpha"),
            A2=None if A2 in ("", "auto", None) else _float(values, "A2"),
            varphi=_float(values, "varphi"),
            grid_points=int(_float(values, "grid_points")),
            grid_half_widths=_float(values, "grid_half_widths"),
            center_window=_float(values, "center_window"),
            guard_ratio=_float(values, "guard_ratio"),
            hierarchy_margin=_float(values, "hierarchy_margin"),
            oracle_points=int(_float(values, "oracle_points")),
            oracle_dt=_float(values, "oracle_dt"),
        )

    @cached_property
    def scales(self) -> DerivedScales:
        return derive_scales(self.params)

    @property
    def k1(self):
        """k1 in units of 1/a_x (equal to d/a_x at maximal velocity)."""
        return self.scales.k1 * self.scales.a_x

    @property
    def t_expand(self):
        return self.params.expansion_time_t / self.scales.t_unit

    @property
    def t1(self):
        return self.params.hold_time_t1 / self.scales.t_unit

    @property
    def shift_d(self):
        return self.params.shift_d / self.scales.a_x

    @property
    def sigma_r(self):
        return self.params.sigma_r / self.scales.a_x

    @property
    def g(self):
        return g1d_dimensionless(self.params, self.scales) if self.regime is Regime.THOMAS_FERMI else 0.0

    @cached_property
    def initial_profile(self) -> InitialProfile:
        if self.regime is Regime.NON_INTERACTING:
            return InitialProfile.gaussian()
        return InitialProfile.thomas_fermi(self.g)

    @cached_property
    def wavepacket(self) -> WavepacketState:
        return make_wavepacket(self.initial_profile, self.k1, self.t_expand)

    @cached_property
    def bragg(self) -> BraggConfig:
        return BraggConfig.from_alpha(self.alpha, self.k1, self.A2, self.varphi)

    def field_profile(self, bragg=None) -> FieldProfile:
        return profile(self.wavepacket, bragg or self.bragg, self.grid_points, self.grid_half_widths)

    def protocol_spec(self, n_points=None, dt=None, with_bragg=True, fast_dipole=False) -> ProtocolSpec:
        return ProtocolSpec(
            shift_d=self.shift_d,
            t1=self.t1,
            t_expand=self.t_expand,
            bragg=self.bragg if with_bragg else None,
            g=self.g,
            n_points=n_points or self.oracle_points,
            dt=dt or self.oracle_dt,
            fast_dipole=fast_dipole,
        )

    @property
    def lambda_fringe_m(self):
        return 2.0 * math.pi / self.bragg.q * self.scales.a_x


def load_scenario(path=None, overrides=()) -> Scenario:
    """Build a scenario from a flat ``key = value`` file plus ``key=value`` overrides."""
    return Scenario.from_values(load_scenario_values(path, overrides))
