"""Physical constants, experiment parameters and the dimensionless unit system.

Internally everything runs with hbar = m = omega_x = 1: lengths in units of the
axial oscillator length a_x, times in units of 1/omega_x. SI values only
appear in :class:`ExperimentParams` and at the report/CSV boundary.
"""
from __future__ import annotations

import configparser
import math
import warnings
from dataclasses import dataclass, fields, replace
from pathlib import Path

HBAR = 1.054571817e-34  # J s
AMU = 1.66053907e-27  # kg

# mass in atomic mass units
SPECIES = {
    "Li7": 7.0,
    "Rb87": 87.0,
}


class ConfigError(ValueError):
    """Invalid or incomplete experiment configuration."""


@dataclass(frozen=True)
class ExperimentParams:
    """Physical setup in SI units.

    ``hold_time_t1`` defaults to a quarter dipole period, when the condensate
    reaches its maximal velocity omega_x * d. ``g3d`` is zero for the ideal
    gas; it only matters for the Thomas-Fermi regime.
    """

    atom_mass: float
    omega_x: float
    omega_perp: float
    shift_d: float
    expansion_time_t: float
    sigma_r: float
    hold_time_t1: float | None = None
    n_atoms: float = 1.0
    g3d: float = 0.0

    def __post_init__(self):
        for name in ("atom_mass", "omega_x", "omega_perp", "expansion_time_t"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise ConfigError(f"{name} must be strictly positive, got {value!r}")
        if not (self.shift_d >= 0 and math.isfinite(self.shift_d)):
            raise ConfigError(f"shift_d must be >= 0, got {self.shift_d!r}")
        if not (self.sigma_r >= 0 and math.isfinite(self.sigma_r)):
            raise ConfigError(f"sigma_r must be >= 0, got {self.sigma_r!r}")
        if self.hold_time_t1 is None:
            object.__setattr__(self, "hold_time_t1", math.pi / (2.0 * self.omega_x))
        elif not self.hold_time_t1 > 0:
            raise ConfigError(f"hold_time_t1 must be strictly positive, got {self.hold_time_t1!r}")
        if not self.n_atoms > 0:
            raise ConfigError(f"n_atoms must be strictly positive, got {self.n_atoms!r}")
        if self.g3d < 0:
            raise ConfigError(f"g3d must be >= 0, got {self.g3d!r}")
        if self.omega_perp < 10.0 * self.omega_x:
            warnings.warn(
                f"omega_perp/omega_x = {self.omega_perp / self.omega_x:.3g}; the 1D "
                "reduction assumes tight radial confinement",
                stacklevel=3,
            )

    @property
    def a_perp(self):
        return math.sqrt(HBAR / (self.atom_mass * self.omega_perp))

    @property
    def g1d(self):
        """Quasi-1D coupling g3d / (2 pi a_perp^2), in J m."""
        return self.g3d / (2.0 * math.pi * self.a_perp**2)


@dataclass(frozen=True)
class DerivedScales:
    a_x: float
    a_perp: float
    v1: float
    k1: float
    t_unit: float
    x_unit: float
    release_offset: float


_KIND_POWERS = {
    # (length power, time power) of the SI unit
    "length": (1, 0),
    "time": (0, 1),
    "wavenumber": (-1, 0),
    "velocity": (1, -1),
    "density": (-1, 0),
    "current": (0, -1),
}


def derive_scales(params: ExperimentParams) -> DerivedScales:
    m, w = params.atom_mass, params.omega_x
    a_x = math.sqrt(HBAR / (m * w))
    # dipole oscillation in the shifted trap: x_c = d(1 - cos wt), v = d w sin wt
    v1 = w * params.shift_d * math.sin(w * params.hold_time_t1)
    return DerivedScales(
        a_x=a_x,
        a_perp=params.a_perp,
        v1=v1,
        k1=m * v1 / HBAR,
        t_unit=1.0 / w,
        x_unit=a_x,
        release_offset=params.shift_d * (1.0 - math.cos(w * params.hold_time_t1)),
    )


def _unit(scales: DerivedScales, kind: str):
    if kind == "momentum":
        return HBAR / scales.x_unit
    if kind == "energy":
        return HBAR / scales.t_unit
    if kind not in _KIND_POWERS:
        raise ValueError(f"unknown quantity kind {kind!r}")
    lp, tp = _KIND_POWERS[kind]
    return scales.x_unit**lp * scales.t_unit**tp


def to_dimensionless(value, kind: str, scales: DerivedScales):
    """SI -> internal units. ``kind`` is one of length, time, wavenumber,
    velocity, momentum, energy, density (per length) or current (per time)."""
    return value / _unit(scales, kind)


def from_dimensionless(value, kind: str, scales: DerivedScales):
    return value * _unit(scales, kind)


def g1d_dimensionless(params: ExperimentParams, scales: DerivedScales | None = None):
    """Coupling g1d * N in units of hbar omega_x a_x (wavefunction normalised to 1)."""
    scales = scales or derive_scales(params)
    return params.g1d * params.n_atoms / (HBAR * params.omega_x * scales.a_x)


# ---------------------------------------------------------------- config files

PARAM_KEYS = {f.name for f in fields(ExperimentParams)}

SCENARIO_DEFAULTS = {
    "regime": "noninteracting",
    "alpha": "3.0",
    "varphi": "0.0",
    "grid_points": "4096",
    "grid_half_widths": "5.0",
    "center_window": "0.1",
    "guard_ratio": "2.0",
    "hierarchy_margin": "2.0",
    "oracle_points": "8192",
    "oracle_dt": "1e-3",
}


def parse_flat(text: str) -> dict[str, str]:
    """Parse ``key = value`` lines (``#`` comments) into a dict of strings."""
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    cp.optionxform = str
    try:
        cp.read_string("[scenario]\n" + text)
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from exc
    return dict(cp["scenario"])


def apply_overrides(values: dict[str, str], overrides) -> dict[str, str]:
    """Apply ``key=value`` strings on top of ``values`` (overrides win)."""
    out = dict(values)
    for item in overrides or ():
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not of the form key=value")
        key, val = item.split("=", 1)
        out[key.strip()] = val.strip()
    return out


def params_from_mapping(values: dict[str, str]) -> ExperimentParams:
    kw = {}
    if "species" in values:
        name = values["species"]
        if name not in SPECIES:
            raise ConfigError(f"unknown species {name!r}; known: {sorted(SPECIES)}")
        kw["atom_mass"] = SPECIES[name] * AMU
    if "atom_mass_amu" in values:
        kw["atom_mass"] = float(values["atom_mass_amu"]) * AMU
    for key in PARAM_KEYS:
        if key in values and values[key] != "":
            try:
                kw[key] = float(values[key])
            except ValueError as exc:
                raise ConfigError(f"{key}: cannot parse {values[key]!r} as a number") from exc
    missing = {"atom_mass", "omega_x", "omega_perp", "shift_d", "expansion_time_t", "sigma_r"} - kw.keys()
    if missing:
        raise ConfigError(f"missing required keys: {sorted(missing)}")
    return ExperimentParams(**kw)


def load_scenario_values(path=None, overrides=()) -> dict[str, str]:
    values = dict(SCENARIO_DEFAULTS)
    if path is not None:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        values.update(parse_flat(text))
    return apply_overrides(values, overrides)


def bundled_config(name="li7.cfg") -> Path:
    return Path(__file__).with_name("data") / name


def with_changes(params: ExperimentParams, **changes) -> ExperimentParams:
    return replace(params, **changes)
