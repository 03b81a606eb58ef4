"""Quantum backflow in a Bragg-kicked, expanding 1D condensate.

Analytic model of the density and current after the pulse, design and
imaging tools, and a split-step oracle that simulates the whole protocol.
"""
from .config import (
    AMU,
    HBAR,
    ConfigError,
    DerivedScales,
    ExperimentParams,
    derive_scales,
    from_dimensionless,
    to_dimensionless,
)
from .design import F, optimal_A2, optimal_A2_bracketed
from .interference import BraggConfig, FieldProfile, profile
from .kernels import BACKEND
from .scenario import Scenario, load_scenario
from .wavepacket import InitialProfile, Regime, WavepacketState, scaling_evolve

__version__ = "0.1.0"
