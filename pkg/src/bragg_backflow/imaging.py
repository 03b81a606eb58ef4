"""Finite imaging resolution.

A Gaussian point-spread function of standard deviation sigma_r multiplies
the fringe term by zeta = exp(-q^2 sigma_r^2 / 2). Backflow is observable
when the blurred, normalised density minimum stays below the normalised
critical density.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import bisect

from . import kernels
from .interference import BraggConfig, FieldProfile

# sentinels returned by critical_resolution
ALWAYS_DETECTABLE = math.inf
NEVER_DETECTABLE = 0.0


def zeta(q, sigma_r):
    return math.exp(-0.5 * (q * sigma_r) ** 2)


def observed_min_norm(bragg: BraggConfig, zeta_value, envelope_ratio=1.0):
    """Blurred density at a fringe minimum over the neighbouring maximum.

    ``envelope_ratio`` is |phi(x_min)|^2 / |phi_max|^2 (1 at the centre).
    """
    if not 0.0 < zeta_value <= 1.0:
        raise ValueError(f"zeta must lie in (0, 1], got {zeta_value}")
    s = bragg.A1**2 + bragg.A2**2
    a = 2.0 * zeta_value * bragg.A1 * bragg.A2
    return envelope_ratio * (s - a) / (s + a)


def critical_norm(bragg: BraggConfig, alpha, envelope_ratio=1.0):
    """Critical density over the maximal density near the centre (theta' ~ k1)."""
    return envelope_ratio * alpha / (alpha + 2.0) * (bragg.A1 - bragg.A2) / (bragg.A1 + bragg.A2)


def critical_zeta(bragg: BraggConfig, alpha):
    """zeta at which the observed minimum equals the critical density."""
    r = critical_norm(bragg, alpha)
    s = bragg.A1**2 + bragg.A2**2
    a = bragg.A1 * bragg.A2
    if a == 0:
        return math.inf
    return s * (1.0 - r) / (2.0 * a * (1.0 + r))


def critical_resolution(bragg: BraggConfig, alpha, q=None):
    """Largest sigma_r (same length unit as 1/q) that still shows backflow.

    Returns ``ALWAYS_DETECTABLE`` (inf) when even fully washed-out fringes sit
    below threshold, and ``NEVER_DETECTABLE`` (0) when perfect imaging is not
    enough. In both cases ``sigma_r < result`` remains the detection test.
    """
    q = bragg.q if q is None else q
    if bragg.A1 <= bragg.A2:
        return NEVER_DETECTABLE
    z = critical_zeta(bragg, alpha)
    if z <= 0.0:
        return ALWAYS_DETECTABLE
    if z >= 1.0:
        return NEVER_DETECTABLE
    return math.sqrt(-2.0 * math.log(z)) / q


def critical_resolution_bisect(bragg: BraggConfig, alpha, q=None, xtol=1e-15):
    """Same crossing found by bisection on sigma_r."""
    q = bragg.q if q is None else q
    r = critical_norm(bragg, alpha)

    def gap(sigma):
        return observed_min_norm(bragg, zeta(q, sigma)) - r

    lo = 0.0
    if gap(lo) >= 0:
        return NEVER_DETECTABLE
    hi = 1.0 / q
    while gap(hi) < 0:
        hi *= 2.0
        if hi * q > 40.0:
            return ALWAYS_DETECTABLE
    return bisect(gap, lo, hi, xtol=xtol * hi, rtol=4 * np.finfo(float).eps, maxiter=400)


@dataclass(frozen=True)
class DetectabilityReport:
    sigma_r: float
    zeta: float
    observed_min_norm: float
    critical_norm: float
    detectable: bool
    sigma_r_critical: float

    def as_keyvalue(self, length_unit=1.0):
        rows = [
            ("sigma_r_m", self.sigma_r * length_unit),
            ("zeta", self.zeta),
            ("observed_min_norm", self.observed_min_norm),
            ("critical_norm", self.critical_norm),
            ("detectable", int(self.detectable)),
            ("sigma_r_critical_m", self.sigma_r_critical * length_unit),
        ]
        return "".join(f"{k} = {format(float(v), '.17g')}\n" for k, v in rows)

    def csv_row(self, length_unit=1.0):
        return [format(self.sigma_r * length_unit, ".17g"), format(self.zeta, ".17g"),
                format(self.observed_min_norm, ".17g"), format(self.critical_norm, ".17g"),
                str(int(self.detectable))]


DETECTABILITY_COLUMNS = ["sigma_r_m", "zeta", "observed_min_norm", "critical_norm", "detectable"]


def detectability(bragg: BraggConfig, alpha, sigma_r) -> DetectabilityReport:
    """Verdict at resolution ``sigma_r`` (dimensionless length, same unit as 1/q)."""
    z = zeta(bragg.q, sigma_r)
    r = critical_norm(bragg, alpha)
    if z > 0:
        obs = observed_min_norm(bragg, z)
    else:
        obs = 1.0
    return DetectabilityReport(sigma_r, z, obs, r, obs < r, critical_resolution(bragg, alpha))


def blur_profile(prof: FieldProfile, sigma_r, backend=None) -> FieldProfile:
    """Return a copy whose density is convolved with a Gaussian PSF.

    Only ``rho`` is changed; the grid must sample the PSF (dx < sigma_r/4).
    Outside the grid the density is taken as zero.
    """
    if sigma_r < 0:
        raise ValueError("sigma_r must be >= 0")
    if sigma_r == 0:
        return replace(prof, rho=prof.rho.copy())
    if prof.dx >= sigma_r / 4.0:
        raise ValueError(f"grid spacing {prof.dx:.4g} too coarse for sigma_r={sigma_r:.4g} (need < sigma_r/4)")
    k = kernels if backend is None else kernels.backend_module(backend)
    return replace(prof, rho=k.gaussian_blur(np.ascontiguousarray(prof.rho), prof.dx, sigma_r))


def measured_central_contrast(prof: FieldProfile):
    """(x_min, rho_min/rho_max) using the fringe minimum nearest the centre and
    the global maximum, as a ratio measurement would."""
    from .interference import local_extrema

    xm, ym = local_extrema(prof.x, prof.rho, "min")
    k = int(np.argmin(np.abs(xm - prof.center)))
    return float(xm[k]), float(ym[k]) / float(np.max(prof.rho))
