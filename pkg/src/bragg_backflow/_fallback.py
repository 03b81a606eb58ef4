"""Pure numpy versions of the compiled kernels (same signatures, same results)."""
import math

import numpy as np


def potential_phase(psi, v, g, half_dt):
    psi *= np.exp(-1j * (v + g * (psi.real**2 + psi.imag**2)) * half_dt)


def potential_decay(psi, v, g, half_dt):
    psi *= np.exp(-(v + g * (psi.real**2 + psi.imag**2)) * half_dt)


def probability_current(psi, dpsi):
    return psi.real * dpsi.imag - psi.imag * dpsi.real


def gaussian_blur(values, dx, sigma, truncate=8.0):
    values = np.asarray(values, dtype=np.float64)
    if sigma <= 0.0:
        return values.copy()
    half = int(math.ceil(truncate * sigma / dx))
    r = np.arange(-half, half + 1) * dx / sigma
    w = np.exp(-0.5 * r * r)
    w /= w.sum()
    full = np.convolve(values, w, mode="full")
    return full[half:half + values.size].copy()
