"""Post-Bragg superposition: density, current, eta and the critical density.

After the pulse the wavefunction is psi(x,t) (A1 + A2 exp[i(qx + varphi)]).
With psi = phi exp(i theta), in the quantum regime (eta = 1 + 2 theta'/q > 0)
the current is negative exactly where the density drops below

    rho_crit = q / (q + 2 theta') |phi|^2 (A1^2 - A2^2).

All quantities are dimensionless (hbar = m = omega_x = 1).
"""
from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .wavepacket import WavepacketState, envelope, phase_gradient

QUANTUM = "quantum"
CLASSICAL = "classical"


@dataclass(frozen=True)
class BraggConfig:
    A1: float
    A2: float
    q: float
    varphi: float = 0.0

    def __post_init__(self):
        if self.A1 < 0 or self.A2 < 0:
            raise ValueError("Bragg amplitudes must be non-negative")
        if not self.q > 0:
            raise ValueError(f"Bragg kick q must be > 0, got {self.q}")
        s = math.hypot(self.A1, self.A2)
        if s == 0:
            raise ValueError("at least one Bragg amplitude must be non-zero")
        object.__setattr__(self, "A1", self.A1 / s)
        object.__setattr__(self, "A2", self.A2 / s)

    @classmethod
    def from_A2(cls, A2, q, varphi=0.0):
        if not 0.0 <= A2 <= 1.0:
            raise ValueError(f"A2 must lie in [0, 1], got {A2}")
        return cls(math.sqrt(1.0 - A2 * A2), A2, q, varphi)

    @classmethod
    def from_alpha(cls, alpha, k1, A2=None, varphi=0.0):
        """Kick q = alpha k1; A2 defaults to the amplitude that maximises backflow."""
        if A2 is None:
            from .design import optimal_A2

            A2 = optimal_A2(alpha)
        return cls.from_A2(A2, alpha * k1, varphi)

    @property
    def population_transfer(self):
        return self.A2**2

    @property
    def wavelength(self):
        return 2.0 * math.pi / self.q


def _fringe(x, bragg):
    return np.cos(bragg.q * np.asarray(x, dtype=float) + bragg.varphi)


def total_density(x, wp: WavepacketState, bragg: BraggConfig):
    c = _fringe(x, bragg)
    return envelope(x, wp) ** 2 * (bragg.A1**2 + bragg.A2**2 + 2.0 * bragg.A1 * bragg.A2 * c)


def total_current(x, wp: WavepacketState, bragg: BraggConfig):
    """|phi|^2 [q(A2^2 + A1A2 cos) + theta'(A1^2 + A2^2 + 2 A1A2 cos)]."""
    A1, A2, q = bragg.A1, bragg.A2, bragg.q
    c = _fringe(x, bragg)
    grad = phase_gradient(x, wp)
    return envelope(x, wp) ** 2 * (q * (A2 * A2 + A1 * A2 * c) + grad * (A1 * A1 + A2 * A2 + 2 * A1 * A2 * c))


def total_current_from_density(x, wp: WavepacketState, bragg: BraggConfig):
    """Same current written as theta' rho + (q/2)[rho + |phi|^2 (A2^2 - A1^2)]."""
    rho = total_density(x, wp, bragg)
    env2 = envelope(x, wp) ** 2
    return phase_gradient(x, wp) * rho + 0.5 * bragg.q * (rho + env2 * (bragg.A2**2 - bragg.A1**2))


def eta(x, wp: WavepacketState, bragg: BraggConfig):
    return 1.0 + 2.0 * phase_gradient(x, wp) / bragg.q


def critical_density(x, wp: WavepacketState, bragg: BraggConfig):
    """Critical density; NaN where eta <= 0 (classical region).

    With A2 > A1 the threshold is negative: the density can never fall below
    it, so backflow cannot be signalled there.
    """
    grad = phase_gradient(x, wp)
    q = bragg.q
    with np.errstate(divide="ignore", invalid="ignore"):
        crit = q / (q + 2.0 * grad) * envelope(x, wp) ** 2 * (bragg.A1**2 - bragg.A2**2)
    return np.where(1.0 + 2.0 * grad / q > 0, crit, np.nan)


def threshold_usable(bragg: BraggConfig):
    """False when A2 >= A1, i.e. the critical density is <= 0 everywhere."""
    return bragg.A1 > bragg.A2


@dataclass
class FieldProfile:
    x: np.ndarray
    rho: np.ndarray
    current: np.ndarray
    rho_crit: np.ndarray
    eta: np.ndarray
    envelope_sq: np.ndarray
    grad_theta: np.ndarray
    center: float
    width: float
    q: float

    @property
    def dx(self):
        return float(self.x[1] - self.x[0])

    @property
    def quantum(self):
        return self.eta > 0

    @property
    def regime(self):
        return np.where(self.quantum, QUANTUM, CLASSICAL)

    @property
    def negative_threshold(self):
        return bool(np.any(self.rho_crit[np.isfinite(self.rho_crit)] < 0))


class GridError(ValueError):
    pass


def profile(wp: WavepacketState, bragg: BraggConfig, n_points=4096, half_widths=5.0,
            refine=True) -> FieldProfile:
    """Sample all fields on a uniform grid of +-``half_widths`` packet widths.

    With ``refine`` the point count is doubled until the spacing resolves the
    fringes (dx <= lambda/40). Without it a spacing above lambda/8 is an error.
    """
    half = half_widths * wp.width
    lam = bragg.wavelength
    n = int(n_points)
    dx = 2.0 * half / (n - 1)
    if dx > lam / 40.0:
        if refine:
            while 2.0 * half / (n - 1) > lam / 40.0:
                n *= 2
        elif dx > lam / 8.0:
            raise GridError(f"grid spacing {dx:.4g} exceeds lambda/8 = {lam / 8:.4g}; fringes unresolved")
        else:
            warnings.warn(f"grid spacing {dx:.4g} is coarser than lambda/40", stacklevel=2)
    x = np.linspace(wp.center - half, wp.center + half, n)
    return FieldProfile(
        x=x,
        rho=total_density(x, wp, bragg),
        current=total_current(x, wp, bragg),
        rho_crit=critical_density(x, wp, bragg),
        eta=eta(x, wp, bragg),
        envelope_sq=envelope(x, wp) ** 2,
        grad_theta=phase_gradient(x, wp),
        center=wp.center,
        width=wp.width,
        q=bragg.q,
    )


# --------------------------------------------------------------- analysis


@dataclass(frozen=True)
class BackflowWindow:
    start: float
    end: float
    x_deepest: float
    depth: float  # most negative current inside the window

    @property
    def center(self):
        return 0.5 * (self.start + self.end)


def backflow_windows(prof: FieldProfile, rel_floor=0.0, include_negative_momenta=False):
    """Contiguous runs of J < 0 against a positive local phase gradient.

    Where the single-packet phase gradient is itself negative (the far
    trailing tail, beyond x_minus) the flux is negative because the packet
    carries negative momenta there; that is not interference backflow and is
    excluded unless ``include_negative_momenta`` is set.

    ``rel_floor`` drops windows whose depth is smaller than that fraction of
    max|J| (numerical dust in the far tails).
    """
    neg = prof.current < 0
    if not include_negative_momenta:
        neg &= prof.grad_theta > 0
    if not neg.any():
        return []
    jmax = float(np.max(np.abs(prof.current)))
    edges = np.flatnonzero(np.diff(neg.astype(np.int8)))
    starts = list(edges[~neg[edges]] + 1)
    ends = list(edges[neg[edges]])
    if neg[0]:
        starts.insert(0, 0)
    if neg[-1]:
        ends.append(neg.size - 1)
    out = []
    for i0, i1 in zip(starts, ends):
        seg = prof.current[i0:i1 + 1]
        k = int(np.argmin(seg))
        if -seg[k] < rel_floor * jmax:
            continue
        out.append(BackflowWindow(float(prof.x[i0]), float(prof.x[i1]), float(prof.x[i0 + k]), float(seg[k])))
    return out


def _parabolic_vertex(x, y, i):
    y0, y1, y2 = y[i - 1], y[i], y[i + 1]
    den = y0 - 2.0 * y1 + y2
    if den == 0:
        return x[i], y1
    off = 0.5 * (y0 - y2) / den
    h = x[1] - x[0]
    return x[i] + off * h, y1 - 0.25 * (y0 - y2) * off


def local_extrema(x, y, kind="min"):
    """Interior local minima (or maxima), refined by a parabola through three points."""
    y = np.asarray(y)
    s = y if kind == "min" else -y
    idx = np.flatnonzero((s[1:-1] < s[:-2]) & (s[1:-1] <= s[2:])) + 1
    pts = [_parabolic_vertex(x, y, i) for i in idx]
    return np.array([p[0] for p in pts]), np.array([p[1] for p in pts])


@dataclass(frozen=True)
class CentralValues:
    x_min: float
    rho_min_norm: float
    rho_crit_norm: float
    rho_crit_at_min_norm: float
    rho_max: float
    grad_theta_spread: float


def central_values(prof: FieldProfile, wp: WavepacketState, bragg: BraggConfig, center_window=0.1):
    """Normalised density minimum and critical density at the packet centre.

    ``grad_theta_spread`` is the variation of theta' across +-center_window
    packet widths, a gauge of how well the plane-wave picture holds there.
    Without fringes (A2 = 0) there is no minimum and the minimum fields are NaN.
    """
    rho_max = float(np.max(prof.rho))
    xm, ym = local_extrema(prof.x, prof.rho, "min")
    c = np.array([prof.center])
    crit_c = float(critical_density(c, wp, bragg)[0])
    if xm.size:
        k = int(np.argmin(np.abs(xm - prof.center)))
        x_min, y_min = float(xm[k]), float(ym[k])
        crit_m = float(critical_density(np.array([x_min]), wp, bragg)[0])
    else:
        x_min = y_min = crit_m = math.nan
    w = center_window * prof.width
    g = phase_gradient(np.array([prof.center - w, prof.center + w]), wp)
    return CentralValues(
        x_min=x_min,
        rho_min_norm=y_min / rho_max,
        rho_crit_norm=crit_c / rho_max,
        rho_crit_at_min_norm=crit_m / rho_max,
        rho_max=rho_max,
        grad_theta_spread=float(abs(g[1] - g[0])),
    )


def fringe_spacing(prof: FieldProfile, n_fringes=5):
    """Mean spacing of the density minima nearest the packet centre."""
    xm, _ = local_extrema(prof.x, prof.rho, "min")
    if xm.size < 2:
        return math.nan
    order = np.argsort(np.abs(xm - prof.center))[: n_fringes + 1]
    sel = np.sort(xm[order])
    return float(np.mean(np.diff(sel)))


# --------------------------------------------------------------- CSV

CSV_COLUMNS = ["x_m", "rho_per_m", "J_per_s", "rho_crit_per_m", "eta", "regime"]


def _fmt(v):
    return format(float(v), ".17g")


def write_csv(prof: FieldProfile, path, x_unit=1.0, t_unit=1.0):
    """Write the profile in SI units (x_unit in m, t_unit in s)."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        labels = prof.regime
        for i in range(prof.x.size):
            crit = prof.rho_crit[i]
            w.writerow([
                _fmt(prof.x[i] * x_unit),
                _fmt(prof.rho[i] / x_unit),
                _fmt(prof.current[i] / t_unit),
                "" if not np.isfinite(crit) else _fmt(crit / x_unit),
                _fmt(prof.eta[i]),
                labels[i],
            ])


def read_csv(path):
    """Read a profile CSV back into SI arrays keyed by column name."""
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    out = {c: np.array([float(r[c]) if r[c] != "" else np.nan for r in rows])
           for c in CSV_COLUMNS if c != "regime"}
    out["regime"] = np.array([r["regime"] for r in rows])
    return out
