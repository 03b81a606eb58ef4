"""Analytic-versus-oracle checks run by ``bragg-backflow validate``."""
from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from . import imaging, oracle
from .design import optimal_A2, optimal_A2_bracketed
from .interference import backflow_windows, central_values
from .scenario import Scenario


@dataclass
class Check:
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0


def _run(name, fn):
    t0 = time.perf_counter()
    try:
        passed, detail = fn()
    except Exception as exc:  # a crashing check is a failed check, with its message
        passed, detail = False, f"{type(exc).__name__}: {exc}"
    return Check(name, bool(passed), detail, time.perf_counter() - t0)


def dipole_convergence(dt, n_points=1024, shift_d=2.0, duration=math.pi / 2):
    """Errors of the stepped dipole oscillation at dt and dt/2 against a
    Richardson reference built from dt/4 and dt/8."""
    grid = oracle.GridSpec.centered(n_points, 24.0, 1.0)
    gs = oracle.ground_state(grid, oracle.Harmonic(0.0), 0.0)
    runs = [oracle.evolve(gs, duration, oracle.Harmonic(shift_d), dt=dt / 2**j).psi for j in range(4)]
    ref = runs[3] + (runs[3] - runs[2]) / 3.0
    e1 = float(np.sqrt(np.sum(np.abs(runs[0] - ref) ** 2) * grid.dx))
    e2 = float(np.sqrt(np.sum(np.abs(runs[1] - ref) ** 2) * grid.dx))
    return e1, e2


def run_checks(scn: Scenario, quick=False):
    n_oracle = 1024 if quick else scn.oracle_points
    checks = []

    def optimum():
        a, b = optimal_A2(scn.alpha), optimal_A2_bracketed(scn.alpha)
        return abs(a - b) < 1e-10, f"closed form {a:.12f}, bracketed {b:.12f}"

    checks.append(_run("optimal_amplitude_two_paths", optimum))

    prof = scn.field_profile()

    def equivalence():
        q = prof.quantum
        bad = np.count_nonzero((prof.rho[q] < prof.rho_crit[q]) != (prof.current[q] < 0))
        return bad == 0, f"{bad} mismatches over {np.count_nonzero(q)} quantum-regime points"

    checks.append(_run("density_threshold_equivalence", equivalence))

    def central():
        cv = central_values(prof, scn.wavepacket, scn.bragg, scn.center_window)
        return (cv.rho_min_norm < cv.rho_crit_norm,
                f"rho_min/rho_max={cv.rho_min_norm:.4f}, rho_crit/rho_max={cv.rho_crit_norm:.4f}")

    checks.append(_run("central_backflow", central))

    def windows():
        w = backflow_windows(prof)
        return len(w) > 0, f"{len(w)} backflow windows"

    checks.append(_run("backflow_windows_present", windows))

    def resolution():
        a = imaging.critical_resolution(scn.bragg, scn.alpha)
        b = imaging.critical_resolution_bisect(scn.bragg, scn.alpha)
        rel = abs(a - b) / a
        return rel < 1e-6, f"sigma_r* = {a * scn.scales.a_x * 1e6:.4f} um (relative path gap {rel:.2e})"

    checks.append(_run("critical_resolution_two_paths", resolution))

    def convergence():
        e1, e2 = dipole_convergence(scn.oracle_dt)
        ratio = e1 / e2
        return 3.0 < ratio < 5.0, f"error ratio on halving dt = {ratio:.3f} (expected ~4); errors {e1:.3g}, {e2:.3g}"

    checks.append(_run("oracle_second_order_convergence", convergence))

    result = {}

    def protocol():
        spec = scn.protocol_spec(n_points=n_oracle)
        res = oracle.run_protocol(spec)
        result["res"] = res
        cmp = oracle.compare_with_analytic(res, scn.wavepacket, scn.bragg)
        ok = cmp.density_linf < 0.01 and cmp.current_linf < 0.02
        return ok, f"density L_inf {cmp.density_linf:.2e} (<1e-2), current {cmp.current_linf:.2e} (<2e-2)"

    checks.append(_run("oracle_protocol_vs_analytic", protocol))

    def norm():
        res = result.get("res")
        if res is None:
            return False, "protocol run unavailable"
        drift = abs(res.expanded.norm - res.ground.norm)
        return drift < 1e-9, f"norm drift {drift:.2e}"

    checks.append(_run("oracle_norm_conservation", norm))

    def continuity():
        res = result.get("res")
        if res is None:
            return False, "protocol run unavailable"
        r = oracle.continuity_residual(res.kicked)
        return r < 1e-4, f"continuity residual {r:.2e} of max|drho/dt|"

    checks.append(_run("oracle_continuity", continuity))
    return checks
