"""Acceptance criteria, each at its stated tolerance.

Every test records a one-line verdict that is printed in the terminal
summary, whether it passes or fails.
"""
import math
import warnings

import numpy as np
import pytest
from scipy.optimize import OptimizeWarning, curve_fit

from bragg_backflow import imaging, oracle
from bragg_backflow.design import optimal_A2
from bragg_backflow.interference import BraggConfig, backflow_windows, central_values, local_extrema, profile
from bragg_backflow.wavepacket import InitialProfile, Regime, make_wavepacket, scaling_evolve


def test_criterion_1_optimal_amplitude(verdict):
    A2 = optimal_A2(3.0)
    transfer = A2 * A2
    ok = abs(A2 - 0.49) <= 0.005 and abs(transfer - 0.24) <= 0.01
    assert verdict(1, ok, f"optimal A2(alpha=3) = {A2:.5f} (0.49 +- 0.005), transfer = {transfer:.4f} (0.24 +- 0.01)")


def test_criterion_2_density_contrast(verdict, li7, li7_profile):
    cv = central_values(li7_profile, li7.wavepacket, li7.bragg, li7.center_window)
    ok = abs(cv.rho_min_norm - 0.078) <= 0.005 and abs(cv.rho_crit_norm - 0.168) <= 0.005
    assert verdict(2, ok, f"rho_min/rho_max = {cv.rho_min_norm:.5f} (0.078 +- 0.005), "
                          f"rho_crit/rho_max = {cv.rho_crit_norm:.5f} (0.168 +- 0.005)")


def test_criterion_3_derived_scales(verdict, li7):
    a_x_um = li7.scales.a_x * 1e6
    v1_mm = li7.scales.v1 * 1e3
    ok = abs(a_x_um - 38.0) <= 0.5 and abs(v1_mm - 0.5) <= 0.01
    assert verdict(3, ok, f"a_x = {a_x_um:.4f} um (38 +- 0.5), v1 = {v1_mm:.5f} mm/s (0.5 +- 0.01)")


def test_criterion_4_critical_resolution(verdict, li7):
    closed = imaging.critical_resolution(li7.bragg, li7.alpha)
    bis = imaging.critical_resolution_bisect(li7.bragg, li7.alpha)
    um = closed * li7.scales.a_x * 1e6
    rel = abs(closed - bis) / closed
    ok = 2.9 <= um <= 4.3 and rel < 1e-6
    assert verdict(4, ok, f"sigma_r* = {um:.4f} um (in [2.9, 4.3]), closed form vs bisection {rel:.1e} (< 1e-6)")


def test_criterion_5_backflow_geometry(verdict, li7, li7_profile):
    prof = li7_profile
    lam = li7.bragg.wavelength
    wins = backflow_windows(prof)
    xm, _ = local_extrema(prof.x, prof.rho, "min")
    body = [w for w in wins if abs(w.center - prof.center) < 3 * prof.width]
    on_minima = all(np.min(np.abs(xm - w.center)) < 0.05 * lam for w in body)
    centers = np.sort([w.center for w in body])
    spacing = float(np.median(np.diff(centers))) * li7.scales.a_x
    spacing_ok = abs(spacing - 37.8e-6) <= 0.01 * 37.8e-6
    # "deepest nearest the centre": the deepest window sits in the central
    # fringe pair (within one fringe spacing of the centre) and depth falls
    # monotonically moving outward on either side
    deepest = min(wins, key=lambda w: w.depth)
    off = (deepest.center - prof.center) / lam
    central = abs(off) <= 1.0
    monotone = True
    for side in (-1, 1):
        s = sorted((w for w in body if side * (w.center - deepest.center) > 0),
                   key=lambda w: abs(w.center - deepest.center))
        d = [w.depth for w in s]
        monotone &= all(b > a for a, b in zip(d, d[1:]))
    ok = bool(wins) and on_minima and spacing_ok and central and monotone
    assert verdict(5, ok, f"{len(wins)} windows, on density minima: {on_minima}, "
                          f"spacing {spacing * 1e6:.3f} um (37.8 +- 1%), deepest at {off:+.2f} fringes "
                          f"from centre, depth decreasing outward: {monotone}")


@pytest.mark.slow
def test_criterion_6_oracle_equivalence(verdict, li7):
    spec = li7.protocol_spec(n_points=8192)
    res = oracle.run_protocol(spec)
    cmp = oracle.compare_with_analytic(res, li7.wavepacket, li7.bragg)
    cont = oracle.continuity_residual(res.kicked)
    ok = cmp.density_linf < 0.01 and cmp.current_linf < 0.02 and cont < 1e-4
    assert verdict(6, ok, f"8192 points: density L_inf {cmp.density_linf:.2e} (< 1e-2), "
                          f"current {cmp.current_linf:.2e} of max|J| (< 2e-2), continuity {cont:.2e} (< 1e-4)")


def _fitted_width(x, rho):
    def gauss(x, a, m, s):
        return a * np.exp(-0.5 * ((x - m) / s) ** 2)

    with warnings.catch_warnings():
        # an essentially exact fit leaves the covariance undetermined
        warnings.simplefilter("ignore", OptimizeWarning)
        p, _ = curve_fit(gauss, x, rho, p0=(rho.max(), x[np.argmax(rho)], 1.0))
    return abs(p[2])


@pytest.mark.slow
def test_criterion_7_scaling_laws(verdict):
    grid = oracle.GridSpec.centered(4096, 160.0)
    gs = oracle.ground_state(grid, oracle.Harmonic(0.0))
    w0 = _fitted_width(gs.x, gs.density)
    worst = 0.0
    st = gs
    for t in (1.0, 2.0, 2 * math.pi):
        st = oracle.evolve(st, t - st.time, oracle.Free())
        ratio = _fitted_width(st.x, st.density) / w0
        worst = max(worst, abs(ratio / math.sqrt(1 + t * t) - 1))
    free_ok = worst < 1e-3
    tf = scaling_evolve(Regime.THOMAS_FERMI, 50.0)
    tf_ratio = tf.b / (math.sqrt(2) * 50.0)
    tf_ok = abs(tf_ratio - 1) <= 0.02
    assert verdict(7, free_ok and tf_ok,
                   f"free expansion width error {worst:.2e} (< 1e-3); TF b/(sqrt2 t) at t=50 = {tf_ratio:.4f} "
                   f"(1 +- 0.02; bdot/sqrt2 = {tf.b_dot / math.sqrt(2):.4f})")


def test_criterion_8_regime_classification(verdict):
    rng = np.random.default_rng(20240601)
    exceptions = checked = 0
    for i in range(10):
        ini = InitialProfile.thomas_fermi(rng.uniform(5, 300)) if i % 2 else InitialProfile.gaussian()
        wp = make_wavepacket(ini, rng.uniform(0.5, 6.0), rng.uniform(0.0, 15.0))
        alpha = rng.uniform(0.3, 10.0)
        b = BraggConfig.from_A2(rng.uniform(0.05, 0.95), alpha * wp.k1, varphi=rng.uniform(-math.pi, math.pi))
        prof = profile(wp, b, n_points=4096)
        q = prof.eta > 0
        checked += int(q.sum())
        exceptions += int(np.count_nonzero((prof.rho[q] < prof.rho_crit[q]) != (prof.current[q] < 0)))
    assert verdict(8, exceptions == 0, f"{exceptions} exceptions over {checked} quantum-regime points in 10 scenarios")


def _body_negative_flux(state):
    J = oracle.measure_current(state)
    body = state.density > 0.05 * state.density.max()
    return int(np.count_nonzero(J[body] < 0))


@pytest.mark.slow
def test_criterion_9_classical_backflow(verdict, li7):
    d = li7.shift_d
    g = 200.0
    R_tf = InitialProfile.thomas_fermi(g).width_R0
    tf_spec = oracle.ProtocolSpec(shift_d=d, t1=math.pi / 2, t_expand=li7.t_expand, bragg=None, g=g,
                                  n_points=8192, dt=1e-3)
    tf_neg = _body_negative_flux(oracle.run_protocol(tf_spec).expanded)
    gauss_neg = _body_negative_flux(
        oracle.run_protocol(li7.protocol_spec(n_points=8192, with_bragg=False)).expanded)
    ok = R_tf > d / math.sqrt(2) and tf_neg > 0 and gauss_neg == 0
    assert verdict(9, ok, f"TF g={g:g} (R_TF={R_tf:.3f} > d/sqrt2={d / math.sqrt(2):.3f}): {tf_neg} negative-flux "
                          f"points in the packet body; guarded non-interacting: {gauss_neg}")
