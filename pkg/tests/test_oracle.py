import math

import numpy as np
import pytest

from bragg_backflow import kernels, oracle
from bragg_backflow.interference import BraggConfig
from bragg_backflow.validate import dipole_convergence
from bragg_backflow.wavepacket import envelope, phase_gradient


@pytest.fixture(scope="module")
def grid():
    return oracle.GridSpec.centered(1024, 24.0)


@pytest.fixture(scope="module")
def gs(grid):
    return oracle.ground_state(grid, oracle.Harmonic(0.0), 0.0)


@pytest.fixture(scope="module")
def li7_run(li7):
    return oracle.run_protocol(li7.protocol_spec(n_points=4096, fast_dipole=True))


def variance(state):
    x, rho = state.x, state.density
    n = rho.sum()
    m = (x * rho).sum() / n
    return ((x - m) ** 2 * rho).sum() / n


def mean_k(state):
    k, nk = oracle.momentum_distribution(state)
    return float((k * nk).sum() / nk.sum())


def test_grid_validation():
    with pytest.raises(ValueError):
        oracle.GridSpec(1000, -1.0, 1.0)
    with pytest.raises(ValueError):
        oracle.GridSpec(8, -1.0, 1.0)
    g = oracle.GridSpec.centered(64, 10.0)
    assert g.x.size == 64 and g.dx == pytest.approx(10.0 / 64)


def test_ground_state_is_gaussian(gs):
    exact = math.pi ** -0.25 * np.exp(-0.5 * gs.x**2)
    assert np.max(np.abs(np.abs(gs.psi) - exact)) < 1e-8
    assert gs.norm == pytest.approx(1.0, abs=1e-12)
    assert oracle.energy(gs) == pytest.approx(0.5, abs=1e-9)


def test_ground_state_is_stationary(gs):
    # the Strang propagator's own stationary state differs by O(dt^2)
    later = oracle.evolve(gs, 2.0, dt=1e-3)
    np.testing.assert_allclose(later.density, gs.density, atol=1e-6)
    assert np.max(np.abs(later.psi - gs.psi * np.exp(-1j * 0.5 * 2.0))) < 1e-5


def test_thomas_fermi_ground_state():
    g = 200.0
    grid = oracle.GridSpec.centered(1024, 24.0)
    st = oracle.ground_state(grid, oracle.Harmonic(0.0), g)
    mu = (3 * g / (4 * math.sqrt(2))) ** (2 / 3)
    R = math.sqrt(2 * mu)
    inner = np.abs(st.x) < 0.9 * R
    tf = (mu - 0.5 * st.x[inner] ** 2) / g
    rel = np.linalg.norm(st.density[inner] - tf) / np.linalg.norm(tf)
    assert rel < 0.02


def test_dipole_oscillation_matches_coherent_state(gs):
    d, t1 = 2.0, math.pi / 2
    num = oracle.evolve(gs, t1, oracle.Harmonic(d), dt=1e-3)
    exact = oracle.coherent_displacement(gs, d, t1)
    x = num.x
    assert (x * num.density).sum() * num.grid.dx == pytest.approx(d * (1 - math.cos(t1)), abs=1e-6)
    assert mean_k(num) == pytest.approx(d * math.sin(t1), abs=1e-6)
    np.testing.assert_allclose(num.density, exact.density, atol=1e-6)


def test_free_expansion_width():
    t = 3.0
    wide = oracle.GridSpec.centered(2048, 60.0)
    out = oracle.evolve(oracle.ground_state(wide, oracle.Harmonic(0.0)), t, oracle.Free(), dt=1e-3)
    assert variance(out) == pytest.approx(0.5 * (1 + t * t), rel=1e-3)


def test_unitarity_and_energy(gs):
    moved = oracle.coherent_displacement(gs, 1.5, 0.7)
    e0 = oracle.energy(moved, oracle.Harmonic(0.0))
    out = oracle.evolve(moved, 2 * math.pi, oracle.Harmonic(0.0), dt=1e-3)
    assert abs(out.norm - moved.norm) < 1e-12
    assert abs(oracle.energy(out) - e0) / e0 < 1e-8


def test_second_order_convergence():
    e1, e2 = dipole_convergence(1e-2)
    assert e1 / e2 == pytest.approx(4.0, abs=0.3)


def test_dt_precondition(gs):
    with pytest.raises(ValueError):
        oracle.evolve(gs, 1.0, dt=0.02)


def test_boundary_error():
    grid = oracle.GridSpec.centered(256, 6.0)
    st = oracle.SimState(grid, np.exp(-0.5 * (grid.x / 2.0) ** 2).astype(complex), 0.0, oracle.Free())
    with pytest.raises(oracle.BoundaryError):
        oracle.check_boundary(st)


def test_plane_wave_current():
    grid = oracle.GridSpec.centered(256, 2 * math.pi * 10)
    k = 0.7
    psi = np.exp(1j * k * grid.x)
    st = oracle.SimState(grid, psi, 0.0, oracle.Free())
    np.testing.assert_allclose(oracle.measure_current(st), k, rtol=1e-12)


def test_kick_without_second_order_is_identity(gs):
    out = oracle.bragg_kick(gs, BraggConfig.from_A2(0.0, 5.0), 0.3)
    np.testing.assert_array_equal(out.psi, gs.psi)


def test_kick_momentum_weights(li7, li7_run):
    st = li7_run.kicked
    b = li7.bragg
    k, nk = oracle.momentum_distribution(st)
    dk = k[1] - k[0]
    k1 = li7_run.spec.k1
    w1 = nk[np.abs(k - k1) < b.q / 2].sum() * dk
    w2 = nk[np.abs(k - k1 - b.q) < b.q / 2].sum() * dk
    assert w1 == pytest.approx(b.A1**2, abs=0.01)
    assert w2 == pytest.approx(b.A2**2, abs=0.01)


def test_expanded_packet_matches_scaling_solution(li7, li7_run):
    st = li7_run.expanded
    wp = li7.wavepacket
    xr = st.x - li7_run.x_origin
    env = envelope(xr, wp)
    body = env**2 > 0.01 * env.max() ** 2
    assert np.max(np.abs(np.abs(st.psi[body]) - env[body])) / env.max() < 0.005
    grad = oracle.measure_current(st)[body] / st.density[body]
    ref = phase_gradient(xr[body], wp)
    assert np.max(np.abs(grad - ref)) / np.max(np.abs(ref)) < 0.01


def test_protocol_matches_analytic(li7, li7_run):
    cmp = oracle.compare_with_analytic(li7_run, li7.wavepacket, li7.bragg)
    assert cmp.density_linf < 1e-4
    assert cmp.current_linf < 1e-4
    assert abs(li7_run.kicked.norm - li7_run.ground.norm) < 1e-9
    assert oracle.continuity_residual(li7_run.kicked) < 1e-4


def test_stepped_dipole_agrees_with_fast_path(li7):
    kw = dict(n_points=1024, dt=1e-3, with_bragg=False)
    fast = oracle.run_protocol(li7.protocol_spec(fast_dipole=True, **kw))
    slow = oracle.run_protocol(li7.protocol_spec(fast_dipole=False, **kw))
    np.testing.assert_allclose(slow.released.density, fast.released.density, atol=1e-6)


def test_checkpoint_round_trip(tmp_path, gs):
    st = oracle.evolve(gs, 0.5, oracle.Harmonic(1.0), dt=1e-3)
    path = tmp_path / "s.ckpt"
    oracle.save_checkpoint(st, path)
    back = oracle.load_checkpoint(path)
    np.testing.assert_array_equal(back.psi, st.psi)
    assert back.time == st.time and back.grid == st.grid
    assert isinstance(back.potential, oracle.Harmonic) and back.potential.center == 1.0
    bad = tmp_path / "bad.ckpt"
    bad.write_bytes(b"X" * 200)
    with pytest.raises(ValueError):
        oracle.load_checkpoint(bad)


def test_snapshot_columns(tmp_path, gs):
    oracle.write_snapshot(gs, tmp_path / "s.csv")
    data = np.genfromtxt(tmp_path / "s.csv", delimiter=",", names=True)
    assert list(data.dtype.names) == oracle.SNAPSHOT_COLUMNS
    np.testing.assert_array_equal(data["rho"], gs.density)


@pytest.mark.skipif(not kernels.compiled_available(), reason="compiled kernels not built")
def test_backends_agree(gs):
    moved = oracle.coherent_displacement(gs, 1.0, 0.3)
    a = oracle.evolve(moved, 0.5, oracle.Harmonic(0.0), dt=1e-3, backend="python")
    b = oracle.evolve(moved, 0.5, oracle.Harmonic(0.0), dt=1e-3, backend="cython")
    np.testing.assert_allclose(a.psi, b.psi, atol=1e-12)
