import numpy as np
import pytest

from conftest import taylor_expm
from ptring import (
    ConfigurationError,
    DomainError,
    HamiltonianMatrix,
    RingConfig,
    WaveState,
    build_hamiltonian,
    diagonalize,
    evolve,
    make_propagator,
    mirror_config,
    mirror_site,
    momentum_matrix_element,
    reciprocal_intensity,
    steady_state_momentum,
)
from ptring.dynamics import momentum_grid

# measured once at T = 500, dt = 0.05 and frozen
P_BAR_CHIRALITY_RING_QUARTER = 0.21241894183716944


def chirality_ring(d=16, gamma=0.0):
    return RingConfig(n_sites=32, sink_site=d, t_inner=1.0, t_outer=0.5, gamma=gamma)


def plane_wave(n, q):
    return np.exp(1j * q * np.arange(1, n + 1)) / np.sqrt(n)


# --- make_propagator -------------------------------------------------------------


def test_hermitian_propagator_is_unitary():
    u = make_propagator(build_hamiltonian(chirality_ring()), 0.05)
    assert u.method == "spectral"
    assert np.abs(u.matrix.conj().T @ u.matrix - np.eye(32)).max() <= 1e-10


@pytest.mark.parametrize("gamma", [0.0, 0.3, 1.5])
def test_propagator_matches_taylor_series(gamma):
    c = RingConfig(n_sites=3, sink_site=2, t_inner=1.0, t_outer=1.0, gamma=gamma)
    h = build_hamiltonian(c)
    dt = 0.37
    exact = taylor_expm(-1j * h.entries * 2 * np.pi * dt / c.t_max)
    u = make_propagator(h, dt)
    rng = np.random.default_rng(7)
    for _ in range(5):
        psi = rng.normal(size=3) + 1j * rng.normal(size=3)
        ref = exact @ psi
        assert np.linalg.norm(u(psi) - ref) <= 1e-9 * np.linalg.norm(ref)


def test_n3_one_period_against_taylor_series():
    c = RingConfig(n_sites=3, sink_site=2, t_inner=1.0, t_outer=1.0)
    traj = evolve(c, 1, 1.0, dt=0.05)
    exact = taylor_expm(-1j * build_hamiltonian(c).entries * 2 * np.pi)
    np.testing.assert_allclose(traj.state(-1).amplitudes, exact[:, 0], atol=1e-9)


def test_dimer_rabi_oscillation():
    t0 = 0.8
    h = HamiltonianMatrix(np.array([[0.0, -t0], [-t0, 0.0]]), energy_unit=t0)
    dt = 0.01
    u = make_propagator(h, dt)
    f = np.array([1.0, 0.0], dtype=complex)
    for step in range(1, 201):
        f = u(f)
        t_phys = step * dt * 2 * np.pi / t0
        assert abs(f[0]) ** 2 == pytest.approx(np.cos(t0 * t_phys) ** 2, abs=1e-10)


def test_expm_fallback_when_ill_conditioned():
    c = chirality_ring(gamma=0.3)
    h = build_hamiltonian(c)
    spectral = make_propagator(h, 0.05)
    forced = make_propagator(h, 0.05, cond_limit=1.0)
    assert spectral.method == "spectral" and forced.method == "expm"
    np.testing.assert_allclose(forced.matrix, spectral.matrix, atol=1e-10)


def test_exceptional_point_uses_fallback():
    # gain/loss dimer at its exceptional point: eigenvectors coalesce
    h = HamiltonianMatrix(np.array([[1j, -1.0], [-1.0, -1j]]), energy_unit=1.0)
    u = make_propagator(h, 0.1)
    assert u.method == "expm"
    # H^2 = 0 here, so exp(-i H t) = 1 - i H t exactly
    phase = 2 * np.pi * 0.1
    np.testing.assert_allclose(u.matrix, np.eye(2) - 1j * phase * h.entries, atol=1e-6)


def test_propagator_rejects_bad_dt():
    with pytest.raises(ConfigurationError):
        make_propagator(build_hamiltonian(chirality_ring()), 0.0)


def test_broken_phase_growth_rate():
    c = chirality_ring(gamma=0.75)
    s = diagonalize(build_hamiltonian(c))
    predicted = 2 * s.max_imag * 2 * np.pi / c.t_max
    traj = evolve(c, 8, 100.0)
    late = traj.sample_times >= 50
    slope = np.polyfit(traj.sample_times[late], 2 * traj.log_norm[late], 1)[0]
    assert slope == pytest.approx(predicted, rel=0.01)


# --- evolve ------------------------------------------------------------------------


def _check_trajectory(traj):
    assert np.all(traj.i_r >= 0)
    np.testing.assert_allclose(traj.i_r.sum(axis=1), traj.net_intensity, rtol=1e-12)
    np.testing.assert_allclose(traj.i_m.sum(axis=1), traj.net_intensity, rtol=1e-10)
    assert np.all(np.abs(traj.p_t) <= 1 + 1e-12)


def test_hermitian_evolution_conserves_norm():
    traj = evolve(chirality_ring(), 8, 500.0)
    _check_trajectory(traj)
    assert np.abs(traj.net_intensity - 1).max() <= 1e-9
    assert abs(np.mean(traj.p_t)) <= 0.05


def test_initial_state_and_sampling():
    traj = evolve(chirality_ring(), 8, 1.0, dt=0.1)
    assert traj.sample_times.size == 11
    assert traj.sample_times[-1] == pytest.approx(1.0)
    expected = np.zeros(32)
    expected[7] = 1.0
    np.testing.assert_array_equal(traj.i_r[0], expected)


def test_zero_duration_is_single_snapshot():
    traj = evolve(chirality_ring(), 8, 0.0)
    assert traj.sample_times.tolist() == [0.0]
    np.testing.assert_allclose(traj.i_m[0], 1 / 32, atol=1e-15)


def test_step_adjusted_to_hit_end_time():
    traj = evolve(chirality_ring(), 8, 1.0, dt=0.3)
    assert traj.sample_times[-1] == pytest.approx(1.0)
    assert np.allclose(np.diff(traj.sample_times), 0.25)


def test_invalid_initial_site():
    with pytest.raises(ConfigurationError) as err:
        evolve(chirality_ring(), 33, 1.0)
    assert err.value.field == "m0"


def test_threshold_evolution_is_chiral():
    traj = evolve(chirality_ring(gamma=0.5), 8, 100.0)
    _check_trajectory(traj)
    late = traj.i_m[-1]
    p_u = traj.momenta
    assert p_u[np.argmax(late)] > 0
    mean_pu = np.sum(p_u * late) / np.sum(late)
    assert np.sign(mean_pu) == np.sign(traj.p_t[-1]) == 1


def test_deep_broken_phase_does_not_overflow():
    traj = evolve(chirality_ring(gamma=3.0), 8, 500.0)
    assert np.all(np.isfinite(traj.log_norm))
    assert np.all(np.isfinite(traj.p_t))
    assert traj.log_norm[-1] > 700  # far beyond double range if not renormalized


def test_states_rebuild_physical_amplitudes():
    traj = evolve(chirality_ring(gamma=0.2), 8, 2.0)
    s = traj.states[-1]
    assert s.norm_sq == pytest.approx(traj.net_intensity[-1], rel=1e-12)
    assert s.time == pytest.approx(2.0)


UNBROKEN_CASES = [(32, 16, 0.5, 1.0, 0.25), (32, 8, 0.5, 1.0, 0.1), (40, 11, 1.0, 0.5, 0.3), (20, 6, 1.0, 0.5, 0.25)]


@pytest.mark.parametrize("n, d, t0, tb, gamma", UNBROKEN_CASES)
def test_unbroken_log_intensity_slope(n, d, t0, tb, gamma):
    c = RingConfig(n_sites=n, sink_site=d, t_inner=tb, t_outer=t0, gamma=gamma)
    traj = evolve(c, 8, 500.0)
    half = traj.sample_times >= 250
    slope = np.polyfit(traj.sample_times[half], 2 * traj.log_norm[half], 1)[0]
    assert slope <= 1e-6


@pytest.mark.parametrize("n, d, t0, tb, gamma", UNBROKEN_CASES)
def test_unbroken_intensity_bounded(n, d, t0, tb, gamma):
    c = RingConfig(n_sites=n, sink_site=d, t_inner=tb, t_outer=t0, gamma=gamma)
    traj = evolve(c, 8, 500.0)
    first, second = np.split(traj.net_intensity[1:], 2)
    # no secular growth: the second half never exceeds the envelope of the first
    assert second.max() <= 1.05 * first.max()
    assert traj.net_intensity.max() < 10


# --- momentum -------------------------------------------------------------------------


def test_uniform_state_has_zero_momentum():
    assert abs(momentum_matrix_element(np.ones(12), np.ones(12))) <= 1e-15


@pytest.mark.parametrize("m", range(32))
def test_plane_wave_momentum(m):
    q = 2 * np.pi * m / 32
    f = plane_wave(32, q)
    p = momentum_matrix_element(f, f)
    assert abs(p.imag) <= 1e-12
    assert p.real == pytest.approx(np.sin(q), abs=1e-10)


def test_localized_state_has_zero_momentum():
    s = WaveState.localized(10, 4)
    assert momentum_matrix_element(s, s) == 0


def test_matrix_element_against_loop():
    rng = np.random.default_rng(3)
    n = 9
    g = rng.normal(size=n) + 1j * rng.normal(size=n)
    f = rng.normal(size=n) + 1j * rng.normal(size=n)
    total = 0j
    for j in range(n):
        jn = (j + 1) % n
        total += (np.conj(g[jn]) + np.conj(g[j])) * (f[jn] - f[j])
    expected = -0.5j * total / np.sqrt(np.vdot(g, g).real * np.vdot(f, f).real)
    assert momentum_matrix_element(g, f) == pytest.approx(expected, abs=1e-14)


@pytest.mark.parametrize("c", [1e-8, 3.0, -2.5j, 1e6 * (1 + 1j)])
def test_momentum_scale_invariant(c):
    rng = np.random.default_rng(11)
    f = rng.normal(size=16) + 1j * rng.normal(size=16)
    assert abs(momentum_matrix_element(c * f, c * f) - momentum_matrix_element(f, f)) <= 1e-12


def test_momentum_bounded_random_states():
    rng = np.random.default_rng(5)
    for _ in range(200):
        f = rng.normal(size=20) + 1j * rng.normal(size=20)
        p = momentum_matrix_element(f, f)
        assert abs(p.imag) <= 1e-12 and abs(p.real) <= 1


def test_momentum_zero_state():
    with pytest.raises(DomainError):
        momentum_matrix_element(np.zeros(4), np.ones(4))


def test_momentum_dimension_mismatch():
    with pytest.raises(ValueError):
        momentum_matrix_element(np.ones(4), np.ones(5))


# --- reciprocal intensity -----------------------------------------------------------------


def test_momentum_grid():
    np.testing.assert_allclose(momentum_grid(4), [-np.pi / 2, 0, np.pi / 2, np.pi])


def test_reciprocal_intensity_against_direct_sum():
    rng = np.random.default_rng(9)
    for n in (5, 8, 13):
        f = rng.normal(size=n) + 1j * rng.normal(size=n)
        j = np.arange(1, n + 1)
        expected = [abs(np.sum(np.exp(-1j * p * j) * f)) ** 2 / n for p in momentum_grid(n)]
        np.testing.assert_allclose(reciprocal_intensity(f), expected, rtol=1e-12)
        assert reciprocal_intensity(f).sum() == pytest.approx(np.vdot(f, f).real, rel=1e-10)


@pytest.mark.parametrize("u0", [1, 5, 16, 32])
def test_plane_wave_single_bin(u0):
    p = momentum_grid(32)[u0 - 1]
    im = reciprocal_intensity(plane_wave(32, p))
    expected = np.zeros(32)
    expected[u0 - 1] = 1.0
    np.testing.assert_allclose(im, expected, atol=1e-12)
    # the lattice momentum of the same wave is sin(p_u): same sign as p_u
    f = plane_wave(32, p)
    assert momentum_matrix_element(f, f).real == pytest.approx(np.sin(p), abs=1e-12)


def test_localized_state_flat_spectrum():
    np.testing.assert_allclose(reciprocal_intensity(WaveState.localized(12, 5)), 1 / 12, atol=1e-15)


# --- steady-state momentum -----------------------------------------------------------------


@pytest.mark.parametrize("d, m0", [(16, 10), (8, 3), (12, 20)])
def test_hermitian_steady_state_near_zero(d, m0):
    assert abs(steady_state_momentum(chirality_ring(d), m0, 500.0)) <= 0.05


def test_steady_state_golden_value():
    assert steady_state_momentum(chirality_ring(gamma=0.25), 10, 500.0) == pytest.approx(P_BAR_CHIRALITY_RING_QUARTER, abs=1e-9)


def test_steady_state_linear_at_small_gamma():
    gammas = np.linspace(0.0, 0.1, 6)  # [0, 0.2 gamma_PT]
    p = np.array([steady_state_momentum(chirality_ring(gamma=g), 10, 500.0) for g in gammas])
    slope, intercept = np.polyfit(gammas, p, 1)
    r2 = 1 - np.sum((p - (slope * gammas + intercept)) ** 2) / np.sum((p - p.mean()) ** 2)
    assert slope > 0
    assert r2 > 0.99


def test_steady_state_bounded_and_info():
    p, info = steady_state_momentum(chirality_ring(gamma=0.75), 10, 100.0, full_output=True)
    assert abs(p) <= 1
    assert info["max_abs_p"] <= 1
    assert info["n_steps"] == 2000
    assert info["log_norm"] > 0


@pytest.mark.parametrize("gamma", [0.25, 0.5, 0.75])
def test_mirror_flips_chirality(gamma):
    c = chirality_ring(gamma=gamma)
    p = steady_state_momentum(c, 10, 500.0)
    p_mirror = steady_state_momentum(mirror_config(c), mirror_site(10, 32), 500.0)
    assert p_mirror == pytest.approx(-p, abs=0.02)


def test_steady_state_rejects_bad_horizon():
    with pytest.raises(ConfigurationError):
        steady_state_momentum(chirality_ring(), 10, 0.0)
