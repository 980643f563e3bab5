import numpy as np
import pytest
import scipy.linalg

from lueders import dynamics as dyn
from lueders.errors import AdiabaticRegimeWarning, InvalidG0, StepUnderflow
from lueders.states import density

TWO_PI = 2.0 * np.pi

ROW_PARAMS = {
    "a": dyn.ExperimentParams.from_mhz(1.3, 0.1),
    "b": dyn.ExperimentParams.from_mhz(1.9, 0.2),
    "c": dyn.ExperimentParams.from_mhz(3.2, 0.3),
    "d": dyn.ExperimentParams.from_mhz(15.2, 1.5),
}


def random_hermitian4(rng):
    a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    return 0.5 * (a + a.conj().T)


def excited_state():
    rho = np.zeros((4, 4), dtype=complex)
    rho[3, 3] = 1.0
    return rho


# --- parameters ---------------------------------------------------------------


def test_params_from_mhz_applies_two_pi():
    p = dyn.ExperimentParams.from_mhz(1.3, 0.1)
    assert abs(p.omega - TWO_PI * 1.3e6) < 1e-3
    assert abs(p.gamma - TWO_PI * 21.65e6) < 1e-3
    assert abs(p.delta - TWO_PI * 5.0e6) < 1e-3
    assert p.t == 1e-6 and p.shots == 1000


def test_params_validation():
    with pytest.raises(ValueError):
        dyn.ExperimentParams(omega=1.0, gamma=-1.0)
    with pytest.raises(ValueError):
        dyn.ExperimentParams(omega=1.0, t=-1e-9)
    with pytest.raises(ValueError):
        dyn.ExperimentParams(omega=1.0, shots=0)


# --- Hamiltonian and Lindblad right-hand side ----------------------------------


def test_interaction_hamiltonian_cases():
    assert np.max(np.abs(dyn.interaction_hamiltonian(0.0, 0.0))) == 0.0
    h = dyn.interaction_hamiltonian(0.0, TWO_PI * 5e6)
    assert np.allclose(h, np.diag([0, 0, 0, TWO_PI * 5e6]), atol=1e-6)
    h = dyn.interaction_hamiltonian(TWO_PI * 1.3e6, 0.0)
    assert abs(h[0, 3] - TWO_PI * 0.65e6) < 1e-6
    assert abs(h[3, 0] - TWO_PI * 0.65e6) < 1e-6
    assert np.all(h[1, :] == 0) and np.all(h[2, :] == 0)
    assert np.all(h[:, 1] == 0) and np.all(h[:, 2] == 0)


def test_lindblad_rhs_spectator_state_is_stationary():
    p = ROW_PARAMS["c"]
    h = dyn.interaction_hamiltonian(p.omega, p.delta)
    rho = np.zeros((4, 4), dtype=complex)
    rho[1, 1] = 1.0
    assert np.max(np.abs(dyn.lindblad_rhs(rho, h, p.gamma))) == 0.0


def test_lindblad_rhs_excited_decay_rates():
    p = ROW_PARAMS["a"]
    h = dyn.interaction_hamiltonian(0.0, p.delta)
    out = dyn.lindblad_rhs(excited_state(), h, p.gamma)
    assert abs(out[3, 3] + p.gamma) < 1e-6
    assert abs(out[0, 0] - p.gamma) < 1e-6


def test_lindblad_rhs_excited_ground_coherence_rate():
    p = ROW_PARAMS["a"]
    h = dyn.interaction_hamiltonian(0.0, p.delta)
    rho = np.zeros((4, 4), dtype=complex)
    rho[3, 1] = 0.5
    rho[1, 3] = 0.5
    out = dyn.lindblad_rhs(rho, h, p.gamma)
    expected = -(p.gamma / 2.0 + 1j * p.delta) * 0.5
    assert abs(out[3, 1] - expected) < 1e-6


def test_lindblad_rhs_traceless_and_hermitian_exactly():
    rng = np.random.default_rng(12)
    p = ROW_PARAMS["c"]
    h = dyn.interaction_hamiltonian(p.omega, p.delta)
    for _ in range(100):
        rho = random_hermitian4(rng)
        out = dyn.lindblad_rhs(rho, h, p.gamma)
        assert abs(np.trace(out)) <= 1e-12
        assert np.max(np.abs(out - out.conj().T)) <= 1e-12


# --- integration -----------------------------------------------------------------


def test_integrate_pure_decay_matches_exponential():
    p = dyn.ExperimentParams.from_mhz(0.0)
    t = 3.0 / p.gamma
    rho = dyn.integrate(excited_state(), p, t)
    assert abs(rho[3, 3].real - np.exp(-3.0)) < 1e-6


def test_integrate_spectator_block_is_constant_bitwise():
    p = ROW_PARAMS["d"]
    psi = np.array([1.0, 1.0, 1.0], dtype=complex) / np.sqrt(3.0)
    rho0 = dyn.embed_qutrit(density(psi))
    rho = dyn.integrate(rho0, p, 5e-8)
    for (i, j) in [(1, 1), (2, 2), (1, 2), (2, 1)]:
        assert rho[i, j] == rho0[i, j]


def test_integrate_strong_drive_destroys_coherence():
    p = ROW_PARAMS["d"]
    rho0 = dyn.embed_qutrit(density(np.array([1.0, 1.0, 0.0]) / np.sqrt(2.0)))
    rho = dyn.integrate(rho0, p, 1e-6)
    assert abs(rho[0, 1]) < 1e-6


def test_integrate_preserves_trace_and_positivity_on_random_states():
    rng = np.random.default_rng(21)
    p = ROW_PARAMS["b"]
    for _ in range(100):
        b = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        rho0 = b @ b.conj().T
        rho0 /= np.trace(rho0).real
        rho = dyn.integrate(rho0, p, 5e-8)
        assert abs(np.trace(rho).real - 1.0) < 1e-9
        assert np.linalg.eigvalsh(rho)[0] >= -1e-8


def test_integrate_step_underflow():
    p = ROW_PARAMS["a"]
    with pytest.raises(StepUnderflow):
        dyn.integrate(excited_state(), p, 1.0)


def test_trajectory_sampling():
    p = ROW_PARAMS["a"]
    times, rhos = dyn.trajectory(excited_state(), p, 1e-8, n_records=20)
    assert times[0] == 0.0 and abs(times[-1] - 1e-8) < 1e-20
    assert rhos.shape[0] == times.size
    lines = dyn.trajectory_rows(times, rhos)
    assert len(lines) == times.size
    assert lines[0].startswith("0.0")


# --- coherence factor ---------------------------------------------------------------


def test_g0_with_zero_drive_is_pure_phase():
    p = dyn.ExperimentParams.from_mhz(0.0, phi_r=0.7)
    assert abs(dyn.g0_exact(p) - np.exp(0.7j)) < 1e-12
    assert abs(dyn.g0_adiabatic(p) - np.exp(0.7j)) < 1e-12


def test_g0_exact_against_matrix_exponential_oracle():
    for name in ("a", "b", "c", "d"):
        p = ROW_PARAMS[name]
        gen = np.array(
            [
                [0.0, -0.5j * p.omega],
                [-0.5j * p.omega, -(0.5 * p.gamma + 1j * p.delta)],
            ]
        )
        oracle = (scipy.linalg.expm(gen * p.t) @ np.array([1.0, 0.0]))[0]
        assert abs(dyn.g0_exact(p) - oracle) < 1e-8


def test_g0_exact_table_row_a_scattering_probability():
    p_scatt = dyn.p_scatt(dyn.g0_exact(ROW_PARAMS["a"]))
    assert 0.27 <= p_scatt <= 0.40  # quoted (33 +7/-6)%
    assert abs(p_scatt - 0.33) < 0.02


def test_g0_adiabatic_direct_substitution():
    # Delta = 0, Gamma t = 2, Omega = Gamma/2: |g0| = exp(-Gamma t (Omega/Gamma)^2 / 2)
    gamma = 2.0e6
    p = dyn.ExperimentParams(omega=gamma / 2.0, gamma=gamma, delta=0.0, delta_unc=0.0, t=2.0 / gamma)
    assert abs(abs(dyn.g0_adiabatic(p)) - np.exp(-0.25)) < 1e-12


def test_g0_adiabatic_flags_strong_drive():
    with pytest.warns(AdiabaticRegimeWarning):
        dyn.g0_adiabatic(ROW_PARAMS["d"])


def test_g0_adiabatic_table_row_c():
    assert abs(dyn.p_scatt(dyn.g0_adiabatic(ROW_PARAMS["c"])) - 0.91) < 0.02


def test_g0_exact_close_to_adiabatic_in_weak_drive_regime():
    rng = np.random.default_rng(9)
    for _ in range(10):
        omega_mhz = rng.uniform(0.2, 21.65 / 5.0)
        p = dyn.ExperimentParams.from_mhz(omega_mhz)
        assert abs(dyn.g0_exact(p) - dyn.g0_adiabatic(p)) <= 0.02


def test_g0_exact_step_halving_convergence():
    p = ROW_PARAMS["b"]
    assert abs(dyn.g0_exact(p) - dyn.g0_exact(p, dt=0.5e-10)) < 1e-8


def test_integrate_consistent_with_reduced_system():
    p = ROW_PARAMS["a"]
    rho0 = dyn.embed_qutrit(density(np.array([1.0, 1.0, 0.0]) / np.sqrt(2.0)))
    rho = dyn.integrate(rho0, p, p.t)
    assert abs(rho[0, 1] - 0.5 * dyn.g0_exact(p)) < 1e-9


# --- scattering probability and uncertainty -------------------------------------------


def test_p_scatt_extremes_and_validation():
    assert dyn.p_scatt(1.0) == 0.0
    assert dyn.p_scatt(0.0) == 1.0
    with pytest.raises(InvalidG0):
        dyn.p_scatt(1.1)


def test_p_scatt_row_b_in_quoted_interval():
    p = dyn.p_scatt(dyn.g0_adiabatic(ROW_PARAMS["b"]))
    assert 0.47 <= p <= 0.64  # quoted (56 +8/-9)%


def test_doubling_pulse_length_squares_the_coherence_factor():
    p1 = ROW_PARAMS["a"]
    p2 = dyn.ExperimentParams.from_mhz(1.3, 0.1, t_us=2.0)
    g1 = dyn.g0_adiabatic(p1)
    g2 = dyn.g0_adiabatic(p2)
    assert abs(g2 - g1**2) < 1e-12
    assert abs(dyn.p_scatt(g2) - (1.0 - (1.0 - dyn.p_scatt(g1)) ** 2)) < 1e-12


def test_param_uncertainty_degenerate_without_uncertainties():
    p = dyn.ExperimentParams.from_mhz(1.3, 0.0, delta_unc_mhz=0.0)
    lo, med, hi = dyn.param_uncertainty(p, seed=0)
    assert lo == med == hi


def test_param_uncertainty_row_a_covers_quoted_interval():
    lo, _, hi = dyn.param_uncertainty(ROW_PARAMS["a"], n_samples=4000, seed=3)
    assert lo - 0.02 <= 0.27 and hi + 0.02 >= 0.40


def test_param_uncertainty_row_d_is_saturated():
    lo, med, hi = dyn.param_uncertainty(ROW_PARAMS["d"], n_samples=2000, seed=3)
    assert 0.999 <= lo <= hi <= 1.0


def test_param_uncertainty_is_deterministic_and_checks_samples():
    p = ROW_PARAMS["a"]
    assert dyn.param_uncertainty(p, seed=5) == dyn.param_uncertainty(p, seed=5)
    with pytest.raises(ValueError):
        dyn.param_uncertainty(p, n_samples=10)
