import numpy as np
import pytest

from lueders import states
from lueders.errors import NotNormalized

S2 = 1.0 / np.sqrt(2.0)

EXPECTED_KETS = [
    [1, 0, 0],
    [0, 1, 0],
    [0, 0, 1],
    [S2, S2, 0],
    [S2, 1j * S2, 0],
    [S2, 0, S2],
    [S2, 0, 1j * S2],
    [0, S2, S2],
    [0, S2, 1j * S2],
]


def same_up_to_phase(a, b, tol=1e-12):
    return abs(abs(np.vdot(a, b)) - 1.0) <= tol


def test_rotation_pi_about_y_flips_to_target_level():
    u = states.rotation_unitary(1, "y", np.pi)
    assert same_up_to_phase(u @ states.ket(0), states.ket(1))
    u2 = states.rotation_unitary(2, "y", np.pi)
    assert same_up_to_phase(u2 @ states.ket(0), states.ket(2))


def test_rotation_zero_angle_is_identity():
    u = states.rotation_unitary(2, "y", 0.0)
    assert np.max(np.abs(u - np.eye(3))) < 1e-15


def test_rotation_minus_x_quarter_turn():
    u = states.rotation_unitary(1, "-x", np.pi / 2)
    target = np.array([S2, 1j * S2, 0])
    assert np.max(np.abs(u @ states.ket(0) - target)) < 1e-12


def test_rotations_are_unitary():
    for level in (1, 2):
        for axis in ("x", "-x", "y", "-y"):
            for angle in (0.3, np.pi / 2, np.pi, 2.1):
                u = states.rotation_unitary(level, axis, angle)
                assert np.max(np.abs(u.conj().T @ u - np.eye(3))) <= 1e-12


def test_rotation_untouched_level_is_spectator():
    u = states.rotation_unitary(1, "y", 1.1)
    assert u[2, 2] == 1.0
    assert np.all(u[2, :2] == 0) and np.all(u[:2, 2] == 0)


def test_preparation_set_matches_state_table():
    preps = states.preparation_set()
    assert [p.index for p in preps] == list(range(1, 10))
    for prep, expected in zip(preps, EXPECTED_KETS):
        assert same_up_to_phase(prep.state, np.asarray(expected, dtype=complex))
        assert np.max(np.abs(prep.matrix.conj().T @ prep.matrix - np.eye(3))) <= 1e-12


def test_preparation_pulse_order_matters_for_two_pulse_sequences():
    # right-to-left: the single-level half rotation must act before the flip
    r1 = states.rotation_unitary(1, "y", np.pi / 2)
    r2 = states.rotation_unitary(2, "y", np.pi)
    target = np.array([0, S2, S2], dtype=complex)
    assert same_up_to_phase(r2 @ r1 @ states.ket(0), target)
    assert not same_up_to_phase(r1 @ r2 @ states.ket(0), target)


def test_preparation_projectors_are_tomographically_complete():
    projs = [states.density(p) for p in states.preparation_states()]
    gram = np.array([[np.trace(a @ b).real for b in projs] for a in projs])
    eigvals = np.linalg.eigvalsh(gram)
    assert np.sum(eigvals > 1e-10) == 9


def test_density_basics():
    rho = states.density(states.ket(0))
    assert np.allclose(rho, np.diag([1.0, 0.0, 0.0]), atol=1e-15)
    psi = np.array([0, 1, 1j], dtype=complex) / np.sqrt(2)
    rho = states.density(psi)
    assert abs(rho[1, 1] - 0.5) < 1e-14 and abs(rho[2, 2] - 0.5) < 1e-14
    assert abs(rho[1, 2] - (-0.5j)) < 1e-14
    assert abs(np.trace(rho) - 1.0) <= 1e-12
    assert abs(np.trace(rho @ rho) - 1.0) <= 1e-12


def test_density_rejects_unnormalized():
    with pytest.raises(NotNormalized):
        states.density(np.array([1.0, 1.0, 0.0]))


def test_depolarize():
    rho = states.density(states.ket(1))
    assert np.max(np.abs(states.depolarize(rho, 0.0) - rho)) == 0.0
    mixed = states.depolarize(rho, 1.0)
    assert np.allclose(mixed, np.eye(3) / 3.0, atol=1e-15)
    half = states.depolarize(rho, 0.3)
    assert abs(np.trace(half) - 1.0) <= 1e-12
    with pytest.raises(ValueError):
        states.depolarize(rho, 1.5)


def test_state_json_round_trip():
    psi = np.array([S2, 0, 1j * S2], dtype=complex)
    back = states.state_from_json(states.state_to_json(psi))
    assert np.max(np.abs(back - psi)) == 0.0


def test_preparation_set_json_has_pulse_annotations():
    exported = states.preparation_set_to_json()
    assert len(exported) == 9
    assert exported[0]["pulses"] == []
    assert exported[7]["index"] == 8
    assert len(exported[7]["pulses"]) == 2
    assert exported[7]["pulses"][0]["level"] == 2
    assert {"rows", "cols", "re", "im"} <= set(exported[0])
