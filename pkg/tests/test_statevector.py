"""Tests for the statevector kernels against dense-matrix references."""

import numpy as np
import pytest
from scipy.linalg import expm

from hamiltonian.encoding import PauliTerm, QubitHamiltonian, to_dense_matrix
from simulation.statevector import (
    Statevector,
    apply_controlled_pauli_rotation,
    apply_hadamard,
    apply_pauli_rotation,
    apply_phase,
    apply_rotation_sequence,
    expectation_value,
    extend_with_zero_qubit,
    inverse_qft,
    marginal_distribution,
    sample_counts,
)
from utils.errors import CapacityError, IdentityRotationError, OverlapError, QubitIndexError
from utils.helpers import parse_pauli_string

HADAMARD = np.array([[1, 1], [1, -1]]) / np.sqrt(2)


def pauli_matrix(label: str) -> np.ndarray:
    x, z = parse_pauli_string(label)
    return to_dense_matrix(QubitHamiltonian(len(label), (PauliTerm(x, z, 1.0),), 0.0))


def term(label: str) -> PauliTerm:
    return PauliTerm(*parse_pauli_string(label), 1.0)


def single_qubit_operator(matrix: np.ndarray, qubit: int, n_qubits: int) -> np.ndarray:
    out = np.eye(1)
    for q in range(n_qubits):
        out = np.kron(matrix if q == qubit else np.eye(2), out)
    return out


# ---------------------------------------------------------------------------
# Pauli rotations
# ---------------------------------------------------------------------------

def test_zero_angle_is_identity(make_state):
    amplitudes = make_state(3)
    psi = apply_pauli_rotation(Statevector.from_amplitudes(amplitudes), term("XYZ"), 0.0)
    np.testing.assert_array_equal(psi.amplitudes, amplitudes)


def test_x_rotation_by_half_pi():
    psi = apply_pauli_rotation(Statevector.zeros(1), term("X"), np.pi / 2)
    np.testing.assert_allclose(psi.amplitudes, [0.0, -1j], atol=1e-15)


@pytest.mark.parametrize("label", ["XYZ", "YIY", "ZZI", "IXI", "YXX", "ZIY", "XXX", "YYY"])
def test_rotation_matches_dense_exponential(label, make_state, rng):
    theta = rng.uniform(-np.pi, np.pi)
    amplitudes = make_state(3)
    psi = apply_pauli_rotation(Statevector.from_amplitudes(amplitudes), term(label), theta)
    expected = expm(-1j * theta * pauli_matrix(label)) @ amplitudes
    np.testing.assert_allclose(psi.amplitudes, expected, atol=1e-12)
    assert psi.norm() == pytest.approx(1.0, abs=1e-10)


def test_rotation_inverse_restores_state(make_state):
    amplitudes = make_state(4)
    psi = Statevector.from_amplitudes(amplitudes)
    apply_pauli_rotation(psi, term("XZYI"), 0.37)
    apply_pauli_rotation(psi, term("XZYI"), -0.37)
    np.testing.assert_allclose(psi.amplitudes, amplitudes, atol=1e-12)


def test_identity_rotation_rejected():
    with pytest.raises(IdentityRotationError):
        apply_pauli_rotation(Statevector.zeros(2), PauliTerm(0, 0, 1.0), 0.1)


def test_masks_beyond_register_rejected():
    with pytest.raises(QubitIndexError):
        apply_pauli_rotation(Statevector.zeros(2), term("IIX"), 0.1)


# ---------------------------------------------------------------------------
# Controlled rotations and phases
# ---------------------------------------------------------------------------

def test_controlled_rotation_leaves_control_zero_untouched(make_state):
    amplitudes = make_state(4)
    psi = apply_controlled_pauli_rotation(Statevector.from_amplitudes(amplitudes), 3, term("XYZ"), 0.8)
    control_zero = (np.arange(16) >> 3) & 1 == 0
    np.testing.assert_array_equal(psi.amplitudes[control_zero], amplitudes[control_zero])


def test_controlled_z_rotation_phase():
    psi = Statevector.basis_state(2, 0b10)
    apply_controlled_pauli_rotation(psi, 1, term("Z"), 0.3)
    assert psi.amplitudes[0b10] == pytest.approx(np.exp(-0.3j), abs=1e-15)


@pytest.mark.parametrize("control,label", [(3, "XYZI"), (0, "IZXY"), (2, "YXIZ"), (1, "ZIYX")])
def test_controlled_rotation_matches_dense(control, label, make_state):
    theta = 0.61
    amplitudes = make_state(4)
    projector_one = single_qubit_operator(np.diag([0.0, 1.0]), control, 4)
    rotation = expm(-1j * theta * pauli_matrix(label))
    dense = (np.eye(16) - projector_one) + projector_one @ rotation
    psi = apply_controlled_pauli_rotation(Statevector.from_amplitudes(amplitudes), control, term(label), theta)
    np.testing.assert_allclose(psi.amplitudes, dense @ amplitudes, atol=1e-12)


def test_control_inside_support_rejected():
    with pytest.raises(OverlapError):
        apply_controlled_pauli_rotation(Statevector.zeros(3), 1, term("XZI"), 0.2)


def test_rotation_sequence_matches_individual_rotations(make_state):
    amplitudes = make_state(4)
    rotations = [(*parse_pauli_string(label), angle) for label, angle in [("XZI", 0.2), ("YYI", -0.4), ("ZIZ", 0.9)]]
    one = Statevector.from_amplitudes(amplitudes)
    apply_rotation_sequence(one, rotations, control=3)
    other = Statevector.from_amplitudes(amplitudes)
    for x, z, angle in rotations:
        apply_controlled_pauli_rotation(other, 3, PauliTerm(x, z, 1.0), angle)
    np.testing.assert_allclose(one.amplitudes, other.amplitudes, atol=1e-14)


def test_phase_zero_is_identity(make_state):
    amplitudes = make_state(2)
    psi = apply_phase(Statevector.from_amplitudes(amplitudes), None, 0.0)
    np.testing.assert_array_equal(psi.amplitudes, amplitudes)


def test_controlled_phase_on_plus_state():
    psi = apply_hadamard(Statevector.zeros(2), 1)
    apply_phase(psi, 1, np.pi)
    np.testing.assert_allclose(psi.amplitudes, [1 / np.sqrt(2), 0, -1 / np.sqrt(2), 0], atol=1e-15)


# ---------------------------------------------------------------------------
# Hadamard, extension, inverse QFT, marginals
# ---------------------------------------------------------------------------

def test_hadamard_matches_dense(make_state):
    amplitudes = make_state(3)
    psi = apply_hadamard(Statevector.from_amplitudes(amplitudes), 1)
    np.testing.assert_allclose(psi.amplitudes, single_qubit_operator(HADAMARD, 1, 3) @ amplitudes, atol=1e-15)


def test_extend_doubles_with_zero_upper_half(make_state):
    amplitudes = make_state(2)
    for capacity in (None, 4):
        psi = Statevector.from_amplitudes(amplitudes, capacity=capacity)
        extend_with_zero_qubit(psi)
        assert psi.n_qubits == 3 and len(psi) == 8
        np.testing.assert_array_equal(psi.amplitudes[:4], amplitudes)
        np.testing.assert_array_equal(psi.amplitudes[4:], 0)


def test_extend_reuses_capacity_after_writes():
    psi = Statevector.zeros(1, capacity=3)
    apply_hadamard(psi, 0)
    extend_with_zero_qubit(psi)
    apply_hadamard(psi, 1)
    extend_with_zero_qubit(psi)
    assert psi.capacity == 3
    np.testing.assert_allclose(psi.amplitudes, [0.5, 0.5, 0.5, 0.5, 0, 0, 0, 0], atol=1e-15)


def test_capacity_limit():
    with pytest.raises(CapacityError):
        Statevector.zeros(31)


def test_inverse_qft_of_uniform_superposition():
    psi = Statevector.zeros(4)
    for q in (1, 2, 3):
        apply_hadamard(psi, q)
    inverse_qft(psi, [3, 2, 1])
    np.testing.assert_allclose(np.abs(psi.amplitudes[0]), 1.0, atol=1e-14)


def test_inverse_qft_is_conjugate_of_dft_matrix():
    dim = 8
    omega = np.exp(2j * np.pi / dim)
    qft = omega ** np.outer(np.arange(dim), np.arange(dim)) / np.sqrt(dim)
    columns = []
    for k in range(dim):
        psi = inverse_qft(Statevector.basis_state(3, k), [2, 1, 0])
        columns.append(psi.amplitudes.copy())
    np.testing.assert_allclose(np.array(columns).T, qft.conj().T, atol=1e-14)


def test_inverse_qft_rejects_duplicates():
    with pytest.raises(IndexError):
        inverse_qft(Statevector.zeros(3), [0, 0])


def test_marginal_of_product_state():
    psi = Statevector.zeros(2)
    apply_pauli_rotation(psi, term("YI"), np.pi / 8)
    p1 = np.sin(np.pi / 8) ** 2
    np.testing.assert_allclose(marginal_distribution(psi, [0]), [1 - p1, p1], atol=1e-15)
    np.testing.assert_allclose(marginal_distribution(psi, [1]), [1, 0], atol=1e-15)


def test_marginal_of_bell_pair():
    psi = apply_hadamard(Statevector.zeros(2), 0)
    apply_controlled_pauli_rotation(psi, 0, term("IX"), np.pi / 2)
    np.testing.assert_allclose(marginal_distribution(psi, [1]), [0.5, 0.5], atol=1e-15)


def test_marginal_over_all_qubits_orders_first_listed_as_msb(make_state):
    amplitudes = make_state(3)
    psi = Statevector.from_amplitudes(amplitudes)
    np.testing.assert_array_equal(marginal_distribution(psi, [2, 1, 0]), np.abs(amplitudes) ** 2)
    swapped = marginal_distribution(psi, [0, 1, 2])
    reversed_bits = [int(f"{i:03b}"[::-1], 2) for i in range(8)]
    np.testing.assert_allclose(swapped, (np.abs(amplitudes) ** 2)[reversed_bits], atol=1e-15)


def test_sample_counts_are_seeded():
    probabilities = np.array([0.5, 0.25, 0.25])
    counts = sample_counts(probabilities, 1000, seed=3)
    assert counts.sum() == 1000
    np.testing.assert_array_equal(counts, sample_counts(probabilities, 1000, seed=3))


def test_expectation_value_matches_dense(make_state):
    h = QubitHamiltonian(3, (PauliTerm(*parse_pauli_string("XYI"), 0.4), PauliTerm(*parse_pauli_string("ZIZ"), -0.3)), 1.1)
    amplitudes = make_state(3)
    expected = np.vdot(amplitudes, to_dense_matrix(h) @ amplitudes).real
    assert expectation_value(Statevector.from_amplitudes(amplitudes), h) == pytest.approx(expected, abs=1e-12)
