"""
Tests for the statevector module.
"""

import pytest
import numpy as np

from utils.pauli import PauliOperator, PauliString, to_dense
from utils.statevector import (GATES, StateVector, apply_1q, apply_2q, apply_local_unitaries, apply_operator,
                               apply_pauli, basis_state, entanglement_entropy, expectation, product_state,
                               purity, random_haar_1q, random_state, reduced_density, zero_state)


def bell_state() -> StateVector:
    return StateVector(2, np.array([1, 0, 0, 1]) / np.sqrt(2))


def test_normalization_is_checked():
    """Test that unnormalized amplitudes are rejected."""
    with pytest.raises(ValueError):
        StateVector(1, [1.0, 1.0])
    with pytest.raises(ValueError):
        StateVector(2, [1.0, 0.0])


def test_amplitudes_are_read_only():
    """Test immutability of the amplitude buffer."""
    psi = zero_state(2)
    with pytest.raises(ValueError):
        psi.amplitudes[0] = 0.0


def test_x_on_qubit_zero_flips_top_bit():
    """Test the qubit ordering of gate application."""
    psi = apply_1q(zero_state(3), GATES['X'], 0)
    assert abs(psi.amplitudes[0b100]) == pytest.approx(1.0)


def test_cnot_builds_bell_state():
    """Test H then CNOT from |00>."""
    psi = apply_2q(apply_1q(zero_state(2), GATES['H'], 0), GATES['CNOT'], (0, 1))
    np.testing.assert_allclose(psi.amplitudes, bell_state().amplitudes, atol=1e-12)


def test_gate_preconditions():
    """Test qubit range, distinct targets and unitarity checks."""
    psi = zero_state(2)
    with pytest.raises(ValueError):
        apply_1q(psi, GATES['H'], 2)
    with pytest.raises(ValueError):
        apply_2q(psi, GATES['CNOT'], (1, 1))
    with pytest.raises(ValueError):
        apply_1q(psi, np.array([[1, 1], [0, 1]]), 0)


def test_pauli_action_matches_dense(rng):
    """Test the O(2^N) string action against the dense matrix."""
    psi = random_state(3, rng)
    for label in ('XYZ', 'YIY', 'ZZX', 'III'):
        pauli = PauliString.parse('-i' + label)
        expected = pauli.to_matrix() @ psi.amplitudes
        np.testing.assert_allclose(apply_pauli(psi, pauli).amplitudes, expected, atol=1e-12)


def test_operator_action_and_expectation(rng):
    """Test sparse operator application against dense matrices."""
    psi = random_state(3, rng)
    op = PauliOperator.from_terms(3, [('XXI', 0.5), ('IYZ', -1.0), ('ZII', 0.25j)])
    np.testing.assert_allclose(apply_operator(psi, op), to_dense(op) @ psi.amplitudes, atol=1e-12)
    hermitian = PauliOperator.from_terms(3, [('XXI', 0.5), ('IYZ', -1.0)])
    dense = to_dense(hermitian)
    assert expectation(psi, hermitian) == pytest.approx(np.vdot(psi.amplitudes, dense @ psi.amplitudes))


def test_reduced_density_of_bell_state():
    """Test the maximally mixed marginal of a Bell pair."""
    rho = reduced_density(bell_state(), [1])
    rho.validate()
    np.testing.assert_allclose(rho.matrix, np.eye(2) / 2, atol=1e-12)
    assert rho.entropy() == pytest.approx(1.0)
    assert rho.distance_to_maximally_mixed() == pytest.approx(0.0, abs=1e-12)


def test_product_state_has_zero_entropy():
    """Test that product states have pure marginals."""
    psi = product_state([[1, 0], [1 / np.sqrt(2), 1 / np.sqrt(2)], [0, 1]])
    for subset in ([0], [1, 2], [0, 2]):
        assert entanglement_entropy(psi, subset) == pytest.approx(0.0, abs=1e-10)
        assert purity(psi, subset) == pytest.approx(1.0)


def test_purity_matches_density_and_complement(rng):
    """Test the Gram-matrix purity against the explicit marginal and its complement."""
    psi = random_state(5, rng)
    for subset in ([0], [1, 3], [0, 2, 4]):
        complement = [q for q in range(5) if q not in subset]
        assert purity(psi, subset) == pytest.approx(reduced_density(psi, subset).purity(), rel=1e-10)
        assert purity(psi, subset) == pytest.approx(purity(psi, complement), rel=1e-10)
    assert purity(psi, []) == 1.0


def test_empty_subset_is_rejected():
    """Test that the partial trace needs at least one kept qubit."""
    with pytest.raises(ValueError):
        reduced_density(zero_state(2), [])


def test_local_unitaries_preserve_entropies(rng):
    """Test that single-qubit rotations leave every marginal entropy unchanged."""
    psi = random_state(4, rng)
    rotated = apply_local_unitaries(psi, [random_haar_1q(rng) for _ in range(4)])
    for subset in ([0], [0, 1], [1, 3], [0, 2, 3]):
        assert entanglement_entropy(rotated, subset) == pytest.approx(entanglement_entropy(psi, subset), abs=1e-10)


def test_haar_unitary_is_unitary(rng):
    """Test the sampled single-qubit unitary."""
    u = random_haar_1q(rng)
    np.testing.assert_allclose(u.conj().T @ u, np.eye(2), atol=1e-12)


def test_binary_and_json_round_trip(rng):
    """Test both serializations of a state."""
    psi = random_state(3, rng)
    payload = psi.to_bytes()
    assert len(payload) == 8 + 16 * 8
    np.testing.assert_array_equal(StateVector.from_bytes(payload).amplitudes, psi.amplitudes)
    np.testing.assert_allclose(StateVector.from_json(psi.to_json()).amplitudes, psi.amplitudes)


def test_basis_state_index():
    """Test computational basis construction."""
    psi = basis_state(3, 5)
    assert psi.amplitudes[5] == 1.0
    assert psi.inner(zero_state(3)) == 0
