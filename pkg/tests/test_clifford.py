"""
Tests for the clifford module.
"""

import itertools

import pytest
import numpy as np

from utils.clifford import (CliffordTableau, Gate, apply_clifford, enumerate_1q_cliffords, enumerate_cliffords,
                            num_cliffords, num_symplectics, sample_local_cliffords, sample_uniform_clifford,
                            symplectic_from_index, synthesize, tableau_from_index, tableau_to_unitary)
from utils.exceptions import InvalidTableauError
from utils.pauli import PauliString
from utils.statevector import GATES, random_state


def assert_unitary_matches_tableau(tableau: CliffordTableau) -> None:
    u = tableau_to_unitary(tableau)
    n = tableau.n_qubits
    for row in range(2 * n):
        letter = 'X' if row < n else 'Z'
        generator = PauliString.single(n, letter, row % n)
        np.testing.assert_allclose(u @ generator.to_matrix() @ u.conj().T, tableau.image(row).to_matrix(),
                                   atol=1e-10)


def test_group_orders():
    """Test the symplectic and Clifford group orders."""
    assert num_symplectics(1) == 6
    assert num_symplectics(2) == 720
    assert num_cliffords(1) == 24
    assert num_cliffords(2) == 11520


def test_symplectic_from_index_is_symplectic():
    """Test that every sampled index gives a valid tableau."""
    for index in range(0, 720, 37):
        tableau = tableau_from_index(2, index, [0, 0, 0, 0])
        assert tableau.is_valid()
    assert symplectic_from_index(0, 3).shape == (6, 6)


def test_enumeration_is_complete_and_distinct():
    """Test that the generator closure yields every Clifford exactly once."""
    one = list(enumerate_cliffords(1))
    assert len(one) == 24
    assert len({t.key() for t in one}) == 24
    two = list(enumerate_cliffords(2))
    assert len({t.key() for t in two}) == len(two) == 11520
    assert all(t.is_valid() for t in two)
    assert len(enumerate_1q_cliffords()) == 24


def test_closure_agrees_with_index_construction():
    """Test that the sampler's index map reaches exactly the group generated by H, S and CNOT."""
    closure = {t.key() for t in enumerate_cliffords(2)}
    indexed = {tableau_from_index(2, index, signs).key()
               for index in range(num_symplectics(2))
               for signs in itertools.product((0, 1), repeat=4)}
    assert len(indexed) == 11520
    assert indexed == closure


def test_compose_matches_unitary_product(rng):
    """Test that composing tableaux matches multiplying their unitaries."""
    for n in (1, 2, 3):
        first = sample_uniform_clifford(n, rng)
        second = sample_uniform_clifford(n, rng)
        product = first.compose(second)
        assert product.is_valid()
        u = tableau_to_unitary(second) @ tableau_to_unitary(first)
        for row in range(2 * n):
            generator = PauliString.single(n, 'X' if row < n else 'Z', row % n)
            np.testing.assert_allclose(u @ generator.to_matrix() @ u.conj().T, product.image(row).to_matrix(),
                                       atol=1e-10)


def test_compose_with_identity_and_gates(rng):
    """Test identity composition, gate-by-gate building and qubit mismatch."""
    tableau = sample_uniform_clifford(2, rng)
    identity = CliffordTableau.identity(2)
    assert identity.compose(tableau) == tableau
    assert tableau.compose(identity) == tableau
    gates = [Gate('H', (0,)), Gate('CNOT', (0, 1)), Gate('S', (1,))]
    built = identity
    for gate in gates:
        built = built.compose(CliffordTableau.from_gates(2, [gate]))
    assert built == CliffordTableau.from_gates(2, gates)
    with pytest.raises(ValueError):
        tableau.compose(CliffordTableau.identity(3))


def test_composition_stays_in_group(rng):
    """Test closure and associativity of composition over the enumerated groups."""
    one = list(enumerate_cliffords(1))
    keys = {t.key() for t in one}
    assert all(a.compose(b).key() in keys for a in one for b in one)
    two = list(enumerate_cliffords(2))
    two_keys = {t.key() for t in two}
    for i, j, k in rng.integers(0, len(two), size=(100, 3)):
        assert two[i].compose(two[j]).key() in two_keys
        assert two[i].compose(two[j]).compose(two[k]) == two[i].compose(two[j].compose(two[k]))


def test_enumeration_limit():
    """Test that enumeration refuses three qubits."""
    with pytest.raises(ValueError):
        next(enumerate_cliffords(3))


def test_gate_rules_match_matrices():
    """Test the tableau update rules against the dense gates."""
    for gates in ([Gate('H', (0,))], [Gate('S', (1,))], [Gate('SDG', (0,))], [Gate('CNOT', (0, 1))],
                  [Gate('CNOT', (1, 0))], [Gate('X', (0,)), Gate('Z', (1,))], [Gate('Y', (1,))]):
        tableau = CliffordTableau.from_gates(2, gates)
        assert tableau.is_valid()
        u = np.eye(4, dtype=np.complex128)
        for gate in gates:
            full = GATES[gate.name]
            if len(gate.qubits) == 1:
                full = np.kron(full, np.eye(2)) if gate.qubits[0] == 0 else np.kron(np.eye(2), full)
            elif gate.qubits == (1, 0):
                full = full[[0, 2, 1, 3]][:, [0, 2, 1, 3]]
            u = full @ u
        for row in range(4):
            generator = PauliString.single(2, 'X' if row < 2 else 'Z', row % 2)
            np.testing.assert_allclose(u @ generator.to_matrix() @ u.conj().T, tableau.image(row).to_matrix(),
                                       atol=1e-12)


def test_synthesis_reproduces_random_tableaux(rng):
    """Test synthesized circuits against the tableau for random Cliffords."""
    for n in (1, 2, 3):
        for _ in range(10):
            assert_unitary_matches_tableau(sample_uniform_clifford(n, rng))


def test_synthesis_uses_small_gate_set(rng):
    """Test that circuits only contain H, S, CNOT, X and Z."""
    circuit = synthesize(sample_uniform_clifford(3, rng))
    assert {gate.name for gate in circuit} <= {'H', 'S', 'CNOT', 'X', 'Z'}


def test_conjugate_pauli_matches_dense(rng):
    """Test conjugation of arbitrary strings, including Y and phases."""
    tableau = sample_uniform_clifford(2, rng)
    u = tableau_to_unitary(tableau)
    for text in ('XY', '-iYZ', 'YY', 'IX'):
        pauli = PauliString.parse(text)
        np.testing.assert_allclose(tableau.conjugate_pauli(pauli).to_matrix(),
                                   u @ pauli.to_matrix() @ u.conj().T, atol=1e-10)


def test_apply_clifford_matches_unitary(rng):
    """Test state application against the dense unitary up to global phase."""
    tableau = sample_uniform_clifford(3, rng)
    psi = random_state(3, rng)
    applied = apply_clifford(psi, tableau).amplitudes
    expected = tableau_to_unitary(tableau) @ psi.amplitudes
    assert abs(np.vdot(expected, applied)) == pytest.approx(1.0, abs=1e-10)


def test_invalid_tableau_is_rejected():
    """Test that a non-symplectic matrix cannot be synthesized."""
    bad = CliffordTableau(1, np.array([[1, 0], [1, 0]]), [0, 0])
    assert not bad.is_valid()
    with pytest.raises(InvalidTableauError):
        synthesize(bad)
    with pytest.raises(InvalidTableauError):
        CliffordTableau(2, np.eye(2), [0, 0])


def test_sampling_is_seeded():
    """Test that equal seeds give equal tableaux."""
    first = sample_uniform_clifford(3, np.random.default_rng(7))
    second = sample_uniform_clifford(3, np.random.default_rng(7))
    assert first == second


def test_single_qubit_sampling_is_uniform():
    """Test that local Clifford draws cover the 24 group elements evenly."""
    rng = np.random.default_rng(11)
    group = enumerate_1q_cliffords()
    counts = np.zeros(len(group))
    for unitary in sample_local_cliffords(4800, rng):
        index = next(i for i, element in enumerate(group) if element.unitary is unitary)
        counts[index] += 1
    assert counts.min() > 120
    assert counts.max() < 280


def test_json_round_trip(rng):
    """Test the tableau JSON form."""
    tableau = sample_uniform_clifford(3, rng)
    assert CliffordTableau.from_json(tableau.to_json()) == tableau


def test_hadamard_tableau_on_state():
    """Test that the H tableau acts like H on a state."""
    tableau = CliffordTableau.from_gates(1, [Gate('H', (0,))])
    psi = random_state(1, np.random.default_rng(3))
    out = apply_clifford(psi, tableau).amplitudes
    assert abs(np.vdot(GATES['H'] @ psi.amplitudes, out)) == pytest.approx(1.0, abs=1e-10)
