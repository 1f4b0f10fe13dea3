"""
Statevector Module for Trotter Error Statistics Toolkit

This module provides a dense statevector engine: gate application, Pauli
actions, reduced density matrices and entanglement entropy. Qubit 0 is the
most significant bit of the amplitude index.
"""

import json
import struct
from dataclasses import dataclass
from typing import Any, Dict, Iterable, Optional, Sequence, Tuple

import numpy as np
from scipy.stats import unitary_group

from utils.helpers import require_dense
from utils.logger import get_logger
from utils.pauli import PauliOperator, PauliString, _I_POWERS, popcount

logger = get_logger("statevector")

NORM_TOLERANCE = 1e-8
UNITARY_TOLERANCE = 1e-10
EIGEN_CUTOFF = 1e-12
JSON_QUBIT_LIMIT = 6

GATES: Dict[str, np.ndarray] = {
    'I': np.eye(2, dtype=np.complex128),
    'X': np.array([[0, 1], [1, 0]], dtype=np.complex128),
    'Y': np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    'Z': np.array([[1, 0], [0, -1]], dtype=np.complex128),
    'H': np.array([[1, 1], [1, -1]], dtype=np.complex128) / np.sqrt(2),
    'S': np.array([[1, 0], [0, 1j]], dtype=np.complex128),
    'SDG': np.array([[1, 0], [0, -1j]], dtype=np.complex128),
    'T': np.array([[1, 0], [0, np.exp(1j * np.pi / 4)]], dtype=np.complex128),
    'CNOT': np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=np.complex128),
}


def _check_unitary(gate: np.ndarray, size: int) -> np.ndarray:
    gate = np.asarray(gate, dtype=np.complex128)
    if gate.shape != (size, size):
        raise ValueError(f"gate must be {size}x{size}, got {gate.shape}")
    if not np.allclose(gate.conj().T @ gate, np.eye(size), atol=UNITARY_TOLERANCE):
        raise ValueError("gate is not unitary")
    return gate


class StateVector:
    """Normalized dense amplitude vector over n_qubits qubits."""

    def __init__(self, n_qubits: int, amplitudes: Iterable[complex], check_norm: bool = True):
        amplitudes = np.array(amplitudes, dtype=np.complex128).reshape(-1)
        if n_qubits < 1 or amplitudes.shape[0] != 1 << n_qubits:
            raise ValueError(f"expected {1 << max(n_qubits, 0)} amplitudes, got {amplitudes.shape[0]}")
        if check_norm:
            norm_sq = float(np.vdot(amplitudes, amplitudes).real)
            if abs(norm_sq - 1.0) > NORM_TOLERANCE:
                raise ValueError(f"state is not normalized (norm^2 = {norm_sq})")
        amplitudes.setflags(write=False)
        self.n_qubits = n_qubits
        self.amplitudes = amplitudes

    @property
    def dim(self) -> int:
        return 1 << self.n_qubits

    def norm_sq(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def inner(self, other: 'StateVector') -> complex:
        """<self|other>."""
        _check_same(self, other)
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape((2,) * self.n_qubits)

    def to_bytes(self) -> bytes:
        """8-byte little-endian qubit count followed by little-endian f64 (re, im) pairs."""
        pairs = np.empty(2 * self.dim, dtype='<f8')
        pairs[0::2] = self.amplitudes.real
        pairs[1::2] = self.amplitudes.imag
        return struct.pack('<Q', self.n_qubits) + pairs.tobytes()

    @classmethod
    def from_bytes(cls, payload: bytes) -> 'StateVector':
        (n_qubits,) = struct.unpack('<Q', payload[:8])
        pairs = np.frombuffer(payload[8:], dtype='<f8')
        if pairs.shape[0] != 2 << n_qubits:
            raise ValueError("payload length does not match the header")
        return cls(int(n_qubits), pairs[0::2] + 1j * pairs[1::2])

    def to_json(self) -> str:
        if self.n_qubits > JSON_QUBIT_LIMIT:
            raise ValueError(f"JSON export is limited to {JSON_QUBIT_LIMIT} qubits")
        return json.dumps({'n_qubits': self.n_qubits,
                           'amplitudes': [[a.real, a.imag] for a in self.amplitudes.tolist()]})

    @classmethod
    def from_json(cls, text: str) -> 'StateVector':
        data = json.loads(text)
        return cls(data['n_qubits'], [complex(re, im) for re, im in data['amplitudes']])

    def __repr__(self) -> str:
        return f"StateVector(n_qubits={self.n_qubits})"


def _check_same(a: Any, b: Any) -> None:
    if a.n_qubits != b.n_qubits:
        raise ValueError(f"qubit count mismatch: {a.n_qubits} vs {b.n_qubits}")


def _check_qubit(psi: StateVector, qubit: int) -> None:
    if not 0 <= qubit < psi.n_qubits:
        raise ValueError(f"qubit {qubit} out of range for {psi.n_qubits} qubits")


def zero_state(n_qubits: int) -> StateVector:
    return basis_state(n_qubits, 0)


def basis_state(n_qubits: int, index: int) -> StateVector:
    require_dense(n_qubits, "statevector")
    amplitudes = np.zeros(1 << n_qubits, dtype=np.complex128)
    amplitudes[index] = 1.0
    return StateVector(n_qubits, amplitudes)


def product_state(single_qubit_states: Sequence[Sequence[complex]]) -> StateVector:
    """Tensor product of normalized single-qubit states, qubit 0 first."""
    amplitudes = np.ones(1, dtype=np.complex128)
    for state in single_qubit_states:
        amplitudes = np.kron(amplitudes, np.asarray(state, dtype=np.complex128))
    return StateVector(len(single_qubit_states), amplitudes)


def random_state(n_qubits: int, rng: np.random.Generator) -> StateVector:
    """Haar-random pure state from a normalized complex Gaussian vector."""
    require_dense(n_qubits, "statevector")
    d = 1 << n_qubits
    amplitudes = rng.normal(size=d) + 1j * rng.normal(size=d)
    return StateVector(n_qubits, amplitudes / np.linalg.norm(amplitudes))


def apply_1q(psi: StateVector, gate: np.ndarray, qubit: int) -> StateVector:
    """
    Apply a single-qubit gate.

    Args:
        psi (StateVector): Input state
        gate (np.ndarray): 2x2 unitary
        qubit (int): Target qubit

    Returns:
        StateVector: New state
    """
    _check_qubit(psi, qubit)
    gate = _check_unitary(gate, 2)
    out = np.tensordot(gate, psi.tensor(), axes=([1], [qubit]))
    out = np.moveaxis(out, 0, qubit)
    return StateVector(psi.n_qubits, out.reshape(-1), check_norm=False)


def apply_2q(psi: StateVector, gate: np.ndarray, qubits: Tuple[int, int]) -> StateVector:
    """
    Apply a two-qubit gate; the first qubit indexes the more significant half of the 4x4 basis.

    Args:
        psi (StateVector): Input state
        gate (np.ndarray): 4x4 unitary
        qubits (Tuple[int, int]): Distinct target qubits

    Returns:
        StateVector: New state
    """
    first, second = qubits
    _check_qubit(psi, first)
    _check_qubit(psi, second)
    if first == second:
        raise ValueError("two-qubit gate needs distinct qubits")
    gate = _check_unitary(gate, 4).reshape(2, 2, 2, 2)
    out = np.tensordot(gate, psi.tensor(), axes=([2, 3], [first, second]))
    out = np.moveaxis(out, [0, 1], [first, second])
    return StateVector(psi.n_qubits, out.reshape(-1), check_norm=False)


def pauli_action(amplitudes: np.ndarray, x_mask: int, z_mask: int) -> np.ndarray:
    """
    Apply the unsigned Hermitian string P(x, z) along axis 0 of an array.

    (P v)[r] = i^|x&z| (-1)^|z & (r ^ x)| v[r ^ x]
    """
    d = amplitudes.shape[0]
    rows = np.arange(d, dtype=np.int64)
    source = rows ^ x_mask
    signs = (1 - 2 * (popcount(source & z_mask) % 2)) * _I_POWERS[popcount(x_mask & z_mask) % 4]
    if amplitudes.ndim == 1:
        return signs * amplitudes[source]
    return signs[:, None] * amplitudes[source]


def apply_pauli(psi: StateVector, pauli: PauliString) -> StateVector:
    """Apply a (possibly signed) Pauli string in O(2^N)."""
    _check_same(psi, pauli)
    out = pauli.phase * pauli_action(psi.amplitudes, pauli.x_mask, pauli.z_mask)
    return StateVector(psi.n_qubits, out, check_norm=False)


def operator_action(amplitudes: np.ndarray, operator: PauliOperator) -> np.ndarray:
    """Sum_P c_P P v along axis 0."""
    out = np.zeros(amplitudes.shape, dtype=np.complex128)
    for x, z, c in zip(operator.xs, operator.zs, operator.coeffs):
        out += c * pauli_action(amplitudes, int(x), int(z))
    return out


def apply_operator(psi: StateVector, operator: PauliOperator) -> np.ndarray:
    """
    Apply a Pauli operator; the result is an unnormalized vector.

    Args:
        psi (StateVector): Input state
        operator (PauliOperator): Operator to apply

    Returns:
        np.ndarray: The vector A|psi>
    """
    _check_same(psi, operator)
    return operator_action(psi.amplitudes, operator)


def expectation(psi: StateVector, operator: PauliOperator) -> complex:
    """<psi|A|psi>."""
    return complex(np.vdot(psi.amplitudes, apply_operator(psi, operator)))


@dataclass(frozen=True)
class DensityMatrix:
    """Reduced density matrix on an ordered set of qubits."""

    qubits: Tuple[int, ...]
    matrix: np.ndarray

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def validate(self, tol: float = 1e-10) -> None:
        if not np.allclose(self.matrix, self.matrix.conj().T, atol=tol):
            raise ValueError("density matrix is not Hermitian")
        if abs(np.trace(self.matrix).real - 1.0) > tol:
            raise ValueError("density matrix trace differs from 1")
        if np.linalg.eigvalsh(self.matrix).min() < -tol:
            raise ValueError("density matrix has negative eigenvalues")

    def eigenvalues(self) -> np.ndarray:
        """Eigenvalues clipped to [0, 1] with dust below the cutoff set to zero."""
        values = np.clip(np.linalg.eigvalsh(self.matrix), 0.0, 1.0)
        values[values < EIGEN_CUTOFF] = 0.0
        return values

    def purity(self) -> float:
        return float(np.real(np.vdot(self.matrix, self.matrix)))

    def entropy(self) -> float:
        """Von Neumann entropy in bits."""
        values = self.eigenvalues()
        values = values[values > 0]
        return float(max(0.0, -np.sum(values * np.log2(values))))

    def distance_to_maximally_mixed(self) -> float:
        """Trace norm of rho - I/d."""
        shifted = self.matrix - np.eye(self.dim) / self.dim
        return float(np.sum(np.abs(np.linalg.eigvalsh(shifted))))


def reduced_density(psi: StateVector, subset: Iterable[int]) -> DensityMatrix:
    """
    Partial trace over the complement of subset.

    Args:
        psi (StateVector): Pure state
        subset (Iterable[int]): Kept qubits; ordered ascending in the result

    Returns:
        DensityMatrix: Matrix of dimension 2**len(subset)
    """
    kept = tuple(sorted(set(subset)))
    if not kept:
        raise ValueError("subset must be nonempty")
    for q in kept:
        _check_qubit(psi, q)
    traced = [q for q in range(psi.n_qubits) if q not in kept]
    block = np.transpose(psi.tensor(), list(kept) + traced).reshape(1 << len(kept), -1)
    return DensityMatrix(kept, block @ block.conj().T)


def purity(psi: StateVector, subset: Iterable[int]) -> float:
    """Tr(rho_A^2) for the marginal on subset; 1 for the empty set."""
    kept = tuple(sorted(set(subset)))
    if not kept or len(kept) == psi.n_qubits:
        return 1.0
    traced = [q for q in range(psi.n_qubits) if q not in kept]
    size_kept = 1 << len(kept)
    size_traced = 1 << len(traced)
    block = np.transpose(psi.tensor(), list(kept) + traced).reshape(size_kept, size_traced)
    # Tr(rho_A^2) = Tr(rho_B^2); use the smaller Gram matrix
    gram = block @ block.conj().T if size_kept <= size_traced else block.T @ block.conj()
    return float(np.real(np.vdot(gram, gram)))


def entanglement_entropy(psi: StateVector, subset: Iterable[int]) -> float:
    """Von Neumann entropy in bits of the marginal on subset."""
    return reduced_density(psi, subset).entropy()


def random_haar_1q(rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed 2x2 unitary."""
    return np.asarray(unitary_group.rvs(2, random_state=rng), dtype=np.complex128)


def apply_local_unitaries(psi: StateVector, gates: Sequence[Optional[np.ndarray]]) -> StateVector:
    """Apply one single-qubit gate per qubit; None skips a qubit."""
    if len(gates) != psi.n_qubits:
        raise ValueError("need one gate per qubit")
    state = psi
    for qubit, gate in enumerate(gates):
        if gate is not None:
            state = apply_1q(state, gate, qubit)
    return state
