"""
Resources Module for Trotter Error Statistics Toolkit

This module provides quantum resource measures: the full Pauli spectrum of a
pure state, alpha-stabilizer purities and the linear stabilizer entropy
(magic), plus the T-gate ladder states used to scan magic.
"""

from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from utils.clifford import apply_clifford, sample_uniform_clifford
from utils.helpers import require_dense, spectrum_qubit_limit
from utils.logger import get_logger
from utils.pauli import PauliString, _I_POWERS, popcount, walsh_hadamard
from utils.statevector import GATES, StateVector, apply_1q, apply_pauli, zero_state

logger = get_logger("resources")

# Rows of the x-mask batch handled per transform
_SPECTRUM_BLOCK_ELEMENTS = 1 << 22


@dataclass(frozen=True)
class PauliSpectrum:
    """Squared expectations |<psi|P|psi>|^2 indexed as values[x_mask, z_mask]."""

    n_qubits: int
    values: np.ndarray

    @property
    def dim(self) -> int:
        return 1 << self.n_qubits

    def value(self, pauli: PauliString) -> float:
        return float(self.values[pauli.x_mask, pauli.z_mask])

    def total(self) -> float:
        return float(self.values.sum())

    def flat(self) -> np.ndarray:
        return self.values.reshape(-1)

    def to_bytes(self) -> bytes:
        """Little-endian f64 array in row-major (x_mask, z_mask) order."""
        return self.flat().astype('<f8').tobytes()

    @classmethod
    def from_bytes(cls, n_qubits: int, payload: bytes) -> 'PauliSpectrum':
        d = 1 << n_qubits
        return cls(n_qubits, np.frombuffer(payload, dtype='<f8').reshape(d, d).copy())


def _require_spectrum(n_qubits: int) -> None:
    require_dense(n_qubits, "Pauli spectrum", limit=spectrum_qubit_limit())


def pauli_spectrum(psi: StateVector) -> PauliSpectrum:
    """
    All 4^N squared Pauli expectations in O(4^N N).

    For each x mask, v_b = conj(psi_{b^x}) psi_b and <P(x, z)> = i^|x&z| WHT(v)[z].

    Args:
        psi (StateVector): Pure state

    Returns:
        PauliSpectrum: Spectrum indexed by (x_mask, z_mask)
    """
    _require_spectrum(psi.n_qubits)
    d = psi.dim
    amplitudes = psi.amplitudes
    basis = np.arange(d, dtype=np.int64)
    values = np.empty((d, d), dtype=np.float64)
    rows = max(1, _SPECTRUM_BLOCK_ELEMENTS // d)
    for start in range(0, d, rows):
        xs = basis[start:start + rows, None]
        products = np.conj(amplitudes[basis[None, :] ^ xs]) * amplitudes[None, :]
        transformed = walsh_hadamard(products)
        values[start:start + rows] = np.abs(transformed) ** 2
    np.clip(values, 0.0, 1.0, out=values)
    return PauliSpectrum(psi.n_qubits, values)


def pauli_expectations(psi: StateVector) -> np.ndarray:
    """Real expectations <P(x, z)> indexed by (x_mask, z_mask)."""
    _require_spectrum(psi.n_qubits)
    d = psi.dim
    basis = np.arange(d, dtype=np.int64)
    products = np.conj(psi.amplitudes[basis[None, :] ^ basis[:, None]]) * psi.amplitudes[None, :]
    phases = _I_POWERS[popcount(basis[:, None] & basis[None, :]) % 4]
    return np.real(phases * walsh_hadamard(products))


def naive_pauli_spectrum(psi: StateVector) -> PauliSpectrum:
    """One O(2^N) expectation per string; the reference path for the fast transform."""
    _require_spectrum(psi.n_qubits)
    d = psi.dim
    values = np.empty((d, d), dtype=np.float64)
    for x in range(d):
        for z in range(d):
            image = apply_pauli(psi, PauliString(psi.n_qubits, x, z))
            values[x, z] = abs(np.vdot(psi.amplitudes, image.amplitudes)) ** 2
    return PauliSpectrum(psi.n_qubits, values)


def stabilizer_purity(psi: StateVector, alpha: float = 2.0) -> float:
    """
    P_alpha = (1/d) sum_P |<P>|^{2 alpha}.

    Args:
        psi (StateVector): Pure state
        alpha (float): Order, at least 1

    Returns:
        float: Purity in (0, 1]
    """
    if alpha < 1:
        raise ValueError("alpha must be at least 1")
    spectrum = pauli_spectrum(psi)
    return float(np.sum(spectrum.values ** alpha) / spectrum.dim)


def magic(psi: StateVector) -> float:
    """Linear stabilizer entropy M = 1 - P_2."""
    return float(max(0.0, 1.0 - stabilizer_purity(psi, 2.0)))


def apply_t_layer(psi: StateVector, k: int) -> StateVector:
    """T on qubits 0..k-1."""
    if k > psi.n_qubits:
        raise ValueError(f"cannot apply {k} T gates to {psi.n_qubits} qubits")
    state = psi
    for qubit in range(k):
        state = apply_1q(state, GATES['T'], qubit)
    return state


def magic_ladder_states(n: int, k_list: Sequence[int],
                        rng: np.random.Generator) -> List[Tuple[StateVector, float]]:
    """
    States C_2 (T^{(x)k} (x) I) C_1 |0...0> with fresh random Cliffords per k.

    Args:
        n (int): Number of qubits
        k_list (Sequence[int]): Number of T gates per state, each at most n
        rng (np.random.Generator): Seeded generator

    Returns:
        List[Tuple[StateVector, float]]: States with their computed magic
    """
    for k in k_list:
        if not 0 <= k <= n:
            raise ValueError(f"k = {k} outside 0..{n}")
    ladder = []
    for k in k_list:
        state = apply_clifford(zero_state(n), sample_uniform_clifford(n, rng))
        state = apply_t_layer(state, k)
        state = apply_clifford(state, sample_uniform_clifford(n, rng))
        value = magic(state)
        logger.debug(f"Ladder state k={k} has magic {value:.6f}")
        ladder.append((state, value))
    return ladder
