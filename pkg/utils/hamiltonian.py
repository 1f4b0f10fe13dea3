"""
Hamiltonian Module for Trotter Error Statistics Toolkit

This module provides the model Hamiltonians (mixed-field Ising chain and the 1D
Heisenberg chain), their product-formula partitions and exact time evolution.
"""

from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, Tuple

import numpy as np

from utils.exceptions import PartitionError
from utils.helpers import require_dense
from utils.logger import get_logger
from utils.pauli import PauliOperator, PauliString, add, popcount, to_dense
from utils.statevector import StateVector

logger = get_logger("hamiltonian")

# (h_x, h_y, J) presets for the mixed-field Ising chain
QIMF_TYPICAL = (0.8090, 0.9045, 1.0)
QIMF_ATYPICAL = (0.0, 0.9045, 1.0)
# (h, J) preset for the Heisenberg chain
HEISENBERG_DEFAULT = (0.2, 1.0)


def _terms_commute(op: PauliOperator) -> bool:
    xs, zs = op.xs, op.zs
    odd = (popcount(xs[:, None] & zs[None, :]) + popcount(zs[:, None] & xs[None, :])) % 2
    return not bool(odd.any())


@dataclass(frozen=True)
class HamiltonianSpec:
    """
    Partitioned Hamiltonian H = sum_l H_l.

    Construction checks that the groups sum to the total, that every group is
    Hermitian and that the terms inside each group pairwise commute.
    """

    n_qubits: int
    total: PauliOperator
    partition: Tuple[PauliOperator, ...]
    name: str = "custom"
    params: Dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, 'partition', tuple(self.partition))
        if not self.partition:
            raise PartitionError("partition must contain at least one group")
        summed = PauliOperator.zero(self.n_qubits)
        for index, group in enumerate(self.partition):
            if group.n_qubits != self.n_qubits:
                raise PartitionError(f"group {index} acts on {group.n_qubits} qubits, expected {self.n_qubits}")
            if not group.is_hermitian():
                raise PartitionError(f"group {index} is not Hermitian")
            if not _terms_commute(group):
                raise PartitionError(f"group {index} contains non-commuting terms")
            summed = add(summed, group)
        if not summed.allclose(self.total, atol=1e-12):
            raise PartitionError("partition groups do not sum to the total Hamiltonian")

    @property
    def n_groups(self) -> int:
        return len(self.partition)

    @property
    def dim(self) -> int:
        return 1 << self.n_qubits

    def dense(self) -> np.ndarray:
        return to_dense(self.total)

    @cached_property
    def eigensystem(self) -> Tuple[np.ndarray, np.ndarray]:
        """Eigenvalues and eigenvectors of the dense total, computed once per Hamiltonian."""
        require_dense(self.n_qubits, "exact evolution")
        logger.debug(f"Diagonalizing {self.name} Hamiltonian on {self.n_qubits} qubits")
        values, vectors = np.linalg.eigh(self.dense())
        return values, vectors

    def describe(self) -> Dict[str, object]:
        return {'name': self.name, 'n_qubits': self.n_qubits, 'params': dict(self.params),
                'n_groups': self.n_groups, 'n_terms': len(self.total)}


def _field(n: int, letter: str, strength: float) -> PauliOperator:
    return PauliOperator.from_terms(n, [(PauliString.single(n, letter, j), strength) for j in range(n)])


def _bonds(n: int, letter: str, strength: float) -> PauliOperator:
    terms = []
    for j in range(n - 1):
        label = ['I'] * n
        label[j] = label[j + 1] = letter
        terms.append((PauliString.from_label(''.join(label)), strength))
    return PauliOperator.from_terms(n, terms)


def qimf(n: int, h_x: float, h_y: float, J: float) -> HamiltonianSpec:
    """
    Open-chain mixed-field Ising model h_x sum X + h_y sum Y + J sum XX.

    Args:
        n (int): Number of spins, at least 2
        h_x (float): X field
        h_y (float): Y field
        J (float): XX coupling

    Returns:
        HamiltonianSpec: Partition [A, B] with A the X and XX terms, B the Y terms
    """
    if n < 2:
        raise ValueError("the chain needs at least 2 qubits")
    group_a = add(_field(n, 'X', h_x), _bonds(n, 'X', J))
    group_b = _field(n, 'Y', h_y)
    return HamiltonianSpec(n, add(group_a, group_b), (group_a, group_b), name="qimf",
                           params={'h_x': h_x, 'h_y': h_y, 'J': J})


def heisenberg(n: int, h: float, J: float) -> HamiltonianSpec:
    """
    Open-chain Heisenberg model h sum X + J sum (XX + YY + ZZ).

    Args:
        n (int): Number of spins, at least 2
        h (float): X field
        J (float): Isotropic coupling

    Returns:
        HamiltonianSpec: Partition [h X + J XX, J YY, J ZZ]
    """
    if n < 2:
        raise ValueError("the chain needs at least 2 qubits")
    groups = (add(_field(n, 'X', h), _bonds(n, 'X', J)), _bonds(n, 'Y', J), _bonds(n, 'Z', J))
    total = add(add(groups[0], groups[1]), groups[2])
    return HamiltonianSpec(n, total, groups, name="heisenberg", params={'h': h, 'J': J})


def exact_evolution_operator(hamiltonian: HamiltonianSpec, t: float) -> np.ndarray:
    """
    Dense e^{-iHt} from the cached eigendecomposition.

    Args:
        hamiltonian (HamiltonianSpec): Hamiltonian to evolve under
        t (float): Evolution time

    Returns:
        np.ndarray: Unitary of dimension 2**n_qubits
    """
    values, vectors = hamiltonian.eigensystem
    return (vectors * np.exp(-1j * values * t)[None, :]) @ vectors.conj().T


def evolve_array(amplitudes: np.ndarray, hamiltonian: HamiltonianSpec, t: float) -> np.ndarray:
    """e^{-iHt} applied along axis 0 without forming the full unitary."""
    values, vectors = hamiltonian.eigensystem
    phases = np.exp(-1j * values * t)
    coefficients = vectors.conj().T @ amplitudes
    if amplitudes.ndim == 1:
        return vectors @ (phases * coefficients)
    return vectors @ (phases[:, None] * coefficients)


def evolve(psi: StateVector, hamiltonian: HamiltonianSpec, t: float) -> StateVector:
    """Exact evolution e^{-iHt}|psi>."""
    if psi.n_qubits != hamiltonian.n_qubits:
        raise ValueError(f"qubit count mismatch: {psi.n_qubits} vs {hamiltonian.n_qubits}")
    return StateVector(psi.n_qubits, evolve_array(psi.amplitudes, hamiltonian, t), check_norm=False)
