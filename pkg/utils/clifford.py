"""
Clifford Module for Trotter Error Statistics Toolkit

This module provides symplectic tableaux for N-qubit Clifford unitaries, exactly
uniform sampling (Koenig-Smolin index construction with uniform sign bits),
synthesis into H, S, CNOT, X and Z gates, composition, and enumeration of small
Clifford groups by closure under the generators.

Tableau rows 0..N-1 are the images of X_0..X_{N-1}, rows N..2N-1 the images of
Z_0..Z_{N-1}. Each row is [x bits of qubits 0..N-1 | z bits of qubits 0..N-1]
and describes the Hermitian string (-1)^sign P(x, z).
"""

import json
from collections import deque
from functools import lru_cache
from typing import Iterator, List, NamedTuple, Sequence, Tuple

import numpy as np

from utils.exceptions import InvalidTableauError
from utils.helpers import require_dense
from utils.logger import get_logger
from utils.pauli import PauliString, qubit_bit, string_mul
from utils.statevector import GATES, StateVector, apply_1q, apply_2q, basis_state

logger = get_logger("clifford")

ENUMERATION_QUBIT_LIMIT = 2


class Gate(NamedTuple):
    name: str
    qubits: Tuple[int, ...]


class CliffordTableau:
    """Symplectic matrix over GF(2) plus one sign bit per generator image."""

    def __init__(self, n_qubits: int, matrix: np.ndarray, signs: Sequence[int]):
        matrix = np.asarray(matrix, dtype=np.uint8) % 2
        signs = np.asarray(signs, dtype=np.uint8) % 2
        if n_qubits < 1 or matrix.shape != (2 * n_qubits, 2 * n_qubits) or signs.shape != (2 * n_qubits,):
            raise InvalidTableauError("tableau shape does not match the qubit count")
        matrix.setflags(write=False)
        signs.setflags(write=False)
        self.n_qubits = n_qubits
        self.matrix = matrix
        self.signs = signs

    @classmethod
    def identity(cls, n_qubits: int) -> 'CliffordTableau':
        return cls(n_qubits, np.eye(2 * n_qubits, dtype=np.uint8), np.zeros(2 * n_qubits, dtype=np.uint8))

    @classmethod
    def from_gates(cls, n_qubits: int, gates: Sequence[Gate]) -> 'CliffordTableau':
        """Tableau of the circuit that applies gates in list order."""
        tableau = cls.identity(n_qubits)
        for gate in gates:
            tableau = tableau.apply_gate(gate.name, gate.qubits)
        return tableau

    def is_valid(self) -> bool:
        n = self.n_qubits
        omega = np.zeros((2 * n, 2 * n), dtype=np.int64)
        omega[:n, n:] = np.eye(n, dtype=np.int64)
        omega[n:, :n] = np.eye(n, dtype=np.int64)
        m = self.matrix.astype(np.int64)
        return bool(np.array_equal((m @ omega @ m.T) % 2, omega))

    def validate(self) -> None:
        if not self.is_valid():
            raise InvalidTableauError("rows violate the Pauli commutation relations")

    def key(self) -> bytes:
        return self.matrix.tobytes() + self.signs.tobytes()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CliffordTableau):
            return NotImplemented
        return self.n_qubits == other.n_qubits and self.key() == other.key()

    def __hash__(self) -> int:
        return hash((self.n_qubits, self.key()))

    def image(self, row: int) -> PauliString:
        """Signed image of generator row (X_q for row q, Z_q for row N + q)."""
        n = self.n_qubits
        x_mask = z_mask = 0
        for q in range(n):
            if self.matrix[row, q]:
                x_mask |= qubit_bit(n, q)
            if self.matrix[row, n + q]:
                z_mask |= qubit_bit(n, q)
        return PauliString(n, x_mask, z_mask, 2 * int(self.signs[row]))

    def conjugate_pauli(self, pauli: PauliString) -> PauliString:
        """C P C^dagger for any Pauli string P."""
        n = self.n_qubits
        if pauli.n_qubits != n:
            raise ValueError("qubit count mismatch")
        result = PauliString(n, 0, 0, pauli.phase_exp + bin(pauli.x_mask & pauli.z_mask).count('1'))
        for q in range(n):
            if pauli.x_mask & qubit_bit(n, q):
                result = string_mul(result, self.image(q))
        for q in range(n):
            if pauli.z_mask & qubit_bit(n, q):
                result = string_mul(result, self.image(n + q))
        return result

    def compose(self, other: 'CliffordTableau') -> 'CliffordTableau':
        """Tableau of other applied after this Clifford, i.e. of the product other * self."""
        n = self.n_qubits
        if other.n_qubits != n:
            raise ValueError(f"qubit count mismatch: {n} vs {other.n_qubits}")
        matrix = np.zeros((2 * n, 2 * n), dtype=np.uint8)
        signs = np.zeros(2 * n, dtype=np.uint8)
        for row in range(2 * n):
            image = other.conjugate_pauli(self.image(row))
            for q in range(n):
                matrix[row, q] = 1 if image.x_mask & qubit_bit(n, q) else 0
                matrix[row, n + q] = 1 if image.z_mask & qubit_bit(n, q) else 0
            signs[row] = (image.phase_exp % 4) // 2
        return CliffordTableau(n, matrix, signs)

    def apply_gate(self, name: str, qubits: Sequence[int]) -> 'CliffordTableau':
        """
        Tableau of G C, i.e. every generator image conjugated by the gate.

        Args:
            name (str): One of H, S, SDG, X, Y, Z, CNOT
            qubits (Sequence[int]): Target qubit(s); control first for CNOT

        Returns:
            CliffordTableau: The updated tableau
        """
        n = self.n_qubits
        m = self.matrix.copy()
        s = self.signs.copy()
        for q in qubits:
            if not 0 <= q < n:
                raise ValueError(f"qubit {q} out of range for {n} qubits")
        a = qubits[0]
        x, z = m[:, a].copy(), m[:, n + a].copy()
        if name == 'H':
            s ^= x & z
            m[:, a], m[:, n + a] = z, x
        elif name == 'S':
            s ^= x & z
            m[:, n + a] = z ^ x
        elif name == 'SDG':
            s ^= x & (z ^ 1)
            m[:, n + a] = z ^ x
        elif name == 'X':
            s ^= z
        elif name == 'Z':
            s ^= x
        elif name == 'Y':
            s ^= x ^ z
        elif name == 'CNOT':
            t = qubits[1]
            if t == a:
                raise ValueError("CNOT needs distinct qubits")
            xt, zt = m[:, t].copy(), m[:, n + t].copy()
            s ^= x & zt & (xt ^ z ^ 1)
            m[:, t] = xt ^ x
            m[:, n + a] = z ^ zt
        else:
            raise ValueError(f"unsupported gate {name!r}")
        return CliffordTableau(n, m, s)

    def to_json(self) -> str:
        rows = [''.join(str(int(b)) for b in row) for row in self.matrix]
        return json.dumps({'n_qubits': self.n_qubits, 'rows': rows,
                           'signs': [int(b) for b in self.signs]})

    @classmethod
    def from_json(cls, text: str) -> 'CliffordTableau':
        data = json.loads(text)
        matrix = [[int(ch) for ch in row] for row in data['rows']]
        return cls(data['n_qubits'], matrix, data['signs'])

    def __repr__(self) -> str:
        return f"CliffordTableau(n_qubits={self.n_qubits})"


# Koenig-Smolin construction, interleaved (x_0, z_0, x_1, z_1, ...) convention

def num_symplectics(n: int) -> int:
    """Order of Sp(2n, GF(2))."""
    total = 1
    for j in range(1, n + 1):
        total *= 2 ** (2 * j - 1) * (4 ** j - 1)
    return total


def num_cliffords(n: int) -> int:
    """Order of the N-qubit Clifford group modulo phases."""
    return num_symplectics(n) * 4 ** n


def _inner(v: np.ndarray, w: np.ndarray) -> int:
    return int(np.sum(v[0::2] * w[1::2] + v[1::2] * w[0::2]) % 2)


def _transvection(k: np.ndarray, v: np.ndarray) -> np.ndarray:
    return (v + _inner(k, v) * k) % 2


def _int_to_bits(value: int, length: int) -> np.ndarray:
    return np.array([(value >> j) & 1 for j in range(length)], dtype=np.int64)


def _find_transvection(x: np.ndarray, y: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Vectors h1, h2 with y = Z_h1 Z_h2 x (a zero vector is the identity transvection)."""
    size = x.shape[0]
    h1 = np.zeros(size, dtype=np.int64)
    h2 = np.zeros(size, dtype=np.int64)
    if np.array_equal(x, y):
        return h1, h2
    if _inner(x, y) == 1:
        return (x + y) % 2, h2

    z = np.zeros(size, dtype=np.int64)
    for i in range(0, size, 2):
        if (x[i] or x[i + 1]) and (y[i] or y[i + 1]):
            z[i] = (x[i] + y[i]) % 2
            z[i + 1] = (x[i + 1] + y[i + 1]) % 2
            if z[i] == 0 and z[i + 1] == 0:
                z[i + 1] = 1
                if x[i] != x[i + 1]:
                    z[i] = 1
            return (x + z) % 2, (y + z) % 2

    for i in range(0, size, 2):
        if (x[i] or x[i + 1]) and not (y[i] or y[i + 1]):
            if x[i] == x[i + 1]:
                z[i + 1] = 1
            else:
                z[i + 1] = x[i]
                z[i] = x[i + 1]
            break
    for i in range(0, size, 2):
        if not (x[i] or x[i + 1]) and (y[i] or y[i + 1]):
            if y[i] == y[i + 1]:
                z[i + 1] = 1
            else:
                z[i + 1] = y[i]
                z[i] = y[i + 1]
            break
    return (x + z) % 2, (y + z) % 2


def symplectic_from_index(index: int, n: int) -> np.ndarray:
    """
    The symplectic matrix with canonical index in [0, num_symplectics(n)).

    Args:
        index (int): Canonical index
        n (int): Number of qubits

    Returns:
        np.ndarray: 2n x 2n matrix in the interleaved convention
    """
    size = 2 * n
    cosets = (1 << size) - 1
    k = (index % cosets) + 1
    index //= cosets

    f1 = _int_to_bits(k, size)
    e1 = np.zeros(size, dtype=np.int64)
    e1[0] = 1
    t1, t2 = _find_transvection(e1, f1)

    bits = _int_to_bits(index % (1 << (size - 1)), size - 1)
    eprime = e1.copy()
    eprime[2:] = bits[1:]
    h0 = _transvection(t2, _transvection(t1, eprime))
    if bits[0] == 1:
        f1 = np.zeros(size, dtype=np.int64)

    g = np.eye(size, dtype=np.int64)
    if n > 1:
        g[2:, 2:] = symplectic_from_index(index >> (size - 1), n - 1)
    for j in range(size):
        row = _transvection(t1, g[j])
        row = _transvection(t2, row)
        row = _transvection(h0, row)
        g[j] = _transvection(f1, row)
    return g


def _interleaved_to_block(g: np.ndarray, n: int) -> np.ndarray:
    order = list(range(0, 2 * n, 2)) + list(range(1, 2 * n, 2))
    return g[np.ix_(order, order)]


def _random_below(bound: int, rng: np.random.Generator) -> int:
    """Exactly uniform integer in [0, bound) by rejection on random bytes."""
    bits = max(1, (bound - 1).bit_length())
    mask = (1 << bits) - 1
    while True:
        value = int.from_bytes(rng.bytes((bits + 7) // 8), 'little') & mask
        if value < bound:
            return value


def tableau_from_index(n: int, index: int, signs: Sequence[int]) -> CliffordTableau:
    return CliffordTableau(n, _interleaved_to_block(symplectic_from_index(index, n), n), signs)


def sample_uniform_clifford(n: int, rng: np.random.Generator) -> CliffordTableau:
    """
    Uniformly random N-qubit Clifford modulo global phase.

    Args:
        n (int): Number of qubits
        rng (np.random.Generator): Seeded generator

    Returns:
        CliffordTableau: Sampled tableau
    """
    index = _random_below(num_symplectics(n), rng)
    signs = rng.integers(0, 2, size=2 * n)
    return tableau_from_index(n, index, signs)


def synthesize(tableau: CliffordTableau) -> List[Gate]:
    """
    Gate sequence over {H, S, CNOT, X, Z} whose conjugation action reproduces the tableau.

    The tableau is reduced to the identity one qubit at a time; the returned
    circuit is the inverse of that reduction, to be applied in list order.

    Args:
        tableau (CliffordTableau): Valid tableau

    Returns:
        List[Gate]: Circuit in application order
    """
    tableau.validate()
    n = tableau.n_qubits
    work = tableau
    reduction: List[Gate] = []

    def emit(name: str, *qubits: int) -> None:
        nonlocal work
        work = work.apply_gate(name, qubits)
        reduction.append(Gate(name, tuple(qubits)))

    for q in range(n):
        row = q
        if not work.matrix[row, q:n].any():
            j = q + int(np.flatnonzero(work.matrix[row, n + q:2 * n])[0])
            emit('H', j)
        if not work.matrix[row, q]:
            j = q + int(np.flatnonzero(work.matrix[row, q:n])[0])
            emit('CNOT', j, q)
        for j in range(q + 1, n):
            if work.matrix[row, j]:
                emit('CNOT', q, j)
        if work.matrix[row, n + q]:
            emit('S', q)
        for j in range(q + 1, n):
            if work.matrix[row, n + j]:
                emit('H', j)
                emit('CNOT', q, j)

        row = n + q
        if work.matrix[row, q]:
            emit('H', q)
            emit('S', q)
            emit('H', q)
        for j in range(q + 1, n):
            if work.matrix[row, j] and work.matrix[row, n + j]:
                emit('S', j)
                emit('H', j)
            elif work.matrix[row, j]:
                emit('H', j)
            if work.matrix[row, n + j]:
                emit('CNOT', j, q)

        if work.signs[q]:
            emit('Z', q)
        if work.signs[n + q]:
            emit('X', q)

    if work != CliffordTableau.identity(n):
        raise InvalidTableauError("reduction did not reach the identity tableau")

    circuit: List[Gate] = []
    for gate in reversed(reduction):
        if gate.name == 'S':
            # S^dagger = S^3 keeps the gate set to H, S, CNOT, X, Z
            circuit.extend([gate, gate, gate])
        else:
            circuit.append(gate)
    logger.debug(f"Synthesized {n}-qubit Clifford with {len(circuit)} gates")
    return circuit


def apply_circuit(psi: StateVector, circuit: Sequence[Gate]) -> StateVector:
    state = psi
    for gate in circuit:
        if len(gate.qubits) == 1:
            state = apply_1q(state, GATES[gate.name], gate.qubits[0])
        else:
            state = apply_2q(state, GATES[gate.name], (gate.qubits[0], gate.qubits[1]))
    return state


def apply_clifford(psi: StateVector, tableau: CliffordTableau) -> StateVector:
    """Apply C|psi> gate by gate; the global phase is unconstrained."""
    if psi.n_qubits != tableau.n_qubits:
        raise ValueError(f"qubit count mismatch: {psi.n_qubits} vs {tableau.n_qubits}")
    return apply_circuit(psi, synthesize(tableau))


def tableau_to_unitary(tableau: CliffordTableau) -> np.ndarray:
    """Dense unitary of the synthesized circuit."""
    require_dense(tableau.n_qubits, "Clifford unitary")
    circuit = synthesize(tableau)
    d = 1 << tableau.n_qubits
    columns = [apply_circuit(basis_state(tableau.n_qubits, i), circuit).amplitudes for i in range(d)]
    return np.stack(columns, axis=1)


def _generators(n: int) -> List[Gate]:
    gates = [Gate(name, (q,)) for q in range(n) for name in ('H', 'S')]
    gates += [Gate('CNOT', (a, b)) for a in range(n) for b in range(n) if a != b]
    return gates


def enumerate_cliffords(n: int) -> Iterator[CliffordTableau]:
    """
    Every N-qubit Clifford tableau (N <= 2), by breadth-first closure of the
    identity under H, S and CNOT.

    Args:
        n (int): Number of qubits

    Returns:
        Iterator[CliffordTableau]: Each group element once, in discovery order
    """
    if n > ENUMERATION_QUBIT_LIMIT:
        raise ValueError(f"enumeration is limited to {ENUMERATION_QUBIT_LIMIT} qubits")
    generators = _generators(n)
    start = CliffordTableau.identity(n)
    seen = {start.key()}
    queue = deque([start])
    while queue:
        tableau = queue.popleft()
        yield tableau
        for gate in generators:
            neighbour = tableau.apply_gate(gate.name, gate.qubits)
            if neighbour.key() not in seen:
                seen.add(neighbour.key())
                queue.append(neighbour)


class SingleQubitClifford(NamedTuple):
    tableau: CliffordTableau
    unitary: np.ndarray


@lru_cache(maxsize=1)
def _single_qubit_group() -> Tuple[SingleQubitClifford, ...]:
    elements = {}
    for tableau in enumerate_cliffords(1):
        elements.setdefault(tableau.key(), SingleQubitClifford(tableau, tableau_to_unitary(tableau)))
    return tuple(elements.values())


def enumerate_1q_cliffords() -> List[SingleQubitClifford]:
    """The 24 single-qubit Cliffords modulo phase, deduplicated by tableau."""
    return list(_single_qubit_group())


def sample_local_cliffords(n: int, rng: np.random.Generator) -> List[np.ndarray]:
    """n independent uniform draws from the single-qubit Clifford group."""
    group = _single_qubit_group()
    return [group[int(i)].unitary for i in rng.integers(0, len(group), size=n)]
