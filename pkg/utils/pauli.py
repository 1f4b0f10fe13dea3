"""
Pauli Algebra Module for Trotter Error Statistics Toolkit

This module provides bit-mask Pauli strings with exact phase tracking and sparse
operators written as weighted sums of Pauli strings.

Qubit q lives in bit (n_qubits - 1 - q) of both masks, which lines the masks up
with statevector amplitude indices (qubit 0 is the most significant bit). The
unsigned string with masks (x, z) is the Hermitian operator i^|x&z| X^x Z^z, so
x = z = 1 on a qubit reads as Y.
"""

from dataclasses import dataclass
from typing import Any, Dict, FrozenSet, Iterable, Iterator, List, Tuple, Union

import numpy as np

from utils.helpers import require_dense
from utils.logger import get_logger

logger = get_logger("pauli")

PRUNE_TOLERANCE = 1e-14

_I_POWERS = np.array([1.0, 1.0j, -1.0, -1.0j], dtype=np.complex128)
_PHASE_PREFIX = {0: '+', 1: '+i', 2: '-', 3: '-i'}
_PREFIX_PHASE = {'+i': 1, '-i': 3, 'i': 1, '+': 0, '-': 2, '': 0}
_LETTER_BITS = {'I': (0, 0), 'X': (1, 0), 'Y': (1, 1), 'Z': (0, 1)}
_POP16 = np.array([bin(i).count('1') for i in range(1 << 16)], dtype=np.int64)

# Products per block when multiplying large operators
_PRODUCT_BLOCK = 1 << 22


def popcount(values: Union[int, np.ndarray]) -> Union[int, np.ndarray]:
    """
    Count set bits of a non-negative integer or an integer array.

    Args:
        values (Union[int, np.ndarray]): Masks below 2**64

    Returns:
        Union[int, np.ndarray]: Bit counts with the same shape
    """
    if isinstance(values, (int, np.integer)):
        return bin(int(values)).count('1')
    v = np.asarray(values, dtype=np.int64)
    return (_POP16[v & 0xFFFF] + _POP16[(v >> 16) & 0xFFFF]
            + _POP16[(v >> 32) & 0xFFFF] + _POP16[(v >> 48) & 0xFFFF])


def qubit_bit(n_qubits: int, qubit: int) -> int:
    """Mask bit holding the given qubit."""
    return 1 << (n_qubits - 1 - qubit)


def mask_to_qubits(n_qubits: int, mask: int) -> FrozenSet[int]:
    """Set of qubits whose bit is set in mask."""
    return frozenset(q for q in range(n_qubits) if mask & qubit_bit(n_qubits, q))


def qubits_to_mask(n_qubits: int, qubits: Iterable[int]) -> int:
    """Mask with the bits of the given qubits set."""
    mask = 0
    for q in qubits:
        if not 0 <= q < n_qubits:
            raise ValueError(f"qubit {q} out of range for {n_qubits} qubits")
        mask |= qubit_bit(n_qubits, q)
    return mask


def walsh_hadamard(values: np.ndarray) -> np.ndarray:
    """
    Unnormalized Walsh-Hadamard transform along the last axis.

    out[..., z] = sum_c (-1)^popcount(z & c) values[..., c]

    Args:
        values (np.ndarray): Array whose last axis has power-of-two length

    Returns:
        np.ndarray: Transformed copy
    """
    out = np.array(values, dtype=np.result_type(values, np.float64), copy=True)
    d = out.shape[-1]
    if d & (d - 1):
        raise ValueError("last axis length must be a power of two")
    lead = out.shape[:-1]
    h = 1
    while h < d:
        view = out.reshape(*lead, d // (2 * h), 2, h)
        upper = view[..., 0, :].copy()
        lower = view[..., 1, :]
        view[..., 0, :] = upper + lower
        view[..., 1, :] = upper - lower
        h *= 2
    return out


@dataclass(frozen=True, order=True)
class PauliString:
    """An N-qubit Pauli word i^phase_exp * P(x_mask, z_mask)."""

    n_qubits: int
    x_mask: int
    z_mask: int
    phase_exp: int = 0

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError("n_qubits must be positive")
        limit = 1 << self.n_qubits
        if not (0 <= self.x_mask < limit and 0 <= self.z_mask < limit):
            raise ValueError(f"masks exceed {self.n_qubits} qubits")
        object.__setattr__(self, 'phase_exp', int(self.phase_exp) % 4)

    @classmethod
    def identity(cls, n_qubits: int) -> 'PauliString':
        return cls(n_qubits, 0, 0, 0)

    @classmethod
    def from_label(cls, label: str, phase_exp: int = 0) -> 'PauliString':
        """
        Build a string from per-qubit letters, qubit 0 leftmost.

        Args:
            label (str): Letters from I, X, Y, Z
            phase_exp (int): Power of i multiplying the Hermitian string

        Returns:
            PauliString: The parsed string
        """
        n = len(label)
        x_mask = z_mask = 0
        for q, letter in enumerate(label.upper()):
            if letter not in _LETTER_BITS:
                raise ValueError(f"invalid Pauli letter {letter!r}")
            xb, zb = _LETTER_BITS[letter]
            if xb:
                x_mask |= qubit_bit(n, q)
            if zb:
                z_mask |= qubit_bit(n, q)
        return cls(n, x_mask, z_mask, phase_exp)

    @classmethod
    def parse(cls, text: str) -> 'PauliString':
        """Parse the text form produced by to_text, e.g. '-iXZ' or '+YY'."""
        text = text.strip()
        body = text.lstrip('+-i')
        prefix = text[:len(text) - len(body)]
        if prefix not in _PREFIX_PHASE:
            raise ValueError(f"invalid phase prefix {prefix!r}")
        return cls.from_label(body, _PREFIX_PHASE[prefix])

    @classmethod
    def single(cls, n_qubits: int, letter: str, qubit: int) -> 'PauliString':
        """Single-qubit Pauli letter on one qubit of an N-qubit register."""
        label = ['I'] * n_qubits
        label[qubit] = letter
        return cls.from_label(''.join(label))

    @property
    def label(self) -> str:
        letters = []
        for q in range(self.n_qubits):
            bit = qubit_bit(self.n_qubits, q)
            letters.append({(0, 0): 'I', (1, 0): 'X', (1, 1): 'Y', (0, 1): 'Z'}[
                (int(bool(self.x_mask & bit)), int(bool(self.z_mask & bit)))])
        return ''.join(letters)

    @property
    def unsigned(self) -> 'PauliString':
        return PauliString(self.n_qubits, self.x_mask, self.z_mask, 0)

    @property
    def phase(self) -> complex:
        return complex(_I_POWERS[self.phase_exp])

    def is_hermitian(self) -> bool:
        return self.phase_exp in (0, 2)

    def is_identity(self) -> bool:
        return self.x_mask == 0 and self.z_mask == 0

    def weight(self) -> int:
        return popcount(self.x_mask | self.z_mask)

    def support(self) -> FrozenSet[int]:
        return mask_to_qubits(self.n_qubits, self.x_mask | self.z_mask)

    def to_text(self) -> str:
        return f"{_PHASE_PREFIX[self.phase_exp]}{self.label}"

    def to_matrix(self) -> np.ndarray:
        return PauliOperator.from_terms(self.n_qubits, [(self, 1.0)]).to_dense()

    def __mul__(self, other: 'PauliString') -> 'PauliString':
        return string_mul(self, other)

    def __str__(self) -> str:
        return self.to_text()


def _check_same(a: Any, b: Any) -> None:
    if a.n_qubits != b.n_qubits:
        raise ValueError(f"qubit count mismatch: {a.n_qubits} vs {b.n_qubits}")


def symplectic_form(a: PauliString, b: PauliString) -> int:
    """popcount(a.x & b.z) + popcount(a.z & b.x), mod 2."""
    _check_same(a, b)
    return (popcount(a.x_mask & b.z_mask) + popcount(a.z_mask & b.x_mask)) % 2


def string_mul(a: PauliString, b: PauliString) -> PauliString:
    """
    Multiply two Pauli strings with exact phase tracking.

    Args:
        a (PauliString): Left factor
        b (PauliString): Right factor

    Returns:
        PauliString: The product ab
    """
    _check_same(a, b)
    x = a.x_mask ^ b.x_mask
    z = a.z_mask ^ b.z_mask
    phase = (a.phase_exp + b.phase_exp
             + popcount(a.x_mask & a.z_mask) + popcount(b.x_mask & b.z_mask)
             + 2 * popcount(a.z_mask & b.x_mask) - popcount(x & z))
    return PauliString(a.n_qubits, x, z, phase % 4)


def commutes(a: PauliString, b: PauliString) -> bool:
    """True when the two strings commute."""
    return symplectic_form(a, b) == 0


def _product_phase(ax, az, bx, bz):
    x = ax ^ bx
    z = az ^ bz
    phase = (popcount(ax & az) + popcount(bx & bz) + 2 * popcount(az & bx) - popcount(x & z)) % 4
    return x, z, phase


def _canonical(n_qubits: int, xs: np.ndarray, zs: np.ndarray, coeffs: np.ndarray,
               tol: float) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    if len(coeffs) == 0:
        return (np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64),
                np.zeros(0, dtype=np.complex128))
    keys = (np.asarray(xs, dtype=np.int64) << n_qubits) | np.asarray(zs, dtype=np.int64)
    unique_keys, inverse = np.unique(keys, return_inverse=True)
    coeffs = np.asarray(coeffs, dtype=np.complex128)
    real = np.bincount(inverse, weights=coeffs.real, minlength=len(unique_keys))
    imag = np.bincount(inverse, weights=coeffs.imag, minlength=len(unique_keys))
    merged = real + 1j * imag
    keep = np.abs(merged) >= tol
    unique_keys = unique_keys[keep]
    mask = (1 << n_qubits) - 1
    return unique_keys >> n_qubits, unique_keys & mask, merged[keep]


class PauliOperator:
    """
    Sparse operator sum_P c_P P over unsigned Hermitian Pauli strings.

    Terms are kept sorted by (x_mask, z_mask) and coefficients with magnitude
    below the pruning tolerance are dropped. Instances are immutable.
    """

    def __init__(self, n_qubits: int, xs: Iterable[int] = (), zs: Iterable[int] = (),
                 coeffs: Iterable[complex] = (), tol: float = PRUNE_TOLERANCE):
        if n_qubits < 1:
            raise ValueError("n_qubits must be positive")
        xs = np.asarray(list(xs) if not isinstance(xs, np.ndarray) else xs, dtype=np.int64)
        zs = np.asarray(list(zs) if not isinstance(zs, np.ndarray) else zs, dtype=np.int64)
        coeffs = np.asarray(list(coeffs) if not isinstance(coeffs, np.ndarray) else coeffs,
                            dtype=np.complex128)
        if not (xs.shape == zs.shape == coeffs.shape):
            raise ValueError("xs, zs and coeffs must have the same length")
        limit = 1 << n_qubits
        if len(xs) and (xs.min() < 0 or zs.min() < 0 or xs.max() >= limit or zs.max() >= limit):
            raise ValueError(f"masks exceed {n_qubits} qubits")
        self.n_qubits = n_qubits
        self.tol = tol
        self.xs, self.zs, self.coeffs = _canonical(n_qubits, xs, zs, coeffs, tol)
        for array in (self.xs, self.zs, self.coeffs):
            array.setflags(write=False)

    # Construction helpers

    @classmethod
    def from_terms(cls, n_qubits: int,
                   terms: Iterable[Tuple[Union[str, PauliString], complex]]) -> 'PauliOperator':
        """
        Build an operator from (string, coefficient) pairs.

        Signed strings have their phase folded into the coefficient.

        Args:
            n_qubits (int): Register size
            terms (Iterable[Tuple[Union[str, PauliString], complex]]): Terms to sum

        Returns:
            PauliOperator: The merged operator
        """
        xs, zs, coeffs = [], [], []
        for pauli, coeff in terms:
            if isinstance(pauli, str):
                pauli = PauliString.parse(pauli)
            if pauli.n_qubits != n_qubits:
                raise ValueError(f"qubit count mismatch: {pauli.n_qubits} vs {n_qubits}")
            xs.append(pauli.x_mask)
            zs.append(pauli.z_mask)
            coeffs.append(complex(coeff) * pauli.phase)
        return cls(n_qubits, xs, zs, coeffs)

    @classmethod
    def identity(cls, n_qubits: int, coeff: complex = 1.0) -> 'PauliOperator':
        return cls(n_qubits, [0], [0], [coeff])

    @classmethod
    def zero(cls, n_qubits: int) -> 'PauliOperator':
        return cls(n_qubits)

    @classmethod
    def from_dense(cls, matrix: np.ndarray, tol: float = PRUNE_TOLERANCE) -> 'PauliOperator':
        """Pauli decomposition of a dense matrix, see from_dense()."""
        return from_dense(matrix, tol)

    @classmethod
    def from_json_list(cls, n_qubits: int, items: List[Dict[str, Any]]) -> 'PauliOperator':
        return cls.from_terms(n_qubits, [(item['pauli'], complex(item['re'], item['im']))
                                         for item in items])

    # Views

    def __len__(self) -> int:
        return len(self.coeffs)

    def __iter__(self) -> Iterator[Tuple[PauliString, complex]]:
        for x, z, c in zip(self.xs, self.zs, self.coeffs):
            yield PauliString(self.n_qubits, int(x), int(z)), complex(c)

    @property
    def terms(self) -> Dict[PauliString, complex]:
        return dict(iter(self))

    @property
    def keys(self) -> np.ndarray:
        return (self.xs << self.n_qubits) | self.zs

    @property
    def dim(self) -> int:
        return 1 << self.n_qubits

    def coefficient(self, pauli: Union[str, PauliString]) -> complex:
        if isinstance(pauli, str):
            pauli = PauliString.parse(pauli)
        key = (pauli.x_mask << self.n_qubits) | pauli.z_mask
        index = np.searchsorted(self.keys, key)
        if index < len(self) and self.keys[index] == key:
            return complex(self.coeffs[index]) * pauli.phase.conjugate()
        return 0j

    def identity_coefficient(self) -> complex:
        return self.coefficient(PauliString.identity(self.n_qubits))

    def trace(self) -> complex:
        return self.dim * self.identity_coefficient()

    def is_zero(self) -> bool:
        return len(self) == 0

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        return bool(np.all(np.abs(self.coeffs.imag) <= tol))

    def support(self) -> FrozenSet[int]:
        if len(self) == 0:
            return frozenset()
        mask = int(np.bitwise_or.reduce(self.xs | self.zs))
        return mask_to_qubits(self.n_qubits, mask)

    def term_supports(self) -> np.ndarray:
        """Support mask of every term."""
        return self.xs | self.zs

    # Algebra

    def _with(self, xs, zs, coeffs) -> 'PauliOperator':
        return PauliOperator(self.n_qubits, xs, zs, coeffs, tol=self.tol)

    def __add__(self, other: 'PauliOperator') -> 'PauliOperator':
        return add(self, other)

    def __sub__(self, other: 'PauliOperator') -> 'PauliOperator':
        return add(self, scale(other, -1.0))

    def __neg__(self) -> 'PauliOperator':
        return scale(self, -1.0)

    def __mul__(self, other: Union['PauliOperator', complex, float]) -> 'PauliOperator':
        if isinstance(other, PauliOperator):
            return op_mul(self, other)
        return scale(self, other)

    def __rmul__(self, other: Union[complex, float]) -> 'PauliOperator':
        return scale(self, other)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PauliOperator):
            return NotImplemented
        return (self.n_qubits == other.n_qubits and np.array_equal(self.xs, other.xs)
                and np.array_equal(self.zs, other.zs) and np.array_equal(self.coeffs, other.coeffs))

    __hash__ = None

    def allclose(self, other: 'PauliOperator', atol: float = 1e-12) -> bool:
        _check_same(self, other)
        difference = add(self, scale(other, -1.0))
        return bool(np.all(np.abs(difference.coeffs) <= atol))

    def dagger(self) -> 'PauliOperator':
        return dagger(self)

    def conjugate_by(self, pauli: PauliString) -> 'PauliOperator':
        """Return P A P for a Hermitian string P, flipping anticommuting terms."""
        if pauli.n_qubits != self.n_qubits:
            raise ValueError("qubit count mismatch")
        odd = (popcount(self.xs & pauli.z_mask) + popcount(self.zs & pauli.x_mask)) % 2
        return self._with(self.xs, self.zs, np.where(odd == 1, -self.coeffs, self.coeffs))

    def frobenius_norm_sq(self) -> float:
        return frobenius_norm_sq(self)

    def abs_envelope(self) -> 'PauliOperator':
        return abs_envelope(self)

    def to_dense(self) -> np.ndarray:
        return to_dense(self)

    def to_json_list(self) -> List[Dict[str, Any]]:
        return [{'pauli': pauli.label, 're': c.real, 'im': c.imag} for pauli, c in self]

    def __repr__(self) -> str:
        shown = ', '.join(f"{c:.6g}*{p.label}" for p, c in list(self)[:8])
        more = '' if len(self) <= 8 else f", ... ({len(self)} terms)"
        return f"PauliOperator(n={self.n_qubits}, [{shown}{more}])"


def add(a: PauliOperator, b: PauliOperator) -> PauliOperator:
    """Sum of two operators with merging and pruning."""
    _check_same(a, b)
    return PauliOperator(a.n_qubits, np.concatenate([a.xs, b.xs]), np.concatenate([a.zs, b.zs]),
                         np.concatenate([a.coeffs, b.coeffs]), tol=min(a.tol, b.tol))


def scale(a: PauliOperator, c: complex) -> PauliOperator:
    """Multiply every coefficient by c."""
    return PauliOperator(a.n_qubits, a.xs, a.zs, a.coeffs * complex(c), tol=a.tol)


def dagger(a: PauliOperator) -> PauliOperator:
    """Adjoint; unsigned strings are Hermitian so only coefficients conjugate."""
    return PauliOperator(a.n_qubits, a.xs, a.zs, np.conj(a.coeffs), tol=a.tol)


def _products(a: PauliOperator, b: PauliOperator, anticommuting_only: bool = False):
    """Yield blocks of (x, z, coeff) for all pairwise products of terms."""
    if len(a) == 0 or len(b) == 0:
        return
    rows = max(1, _PRODUCT_BLOCK // max(1, len(b)))
    for start in range(0, len(a), rows):
        ax = a.xs[start:start + rows, None]
        az = a.zs[start:start + rows, None]
        ac = a.coeffs[start:start + rows, None]
        x, z, phase = _product_phase(ax, az, b.xs[None, :], b.zs[None, :])
        coeffs = ac * b.coeffs[None, :] * _I_POWERS[phase]
        if anticommuting_only:
            odd = (popcount(ax & b.zs[None, :]) + popcount(az & b.xs[None, :])) % 2
            coeffs = np.where(odd == 1, 2.0 * coeffs, 0.0)
        yield x.ravel(), z.ravel(), coeffs.ravel()


def _collect(a: PauliOperator, b: PauliOperator, blocks) -> PauliOperator:
    n = a.n_qubits
    tol = min(a.tol, b.tol)
    parts = [_canonical(n, x, z, c, 0.0) for x, z, c in blocks]
    if not parts:
        return PauliOperator(n, tol=tol)
    return PauliOperator(n, np.concatenate([p[0] for p in parts]),
                         np.concatenate([p[1] for p in parts]),
                         np.concatenate([p[2] for p in parts]), tol=tol)


def op_mul(a: PauliOperator, b: PauliOperator) -> PauliOperator:
    """
    Operator product AB by distributing string_mul over both term lists.

    Args:
        a (PauliOperator): Left factor
        b (PauliOperator): Right factor

    Returns:
        PauliOperator: Merged and pruned product
    """
    _check_same(a, b)
    return _collect(a, b, _products(a, b))


def _ordered_before(a: PauliOperator, b: PauliOperator) -> bool:
    if len(a) != len(b):
        return len(a) < len(b)
    for left, right in ((a.keys, b.keys), (a.coeffs.real, b.coeffs.real),
                        (a.coeffs.imag, b.coeffs.imag)):
        unequal = np.nonzero(left != right)[0]
        if len(unequal):
            return bool(left[unequal[0]] < right[unequal[0]])
    return True


def commutator(a: PauliOperator, b: PauliOperator) -> PauliOperator:
    """
    AB - BA. Only anticommuting string pairs contribute, each as 2PQ.

    The operand pair is put in a canonical order first so that swapping the
    arguments negates the result bit for bit.
    """
    _check_same(a, b)
    if _ordered_before(a, b):
        return _collect(a, b, _products(a, b, anticommuting_only=True))
    return scale(_collect(b, a, _products(b, a, anticommuting_only=True)), -1.0)


def frobenius_norm_sq(a: PauliOperator) -> float:
    """Normalized Frobenius norm squared, Tr(A^dagger A)/d = sum |c_P|^2."""
    return float(np.sum(np.abs(a.coeffs) ** 2))


def abs_envelope(a: PauliOperator) -> PauliOperator:
    """Replace every coefficient by its absolute value."""
    return PauliOperator(a.n_qubits, a.xs, a.zs, np.abs(a.coeffs).astype(np.complex128), tol=a.tol)


def trace_inner(a: PauliOperator, b: PauliOperator) -> complex:
    """Tr(AB)/d computed as the sum over shared strings of coefficient products."""
    _check_same(a, b)
    _, ia, ib = np.intersect1d(a.keys, b.keys, assume_unique=True, return_indices=True)
    return complex(np.sum(a.coeffs[ia] * b.coeffs[ib]))


def support(obj: Union[PauliString, PauliOperator]) -> FrozenSet[int]:
    """Qubits on which a string or operator acts nontrivially."""
    return obj.support()


def to_dense(a: PauliOperator) -> np.ndarray:
    """
    Dense matrix sum_P c_P P.

    Args:
        a (PauliOperator): Operator to expand

    Returns:
        np.ndarray: Complex matrix of dimension 2**n_qubits
    """
    require_dense(a.n_qubits, "dense operator")
    d = a.dim
    cols = np.arange(d, dtype=np.int64)
    matrix = np.zeros((d, d), dtype=np.complex128)
    for x, z, c in zip(a.xs, a.zs, a.coeffs):
        values = c * _I_POWERS[popcount(int(x & z)) % 4] * (1 - 2 * (popcount(z & cols) % 2))
        matrix[cols ^ x, cols] += values
    return matrix


def from_dense(matrix: np.ndarray, tol: float = PRUNE_TOLERANCE) -> PauliOperator:
    """
    Pauli decomposition c_P = Tr(P M)/d via one Walsh-Hadamard transform per x mask.

    Args:
        matrix (np.ndarray): Square matrix with power-of-two dimension
        tol (float): Pruning tolerance for the returned operator

    Returns:
        PauliOperator: Operator whose dense form equals the matrix
    """
    matrix = np.asarray(matrix, dtype=np.complex128)
    d = matrix.shape[0]
    if matrix.shape != (d, d) or d < 2 or d & (d - 1):
        raise ValueError("matrix must be square with power-of-two dimension")
    n = d.bit_length() - 1
    require_dense(n, "Pauli decomposition")
    cols = np.arange(d, dtype=np.int64)
    xs = cols[:, None]
    # row x holds M[c, c ^ x] for every c
    shifted = matrix[cols[None, :], cols[None, :] ^ xs]
    transformed = walsh_hadamard(shifted)
    zs = cols[None, :]
    phases = _I_POWERS[popcount(xs & zs) % 4]
    coeffs = phases * transformed / d
    return PauliOperator(n, np.broadcast_to(xs, (d, d)).ravel().copy(),
                         np.broadcast_to(zs, (d, d)).ravel().copy(), coeffs.ravel(), tol=tol)
