"""
Moments Module for Trotter Error Statistics Toolkit

This module provides the exact predictions for the state-dependent error
s_E(psi) = <psi|E^dagger E|psi>:

- entanglement bounds and the exact variance over local Haar rotations,
- Clifford-orbit moments m1..m4, the A and B traces and the kurtosis law,
- Pauli-sum identities used as oracles, tail inequalities, and the
  long-time variance bound for repeated product-formula steps.

Entropies are in bits throughout.
"""

from dataclasses import asdict, dataclass, field
from itertools import product
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from utils.exceptions import DegenerateDistributionError, DimensionLimitError, TermBudgetError
from utils.hamiltonian import HamiltonianSpec
from utils.helpers import pair_support_limit, require_dense, symbolic_term_budget
from utils.logger import get_logger
from utils.pauli import (PauliOperator, PauliString, abs_envelope, add, dagger, frobenius_norm_sq,
                         from_dense, mask_to_qubits, op_mul, popcount, scale, to_dense, trace_inner)
from utils.statevector import StateVector, purity, reduced_density
from utils.trotter import ProductFormula, error_operator, pf_unitary

logger = get_logger("moments")

BRUTE_FORCE_QUBIT_LIMIT = 3
ZELEN_SLACK = 1e-12


# Local structure of the error operator

def local_error_terms(error: PauliOperator) -> List[PauliOperator]:
    """
    Split E into site-local pieces E_j, grouping each term on the lowest qubit of its support.

    Args:
        error (PauliOperator): Leading error operator

    Returns:
        List[PauliOperator]: Nonzero pieces ordered by site; an identity term joins the first piece
    """
    n = error.n_qubits
    supports = error.term_supports()
    sites = np.where(supports == 0, 0, n - np.array([int(s).bit_length() for s in supports], dtype=np.int64))
    pieces = []
    for site in np.unique(sites):
        chosen = sites == site
        pieces.append(PauliOperator(n, error.xs[chosen], error.zs[chosen], error.coeffs[chosen], tol=error.tol))
    return pieces


def error_pair_operator(e_j: PauliOperator, e_k: PauliOperator,
                        diagonal: Optional[bool] = None) -> PauliOperator:
    """
    E_jk = (E_k^dagger E_j + E_j^dagger E_k - Tr(...) I/d) / (1 + delta_jk).

    Args:
        e_j (PauliOperator): First local piece
        e_k (PauliOperator): Second local piece
        diagonal (Optional[bool]): Whether j == k; inferred from equality when omitted

    Returns:
        PauliOperator: Traceless Hermitian pair operator
    """
    if diagonal is None:
        diagonal = e_j == e_k
    summed = add(op_mul(dagger(e_k), e_j), op_mul(dagger(e_j), e_k))
    traceless = add(summed, PauliOperator.identity(e_j.n_qubits, -summed.identity_coefficient()))
    return scale(traceless, 0.5) if diagonal else traceless


def pair_operators(terms: Sequence[PauliOperator]) -> List[Tuple[Tuple[int, int], PauliOperator]]:
    """All nonzero E_jk for j <= k."""
    pairs = []
    for j, k in ((j, k) for j in range(len(terms)) for k in range(j, len(terms))):
        operator = error_pair_operator(terms[j], terms[k], diagonal=(j == k))
        if not operator.is_zero():
            pairs.append(((j, k), operator))
    return pairs


def _as_terms(error: Union[PauliOperator, Sequence[PauliOperator]]) -> List[PauliOperator]:
    if isinstance(error, PauliOperator):
        return local_error_terms(error)
    return list(error)


def _total(terms: Sequence[PauliOperator]) -> PauliOperator:
    total = PauliOperator.zero(terms[0].n_qubits)
    for term in terms:
        total = add(total, term)
    return total


# Variance over local Haar rotations

@dataclass
class PairBound:
    pair: Tuple[int, int]
    support: Tuple[int, ...]
    coefficient: float
    entropy: float
    trace_distance: float
    trace_term: float
    entropy_term: float


@dataclass
class VarianceBoundReport:
    pairs: List[PairBound]
    trace_bound: float
    entropy_bound: float
    exact_variance: Optional[float] = None

    def to_dict(self) -> Dict[str, object]:
        return {'pairs': [asdict(p) for p in self.pairs], 'trace_bound': self.trace_bound,
                'entropy_bound': self.entropy_bound, 'exact_variance': self.exact_variance}


def _pair_terms(psi: StateVector, pairs, envelope: PauliOperator,
                cache: Dict[Tuple[int, ...], Tuple[float, float]]) -> List[PairBound]:
    records = []
    for pair, operator in pairs:
        support = tuple(sorted(operator.support()))
        coefficient = 2.0 * trace_inner(abs_envelope(operator), envelope).real
        if support not in cache:
            require_dense(len(support), "reduced density matrix")
            rho = reduced_density(psi, support)
            cache[support] = (rho.entropy(), rho.distance_to_maximally_mixed())
        entropy, distance = cache[support]
        records.append(PairBound(pair, support, coefficient, entropy, distance, coefficient * distance,
                                 coefficient * float(np.sqrt(max(0.0, 2.0 * len(support) - 2.0 * entropy)))))
    return records


def variance_bound(psi: StateVector, error: Union[PauliOperator, Sequence[PauliOperator]],
                   include_exact: bool = True) -> VarianceBoundReport:
    """
    Entanglement bounds on the local-Haar variance of s_E.

    Args:
        psi (StateVector): Starting state
        error (Union[PauliOperator, Sequence[PauliOperator]]): E, or its local pieces {E_j}
        include_exact (bool): Also compute the exact variance

    Returns:
        VarianceBoundReport: Per-pair records and both bound totals
    """
    terms = _as_terms(error)
    total = _total(terms)
    if psi.n_qubits != total.n_qubits:
        raise ValueError(f"qubit count mismatch: {psi.n_qubits} vs {total.n_qubits}")
    observable = op_mul(dagger(total), total)
    records = _pair_terms(psi, pair_operators(terms), abs_envelope(observable), {})
    report = VarianceBoundReport(records, float(sum(r.trace_term for r in records)),
                                 float(sum(r.entropy_term for r in records)))
    if include_exact:
        report.exact_variance = exact_variance_lu_operator(psi, observable)
    return report


def _submasks(mask: int):
    sub = mask
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & mask


def exact_variance_lu_operator(psi: StateVector, observable: PauliOperator) -> float:
    """
    Exact variance of <psi|O|psi> over independent Haar rotations of every qubit.

    Distinct strings are uncorrelated, and for a string with support S
    E[<P>^2] = sum_{T subset S} (2/3)^|T| (-1/3)^|S - T| Tr(rho_T^2).

    Args:
        psi (StateVector): Starting state
        observable (PauliOperator): Hermitian operator O

    Returns:
        float: The variance
    """
    if psi.n_qubits != observable.n_qubits:
        raise ValueError(f"qubit count mismatch: {psi.n_qubits} vs {observable.n_qubits}")
    n = psi.n_qubits
    limit = pair_support_limit()
    purities: Dict[int, float] = {}
    weights: Dict[int, float] = {}
    variance = 0.0
    for mask, coeff in zip(observable.term_supports(), observable.coeffs):
        mask = int(mask)
        if mask == 0:
            continue
        size = popcount(mask)
        if size > limit:
            raise DimensionLimitError(f"term support of {size} qubits exceeds the limit of {limit}")
        if mask not in weights:
            second_moment = 0.0
            for sub in _submasks(mask):
                if sub not in purities:
                    purities[sub] = purity(psi, mask_to_qubits(n, sub))
                kept = popcount(sub)
                second_moment += (2.0 / 3.0) ** kept * (-1.0 / 3.0) ** (size - kept) * purities[sub]
            weights[mask] = second_moment
        variance += coeff.real ** 2 * weights[mask]
    return float(max(0.0, variance))


def exact_variance_lu(psi: StateVector, error: PauliOperator) -> float:
    """Exact local-Haar variance of s_E(psi) for O = E^dagger E."""
    return exact_variance_lu_operator(psi, op_mul(dagger(error), error))


# Clifford-orbit moments

def _observable(error: PauliOperator) -> PauliOperator:
    observable = op_mul(dagger(error), error)
    return PauliOperator(observable.n_qubits, observable.xs, observable.zs,
                         observable.coeffs.real.astype(np.complex128), tol=observable.tol)


def _normalized_traces(observable: PauliOperator) -> Tuple[float, float, float, float]:
    """Tr(O^k)/d for k = 1..4."""
    square = op_mul(observable, observable)
    t1 = observable.identity_coefficient().real
    t2 = frobenius_norm_sq(observable)
    t3 = trace_inner(observable, square).real
    t4 = trace_inner(square, square).real
    return t1, t2, t3, t4


def haar_moments(error: PauliOperator) -> Tuple[float, float, float]:
    """
    Haar (and Clifford, as a 3-design) moments m1, m2, m3 of s_E.

    Args:
        error (PauliOperator): Leading error operator E

    Returns:
        Tuple[float, float, float]: (m1, m2, m3)
    """
    d = float(error.dim)
    t1, t2, t3, _ = _normalized_traces(_observable(error))
    m1 = t1
    m2 = (d * t1 ** 2 + t2) / (d + 1)
    m3 = (d ** 2 * t1 ** 3 + 3 * d * t1 * t2 + 2 * t3) / ((d + 1) * (d + 2))
    return float(m1), float(m2), float(m3)


def haar_moments_dense(error: PauliOperator) -> Tuple[float, float, float]:
    """Dense evaluation of the same formulas."""
    observable = to_dense(error).conj().T @ to_dense(error)
    d = observable.shape[0]
    tr1 = np.trace(observable).real
    tr2 = np.trace(observable @ observable).real
    tr3 = np.trace(observable @ observable @ observable).real
    m1 = tr1 / d
    m2 = (tr1 ** 2 + tr2) / (d * (d + 1))
    m3 = (tr1 ** 3 + 3 * tr1 * tr2 + 2 * tr3) / (d * (d + 1) * (d + 2))
    return float(m1), float(m2), float(m3)


def compute_B(error: PauliOperator) -> float:
    """
    B from 24B = 6Tr(O^4) + 8Tr(O^3)Tr(O) + 3Tr(O^2)^2 + 6Tr(O^2)Tr(O)^2 + Tr(O)^4 with O = E^dagger E.

    Args:
        error (PauliOperator): Leading error operator E

    Returns:
        float: B, computed from sparse traces
    """
    d = float(error.dim)
    t1, t2, t3, t4 = _normalized_traces(_observable(error))
    total = (6 * d * t4 + 8 * d ** 2 * t3 * t1 + 3 * d ** 2 * t2 ** 2
             + 6 * d ** 3 * t2 * t1 ** 2 + d ** 4 * t1 ** 4)
    return float(total / 24.0)


def compute_B_dense(error: PauliOperator) -> float:
    observable = to_dense(error).conj().T @ to_dense(error)
    tr = [np.trace(np.linalg.matrix_power(observable, k)).real for k in range(5)]
    return float((6 * tr[4] + 8 * tr[3] * tr[1] + 3 * tr[2] ** 2 + 6 * tr[2] * tr[1] ** 2 + tr[1] ** 4) / 24.0)


def compute_A(error: PauliOperator) -> float:
    """
    A = (1/24d^2) sum_P [6Tr((OP)^4) + 8Tr((OP)^3)Tr(OP) + 3Tr((OP)^2)^2 + 6Tr((OP)^2)Tr(OP)^2 + Tr(OP)^4],
    evaluated with Pauli character sums instead of a sum over all 4^N strings.

    With O = sum_Q o_Q Q and chi(P, Q) = +-1 the commutation sign,
    S = sum_{Q,R} o_Q^2 o_R^2 chi(Q, R) and F = sum_Q o_Q^4:
    the five sums are 4^N d S, sum_{P in O} d o_P Tr(O POP O P), 4^N d^2 F, d^3 S and d^4 F.

    Args:
        error (PauliOperator): Leading error operator E

    Returns:
        float: A

    Raises:
        TermBudgetError: If one operator product exceeds SYMBOLIC_TERM_BUDGET term pairs
    """
    observable = _observable(error)
    m = len(observable)
    budget = symbolic_term_budget()
    if m ** 2 > budget:
        raise TermBudgetError(f"{m} terms need {m ** 2} products per expansion, above the budget of {budget}")
    n = observable.n_qubits
    d = float(observable.dim)
    paulis = float(4 ** n)
    o = observable.coeffs.real
    xs, zs = observable.xs, observable.zs
    odd = (popcount(xs[:, None] & zs[None, :]) + popcount(zs[:, None] & xs[None, :])) % 2
    chi = 1.0 - 2.0 * odd
    squares = o ** 2
    character_sum = float(squares @ chi @ squares)
    fourth = float(np.sum(o ** 4))

    cubic = 0.0
    for (pauli, coeff) in observable:
        conjugated = observable.conjugate_by(pauli)
        left = op_mul(observable, conjugated)
        right = op_mul(observable, PauliOperator.from_terms(n, [(pauli, 1.0)]))
        cubic += d * coeff.real * d * trace_inner(left, right).real

    t1 = paulis * d * character_sum
    t3 = paulis * d ** 2 * fourth
    t4 = d ** 3 * character_sum
    t5 = d ** 4 * fourth
    logger.debug(f"Symbolic A over {m} terms of E^dagger E")
    return float((6 * t1 + 8 * cubic + 3 * t3 + 6 * t4 + t5) / (24.0 * d ** 2))


def _all_pauli_matrices(n: int):
    for x, z in product(range(1 << n), repeat=2):
        yield PauliString(n, x, z).to_matrix()


def compute_A_bruteforce(error: PauliOperator) -> float:
    """Direct sum over all 4^N strings with dense traces (N <= 3)."""
    if error.n_qubits > BRUTE_FORCE_QUBIT_LIMIT:
        raise DimensionLimitError(f"brute-force A is limited to {BRUTE_FORCE_QUBIT_LIMIT} qubits")
    observable = to_dense(error).conj().T @ to_dense(error)
    d = observable.shape[0]
    total = 0.0
    for pauli in _all_pauli_matrices(error.n_qubits):
        op = observable @ pauli
        tr1 = np.trace(op)
        tr2 = np.trace(op @ op)
        tr3 = np.trace(op @ op @ op)
        tr4 = np.trace(op @ op @ op @ op)
        total += (6 * tr4 + 8 * tr3 * tr1 + 3 * tr2 ** 2 + 6 * tr2 * tr1 ** 2 + tr1 ** 4).real
    return float(total / (24.0 * d ** 2))


def _moment_denominator(d: float) -> float:
    return d * (d ** 2 - 1) * (d + 2) * (d + 4)


def fourth_moment(error: PauliOperator, magic_value: float, A: Optional[float] = None,
                  B: Optional[float] = None) -> float:
    """
    Clifford-orbit fourth moment m4(M) = [24d(B - A) + 6(1 - M)((d^2 + 3d)A - 4B)] / [d(d^2 - 1)(d + 2)(d + 4)].

    Args:
        error (PauliOperator): Leading error operator E
        magic_value (float): Linear stabilizer entropy of the starting state
        A (Optional[float]): Precomputed A
        B (Optional[float]): Precomputed B

    Returns:
        float: m4
    """
    d = float(error.dim)
    A = compute_A(error) if A is None else A
    B = compute_B(error) if B is None else B
    numerator = 24 * d * (B - A) + 6 * (1 - magic_value) * ((d ** 2 + 3 * d) * A - 4 * B)
    return float(numerator / _moment_denominator(d))


@dataclass
class KurtosisLaw:
    """Kur(M) = alpha + beta M over a global Clifford orbit."""

    alpha: float
    beta: float
    A: float
    B: float
    m1: float
    m2: float
    m3: float
    d: int

    @property
    def variance(self) -> float:
        return self.m2 - self.m1 ** 2

    @property
    def lemma_gap(self) -> float:
        """(d^2 + 3d)A - 4B, nonnegative by the trace lemma."""
        return (self.d ** 2 + 3 * self.d) * self.A - 4 * self.B

    def fourth_moment(self, magic_value: float) -> float:
        d = float(self.d)
        numerator = 24 * d * (self.B - self.A) + 6 * (1 - magic_value) * self.lemma_gap
        return float(numerator / _moment_denominator(d))

    def predict(self, magic_value: float) -> float:
        return self.alpha + self.beta * magic_value

    def to_dict(self) -> Dict[str, float]:
        payload = asdict(self)
        payload['lemma_gap'] = self.lemma_gap
        payload['variance'] = self.variance
        return payload


def kurtosis_law(error: PauliOperator) -> KurtosisLaw:
    """
    Linear kurtosis-versus-magic law of s_E over global Clifford orbits.

    Args:
        error (PauliOperator): Leading error operator E

    Returns:
        KurtosisLaw: alpha, beta and the ingredients

    Raises:
        DegenerateDistributionError: If s_E has zero variance over the orbit
    """
    d = error.dim
    m1, m2, m3 = haar_moments(error)
    variance = m2 - m1 ** 2
    if variance <= 1e-12 * max(m1 ** 2, 1e-300):
        raise DegenerateDistributionError("s_E has zero variance; kurtosis is undefined")
    A = compute_A(error)
    B = compute_B(error)
    law = KurtosisLaw(0.0, 0.0, A, B, m1, m2, m3, d)
    central = law.fourth_moment(0.0) - 4 * m3 * m1 + 6 * m2 * m1 ** 2 - 3 * m1 ** 4
    law.alpha = float(central / variance ** 2)
    law.beta = float(6 * (4 * B - (d ** 2 + 3 * d) * A) / (_moment_denominator(d) * variance ** 2))
    logger.info(f"Kurtosis law on {error.n_qubits} qubits: alpha={law.alpha:.6g}, beta={law.beta:.6g}")
    return law


def sum_pauli_conjugation(observable: np.ndarray) -> complex:
    """sum_P Tr(O P O P) over all 4^N strings (N <= 3); equals d Tr(O)^2."""
    observable = np.asarray(observable, dtype=np.complex128)
    d = observable.shape[0]
    n = d.bit_length() - 1
    if n > BRUTE_FORCE_QUBIT_LIMIT:
        raise DimensionLimitError(f"Pauli sum is limited to {BRUTE_FORCE_QUBIT_LIMIT} qubits")
    return complex(sum(np.trace(observable @ p @ observable @ p) for p in _all_pauli_matrices(n)))


# Tail inequalities

def tail_bounds(kappa3: float, kappa4: float, t: float) -> float:
    """
    Zelen upper bound on P(X - mu >= t sigma) from skewness and kurtosis.

    Args:
        kappa3 (float): Skewness
        kappa4 (float): Kurtosis, at least kappa3^2 + 1
        t (float): Threshold in standard deviations, above (kappa3 + sqrt(kappa3^2 + 4)) / 2

    Returns:
        float: Tail probability bound
    """
    excess = kappa4 - kappa3 ** 2 - 1
    if excess < ZELEN_SLACK:
        raise ValueError("kurtosis must exceed skewness^2 + 1")
    threshold = (kappa3 + np.sqrt(kappa3 ** 2 + 4)) / 2
    if t <= threshold:
        raise ValueError(f"t must exceed {threshold:.6g}")
    return float(1.0 / (1.0 + t ** 2 + (t ** 2 - t * kappa3 - 1) ** 2 / excess))


def chebyshev(k: float) -> float:
    """Chebyshev bound 1/k^2 on P(|X - mu| >= k sigma)."""
    if k <= 0:
        raise ValueError("k must be positive")
    return float(1.0 / k ** 2)


# Long-time bound

@dataclass
class LongTimeBoundReport:
    r: int
    dt: float
    order: int
    step_bounds: List[float] = field(default_factory=list)
    step_exact: List[float] = field(default_factory=list)
    bound: float = 0.0
    exact_bound: float = 0.0

    def to_dict(self) -> Dict[str, object]:
        return asdict(self)


def long_time_bound(psi: StateVector, hamiltonian: HamiltonianSpec, pf: ProductFormula, dt: float,
                    r: int, error: Optional[PauliOperator] = None,
                    max_qubits: int = 6) -> LongTimeBoundReport:
    """
    Bound on the local-Haar variance of the r-step error sum.

    Every pair operator is conjugated by U_p(dt)^k; V_k is the entropy bound of
    the conjugated pairs against the marginals of psi and the bound is
    r dt^{2p+2} sum_k sqrt(V_k / 2). The exact-variance variant replaces V_k by
    the exact variance of the conjugated E^dagger E.

    Args:
        psi (StateVector): Starting state
        hamiltonian (HamiltonianSpec): Partitioned Hamiltonian
        pf (ProductFormula): Formula of order p
        dt (float): Step size
        r (int): Number of steps
        error (Optional[PauliOperator]): Leading error; derived from the formula when omitted
        max_qubits (int): Largest register handled

    Returns:
        LongTimeBoundReport: Per-step terms and both totals
    """
    n = hamiltonian.n_qubits
    if n > max_qubits:
        raise DimensionLimitError(f"long-time bound is limited to {max_qubits} qubits, got {n}")
    if r < 1:
        raise ValueError("r must be at least 1")
    error = error_operator(hamiltonian, pf) if error is None else error
    pairs = [(pair, to_dense(op)) for pair, op in pair_operators(local_error_terms(error))]
    observable = to_dense(_observable(error))
    step = pf_unitary(hamiltonian, pf, dt)
    power = np.eye(hamiltonian.dim, dtype=np.complex128)
    report = LongTimeBoundReport(r, dt, pf.order)
    cache: Dict[Tuple[int, ...], Tuple[float, float]] = {}
    for _ in range(r):
        conjugated = from_dense(power.conj().T @ observable @ power)
        conjugated = PauliOperator(n, conjugated.xs, conjugated.zs, conjugated.coeffs.real.astype(np.complex128))
        moved = [(pair, from_dense(power.conj().T @ matrix @ power, tol=1e-12)) for pair, matrix in pairs]
        records = _pair_terms(psi, moved, abs_envelope(conjugated), cache)
        report.step_bounds.append(float(sum(rec.entropy_term for rec in records)))
        report.step_exact.append(exact_variance_lu_operator(psi, conjugated))
        power = step @ power
    prefactor = r * dt ** (2 * pf.order + 2)
    report.bound = float(prefactor * sum(np.sqrt(v / 2.0) for v in report.step_bounds))
    report.exact_bound = float(prefactor * sum(np.sqrt(max(v, 0.0) / 2.0) for v in report.step_exact))
    return report
