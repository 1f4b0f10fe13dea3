"""
Tests for the moments module.
"""

import pytest
import numpy as np

from utils.clifford import apply_circuit, enumerate_cliffords, synthesize
from utils.exceptions import DegenerateDistributionError, DimensionLimitError, TermBudgetError
from utils.hamiltonian import QIMF_TYPICAL, qimf
from utils.moments import (chebyshev, compute_A, compute_A_bruteforce, compute_B, compute_B_dense,
                           error_pair_operator, exact_variance_lu, exact_variance_lu_operator, fourth_moment,
                           haar_moments, haar_moments_dense, kurtosis_law, local_error_terms, long_time_bound,
                           pair_operators, sum_pauli_conjugation, tail_bounds, variance_bound)
from utils.pauli import PauliOperator, add, scale, to_dense
from utils.resources import apply_t_layer, magic
from utils.statevector import (GATES, apply_1q, apply_local_unitaries, expectation, random_haar_1q, random_state,
                               zero_state)
from utils.stats import bootstrap_ci
from utils.trotter import leading_error_pf1, pf1, s_e


def random_error(n: int, n_terms: int, rng: np.random.Generator) -> PauliOperator:
    d = 1 << n
    xs = rng.integers(0, d, size=n_terms)
    zs = rng.integers(0, d, size=n_terms)
    coeffs = rng.normal(size=n_terms) + 1j * rng.normal(size=n_terms)
    return PauliOperator(n, xs, zs, coeffs)


def test_local_terms_partition_the_error(qimf3):
    """Test that the site pieces sum back to E and are grouped by lowest qubit."""
    error = leading_error_pf1(qimf3)
    pieces = local_error_terms(error)
    assert len(pieces) == 3
    total = PauliOperator.zero(3)
    for piece in pieces:
        total = add(total, piece)
    assert total == error
    assert pieces[0].coefficient('ZXI') != 0
    assert pieces[1].coefficient('IXZ') != 0
    assert pieces[2].coefficient('IIZ') != 0


def test_pair_operators_are_hermitian_and_traceless(qimf4_error):
    """Test the pair operator properties and their locality."""
    pieces = local_error_terms(qimf4_error)
    for (j, k), operator in pair_operators(pieces):
        assert operator.is_hermitian()
        assert operator.identity_coefficient() == pytest.approx(0.0)
        if k == j + 1:
            assert operator.support() <= {j, j + 1, j + 2}


def test_single_pauli_pair_vanishes():
    """Test that E_jj is zero when E_j is a multiple of one Pauli string."""
    piece = PauliOperator.from_terms(2, [('ZI', 2j * 0.3)])
    assert error_pair_operator(piece, piece).is_zero()


def test_pairs_sum_to_traceless_observable(qimf4_error):
    """Test sum_{j<=k} E_jk = E^dagger E - Tr(E^dagger E) I/d."""
    pieces = local_error_terms(qimf4_error)
    total = PauliOperator.zero(4)
    for _, operator in pair_operators(pieces):
        total = add(total, operator)
    observable = to_dense(qimf4_error).conj().T @ to_dense(qimf4_error)
    expected = observable - np.trace(observable) / 16 * np.eye(16)
    np.testing.assert_allclose(to_dense(total), expected, atol=1e-10)


def test_exact_variance_of_single_z():
    """Test Var <Z> = 1/3 for a Haar-rotated |0>."""
    observable = PauliOperator.from_terms(2, [('ZI', 1.0)])
    assert exact_variance_lu_operator(zero_state(2), observable) == pytest.approx(1.0 / 3.0)


def test_exact_variance_vanishes_for_identity(rng):
    """Test that E^dagger E proportional to I gives zero variance."""
    error = PauliOperator.from_terms(3, [('XYZ', 0.5j)])
    assert exact_variance_lu(random_state(3, rng), error) == 0.0


def test_exact_variance_matches_monte_carlo():
    """Test the subset-purity formula against sampled local rotations."""
    rng = np.random.default_rng(5)
    psi = random_state(3, rng)
    observable = PauliOperator.from_terms(3, [('ZZI', 0.7), ('XIY', -0.4), ('IYY', 0.5), ('XII', 0.3)])
    values = []
    for _ in range(8000):
        rotated = apply_local_unitaries(psi, [random_haar_1q(rng) for _ in range(3)])
        values.append(expectation(rotated, observable).real)
    assert np.var(values) == pytest.approx(exact_variance_lu_operator(psi, observable), rel=0.1)


def test_exact_variance_lies_in_bootstrap_interval():
    """Test the exact LU variance of s_E against bootstrap intervals from sampled local rotations."""
    rng = np.random.default_rng(17)
    error = leading_error_pf1(qimf(6, *QIMF_TYPICAL))
    for _ in range(5):
        psi = random_state(6, rng)
        values = [s_e(apply_local_unitaries(psi, [random_haar_1q(rng) for _ in range(6)]), error)
                  for _ in range(4000)]
        interval = bootstrap_ci(values, 'variance', 1000, level=0.999, rng=rng)
        assert interval.covers(exact_variance_lu(psi, error))


def test_exact_variance_support_limit(monkeypatch, qimf4_error, rng):
    """Test that PAIR_SUPPORT_LIMIT caps the term support."""
    monkeypatch.setenv('PAIR_SUPPORT_LIMIT', '1')
    with pytest.raises(DimensionLimitError):
        exact_variance_lu(random_state(4, rng), qimf4_error)


def test_bound_chain(qimf4_error, random_states):
    """Test exact variance <= trace-distance bound <= entropy bound."""
    for psi in random_states:
        report = variance_bound(psi, qimf4_error)
        assert report.exact_variance <= report.trace_bound + 1e-9
        assert report.trace_bound <= report.entropy_bound + 1e-9
        assert report.to_dict()['pairs']


def test_entropy_bound_on_product_state(qimf4_error):
    """Test that zero entropies give the maximal per-pair terms."""
    report = variance_bound(zero_state(4), qimf4_error, include_exact=False)
    assert report.exact_variance is None
    expected = sum(p.coefficient * np.sqrt(2.0 * len(p.support)) for p in report.pairs)
    assert report.entropy_bound == pytest.approx(expected)


def test_bound_accepts_local_pieces(qimf4_error, rng):
    """Test that E and its piece list give the same report."""
    psi = random_state(4, rng)
    from_operator = variance_bound(psi, qimf4_error)
    from_pieces = variance_bound(psi, local_error_terms(qimf4_error))
    assert from_operator.entropy_bound == pytest.approx(from_pieces.entropy_bound)
    assert from_operator.exact_variance == pytest.approx(from_pieces.exact_variance)


def test_haar_moments_sparse_and_dense_agree(qimf4_error, rng):
    """Test the sparse trace route against dense trace powers."""
    for error in (qimf4_error, random_error(3, 6, rng)):
        np.testing.assert_allclose(haar_moments(error), haar_moments_dense(error), rtol=1e-10)
        assert compute_B(error) == pytest.approx(compute_B_dense(error), rel=1e-8)


def test_first_moment_is_normalized_frobenius(qimf4_error):
    """Test m1 = Tr(E^dagger E)/d."""
    dense = to_dense(qimf4_error)
    assert haar_moments(qimf4_error)[0] == pytest.approx(np.trace(dense.conj().T @ dense).real / 16)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_symbolic_A_matches_bruteforce(n, rng):
    """Test the character-sum A against the sum over all 4^N strings."""
    error = random_error(n, 4, rng)
    assert compute_A(error) == pytest.approx(compute_A_bruteforce(error), rel=1e-8)


def test_symbolic_A_on_trotter_error(qimf3):
    """Test A for the three-site QIMF error."""
    error = leading_error_pf1(qimf3)
    assert compute_A(error) == pytest.approx(compute_A_bruteforce(error), rel=1e-8)


def test_bruteforce_limit(qimf4_error):
    """Test that the oracle refuses four qubits."""
    with pytest.raises(DimensionLimitError):
        compute_A_bruteforce(qimf4_error)


def test_term_budget(monkeypatch, qimf4_error):
    """Test that SYMBOLIC_TERM_BUDGET stops oversized expansions."""
    monkeypatch.setenv('SYMBOLIC_TERM_BUDGET', '10')
    with pytest.raises(TermBudgetError):
        compute_A(qimf4_error)


def test_identity_error_closed_forms():
    """Test A, B and the moments for E = I."""
    error = PauliOperator.identity(2)
    d = 4
    assert haar_moments(error) == pytest.approx((1.0, 1.0, 1.0))
    assert compute_B(error) == pytest.approx(d * (d + 1) * (d + 2) * (d + 3) / 24)
    assert compute_A(error) == pytest.approx((d + 1) * (d + 2) / 6)
    assert fourth_moment(error, 0.0) == pytest.approx(1.0)
    assert fourth_moment(error, 0.6) == pytest.approx(1.0)
    with pytest.raises(DegenerateDistributionError):
        kurtosis_law(error)


def test_kurtosis_law_properties(qimf4_error):
    """Test the lemma inequality, a negative slope and nonnegative predictions."""
    law = kurtosis_law(qimf4_error)
    assert law.lemma_gap >= 0
    assert law.beta < 0
    assert law.variance > 0
    for magic_value in np.linspace(0.0, 1.0 - 4.0 / (law.d + 3), 12):
        assert law.predict(magic_value) >= 0
    assert law.to_dict()['alpha'] == law.alpha


def test_kurtosis_law_on_six_qubits():
    """Test the negative slope and the trace lemma with the symbolic A on a six-site chain."""
    error = leading_error_pf1(qimf(6, *QIMF_TYPICAL))
    law = kurtosis_law(error)
    assert law.d == 64
    assert law.beta < 0
    assert 4 * law.B <= (law.d ** 2 + 3 * law.d) * law.A
    assert law.B == pytest.approx(compute_B_dense(error), rel=1e-9)


def test_kurtosis_law_is_scale_invariant(qimf4_error):
    """Test that cE leaves alpha and beta unchanged."""
    law = kurtosis_law(qimf4_error)
    scaled = kurtosis_law(scale(qimf4_error, 2.5))
    assert scaled.alpha == pytest.approx(law.alpha, rel=1e-9)
    assert scaled.beta == pytest.approx(law.beta, rel=1e-9)


def test_exact_variance_scales_with_fourth_power(qimf4_error, rng):
    """Test Var(s_cE) = |c|^4 Var(s_E)."""
    psi = random_state(4, rng)
    base = exact_variance_lu(psi, qimf4_error)
    assert exact_variance_lu(psi, scale(qimf4_error, 1.5j)) == pytest.approx(1.5 ** 4 * base, rel=1e-9)


@pytest.mark.slow
def test_moments_match_clifford_enumeration():
    """Test m1..m4 against exhaustive averages over all 11520 two-qubit Cliffords."""
    error = leading_error_pf1(qimf(2, *QIMF_TYPICAL))
    circuits = [synthesize(tableau) for tableau in enumerate_cliffords(2)]
    plus = apply_1q(apply_1q(zero_state(2), GATES['H'], 0), GATES['H'], 1)
    states = [zero_state(2), apply_t_layer(plus, 1), apply_t_layer(plus, 2), random_state(2, np.random.default_rng(9))]
    m1, m2, m3 = haar_moments(error)
    A, B = compute_A(error), compute_B(error)
    for psi in states:
        values = np.array([s_e(apply_circuit(psi, circuit), error) for circuit in circuits])
        assert np.mean(values) == pytest.approx(m1, rel=1e-8)
        assert np.mean(values ** 2) == pytest.approx(m2, rel=1e-8)
        assert np.mean(values ** 3) == pytest.approx(m3, rel=1e-8)
        assert np.mean(values ** 4) == pytest.approx(fourth_moment(error, magic(psi), A, B), rel=1e-8)


def test_sum_pauli_conjugation(rng):
    """Test sum_P Tr(OPOP) = d Tr(O)^2."""
    assert sum_pauli_conjugation(np.eye(2)) == pytest.approx(8.0)
    matrix = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    hermitian = matrix + matrix.conj().T
    assert sum_pauli_conjugation(hermitian) == pytest.approx(4 * np.trace(hermitian) ** 2, abs=1e-10)
    traceless = hermitian - np.trace(hermitian) / 4 * np.eye(4)
    assert abs(sum_pauli_conjugation(traceless)) == pytest.approx(0.0, abs=1e-10)
    with pytest.raises(DimensionLimitError):
        sum_pauli_conjugation(np.eye(16))


def test_tail_inequalities():
    """Test the Chebyshev and Zelen bounds and their domains."""
    assert chebyshev(2) == pytest.approx(0.25)
    with pytest.raises(ValueError):
        chebyshev(0)
    values = [tail_bounds(0.5, 4.0, t) for t in (2.0, 3.0, 4.0)]
    assert values[0] > values[1] > values[2] > 0
    assert values[1] < chebyshev(3.0)
    with pytest.raises(ValueError):
        tail_bounds(1.0, 2.0, 3.0)
    with pytest.raises(ValueError):
        tail_bounds(0.0, 3.0, 1.0)


def test_long_time_bound(qimf4, qimf4_error, rng):
    """Test the long-time bound: first step equals the one-step variance and the bound dominates."""
    psi = random_state(4, rng)
    report = long_time_bound(psi, qimf4, pf1(), 0.05, 3, error=qimf4_error)
    assert len(report.step_bounds) == 3
    assert report.step_exact[0] == pytest.approx(exact_variance_lu(psi, qimf4_error), rel=1e-8)
    for bound, exact in zip(report.step_bounds, report.step_exact):
        assert exact <= bound + 1e-9
    assert report.exact_bound <= report.bound
    assert report.to_dict()['r'] == 3
    with pytest.raises(DimensionLimitError):
        long_time_bound(psi, qimf4, pf1(), 0.05, 3, max_qubits=3)
    with pytest.raises(ValueError):
        long_time_bound(psi, qimf4, pf1(), 0.05, 0)
