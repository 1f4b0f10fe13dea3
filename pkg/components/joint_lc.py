"""
Joint LC component for Trotter Error Statistics Toolkit.
Samples local-Clifford orbits, which fix both entanglement and magic, for a few designated starting states.
"""

from typing import List

from components.runner import ExperimentResult, ci_columns, confidence_interval, evolved_state
from utils.config import ExperimentConfig
from utils.helpers import spectrum_qubit_limit
from utils.logger import get_logger
from utils.moments import haar_moments
from utils.pauli import frobenius_norm_sq
from utils.resources import magic
from utils.statevector import entanglement_entropy
from utils.stats import DEFAULT_QUANTILES, SHatMeasure, SampleStatistics, ensemble_samples, summarize
from utils.trotter import error_operator, product_formula

logger = get_logger("joint_lc")

DESCRIPTION = "LC distributions of the estimated s_E for starting states of chosen entanglement and magic"

_QUANTILE_COLUMNS = [f"q{level:g}" for level in DEFAULT_QUANTILES]


def columns() -> List[str]:
    return (['label', 'model', 't', 'half_entropy', 'magic', 'mean', 'variance', 'variance_ci_lower',
             'variance_ci_upper', 'kurtosis', 'kurtosis_ci_lower', 'kurtosis_ci_upper'] + _QUANTILE_COLUMNS)


CSV_COLUMNS = ("label, model, t, half_entropy, magic, mean, variance, variance_ci_lower, variance_ci_upper, "
               "kurtosis, kurtosis_ci_lower, kurtosis_ci_upper, q0.01..q0.99")


def run_joint_lc(config: ExperimentConfig) -> ExperimentResult:
    """
    Run the joint local-Clifford experiment.

    Args:
        config: Validated joint_lc configuration

    Returns:
        ExperimentResult: One record per starting state
    """
    n = config.n_qubits
    hamiltonian = config.model.build(n)
    pf = product_formula(config.order, hamiltonian.n_groups)
    error = error_operator(hamiltonian, pf, config.convention)
    measure = SHatMeasure(hamiltonian, pf, config.dt, config.convention)
    result = ExperimentResult(config.experiment, config.to_dict(), columns(), seed=config.seed)
    with_magic = n <= spectrum_qubit_limit()

    for index, state in enumerate(config.states):
        psi = evolved_state(state.model, n, state.t)
        samples = ensemble_samples(psi, 'LC', measure, config.samples, config.seed,
                                   stream=index, workers=config.workers)
        summary = summarize(samples)
        record = {'label': state.label, 'model': state.model.label or state.model.name, 't': state.t,
                  'half_entropy': entanglement_entropy(psi, range(n // 2)),
                  'magic': magic(psi) if with_magic else float('nan'),
                  'mean': summary.mean, 'variance': summary.variance, 'kurtosis': summary.kurtosis}
        record.update(ci_columns('variance', confidence_interval(config, samples, 'variance', 2 * index)))
        record.update(ci_columns('kurtosis', confidence_interval(config, samples, 'kurtosis', 2 * index + 1)))
        record.update(SampleStatistics.quantiles(samples))
        result.records.append(record)
        result.raw_samples[state.label or f"state{index}"] = samples
        logger.info(f"{state.label}: variance {summary.variance:.6g}, kurtosis {summary.kurtosis:.4f}")

    m1, m2, _ = haar_moments(error)
    result.summary['frobenius_sq'] = frobenius_norm_sq(error)
    result.summary['haar_mean'] = m1
    result.summary['haar_variance'] = m2 - m1 ** 2
    result.summary['formula'] = pf.describe()
    return result
