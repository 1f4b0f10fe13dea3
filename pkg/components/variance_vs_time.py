"""
Variance vs Time component for Trotter Error Statistics Toolkit.
Samples the local-unitary spread of the one-step error along a quench and compares it with the entanglement bounds.
"""

from typing import List

from components.runner import (ExperimentResult, ci_columns, confidence_interval, prefix_entropies,
                               prefix_entropy_columns)
from utils.config import ExperimentConfig
from utils.hamiltonian import evolve
from utils.logger import get_logger
from utils.moments import variance_bound
from utils.pauli import frobenius_norm_sq
from utils.statevector import zero_state
from utils.stats import SHatMeasure, ensemble_samples, summarize, trend_statistics
from utils.trotter import error_operator, product_formula

logger = get_logger("variance_vs_time")

DESCRIPTION = "LU variance of the estimated s_E along |0...0> evolved under the model"


def columns(n_qubits: int) -> List[str]:
    return (['t'] + prefix_entropy_columns(n_qubits)
            + ['mean', 'variance', 'variance_ci_lower', 'variance_ci_upper',
               'exact_variance', 'trace_bound', 'entropy_bound', 'frobenius_sq'])


CSV_COLUMNS = ("t, S_1..S_{N/2}, mean, variance, variance_ci_lower, variance_ci_upper, "
               "exact_variance, trace_bound, entropy_bound, frobenius_sq")


def run_variance_vs_time(config: ExperimentConfig) -> ExperimentResult:
    """
    Run the variance-versus-time experiment.

    Args:
        config: Validated variance_vs_time configuration

    Returns:
        ExperimentResult: One record per time point
    """
    n = config.n_qubits
    hamiltonian = config.model.build(n)
    pf = product_formula(config.order, hamiltonian.n_groups)
    error = error_operator(hamiltonian, pf, config.convention)
    measure = SHatMeasure(hamiltonian, pf, config.dt, config.convention)
    frobenius = frobenius_norm_sq(error)
    result = ExperimentResult(config.experiment, config.to_dict(), columns(n), seed=config.seed)

    initial = zero_state(n)
    for index, t in enumerate(config.times):
        psi = evolve(initial, hamiltonian, t)
        samples = ensemble_samples(psi, 'LU', measure, config.samples, config.seed,
                                   stream=index, workers=config.workers)
        summary = summarize(samples)
        interval = confidence_interval(config, samples, 'variance', index)
        report = variance_bound(psi, error)
        record = {'t': t, **prefix_entropies(psi), 'mean': summary.mean, 'variance': summary.variance,
                  **ci_columns('variance', interval), 'exact_variance': report.exact_variance,
                  'trace_bound': report.trace_bound, 'entropy_bound': report.entropy_bound,
                  'frobenius_sq': frobenius}
        result.records.append(record)
        result.raw_samples[f"t{index:03d}"] = samples
        logger.info(f"t={t:g}: variance {summary.variance:.6g}, exact {report.exact_variance:.6g}, "
                    f"entropy bound {report.entropy_bound:.6g}")

    result.summary['model'] = hamiltonian.describe()
    result.summary['formula'] = pf.describe()
    result.summary['error_terms'] = len(error)
    if len(result.records) >= 3 and n >= 2:
        half = f"S_{n // 2}"
        result.summary['variance_vs_half_entropy'] = trend_statistics(
            [r[half] for r in result.records], [r['variance'] for r in result.records])
    return result
