"""
Long Time component for Trotter Error Statistics Toolkit.
Samples the local-unitary spread of the r-step product-formula error and evaluates the long-time variance bound.
"""

from typing import List

from components.runner import (ExperimentResult, ci_columns, confidence_interval, evolved_state,
                               prefix_entropies, prefix_entropy_columns)
from utils.config import ExperimentConfig
from utils.logger import get_logger
from utils.moments import long_time_bound
from utils.stats import LongTimeErrorMeasure, ensemble_samples, summarize, trend_statistics
from utils.trotter import error_operator, product_formula, triangle_error_sum, true_error_long

logger = get_logger("long_time")

DESCRIPTION = "LU variance of the r-step error from quenched starting states, with the long-time bound"


def columns(n_qubits: int) -> List[str]:
    return (['t'] + prefix_entropy_columns(n_qubits)
            + ['error', 'triangle_sum', 'mean', 'variance', 'variance_ci_lower', 'variance_ci_upper',
               'bound', 'exact_bound'])


CSV_COLUMNS = ("t, S_1..S_{N/2}, error, triangle_sum, mean, variance, variance_ci_lower, variance_ci_upper, "
               "bound, exact_bound")


def run_long_time(config: ExperimentConfig) -> ExperimentResult:
    """
    Run the long-time experiment.

    The starting states come from the state model; the sampled error and the
    bound use the error model.

    Args:
        config: Validated long_time configuration

    Returns:
        ExperimentResult: One record per starting time
    """
    n = config.n_qubits
    hamiltonian = config.measured_model.build(n)
    pf = product_formula(config.order, hamiltonian.n_groups)
    with_bound = n <= config.bound_max_qubits
    # e_r is a physical error, so the bound takes the unscaled leading error
    error = error_operator(hamiltonian, pf) if with_bound else None
    measure = LongTimeErrorMeasure(hamiltonian, pf, config.dt, config.r)
    result = ExperimentResult(config.experiment, config.to_dict(), columns(n), seed=config.seed)
    if not with_bound:
        logger.info(f"Skipping the long-time bound above {config.bound_max_qubits} qubits")

    for index, t in enumerate(config.times):
        psi = evolved_state(config.model, n, t)
        samples = ensemble_samples(psi, 'LU', measure, config.samples, config.seed,
                                   stream=index, workers=config.workers)
        summary = summarize(samples)
        record = {'t': t, **prefix_entropies(psi),
                  'error': true_error_long(psi, hamiltonian, pf, config.dt, config.r),
                  'triangle_sum': triangle_error_sum(psi, hamiltonian, pf, config.dt, config.r),
                  'mean': summary.mean, 'variance': summary.variance,
                  **ci_columns('variance', confidence_interval(config, samples, 'variance', index)),
                  'bound': float('nan'), 'exact_bound': float('nan')}
        if with_bound:
            report = long_time_bound(psi, hamiltonian, pf, config.dt, config.r, error=error,
                                     max_qubits=config.bound_max_qubits)
            record['bound'] = report.bound
            record['exact_bound'] = report.exact_bound
        result.records.append(record)
        result.raw_samples[f"t{index:03d}"] = samples
        logger.info(f"t={t:g}: variance {summary.variance:.6g}, bound {record['bound']:.6g}")

    result.summary['error_model'] = hamiltonian.describe()
    result.summary['formula'] = pf.describe()
    if len(result.records) >= 3:
        half = f"S_{n // 2}"
        result.summary['variance_vs_half_entropy'] = trend_statistics(
            [r[half] for r in result.records], [r['variance'] for r in result.records])
    return result
