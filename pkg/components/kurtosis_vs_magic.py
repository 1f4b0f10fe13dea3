"""
Kurtosis vs Magic component for Trotter Error Statistics Toolkit.
Samples global-Clifford orbits of T-gate ladder states and overlays the exact kurtosis law.
"""

from typing import Dict, List

import numpy as np

from components.runner import AUXILIARY_STREAM, ExperimentResult, ci_columns, confidence_interval
from utils.config import ExperimentConfig
from utils.logger import get_logger
from utils.moments import chebyshev, kurtosis_law, tail_bounds
from utils.resources import magic_ladder_states
from utils.stats import SHatMeasure, chunk_rng, ensemble_samples, summarize, tail_frequency, trend_statistics
from utils.trotter import error_operator, product_formula

logger = get_logger("kurtosis_vs_magic")

DESCRIPTION = "GC kurtosis of the estimated s_E against magic, with the exact alpha + beta M law"


def _tail_names(threshold: float) -> List[str]:
    tag = f"{threshold:g}"
    return [f"tail_{tag}", f"zelen_{tag}", f"chebyshev_{tag}"]


def columns(thresholds: List[float]) -> List[str]:
    names = ['k', 'magic', 'mean', 'predicted_mean', 'variance', 'skewness', 'kurtosis',
             'kurtosis_ci_lower', 'kurtosis_ci_upper', 'predicted_kurtosis', 'prediction_in_ci']
    for threshold in thresholds:
        names.extend(_tail_names(threshold))
    return names


CSV_COLUMNS = ("k, magic, mean, predicted_mean, variance, skewness, kurtosis, kurtosis_ci_lower, "
               "kurtosis_ci_upper, predicted_kurtosis, prediction_in_ci, tail_<t>, zelen_<t>, chebyshev_<t>")


def _tails(samples: np.ndarray, skewness: float, kurtosis: float, thresholds: List[float]) -> Dict[str, float]:
    row = {}
    for threshold in thresholds:
        empirical, zelen, cheb = _tail_names(threshold)
        row[empirical] = tail_frequency(samples, threshold)
        try:
            row[zelen] = tail_bounds(skewness, kurtosis, threshold)
        except ValueError:
            row[zelen] = float('nan')
        row[cheb] = chebyshev(threshold)
    return row


def run_kurtosis_vs_magic(config: ExperimentConfig) -> ExperimentResult:
    """
    Run the kurtosis-versus-magic experiment.

    Args:
        config: Validated kurtosis_vs_magic configuration

    Returns:
        ExperimentResult: One record per ladder state
    """
    n = config.n_qubits
    hamiltonian = config.model.build(n)
    pf = product_formula(config.order, hamiltonian.n_groups)
    error = error_operator(hamiltonian, pf, config.convention)
    law = kurtosis_law(error)
    measure = SHatMeasure(hamiltonian, pf, config.dt, config.convention)
    result = ExperimentResult(config.experiment, config.to_dict(), columns(config.tail_thresholds),
                              seed=config.seed)

    ladder = magic_ladder_states(n, config.k_list, chunk_rng(config.seed, AUXILIARY_STREAM, 0))
    for index, (k, (psi, magic_value)) in enumerate(zip(config.k_list, ladder)):
        samples = ensemble_samples(psi, 'GC', measure, config.samples, config.seed,
                                   stream=index, workers=config.workers)
        summary = summarize(samples)
        interval = confidence_interval(config, samples, 'kurtosis', index)
        predicted = law.predict(magic_value)
        record = {'k': k, 'magic': magic_value, 'mean': summary.mean, 'predicted_mean': law.m1,
                  'variance': summary.variance, 'skewness': summary.skewness, 'kurtosis': summary.kurtosis,
                  **ci_columns('kurtosis', interval), 'predicted_kurtosis': predicted,
                  'prediction_in_ci': interval.covers(predicted)}
        record.update(_tails(samples, summary.skewness, summary.kurtosis, config.tail_thresholds))
        result.records.append(record)
        result.raw_samples[f"k{k}_{index:02d}"] = samples
        logger.info(f"k={k}, M={magic_value:.4f}: kurtosis {summary.kurtosis:.4f}, predicted {predicted:.4f}")

    result.summary['law'] = law.to_dict()
    result.summary['formula'] = pf.describe()
    if len(result.records) >= 3:
        trend = trend_statistics([r['magic'] for r in result.records], [r['kurtosis'] for r in result.records])
        trend['slope_sign_matches_beta'] = bool(np.sign(trend['slope']) == np.sign(law.beta))
        result.summary['kurtosis_vs_magic'] = trend
    return result
