"""
Resource Growth component for Trotter Error Statistics Toolkit.
Tracks entanglement and magic of |0...0> under each model over a time grid.
"""

from typing import List

from components.runner import ExperimentResult
from utils.config import ExperimentConfig
from utils.hamiltonian import evolve
from utils.logger import get_logger
from utils.resources import magic
from utils.statevector import entanglement_entropy, zero_state
from utils.stats import trend_statistics

logger = get_logger("resource_growth")

DESCRIPTION = "Subsystem entropy and magic of the quenched state for each model"


def columns() -> List[str]:
    return ['model', 't', 'entropy_subsystem', 'half_entropy', 'magic']


CSV_COLUMNS = "model, t, entropy_subsystem, half_entropy, magic"


def run_resource_growth(config: ExperimentConfig) -> ExperimentResult:
    """
    Run the resource-growth experiment.

    Args:
        config: Validated resource_growth configuration

    Returns:
        ExperimentResult: One record per model and time point
    """
    n = config.n_qubits
    subsystem = range(config.subsystem_size)
    result = ExperimentResult(config.experiment, config.to_dict(), columns(), seed=config.seed)
    initial = zero_state(n)

    for model in config.models:
        hamiltonian = model.build(n)
        label = model.label or model.name
        rows = []
        for t in config.times:
            psi = evolve(initial, hamiltonian, t)
            rows.append({'model': label, 't': t, 'entropy_subsystem': entanglement_entropy(psi, subsystem),
                         'half_entropy': entanglement_entropy(psi, range(n // 2)), 'magic': magic(psi)})
        result.records.extend(rows)
        final = rows[-1]
        logger.info(f"{label}: at t={final['t']:g} entropy {final['entropy_subsystem']:.4f}, "
                    f"magic {final['magic']:.4f}")
        if len(rows) >= 3:
            times = [row['t'] for row in rows]
            result.summary[label] = {
                'entropy_vs_time': trend_statistics(times, [row['entropy_subsystem'] for row in rows]),
                'magic_vs_time': trend_statistics(times, [row['magic'] for row in rows]),
            }
    return result
