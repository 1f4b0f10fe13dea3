"""
Experiment runner for Trotter Error Statistics Toolkit.
Holds the result record shared by all experiments, the seeded stream layout and the CSV/JSON writers.
"""

import os
import time
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from utils.config import ExperimentConfig, ModelConfig
from utils.helpers import __version__, convert_for_json, write_f64, write_json
from utils.logger import get_logger
from utils.statevector import StateVector, entanglement_entropy, zero_state
from utils.hamiltonian import evolve
from utils.stats import BootstrapCI, bootstrap_ci, chunk_rng

logger = get_logger("runner")

# Sample streams use the point index; these offsets keep the other draws apart
BOOTSTRAP_STREAM = 10_000
AUXILIARY_STREAM = 20_000


@dataclass
class ExperimentResult:
    """Per-point records of one run plus everything the JSON sidecar echoes."""

    experiment: str
    config: Dict[str, Any]
    columns: List[str]
    records: List[Dict[str, Any]] = field(default_factory=list)
    summary: Dict[str, Any] = field(default_factory=dict)
    raw_samples: Dict[str, np.ndarray] = field(default_factory=dict)
    seed: int = 0
    version: str = __version__
    wall_clock_seconds: float = 0.0

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.records, columns=self.columns)

    def sidecar(self) -> Dict[str, Any]:
        return {
            'experiment': self.experiment,
            'version': self.version,
            'seed': self.seed,
            'config': self.config,
            'columns': self.columns,
            'summary': self.summary,
            'wall_clock_seconds': self.wall_clock_seconds,
        }


def prefix_entropy_columns(n_qubits: int) -> List[str]:
    return [f"S_{size}" for size in range(1, n_qubits // 2 + 1)]


def prefix_entropies(psi: StateVector) -> Dict[str, float]:
    """Entropies in bits of the first 1..N/2 qubits."""
    return {f"S_{size}": entanglement_entropy(psi, range(size)) for size in range(1, psi.n_qubits // 2 + 1)}


def evolved_state(model: ModelConfig, n_qubits: int, t: float) -> StateVector:
    """|0...0> evolved for time t under the model."""
    return evolve(zero_state(n_qubits), model.build(n_qubits), t)


def confidence_interval(config: ExperimentConfig, values: Sequence[float], statistic: str,
                        index: int) -> BootstrapCI:
    return bootstrap_ci(values, statistic, config.bootstrap_resamples, config.bootstrap_level,
                        rng=chunk_rng(config.seed, BOOTSTRAP_STREAM + index, 0))


def ci_columns(prefix: str, interval: Optional[BootstrapCI]) -> Dict[str, float]:
    if interval is None:
        return {f"{prefix}_ci_lower": float('nan'), f"{prefix}_ci_upper": float('nan')}
    return {f"{prefix}_ci_lower": interval.lower, f"{prefix}_ci_upper": interval.upper}


def write_result(result: ExperimentResult, out_dir: str, save_raw_samples: bool = False) -> Dict[str, str]:
    """
    Write <experiment>.csv, the <experiment>.json sidecar and optional raw .f64 samples.

    Args:
        result: Finished experiment result
        out_dir: Output directory, created when missing
        save_raw_samples: Also write one .f64 file per sample set

    Returns:
        Dict[str, str]: Paths of the written files
    """
    os.makedirs(out_dir, exist_ok=True)
    paths = {'csv': os.path.join(out_dir, f"{result.experiment}.csv"),
             'json': os.path.join(out_dir, f"{result.experiment}.json")}
    result.to_frame().to_csv(paths['csv'], index=False)
    sidecar = result.sidecar()
    if save_raw_samples:
        sidecar['raw_samples'] = {}
        for key, values in result.raw_samples.items():
            name = f"{result.experiment}_{key}.f64"
            paths[key] = write_f64(os.path.join(out_dir, name), values)
            sidecar['raw_samples'][key] = name
    write_json(paths['json'], convert_for_json(sidecar))
    for kind, path in paths.items():
        logger.info(f"Wrote {kind} output to {path}")
    return paths


def execute(config: ExperimentConfig, runner: Callable[[ExperimentConfig], ExperimentResult],
            write: bool = True) -> ExperimentResult:
    """
    Run one experiment with timing and write its outputs.

    Args:
        config: Validated configuration
        runner: The experiment's run function
        write: Write the CSV and JSON outputs

    Returns:
        ExperimentResult: The finished result
    """
    logger.info(f"Starting {config.experiment} on {config.n_qubits} qubits with seed {config.seed}")
    started = time.perf_counter()
    result = runner(config)
    result.wall_clock_seconds = time.perf_counter() - started
    logger.info(f"Finished {config.experiment} in {result.wall_clock_seconds:.1f}s")
    if write:
        write_result(result, config.out_dir, config.save_raw_samples)
    return result
