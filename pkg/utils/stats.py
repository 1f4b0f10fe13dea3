"""
Stats Module for Trotter Error Statistics Toolkit

This module provides Monte Carlo estimation over the LU, GC and LC ensembles,
population sample moments and basic bootstrap confidence intervals.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from typing import Callable, Dict, Iterator, Optional, Sequence

import numpy as np
import pandas as pd
from scipy.stats import spearmanr

from utils.clifford import apply_clifford, sample_local_cliffords, sample_uniform_clifford
from utils.exceptions import DegenerateDistributionError
from utils.hamiltonian import HamiltonianSpec
from utils.logger import get_logger
from utils.statevector import StateVector, apply_local_unitaries, random_haar_1q
from utils.trotter import ProductFormula, convention_scale, true_error_long, true_error_one_step

logger = get_logger("stats")

ENSEMBLES = ("LU", "GC", "LC")
STATISTICS = ("mean", "variance", "skewness", "kurtosis")
DEFAULT_CHUNK_SIZE = 250
DEFAULT_QUANTILES = (0.01, 0.05, 0.25, 0.5, 0.75, 0.95, 0.99)
_RESAMPLE_BLOCK_ELEMENTS = 1 << 22


@dataclass
class SampleSummary:
    """Population moments of a sample; skewness and kurtosis are NaN when undefined."""

    n: int
    mean: float
    variance: float
    skewness: float
    kurtosis: float
    min: float
    max: float
    kurtosis_defined: bool

    def to_dict(self) -> Dict[str, float]:
        return asdict(self)


@dataclass
class BootstrapCI:
    statistic: str
    point: float
    lower: float
    upper: float
    level: float = 0.95
    resamples: int = 1000

    @property
    def contains_point(self) -> bool:
        return self.lower <= self.point <= self.upper

    def covers(self, value: float) -> bool:
        return self.lower <= value <= self.upper

    def to_dict(self) -> Dict[str, float]:
        payload = asdict(self)
        payload['contains_point'] = self.contains_point
        return payload


class SampleStatistics:
    """Row-wise population statistics over the last axis."""

    @staticmethod
    def central_moments(values: np.ndarray) -> Dict[str, np.ndarray]:
        """
        Mean and central moments mu_2..mu_4.

        Args:
            values (np.ndarray): Samples along the last axis

        Returns:
            Dict[str, np.ndarray]: mean, mu2, mu3, mu4
        """
        mean = values.mean(axis=-1, keepdims=True)
        centered = values - mean
        squared = centered ** 2
        return {
            'mean': mean[..., 0],
            'mu2': squared.mean(axis=-1),
            'mu3': (squared * centered).mean(axis=-1),
            'mu4': (squared * squared).mean(axis=-1),
        }

    @staticmethod
    def evaluate(values: np.ndarray, statistic: str) -> np.ndarray:
        moments = SampleStatistics.central_moments(values)
        if statistic == 'mean':
            return moments['mean']
        if statistic == 'variance':
            return moments['mu2']
        with np.errstate(divide='ignore', invalid='ignore'):
            if statistic == 'skewness':
                return moments['mu3'] / moments['mu2'] ** 1.5
            if statistic == 'kurtosis':
                return moments['mu4'] / moments['mu2'] ** 2
        raise ValueError(f"unknown statistic {statistic!r}; expected one of {STATISTICS}")

    @staticmethod
    def quantiles(values: Sequence[float], levels: Sequence[float] = DEFAULT_QUANTILES) -> Dict[str, float]:
        series = pd.Series(np.asarray(values, dtype=np.float64))
        return {f"q{level:g}": float(series.quantile(level)) for level in levels}


def summarize(values: Sequence[float]) -> SampleSummary:
    """
    Population moment estimators of a sample.

    Args:
        values (Sequence[float]): At least 2 samples; kurtosis needs at least 4

    Returns:
        SampleSummary: Moments with kurtosis_defined False for tiny or constant samples
    """
    array = np.asarray(values, dtype=np.float64).reshape(-1)
    if array.size < 2:
        raise ValueError(f"need at least 2 samples, got {array.size}")
    moments = SampleStatistics.central_moments(array)
    variance = float(moments['mu2'])
    scale = max(float(np.max(np.abs(array))), 1e-300)
    defined = array.size >= 4 and variance > (1e-14 * scale) ** 2
    skewness = float(moments['mu3'] / variance ** 1.5) if defined else float('nan')
    kurtosis = float(moments['mu4'] / variance ** 2) if defined else float('nan')
    return SampleSummary(int(array.size), float(moments['mean']), max(variance, 0.0), skewness, kurtosis,
                         float(array.min()), float(array.max()), bool(defined))


def bootstrap_ci(values: Sequence[float], statistic: str = 'variance', m_resamples: int = 1000,
                 level: float = 0.95, rng: Optional[np.random.Generator] = None) -> BootstrapCI:
    """
    Basic bootstrap interval [T - q_hi, T - q_lo] from the quantiles of T* - T.

    Args:
        values (Sequence[float]): At least 10 samples
        statistic (str): 'mean', 'variance', 'skewness' or 'kurtosis'
        m_resamples (int): Number of resamples, at least 100
        level (float): Confidence level in (0, 1)
        rng (Optional[np.random.Generator]): Generator for the resampling indices

    Returns:
        BootstrapCI: The interval
    """
    array = np.asarray(values, dtype=np.float64).reshape(-1)
    if statistic not in STATISTICS:
        raise ValueError(f"unknown statistic {statistic!r}; expected one of {STATISTICS}")
    if m_resamples < 100:
        raise ValueError(f"need at least 100 resamples, got {m_resamples}")
    if array.size < 10:
        raise ValueError(f"need at least 10 samples, got {array.size}")
    if not 0.0 < level < 1.0:
        raise ValueError("level must lie in (0, 1)")
    if np.ptp(array) == 0.0:
        raise DegenerateDistributionError("constant sample has no bootstrap interval")
    rng = np.random.default_rng() if rng is None else rng

    n = array.size
    point = float(SampleStatistics.evaluate(array, statistic))
    rows = max(1, _RESAMPLE_BLOCK_ELEMENTS // n)
    resampled = np.empty(m_resamples)
    for start in range(0, m_resamples, rows):
        count = min(rows, m_resamples - start)
        indices = rng.integers(0, n, size=(count, n))
        resampled[start:start + count] = SampleStatistics.evaluate(array[indices], statistic)
    differences = resampled[np.isfinite(resampled)] - point
    tail = (1.0 - level) / 2.0
    q_lo, q_hi = np.quantile(differences, [tail, 1.0 - tail])
    interval = BootstrapCI(statistic, point, float(point - q_hi), float(point - q_lo), level, m_resamples)
    if not interval.contains_point:
        logger.warning(f"Bootstrap {statistic} interval [{interval.lower:.6g}, {interval.upper:.6g}] "
                       f"excludes the point estimate {point:.6g}")
    return interval


# Ensembles

def sample_ensemble(psi: StateVector, kind: str, n_samples: int,
                    rng: np.random.Generator) -> Iterator[StateVector]:
    """
    Draw states from the orbit of psi.

    LU applies an independent Haar unitary to every qubit, GC one uniform
    global Clifford and LC an independent uniform Clifford per qubit.

    Args:
        psi (StateVector): Starting state
        kind (str): 'LU', 'GC' or 'LC'
        n_samples (int): Number of draws, at least 1
        rng (np.random.Generator): Seeded generator

    Returns:
        Iterator[StateVector]: The draws
    """
    if kind not in ENSEMBLES:
        raise ValueError(f"unknown ensemble {kind!r}; expected one of {ENSEMBLES}")
    if n_samples < 1:
        raise ValueError("n_samples must be at least 1")
    return _draws(psi, kind, n_samples, rng)


def _draws(psi: StateVector, kind: str, n_samples: int, rng: np.random.Generator) -> Iterator[StateVector]:
    n = psi.n_qubits
    for _ in range(n_samples):
        if kind == 'LU':
            yield apply_local_unitaries(psi, [random_haar_1q(rng) for _ in range(n)])
        elif kind == 'GC':
            yield apply_clifford(psi, sample_uniform_clifford(n, rng))
        else:
            yield apply_local_unitaries(psi, sample_local_cliffords(n, rng))


def estimate_s_hat(psi: StateVector, hamiltonian: HamiltonianSpec, pf: ProductFormula, dt: float,
                   convention: str = "half") -> float:
    """
    One-step error squared over dt^{2p+2}, an estimate of s_E(psi).

    The result is expressed in the same convention as error_operator, so it
    estimates s_E for the operator the analytic predictions are built from.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    factor = convention_scale(hamiltonian, pf, convention)
    return factor ** 2 * true_error_one_step(psi, hamiltonian, pf, dt) ** 2 / dt ** (2 * pf.order + 2)


@dataclass
class SHatMeasure:
    hamiltonian: HamiltonianSpec
    pf: ProductFormula
    dt: float
    convention: str = "half"

    def __call__(self, psi: StateVector) -> float:
        return estimate_s_hat(psi, self.hamiltonian, self.pf, self.dt, self.convention)


@dataclass
class LongTimeErrorMeasure:
    hamiltonian: HamiltonianSpec
    pf: ProductFormula
    dt: float
    r: int

    def __call__(self, psi: StateVector) -> float:
        return true_error_long(psi, self.hamiltonian, self.pf, self.dt, self.r)


@dataclass
class EnsembleTask:
    """Draw count states from one ensemble and measure each."""

    psi: StateVector
    kind: str
    measure: Callable[[StateVector], float]

    def __call__(self, rng: np.random.Generator, count: int) -> np.ndarray:
        return np.fromiter((self.measure(state) for state in sample_ensemble(self.psi, self.kind, count, rng)),
                           dtype=np.float64, count=count)


def chunk_rng(seed: int, stream: int, chunk: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(stream, chunk)))


def _run_chunk(task: Callable[[np.random.Generator, int], np.ndarray], seed: int, stream: int,
               chunk: int, count: int) -> np.ndarray:
    return task(chunk_rng(seed, stream, chunk), count)


def monte_carlo(task: Callable[[np.random.Generator, int], np.ndarray], n_samples: int, seed: int,
                stream: int = 0, workers: int = 1, chunk_size: int = DEFAULT_CHUNK_SIZE) -> np.ndarray:
    """
    Run task over fixed-size chunks with one derived generator per chunk.

    Chunk c of stream s draws from SeedSequence(seed, spawn_key=(s, c)), so the
    result does not depend on the number of workers.

    Args:
        task (Callable[[np.random.Generator, int], np.ndarray]): Picklable sampler returning count values
        n_samples (int): Total number of samples
        seed (int): Master seed
        stream (int): Stream index separating independent runs under one seed
        workers (int): Process count; 1 runs in-process
        chunk_size (int): Samples per chunk

    Returns:
        np.ndarray: Samples in chunk order
    """
    if n_samples < 1:
        raise ValueError("n_samples must be at least 1")
    if chunk_size < 1:
        raise ValueError("chunk_size must be at least 1")
    counts = [min(chunk_size, n_samples - start) for start in range(0, n_samples, chunk_size)]
    chunks = list(range(len(counts)))
    if workers > 1 and len(counts) > 1:
        logger.debug(f"Stream {stream}: {n_samples} samples in {len(counts)} chunks on {workers} workers")
        with ProcessPoolExecutor(max_workers=workers) as executor:
            parts = list(executor.map(_run_chunk, [task] * len(counts), [seed] * len(counts),
                                      [stream] * len(counts), chunks, counts))
    else:
        parts = [_run_chunk(task, seed, stream, chunk, count) for chunk, count in zip(chunks, counts)]
    return np.concatenate(parts)


# Trends and tails

def trend_statistics(x: Sequence[float], y: Sequence[float]) -> Dict[str, float]:
    """
    Spearman rank correlation and least-squares slope of y against x.

    Args:
        x (Sequence[float]): Abscissa
        y (Sequence[float]): Ordinate, same length, at least 3 points

    Returns:
        Dict[str, float]: spearman_rho, spearman_p, slope, intercept
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.size < 3:
        raise ValueError("need two equal-length series with at least 3 points")
    rho, p_value = spearmanr(x, y)
    slope, intercept = np.polyfit(x, y, 1)
    return {'spearman_rho': float(rho), 'spearman_p': float(p_value),
            'slope': float(slope), 'intercept': float(intercept)}


def tail_frequency(values: Sequence[float], t: float) -> float:
    """Fraction of samples with (x - mean) / sigma >= t."""
    array = np.asarray(values, dtype=np.float64)
    sigma = array.std()
    if sigma == 0.0:
        raise DegenerateDistributionError("constant sample has no standardized tail")
    return float(np.mean((array - array.mean()) / sigma >= t))


def summary_row(values: Sequence[float], prefix: str = "") -> Dict[str, float]:
    """Flattened summary and quantiles for a CSV record."""
    summary = summarize(values)
    row = {f"{prefix}{key}": value for key, value in summary.to_dict().items()}
    row.update({f"{prefix}{key}": value for key, value in SampleStatistics.quantiles(values).items()})
    return row


def ensemble_samples(psi: StateVector, kind: str, measure: Callable[[StateVector], float],
                     n_samples: int, seed: int, stream: int = 0, workers: int = 1) -> np.ndarray:
    """monte_carlo over an EnsembleTask."""
    return monte_carlo(EnsembleTask(psi, kind, measure), n_samples, seed, stream=stream, workers=workers)
