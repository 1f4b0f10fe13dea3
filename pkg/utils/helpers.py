"""
Helper functions for Trotter Error Statistics Toolkit
"""

import json
import os
from typing import Any, Dict, Optional, Sequence

import numpy as np
import pandas as pd

from utils.exceptions import DimensionLimitError

__version__ = "0.4.0"

DEFAULT_DENSE_QUBIT_LIMIT = 12
DEFAULT_SPECTRUM_QUBIT_LIMIT = 12
DEFAULT_PAIR_SUPPORT_LIMIT = 8
DEFAULT_SYMBOLIC_TERM_BUDGET = 5_000_000


def _env_int(name: str, default: int) -> int:
    value = os.environ.get(name)
    if value is None or value.strip() == "":
        return default
    try:
        return int(value)
    except ValueError:
        return default


def dense_qubit_limit() -> int:
    """Largest qubit count for which dense matrices are built."""
    return _env_int('DENSE_QUBIT_LIMIT', DEFAULT_DENSE_QUBIT_LIMIT)


def spectrum_qubit_limit() -> int:
    """Largest qubit count for full Pauli spectra."""
    return _env_int('SPECTRUM_QUBIT_LIMIT', DEFAULT_SPECTRUM_QUBIT_LIMIT)


def pair_support_limit() -> int:
    """Largest support handled densely by the variance routines."""
    return _env_int('PAIR_SUPPORT_LIMIT', DEFAULT_PAIR_SUPPORT_LIMIT)


def symbolic_term_budget() -> int:
    """Largest number of pairwise term products a symbolic expansion may form."""
    return _env_int('SYMBOLIC_TERM_BUDGET', DEFAULT_SYMBOLIC_TERM_BUDGET)


def require_dense(n_qubits: int, what: str, limit: Optional[int] = None) -> None:
    """
    Raise DimensionLimitError when a dense object of n_qubits would exceed the limit.

    Args:
        n_qubits (int): Number of qubits of the requested object
        what (str): Short description used in the error message
        limit (Optional[int]): Explicit limit, defaults to DENSE_QUBIT_LIMIT
    """
    limit = dense_qubit_limit() if limit is None else limit
    if n_qubits > limit:
        raise DimensionLimitError(f"{what} needs {n_qubits} qubits, above the limit of {limit}")


def convert_for_json(value: Any) -> Any:
    """
    Convert numpy and pandas values to plain JSON-compatible Python objects.

    Args:
        value (Any): Value to convert

    Returns:
        Any: Converted value
    """
    if isinstance(value, (np.integer,)):
        return int(value)
    elif isinstance(value, (np.floating,)):
        value = float(value)
    elif isinstance(value, (np.bool_,)):
        return bool(value)
    elif isinstance(value, np.ndarray):
        return [convert_for_json(item) for item in value.tolist()]
    elif isinstance(value, complex):
        return {'re': value.real, 'im': value.imag}
    elif isinstance(value, (list, tuple)):
        return [convert_for_json(item) for item in value]
    elif isinstance(value, dict):
        return {str(k): convert_for_json(v) for k, v in value.items()}
    elif isinstance(value, pd.DataFrame):
        return [convert_for_json(row) for row in value.to_dict(orient='records')]
    if isinstance(value, float) and not np.isfinite(value):
        # JSON has no NaN or infinity
        return None
    return value


def write_json(path: str, payload: Dict[str, Any]) -> str:
    """
    Write a payload as pretty-printed JSON after numpy conversion.

    Args:
        path (str): Output file path
        payload (Dict[str, Any]): Data to write

    Returns:
        str: The written path
    """
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, 'w', encoding='utf-8') as handle:
        json.dump(convert_for_json(payload), handle, indent=2, sort_keys=True)
        handle.write('\n')
    return path


def write_f64(path: str, values: Sequence[float]) -> str:
    """Write values as a raw little-endian float64 array."""
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    np.asarray(values, dtype='<f8').tofile(path)
    return path


def read_f64(path: str) -> np.ndarray:
    """Read a raw little-endian float64 array written by write_f64."""
    return np.fromfile(path, dtype='<f8')


def time_grid(start: float, stop: float, step: float) -> list:
    """
    Inclusive, rounded time grid.

    Args:
        start (float): First time
        stop (float): Last time, included when it falls on the grid
        step (float): Spacing

    Returns:
        list: Grid values rounded to 10 decimals
    """
    if step <= 0:
        raise ValueError("step must be positive")
    count = int(np.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + i * step, 10) for i in range(count)]
