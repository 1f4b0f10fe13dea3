"""
Test fixtures and configuration for Trotter Error Statistics Toolkit tests.
"""

import pytest
import numpy as np
import os

# Add the parent directory to the path so we can import the application modules
import sys
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from utils.config import default_config
from utils.hamiltonian import QIMF_TYPICAL, heisenberg, qimf
from utils.statevector import random_state
from utils.trotter import leading_error_pf1


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long statistical runs at acceptance scale")


@pytest.fixture
def rng() -> np.random.Generator:
    """
    Fixture providing a seeded generator.

    Returns:
        Generator seeded with 2024
    """
    return np.random.default_rng(2024)


@pytest.fixture
def qimf3():
    """Typical QIMF chain on 3 qubits."""
    return qimf(3, *QIMF_TYPICAL)


@pytest.fixture
def qimf4():
    """Typical QIMF chain on 4 qubits."""
    return qimf(4, *QIMF_TYPICAL)


@pytest.fixture
def heisenberg4():
    """Heisenberg chain (h=0.2, J=1) on 4 qubits."""
    return heisenberg(4, 0.2, 1.0)


@pytest.fixture
def qimf4_error(qimf4):
    """
    Fixture providing the PF1 leading error of the 4-qubit QIMF chain.

    Args:
        qimf4: QIMF Hamiltonian fixture

    Returns:
        PauliOperator (1/2)[A, B]
    """
    return leading_error_pf1(qimf4)


@pytest.fixture
def random_states(rng):
    """Five random 4-qubit states."""
    return [random_state(4, rng) for _ in range(5)]


@pytest.fixture
def small_config(tmp_path):
    """
    Fixture providing a factory for downscaled experiment configs.

    Args:
        tmp_path: pytest temporary directory

    Returns:
        Callable building a validated-size config for an experiment
    """
    def factory(experiment: str, **overrides):
        config = default_config(experiment)
        config.n_qubits = 4
        config.samples = 40
        config.bootstrap_resamples = 100
        config.out_dir = str(tmp_path / "results")
        config.times = [0.0, 0.5, 1.0]
        if experiment == 'kurtosis_vs_magic':
            config.k_list = [0, 1, 2]
        if experiment == 'resource_growth':
            config.subsystem_size = 2
        if experiment == 'long_time':
            config.r = 3
            config.bound_max_qubits = 4
        for key, value in overrides.items():
            setattr(config, key, value)
        return config
    return factory
