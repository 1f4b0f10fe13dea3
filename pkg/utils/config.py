"""
Config Module for Trotter Error Statistics Toolkit

This module provides the experiment configuration: model presets, per-experiment
defaults, loading from TOML or JSON files, CLI overrides and validation.
"""

import json
import os
import sys
from dataclasses import asdict, dataclass, field, fields, replace
from typing import Any, Dict, List, Mapping, Optional

from utils.exceptions import ConfigError
from utils.hamiltonian import HEISENBERG_DEFAULT, QIMF_ATYPICAL, QIMF_TYPICAL, HamiltonianSpec, heisenberg, qimf
from utils.helpers import require_dense, time_grid
from utils.logger import get_logger

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

logger = get_logger("config")

EXPERIMENTS = ("variance_vs_time", "kurtosis_vs_magic", "joint_lc", "resource_growth", "long_time")

MODEL_PRESETS: Dict[str, Dict[str, Any]] = {
    'typical': {'name': 'qimf', 'h_x': QIMF_TYPICAL[0], 'h_y': QIMF_TYPICAL[1], 'J': QIMF_TYPICAL[2]},
    'atypical': {'name': 'qimf', 'h_x': QIMF_ATYPICAL[0], 'h_y': QIMF_ATYPICAL[1], 'J': QIMF_ATYPICAL[2]},
    'heisenberg': {'name': 'heisenberg', 'h': HEISENBERG_DEFAULT[0], 'J': HEISENBERG_DEFAULT[1]},
}

_MODEL_PARAMS = {'qimf': ('h_x', 'h_y', 'J'), 'heisenberg': ('h', 'J')}


@dataclass(frozen=True)
class ModelConfig:
    """A named model with its parameters; label is the preset name when one was used."""

    name: str
    params: Dict[str, float]
    label: str = ""

    def build(self, n_qubits: int) -> HamiltonianSpec:
        if self.name == 'qimf':
            return qimf(n_qubits, self.params['h_x'], self.params['h_y'], self.params['J'])
        return heisenberg(n_qubits, self.params['h'], self.params['J'])

    def to_dict(self) -> Dict[str, Any]:
        return {'name': self.name, 'label': self.label or self.name, **self.params}


@dataclass(frozen=True)
class InitialStateConfig:
    """|0...0> evolved for time t under a model."""

    label: str
    model: ModelConfig
    t: float

    def to_dict(self) -> Dict[str, Any]:
        return {'label': self.label, 'model': self.model.to_dict(), 't': self.t}


def parse_model(value: Any) -> ModelConfig:
    """
    Resolve a preset name or an inline model table.

    Args:
        value (Any): 'typical', 'atypical', 'heisenberg' or a mapping with 'name' and parameters

    Returns:
        ModelConfig: The resolved model
    """
    if isinstance(value, ModelConfig):
        return value
    if isinstance(value, str):
        if value not in MODEL_PRESETS:
            raise ConfigError(f"unknown model preset {value!r}; expected one of {sorted(MODEL_PRESETS)}")
        preset = dict(MODEL_PRESETS[value])
        return ModelConfig(preset.pop('name'), {k: float(v) for k, v in preset.items()}, label=value)
    if isinstance(value, Mapping):
        data = dict(value)
        name = data.pop('name', None)
        label = str(data.pop('label', '') or '')
        if name not in _MODEL_PARAMS:
            raise ConfigError(f"unknown model {name!r}; expected one of {sorted(_MODEL_PARAMS)}")
        expected = set(_MODEL_PARAMS[name])
        if set(data) != expected:
            raise ConfigError(f"model {name!r} needs parameters {sorted(expected)}, got {sorted(data)}")
        try:
            params = {k: float(v) for k, v in data.items()}
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"model {name!r} parameters must be numbers") from exc
        return ModelConfig(name, params, label=label)
    raise ConfigError(f"cannot interpret model {value!r}")


def _parse_times(value: Any) -> List[float]:
    if isinstance(value, Mapping):
        unknown = set(value) - {'start', 'stop', 'step'}
        if unknown:
            raise ConfigError(f"unknown time grid fields: {sorted(unknown)}")
        try:
            return time_grid(float(value.get('start', 0.0)), float(value['stop']), float(value['step']))
        except KeyError as exc:
            raise ConfigError(f"time grid needs {exc.args[0]!r}") from exc
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    if isinstance(value, (list, tuple)):
        return [float(t) for t in value]
    raise ConfigError(f"cannot interpret time grid {value!r}")


def _parse_states(value: Any) -> List[InitialStateConfig]:
    if not isinstance(value, (list, tuple)):
        raise ConfigError("states must be a list of {label, model, t} tables")
    states = []
    for item in value:
        if isinstance(item, InitialStateConfig):
            states.append(item)
            continue
        if not isinstance(item, Mapping) or set(item) - {'label', 'model', 't'}:
            raise ConfigError(f"state entries take label, model and t, got {item!r}")
        states.append(InitialStateConfig(str(item.get('label', '')), parse_model(item.get('model', 'typical')),
                                         float(item.get('t', 0.0))))
    return states


def _integer(key: str, value: Any) -> int:
    """Integer field value; bools and fractional numbers are rejected instead of truncated."""
    if isinstance(value, bool) or (isinstance(value, float) and not value.is_integer()):
        raise ValueError(f"{key} must be an integer, got {value!r}")
    return int(value)


def _default_states() -> List[InitialStateConfig]:
    return [InitialStateConfig('LL', parse_model('typical'), 0.0),
            InitialStateConfig('HH', parse_model('typical'), 3.9),
            InitialStateConfig('LH', parse_model('atypical'), 0.4)]


def _env_default(name: str, default: Any, cast) -> Any:
    value = os.environ.get(name)
    if value is None or value.strip() == "":
        return default
    try:
        return cast(value)
    except ValueError as exc:
        raise ConfigError(f"environment variable {name}={value!r} is invalid") from exc


@dataclass
class ExperimentConfig:
    """Validated settings of one experiment run."""

    experiment: str
    n_qubits: int = 10
    model: ModelConfig = field(default_factory=lambda: parse_model('typical'))
    models: List[ModelConfig] = field(default_factory=list)
    error_model: Optional[ModelConfig] = None
    order: int = 1
    dt: float = 0.01
    times: List[float] = field(default_factory=list)
    samples: int = 2000
    k_list: List[int] = field(default_factory=list)
    states: List[InitialStateConfig] = field(default_factory=list)
    subsystem_size: int = 5
    r: int = 100
    bound_max_qubits: int = 6
    tail_thresholds: List[float] = field(default_factory=lambda: [2.0, 3.0, 4.0])
    bootstrap_resamples: int = 1000
    bootstrap_level: float = 0.95
    seed: int = 2024
    out_dir: str = "results"
    workers: int = 1
    convention: str = "half"
    save_raw_samples: bool = False

    def to_dict(self) -> Dict[str, Any]:
        payload = asdict(self)
        payload['model'] = self.model.to_dict()
        payload['models'] = [m.to_dict() for m in self.models]
        payload['error_model'] = self.error_model.to_dict() if self.error_model else None
        payload['states'] = [s.to_dict() for s in self.states]
        return payload

    @property
    def measured_model(self) -> ModelConfig:
        """Model whose product-formula error is sampled."""
        return self.error_model or self.model


def default_config(experiment: str) -> ExperimentConfig:
    """
    Defaults for an experiment, with the output directory and worker count from the environment.

    Args:
        experiment (str): Experiment identifier

    Returns:
        ExperimentConfig: Unvalidated defaults
    """
    if experiment not in EXPERIMENTS:
        raise ConfigError(f"unknown experiment {experiment!r}; expected one of {EXPERIMENTS}")
    config = ExperimentConfig(
        experiment=experiment,
        out_dir=_env_default('TROTTER_OUTPUT_DIR', 'results', str),
        workers=_env_default('TROTTER_WORKERS', 1, int),
    )
    if experiment == 'variance_vs_time':
        config.times = time_grid(0.0, 4.0, 0.2)
    elif experiment == 'kurtosis_vs_magic':
        config.dt = 0.1
        config.samples = 1_000_000
        config.k_list = [0, 1, 2, 3, 4]
    elif experiment == 'joint_lc':
        config.samples = 1_000_000
        config.states = _default_states()
    elif experiment == 'resource_growth':
        config.models = [parse_model('typical'), parse_model('atypical')]
        config.times = time_grid(0.0, 4.0, 0.1)
    else:
        config.error_model = parse_model('heisenberg')
        config.order = 2
        config.dt = 0.1
        config.times = time_grid(0.0, 4.0, 0.2)
    return config


_FIELD_NAMES = {f.name for f in fields(ExperimentConfig)}
_FILE_KEYS = (_FIELD_NAMES - {'bootstrap_resamples', 'bootstrap_level'}) | {'bootstrap'}


def config_from_dict(data: Mapping[str, Any], experiment: Optional[str] = None) -> ExperimentConfig:
    """
    Build a configuration from a parsed file, layered over the experiment defaults.

    Args:
        data (Mapping[str, Any]): Parsed TOML or JSON table
        experiment (Optional[str]): Expected experiment; must agree with the file when both are given

    Returns:
        ExperimentConfig: Validated configuration
    """
    data = dict(data)
    declared = data.get('experiment')
    if experiment and declared and declared != experiment:
        raise ConfigError(f"config is for {declared!r}, not {experiment!r}")
    experiment = experiment or declared
    if not experiment:
        raise ConfigError("config does not name an experiment")
    unknown = set(data) - _FILE_KEYS
    if unknown:
        raise ConfigError(f"unknown config fields: {sorted(unknown)}")

    config = default_config(experiment)
    try:
        for key, value in data.items():
            if key == 'experiment':
                continue
            if key == 'bootstrap':
                extra = set(value) - {'resamples', 'level'}
                if extra:
                    raise ConfigError(f"unknown bootstrap fields: {sorted(extra)}")
                config.bootstrap_resamples = _integer('bootstrap.resamples',
                                                     value.get('resamples', config.bootstrap_resamples))
                config.bootstrap_level = float(value.get('level', config.bootstrap_level))
            elif key in ('model', 'error_model'):
                setattr(config, key, parse_model(value))
            elif key == 'models':
                config.models = [parse_model(item) for item in value]
            elif key == 'states':
                config.states = _parse_states(value)
            elif key == 'times':
                config.times = _parse_times(value)
            elif key in ('k_list',):
                config.k_list = [_integer(key, k) for k in value]
            elif key == 'tail_thresholds':
                config.tail_thresholds = [float(t) for t in value]
            elif key in ('out_dir', 'convention'):
                setattr(config, key, str(value))
            elif key == 'save_raw_samples':
                config.save_raw_samples = bool(value)
            elif key == 'dt':
                config.dt = float(value)
            else:
                setattr(config, key, _integer(key, value))
    except (TypeError, ValueError, AttributeError) as exc:
        raise ConfigError(f"invalid config value: {exc}") from exc
    validate_config(config)
    return config


def load_config(path: Optional[str] = None, experiment: Optional[str] = None) -> ExperimentConfig:
    """
    Load a TOML or JSON config file, or the defaults when no path is given.

    Args:
        path (Optional[str]): .toml or .json file
        experiment (Optional[str]): Experiment the file must describe

    Returns:
        ExperimentConfig: Validated configuration
    """
    if path is None:
        config = default_config(experiment)
        validate_config(config)
        return config
    if not os.path.exists(path):
        raise ConfigError(f"config file not found: {path}")
    try:
        if path.endswith('.json'):
            with open(path, 'r') as handle:
                data = json.load(handle)
        else:
            with open(path, 'rb') as handle:
                data = tomllib.load(handle)
    except (json.JSONDecodeError, tomllib.TOMLDecodeError) as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc
    logger.info(f"Loaded config from {path}")
    return config_from_dict(data, experiment)


def apply_overrides(config: ExperimentConfig, seed: Optional[int] = None, out_dir: Optional[str] = None,
                    workers: Optional[int] = None, samples: Optional[int] = None) -> ExperimentConfig:
    """Return a copy with CLI overrides applied and revalidated."""
    updates = {key: value for key, value in
               (('seed', seed), ('out_dir', out_dir), ('workers', workers), ('samples', samples))
               if value is not None}
    updated = replace(config, **updates)
    validate_config(updated)
    return updated


def _valid_order(order: int) -> bool:
    return order == 1 or (order >= 2 and order % 2 == 0)


def validate_config(config: ExperimentConfig) -> None:
    """
    Check every field of a configuration.

    Raises:
        ConfigError: On any invalid field
        DimensionLimitError: When n_qubits exceeds DENSE_QUBIT_LIMIT
    """
    problems = []
    if config.experiment not in EXPERIMENTS:
        problems.append(f"unknown experiment {config.experiment!r}")
    if config.n_qubits < 2:
        problems.append("n_qubits must be at least 2")
    if not _valid_order(config.order):
        problems.append(f"order must be 1 or even, got {config.order}")
    if config.dt <= 0:
        problems.append("dt must be positive")
    if config.samples < 10:
        problems.append("samples must be at least 10")
    if config.bootstrap_resamples < 100:
        problems.append("bootstrap resamples must be at least 100")
    if not 0.0 < config.bootstrap_level < 1.0:
        problems.append("bootstrap level must lie in (0, 1)")
    if config.workers < 1:
        problems.append("workers must be at least 1")
    if config.seed < 0:
        problems.append("seed must be non-negative")
    if config.convention not in ('half', 'full'):
        problems.append(f"convention must be 'half' or 'full', got {config.convention!r}")
    if any(t < 0 for t in config.times):
        problems.append("times must be non-negative")
    if any(t <= 0 for t in config.tail_thresholds):
        problems.append("tail thresholds must be positive")

    experiment = config.experiment
    if experiment in ('variance_vs_time', 'resource_growth', 'long_time') and not config.times:
        problems.append(f"{experiment} needs a non-empty time grid")
    if experiment == 'kurtosis_vs_magic':
        if not config.k_list:
            problems.append("k_list must not be empty")
        elif any(not 0 <= k <= config.n_qubits for k in config.k_list):
            problems.append(f"k_list entries must lie in 0..{config.n_qubits}")
    if experiment == 'joint_lc' and not config.states:
        problems.append("joint_lc needs at least one initial state")
    if experiment == 'resource_growth':
        if not config.models:
            problems.append("resource_growth needs at least one model")
        if not 1 <= config.subsystem_size <= config.n_qubits:
            problems.append(f"subsystem_size must lie in 1..{config.n_qubits}")
    if experiment == 'long_time':
        if config.r < 1:
            problems.append("r must be at least 1")
        if config.bound_max_qubits < 2:
            problems.append("bound_max_qubits must be at least 2")
    if problems:
        raise ConfigError("; ".join(problems))
    require_dense(config.n_qubits, "experiment register")
