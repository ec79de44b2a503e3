""" Experiment configuration: JSON files with an explicit schema version. """
import copy
import json
import logging
import os
from dataclasses import dataclass, field

from gapsphere.util.error import ConfigError

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
EXPERIMENTS = ('sample', 'density', 'verify', 'typicality', 'heatbath', 'compare', 'figure1')
THREADS_VARIABLE = 'GAPSPHERE_THREADS'

_MAX_SEED = 2 ** 64


@dataclass
class ExperimentConfig:
    experiment: str
    seed: int
    schema_version: int = SCHEMA_VERSION
    samples: int = 1000
    dimensions: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)
    thresholds: dict = field(default_factory=dict)
    out: str = None

    def __post_init__(self):
        if self.schema_version != SCHEMA_VERSION:
            raise ConfigError(f'Unsupported schema version {self.schema_version!r}; expected {SCHEMA_VERSION}')
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f'Unknown experiment {self.experiment!r}')
        if isinstance(self.seed, bool) or not isinstance(self.seed, int) or not 0 <= self.seed < _MAX_SEED:
            raise ConfigError('A seed in [0, 2**64) is required')
        if isinstance(self.samples, bool) or not isinstance(self.samples, int) or self.samples < 1:
            raise ConfigError('Sample count must be an integer >= 1')
        for name, value in self.dimensions.items():
            values = value if isinstance(value, list) else [value]
            if any(not isinstance(v, int) or v < 1 for v in values):
                raise ConfigError(f'Dimension {name!r} must be made of integers >= 1')

    def param(self, name, default=None):
        return self.params.get(name, default)

    def threshold(self, name, default):
        return float(self.thresholds.get(name, default))

    def with_overrides(self, seed=None, out=None):
        config = copy.deepcopy(self)
        if seed is not None:
            config.seed = seed
        if out is not None:
            config.out = out
        config.__post_init__()
        return config

    def resolved(self):
        """ The full configuration, as embedded into every report. """
        return {'schema_version': self.schema_version, 'experiment': self.experiment, 'seed': self.seed,
                'samples': self.samples, 'dimensions': copy.deepcopy(self.dimensions),
                'params': copy.deepcopy(self.params), 'thresholds': copy.deepcopy(self.thresholds),
                'out': self.out}


def config_from_dict(values, experiment=None, seed=None, default_seed=None):
    values = dict(values)
    if experiment is not None:
        values.setdefault('experiment', experiment)
    if seed is not None:
        values['seed'] = seed
    elif default_seed is not None:
        values.setdefault('seed', default_seed)
    unknown = set(values) - {'schema_version', 'experiment', 'seed', 'samples', 'dimensions', 'params',
                             'thresholds', 'out'}
    if unknown:
        raise ConfigError(f'Unknown configuration keys: {", ".join(sorted(unknown))}')
    if 'seed' not in values:
        raise ConfigError('Configuration has no seed')
    if 'experiment' not in values:
        raise ConfigError('Configuration names no experiment')
    return ExperimentConfig(**values)


def load_config(path, experiment=None, seed=None, default_seed=None):
    try:
        with open(path, 'r', encoding='utf-8') as stream:
            values = json.load(stream)
    except OSError as error:
        raise ConfigError(f'Cannot read configuration {path}: {error}') from error
    except json.JSONDecodeError as error:
        raise ConfigError(f'Configuration {path} is not valid JSON: {error}') from error
    if not isinstance(values, dict):
        raise ConfigError(f'Configuration {path} must hold a JSON object')
    logger.info('loaded configuration %s', path)
    return config_from_dict(values, experiment, seed, default_seed)


def thread_count(default=None):
    """ Worker cap from GAPSPHERE_THREADS, else the CPU count. """
    value = os.environ.get(THREADS_VARIABLE)
    if value is None:
        return default or os.cpu_count() or 1
    try:
        count = int(value)
    except ValueError as error:
        raise ConfigError(f'{THREADS_VARIABLE} must be an integer, got {value!r}') from error
    if count < 1:
        raise ConfigError(f'{THREADS_VARIABLE} must be at least 1')
    return count
