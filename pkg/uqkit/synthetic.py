#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
The synthetic heteroscedastic regression problem of the PNN case study:
`y = sin(x/2) + x cos(0.8x) + eps`, with `x` uniform on [-10, 10] and Gaussian
noise whose standard deviation depends on the quarter of the input range
(1, 0.01, 1.5 and 0.5 from left to right).
"""

__all__ = ['SynthConfig', 'SyntheticData', 'mean_function', 'noise_level',
           'generate_synthetic', 'population_values']

from dataclasses import dataclass

import numpy as np

from uqkit.core import EvalDataset, PredictionSet
from uqkit.errors import ConfigurationError
from uqkit.resources import make_rng

NOISE_EDGES = (-5.0, 0.0, 5.0)
NOISE_LEVELS = (1.0, 0.01, 1.5, 0.5)

@dataclass(frozen=True)
class SynthConfig:
    '''Sizes of the train/validation/test splits, the input range, and the
    seed of the synthetic data.'''
    n_train: int = 200
    n_val: int = 100
    n_test: int = 100
    low: float = -10.0
    high: float = 10.0
    seed: int = 0

    def __post_init__(self):
        if min(self.n_train, self.n_val, self.n_test) < 1:
            raise ConfigurationError('split sizes must be positive')
        if not self.low < self.high:
            raise ConfigurationError('input range needs low < high')

@dataclass
class SyntheticData:
    '''The three splits and the ground-truth predictions for each of them,
    keyed by split name in `truth`.'''
    train: EvalDataset
    validation: EvalDataset
    test: EvalDataset
    truth: dict

def mean_function(x):
    '''The true conditional mean, `sin(x/2) + x cos(0.8x)`.'''
    x = np.asarray(x, dtype=float)
    return np.sin(x / 2) + x * np.cos(0.8 * x)

def noise_level(x):
    '''The true conditional standard deviation: 1 on [-10, -5), 0.01 on
    [-5, 0), 1.5 on [0, 5) and 0.5 on [5, 10].'''
    x = np.asarray(x, dtype=float)
    return np.asarray(NOISE_LEVELS)[np.searchsorted(NOISE_EDGES, x, side='right')]

def _split(rng, n, cfg, name):
    x = rng.uniform(cfg.low, cfg.high, size=n)
    sigma = noise_level(x)
    mu = mean_function(x)
    y = mu + sigma * rng.standard_normal(n)
    return EvalDataset(y, x[:, None], split=name), PredictionSet(mu, sigma)

def generate_synthetic(cfg=None, rng=None):
    '''
    Draw the train, validation and test splits.

    Parameters
    ----------
    cfg : SynthConfig, optional
        The default is None, meaning `SynthConfig()`.
    rng : int or numpy.random.Generator, optional
        Random source. The default is None, meaning `cfg.seed`.

    Returns
    -------
    SyntheticData

    '''
    cfg = SynthConfig() if cfg is None else cfg
    rng = make_rng(cfg.seed if rng is None else rng)
    splits = {}
    truth = {}
    for name, n in (('train', cfg.n_train), ('validation', cfg.n_val),
                    ('test', cfg.n_test)):
        splits[name], truth[name] = _split(rng, n, cfg, name)
    return SyntheticData(truth=truth, **splits)

def population_values():
    '''Expected ground-truth metrics over the full input range (equal mass on
    the four noise regions): sharpness, nll, mae and crps.'''
    sigma = np.asarray(NOISE_LEVELS)
    return {'sharpness': float(np.sqrt(np.mean(sigma**2))),
            'nll': float(0.5 * np.log(2 * np.pi) + np.mean(np.log(sigma)) + 0.5),
            'mae': float(np.mean(sigma) * np.sqrt(2 / np.pi)),
            'crps': float(np.mean(sigma) / np.sqrt(np.pi))}
