#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
General functions/constants used by uqkit.
"""

import numpy as np

SPLITS = ('train', 'validation', 'test', 'recalibration')

GRID_STEP = 0.01
MIN_GRID_STEP = 1e-4
ADV_N_SIZES = 10
ADV_N_DRAWS = 20
BAND_MULTIPLE = 2.0
INTERVAL_COVERAGE = 0.95
LEVEL_RANGE = (0.01, 0.99)

SCALAR_METRICS = ('rmse', 'mae', 'ece', 'sharpness',
                  'nll', 'crps', 'check', 'interval')

def make_rng(seed=None):
    '''Return a numpy Generator from a seed, a SeedSequence, or a Generator
    (returned unchanged).'''
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)

def spawn_rngs(seed, n):
    '''
    Create `n` independent child generators, deterministically derived from
    `seed`.

    Parameters
    ----------
    seed : int, SeedSequence, Generator or None
        Parent seed.  A Generator is advanced by one draw.
    n : int
        Number of children.

    Returns
    -------
    list of numpy.random.Generator

    '''
    if isinstance(seed, np.random.Generator):
        seed = int(seed.integers(0, 2**63 - 1))
    if not isinstance(seed, np.random.SeedSequence):
        seed = np.random.SeedSequence(seed)
    return [np.random.default_rng(child) for child in seed.spawn(n)]

def standard_error(values):
    '''Standard error of the mean (sample std over sqrt(n)); 0 for fewer than
    two values.'''
    values = np.asarray(values, dtype=float)
    if values.size < 2:
        return 0.0
    return float(np.std(values, ddof=1) / np.sqrt(values.size))
