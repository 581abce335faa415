#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Calibration metrics: observed proportions, calibration curves, expected
calibration error (ECE), calibration within prescribed groups, and the sampled
proxy for adversarial group calibration.

A target counts as covered by a predicted quantile when `y <= q` (ties are
covered).
"""

__all__ = ['CalibrationCurve', 'GroupSpec', 'AdvGroupCurve', 'AdvGroupConfig',
           'observed_from_quantiles', 'ece_from_observed',
           'observed_proportion', 'calibration_curve', 'ece',
           'miscalibration_area', 'group_ece', 'adversarial_group_calibration']

from dataclasses import dataclass

import numpy as np

from uqkit.core import ProbGrid, validate_nonempty
from uqkit.errors import (ConfigurationError, EmptyInputError,
                          InvalidArgumentError, ValidationError)
from uqkit.resources import (ADV_N_DRAWS, ADV_N_SIZES, make_rng, spawn_rngs,
                             standard_error)

@dataclass(frozen=True)
class CalibrationCurve:
    '''Observed proportions (`observed`) against the expected probabilities of
    a `uqkit.core.ProbGrid` (`expected`).'''
    expected: ProbGrid
    observed: np.ndarray

    def __post_init__(self):
        observed = np.asarray(self.observed, dtype=float)
        if observed.shape != (len(self.expected),):
            raise ValidationError(f'{observed.size} observed values for '
                                  f'{len(self.expected)} expected levels')
        if np.any((observed < 0) | (observed > 1)):
            raise ValidationError('observed proportions must lie in [0, 1]')
        object.__setattr__(self, 'observed', observed)

@dataclass(frozen=True)
class AdvGroupCurve:
    '''Mean (over replicates) of the worst group ECE, with its standard error,
    at each group size expressed as a fraction of the dataset.'''
    group_fractions: np.ndarray
    mean_worst_ece: np.ndarray
    stderr: np.ndarray

    def to_dict(self):
        return {'group_fractions': self.group_fractions.tolist(),
                'mean_worst_ece': self.mean_worst_ece.tolist(),
                'stderr': self.stderr.tolist()}

    @classmethod
    def from_dict(cls, d):
        return cls(*(np.asarray(d[k], dtype=float) for k in
                     ('group_fractions', 'mean_worst_ece', 'stderr')))

@dataclass(frozen=True)
class AdvGroupConfig:
    '''Settings for `adversarial_group_calibration`.'''
    n_sizes: int = ADV_N_SIZES
    n_draws: int = ADV_N_DRAWS
    seed: int = 0

    def __post_init__(self):
        if self.n_sizes < 1 or self.n_draws < 1:
            raise ConfigurationError('n_sizes and n_draws must be at least 1')

class GroupSpec:
    '''
    Prescribed groups of dataset indices.

    Parameters
    ----------
    groups : list of array like
        One list of member indices per group.  Validity against a dataset is
        checked when the groups are used.
    '''

    def __init__(self, groups):
        self.groups = [np.asarray(g, dtype=int).reshape(-1) for g in groups]

    def __len__(self):
        return len(self.groups)

    def __iter__(self):
        return iter(self.groups)

    def __repr__(self):
        sizes = [len(g) for g in self.groups]
        return f'GroupSpec(sizes={sizes})'

    @classmethod
    def partition(cls, n, k, rng=None):
        '''Randomly split `range(n)` into `k` groups of (nearly) equal size.'''
        perm = make_rng(rng).permutation(n)
        return cls(np.array_split(perm, k))

    def check(self, n):
        '''Raise if a group is empty or indexes outside `range(n)`.'''
        for g, members in enumerate(self.groups):
            if members.size == 0:
                raise EmptyInputError(f'group {g} is empty')
            if members.min() < 0 or members.max() >= n:
                raise ValidationError(f'group {g} has indices outside '
                                      f'[0, {n})', index=g)

def _grid(grid):
    return ProbGrid.default() if grid is None else grid

def _covered(preds, data, probs):
    '''Integer coverage indicators, shape `(n, len(probs))`.'''
    return (data.targets[:, None] <= preds.quantiles(probs)).astype(np.int64)

def observed_from_quantiles(targets, quantiles):
    '''
    Fraction of targets at or below their predicted quantile, per level.

    Parameters
    ----------
    targets : array like
        Targets, length n.
    quantiles : array like
        Quantile table of shape `(n, m)`.

    Returns
    -------
    numpy.ndarray
        Observed proportions, length m.

    '''
    targets = np.asarray(targets, dtype=float)
    quantiles = np.asarray(quantiles, dtype=float)
    if targets.size == 0:
        raise EmptyInputError('observed proportions need at least one target')
    counts = (targets[:, None] <= quantiles).astype(np.int64).sum(axis=0)
    return counts / targets.size

def ece_from_observed(expected, observed):
    '''Mean absolute gap between observed and expected probabilities.'''
    return float(np.mean(np.abs(np.asarray(observed) - np.asarray(expected))))

def observed_proportion(preds, data, p):
    '''
    Fraction of targets at or below their predicted `p`-quantile.

    Parameters
    ----------
    preds : uqkit.core.PredictionSet
        Predictions.
    data : uqkit.core.EvalDataset
        Targets.
    p : float
        Expected probability in (0, 1).

    Raises
    ------
    EmptyInputError
        The dataset is empty.
    InvalidArgumentError
        `p` outside (0, 1).

    Returns
    -------
    float

    '''
    validate_nonempty(preds, data)
    if not 0 < p < 1:
        raise InvalidArgumentError('p must lie in the open interval (0, 1)')
    return float(observed_from_quantiles(data.targets, preds.quantiles([p]))[0])

def calibration_curve(preds, data, grid=None):
    '''
    Observed proportion at every level of `grid`.

    Parameters
    ----------
    preds : uqkit.core.PredictionSet
        Predictions.
    data : uqkit.core.EvalDataset
        Targets.
    grid : uqkit.core.ProbGrid, optional
        Expected probabilities. The default is None, meaning
        `ProbGrid.default()`.

    Returns
    -------
    CalibrationCurve

    '''
    validate_nonempty(preds, data)
    grid = _grid(grid)
    observed = observed_from_quantiles(data.targets, preds.quantiles(grid.probs))
    return CalibrationCurve(grid, observed)

def ece(preds, data, grid=None):
    '''
    Expected calibration error: the mean absolute deviation between observed
    and expected probabilities over the grid.

    Parameters
    ----------
    preds : uqkit.core.PredictionSet
        Predictions.
    data : uqkit.core.EvalDataset
        Targets.
    grid : uqkit.core.ProbGrid, optional
        The default is None, meaning `ProbGrid.default()`.

    Returns
    -------
    float
        A value in [0, 1).

    Examples
    --------

    Quantiles above every target give an observed proportion of 1 everywhere:

    ```python
    >>> import uqkit as uq
    >>> preds = uq.PredictionSet([0, 0], [1, 1])
    >>> data = uq.EvalDataset([-100, -100])
    >>> round(uq.ece(preds, data), 12)
    0.5

    ```

    '''
    curve = calibration_curve(preds, data, grid)
    return ece_from_observed(curve.expected.probs, curve.observed)

def miscalibration_area(curve):
    '''
    Area between the piecewise-linear calibration curve and the diagonal,
    over the range of the grid.  Segments where the curve crosses the diagonal
    are split at the crossing.

    Parameters
    ----------
    curve : CalibrationCurve

    Returns
    -------
    float

    '''
    x = curve.expected.probs
    d = curve.observed - x
    if x.size < 2:
        return 0.0
    h = np.diff(x)
    d0, d1 = np.abs(d[:-1]), np.abs(d[1:])
    same_side = d[:-1] * d[1:] >= 0
    total = d0 + d1
    crossing = np.divide(d0**2 + d1**2, 2 * total,
                         out=np.zeros_like(total), where=total > 0)
    area = np.where(same_side, (d0 + d1) / 2, crossing) * h
    return float(area.sum())

def group_ece(preds, data, groups, grid=None):
    '''
    ECE restricted to each prescribed group, in group order.

    Parameters
    ----------
    preds : uqkit.core.PredictionSet
        Predictions.
    data : uqkit.core.EvalDataset
        Targets.
    groups : GroupSpec
        Groups of indices into `data`.
    grid : uqkit.core.ProbGrid, optional
        The default is None, meaning `ProbGrid.default()`.

    Raises
    ------
    EmptyInputError
        A group is empty (the message names it).
    ValidationError
        A group holds an invalid index.

    Returns
    -------
    list of float

    '''
    validate_nonempty(preds, data)
    groups.check(len(data))
    return [ece(preds.take(g), data.take(g), grid) for g in groups]

def _group_fractions(n_sizes):
    if n_sizes == 1:
        return np.array([1.0])
    return np.linspace(0.01, 1.0, n_sizes)

def _check_fractions(fractions):
    fractions = np.asarray(fractions, dtype=float).reshape(-1)
    if fractions.size == 0 or np.any(fractions <= 0) or np.any(fractions > 1):
        raise ConfigurationError('group fractions must lie in (0, 1]; a '
                                 'non-positive fraction gives an empty group')
    if np.any(np.diff(fractions) <= 0) or fractions[-1] != 1.0:
        raise ConfigurationError('group fractions must increase strictly '
                                 'and end at 1.0')
    return fractions

def _mean_and_stderr(values):
    if np.all(values == values[0]):
        return float(values[0]), 0.0
    return float(np.mean(values)), standard_error(values)

def adversarial_group_calibration(preds, data, grid=None, n_sizes=ADV_N_SIZES,
                                  n_draws=ADV_N_DRAWS, rng=None, fractions=None):
    '''
    Sampled proxy for adversarial group calibration.

    Group sizes scale from 1% to 100% of the dataset (`n_sizes` equi-spaced
    fractions; sizes are rounded to the nearest integer, at least 1).  For each
    size, `n_draws` uniformly random groups are drawn and the worst ECE among
    them is recorded.  The whole worst-of-`n_draws` procedure is repeated
    `n_draws` times; the curve reports the mean and standard error of those
    replicate maxima.

    Each replicate draws from its own generator spawned from `rng`, and each
    draw uses one random permutation whose prefixes are the groups for all
    sizes (each prefix is a uniform subset of its size).

    Parameters
    ----------
    preds : uqkit.core.PredictionSet
        Predictions.
    data : uqkit.core.EvalDataset
        Targets.
    grid : uqkit.core.ProbGrid, optional
        The default is None, meaning `ProbGrid.default()`.
    n_sizes : int, optional
        Number of group sizes. The default is 10.
    n_draws : int, optional
        Groups per size, and replicates per size. The default is 20.
    rng : int, numpy.random.Generator or None, optional
        Seed or generator. The default is None.
    fractions : array like, optional
        Explicit group fractions, overriding `n_sizes`.  Must increase
        strictly and end at 1.0.

    Raises
    ------
    ConfigurationError
        `n_sizes` or `n_draws` below 1, or a fraction outside (0, 1].

    Returns
    -------
    AdvGroupCurve

    '''
    validate_nonempty(preds, data)
    if n_sizes < 1 or n_draws < 1:
        raise ConfigurationError('n_sizes and n_draws must be at least 1')
    grid = _grid(grid)
    if fractions is None:
        fractions = _group_fractions(n_sizes)
    fractions = _check_fractions(fractions)

    n = len(data)
    sizes = np.maximum(1, np.floor(fractions * n + 0.5).astype(int))
    probs = grid.probs
    covered = _covered(preds, data, probs)

    maxima = np.empty((len(fractions), n_draws))
    for r, gen in enumerate(spawn_rngs(rng, n_draws)):
        worst = np.full(len(fractions), -np.inf)
        for _ in range(n_draws):
            counts = np.cumsum(covered[gen.permutation(n)], axis=0)
            for k, size in enumerate(sizes):
                value = ece_from_observed(probs, counts[size - 1] / size)
                worst[k] = max(worst[k], value)
        maxima[:, r] = worst

    stats = [_mean_and_stderr(row) for row in maxima]
    return AdvGroupCurve(group_fractions=fractions,
                         mean_worst_ece=np.array([s[0] for s in stats]),
                         stderr=np.array([s[1] for s in stats]))
