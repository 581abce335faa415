#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
The data model shared by all of uqkit: per-point Gaussian predictions
(`PredictionSet`), targets with their inputs (`EvalDataset`), the grid of
expected probabilities (`ProbGrid`), plus the normal CDF and quantile
function.

Expectations over the input distribution are always empirical means over an
`EvalDataset`; there is no separate representation of the input distribution.
"""

__all__ = ['PredictionSet', 'EvalDataset', 'ProbGrid', 'gaussian_cdf',
           'gaussian_quantile', 'validate']

import numpy as np
from scipy import special

from uqkit.errors import (EmptyInputError, InvalidArgumentError, ShapeError,
                          ValidationError)
from uqkit.resources import GRID_STEP, MIN_GRID_STEP, SPLITS

def _frozen(values, ndim=1):
    '''Return a read-only float copy of `values`.'''
    arr = np.array(values, dtype=float)
    if ndim == 1:
        arr = arr.reshape(-1)
    arr.setflags(write=False)
    return arr

def _scalar_or_array(arr):
    return float(arr) if np.ndim(arr) == 0 else arr

def gaussian_cdf(mu, sigma, y):
    '''
    CDF of N(mu, sigma**2) evaluated at `y`.  Broadcasts over arrays.

    Parameters
    ----------
    mu : number or array
        Mean.
    sigma : number or array
        Standard deviation, strictly positive.
    y : number or array
        Evaluation point(s).

    Raises
    ------
    InvalidArgumentError
        Non-finite input, or `sigma <= 0`.

    Returns
    -------
    float or numpy.ndarray
        Probabilities in [0, 1].

    Examples
    --------

    ```python
    >>> from uqkit import gaussian_cdf
    >>> gaussian_cdf(0, 1, 0)
    0.5
    >>> round(gaussian_cdf(0, 1, 1.959964), 6)
    0.975

    ```

    '''
    mu, sigma, y = (np.asarray(a, dtype=float) for a in (mu, sigma, y))
    if not (np.all(np.isfinite(mu)) and np.all(np.isfinite(sigma))
            and np.all(np.isfinite(y))):
        raise InvalidArgumentError('gaussian_cdf arguments must be finite')
    if np.any(sigma <= 0):
        raise InvalidArgumentError('sigma must be strictly positive')
    return _scalar_or_array(special.ndtr((y - mu) / sigma))

def gaussian_quantile(mu, sigma, p):
    '''
    Quantile function of N(mu, sigma**2): `mu + sigma * ndtri(p)`.

    Parameters
    ----------
    mu : number or array
        Mean.
    sigma : number or array
        Standard deviation, strictly positive.
    p : number or array
        Probability level(s) in the open interval (0, 1).

    Raises
    ------
    InvalidArgumentError
        `p` outside (0, 1), non-finite input, or `sigma <= 0`.

    Returns
    -------
    float or numpy.ndarray

    Examples
    --------

    ```python
    >>> from uqkit import gaussian_quantile
    >>> gaussian_quantile(2, 3, 0.5)
    2.0

    ```

    '''
    mu, sigma, p = (np.asarray(a, dtype=float) for a in (mu, sigma, p))
    if not np.all((p > 0) & (p < 1)):
        raise InvalidArgumentError('p must lie in the open interval (0, 1)')
    if not (np.all(np.isfinite(mu)) and np.all(np.isfinite(sigma))):
        raise InvalidArgumentError('gaussian_quantile arguments must be finite')
    if np.any(sigma <= 0):
        raise InvalidArgumentError('sigma must be strictly positive')
    return _scalar_or_array(mu + sigma * special.ndtri(p))

class ProbGrid:
    '''
    Strictly increasing expected probabilities in (0, 1) over which calibration
    and the quantile-based scores are aggregated.

    Parameters
    ----------
    probs : array like
        The levels.

    Raises
    ------
    InvalidArgumentError
        Levels are empty, not strictly increasing, or not inside (0, 1).

    Examples
    --------

    ```python
    >>> import uqkit as uq
    >>> grid = uq.ProbGrid.default()
    >>> len(grid), grid.probs[0], grid.probs[-1]
    (99, 0.01, 0.99)

    ```
    '''
    __slots__ = ('probs',)

    def __init__(self, probs):
        probs = _frozen(probs)
        if probs.size == 0:
            raise InvalidArgumentError('ProbGrid needs at least one level')
        if not (probs[0] > 0 and probs[-1] < 1):
            raise InvalidArgumentError('ProbGrid levels must lie in (0, 1)')
        if np.any(np.diff(probs) <= 0):
            raise InvalidArgumentError('ProbGrid levels must be strictly increasing')
        object.__setattr__(self, 'probs', probs)

    def __setattr__(self, *args):
        raise AttributeError("'ProbGrid' object is immutable")

    @classmethod
    def from_step(cls, step=GRID_STEP):
        '''Levels `step, 2*step, ...` strictly below 1.  Values are rounded to
        12 decimals so that e.g. 0.1 on a 0.01 grid is exactly 0.1.  Steps below
        `MIN_GRID_STEP` (1e-4) are rejected.'''
        if not MIN_GRID_STEP <= step < 1:
            raise InvalidArgumentError(f'grid step must lie in [{MIN_GRID_STEP:g}, 1), '
                                       f'got {step:g}')
        n = int(np.ceil(round(1 / step, 9))) - 1
        probs = np.round(np.arange(1, n + 1) * step, 12)
        return cls(probs[probs < 1])

    @classmethod
    def default(cls):
        '''The 99 levels 0.01, 0.02, ..., 0.99.'''
        return cls.from_step(GRID_STEP)

    def __len__(self):
        return len(self.probs)

    def __iter__(self):
        return iter(self.probs.tolist())

    def __eq__(self, other):
        return isinstance(other, ProbGrid) and np.array_equal(self.probs, other.probs)

    def __repr__(self):
        return (f'ProbGrid(n={len(self)}, first={self.probs[0]:g}, '
                f'last={self.probs[-1]:g})')

class PredictionSet:
    '''
    Per-point Gaussian predictive distributions.

    Invariants (finite means, finite strictly positive standard deviations,
    equal lengths) are checked by `validate`, the entry gate of every metric.

    Parameters
    ----------
    means : array like
        Predicted means, in units of the target.
    stddevs : array like
        Predicted standard deviations, in units of the target.

    Examples
    --------

    ```python
    >>> import uqkit as uq
    >>> preds = uq.PredictionSet(means=[0, 1], stddevs=[1, 2])
    >>> preds.quantiles([0.5]).ravel().tolist()
    [0.0, 1.0]

    ```
    '''

    def __init__(self, means, stddevs):
        self.means = _frozen(means)
        self.stddevs = _frozen(stddevs)

    def __len__(self):
        return len(self.means)

    def __repr__(self):
        return f'{self.__class__.__name__}(n={len(self)})'

    def take(self, indices):
        '''Return the predictions at `indices` as a new PredictionSet.'''
        indices = np.asarray(indices, dtype=int)
        return PredictionSet(self.means[indices], self.stddevs[indices])

    def quantiles(self, levels):
        '''
        Predicted quantiles at each level for each point.

        Parameters
        ----------
        levels : array like
            Probability levels in (0, 1).

        Returns
        -------
        numpy.ndarray
            Array of shape `(len(self), len(levels))`.

        '''
        levels = np.asarray(levels, dtype=float).reshape(-1)
        if not np.all((levels > 0) & (levels < 1)):
            raise InvalidArgumentError('quantile levels must lie in (0, 1)')
        z = special.ndtri(levels)
        return self.means[:, None] + self.stddevs[:, None] * z[None, :]

    def cdf(self, y):
        '''Predicted CDF of each point evaluated at the matching entry of `y`.'''
        y = np.asarray(y, dtype=float).reshape(-1)
        return special.ndtr((y - self.means) / self.stddevs)

class EvalDataset:
    '''
    Paired inputs and scalar targets belonging to one named split.

    Parameters
    ----------
    targets : array like
        Scalar targets, in units of y.
    inputs : array like, optional
        Input vectors, shape `(n, k)`.  A 1-D array is read as one feature.
        The default is None, meaning no recorded inputs (`k = 0`).
    split : str, optional
        One of 'train', 'validation', 'test' or 'recalibration'.
        The default is 'test'.

    Raises
    ------
    ValidationError
        Unknown split label.
    ShapeError
        Inputs and targets differ in length.
    '''

    def __init__(self, targets, inputs=None, split='test'):
        if split not in SPLITS:
            raise ValidationError(f'split must be one of {SPLITS}, not "{split}"')
        self.targets = _frozen(targets)
        if inputs is None:
            inputs = np.empty((len(self.targets), 0))
        inputs = np.array(inputs, dtype=float)
        if inputs.ndim == 1:
            inputs = inputs[:, None]
        if inputs.shape[0] != len(self.targets):
            raise ShapeError(f'{inputs.shape[0]} inputs for '
                             f'{len(self.targets)} targets')
        inputs.setflags(write=False)
        self.inputs = inputs
        self.split = split

    def __len__(self):
        return len(self.targets)

    def __repr__(self):
        return (f'EvalDataset(n={len(self)}, features={self.inputs.shape[1]}, '
                f'split={self.split!r})')

    def take(self, indices):
        '''Return the points at `indices` as a new EvalDataset (same split).'''
        indices = np.asarray(indices, dtype=int)
        return EvalDataset(self.targets[indices], self.inputs[indices],
                           split=self.split)

def _first_bad(mask):
    return int(np.flatnonzero(mask)[0])

def validate(preds, data):
    '''
    Check a prediction set against a dataset; the single entry gate for all
    metric operations.

    Parameters
    ----------
    preds : PredictionSet
        Predictions.
    data : EvalDataset
        Targets.

    Raises
    ------
    ShapeError
        Lengths differ.
    ValidationError
        An invariant is violated; the message and the `index` attribute name
        the first offending point.

    Returns
    -------
    tuple
        `(preds, data)`, unchanged.

    '''
    if len(preds.means) != len(preds.stddevs):
        raise ShapeError(f'{len(preds.means)} means but '
                         f'{len(preds.stddevs)} standard deviations')
    if len(preds) != len(data):
        raise ShapeError(f'{len(preds)} predictions for {len(data)} targets')

    bad = ~np.isfinite(preds.means)
    if bad.any():
        i = _first_bad(bad)
        raise ValidationError(f'non-finite predicted mean at index {i}', index=i)
    bad = ~(np.isfinite(preds.stddevs) & (preds.stddevs > 0))
    if bad.any():
        i = _first_bad(bad)
        raise ValidationError('predicted standard deviation must be finite and '
                              f'positive, got {preds.stddevs[i]} at index {i}',
                              index=i)
    bad = ~np.isfinite(data.targets)
    if bad.any():
        i = _first_bad(bad)
        raise ValidationError(f'non-finite target at index {i}', index=i)
    bad = ~np.all(np.isfinite(data.inputs), axis=1)
    if bad.any():
        i = _first_bad(bad)
        raise ValidationError(f'non-finite input at index {i}', index=i)
    return preds, data

def validate_nonempty(preds, data):
    '''`validate`, additionally refusing an empty pair.'''
    validate(preds, data)
    if len(data) == 0:
        raise EmptyInputError('metrics need at least one point')
    return preds, data
