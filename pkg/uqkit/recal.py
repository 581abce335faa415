#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Recalibration of Gaussian predictions for average calibration.

An isotonic regression of observed on expected probabilities gives a monotone
map `g` on [0, 1]; the recalibrated CDF of a point is `g(F(y))` and its
recalibrated `p`-quantile is the original quantile at `g^-1(p)`.  Because the
composition is generally not Gaussian, recalibrated predictions are handled as
quantile tables.
"""

__all__ = ['RecalibrationMap', 'RecalibratedPredictionSet',
           'RecalibrationResult', 'fit_isotonic', 'apply_map',
           'recalibrate_quantiles', 'recalibration_pipeline']

from dataclasses import dataclass
import warnings

import numpy as np
from sklearn.isotonic import IsotonicRegression

from uqkit.calib import calibration_curve
from uqkit.core import PredictionSet, ProbGrid, validate, validate_nonempty
from uqkit.errors import InvalidArgumentError, UQKitWarning, ValidationError
from uqkit.scores import metric_report

class RecalibrationMap:
    '''
    Monotone nondecreasing piecewise-linear map on [0, 1], given by its
    knots.  Outside the knot range it is clamped.

    Parameters
    ----------
    knots_x : array like
        Strictly increasing expected probabilities.
    knots_y : array like
        Nondecreasing mapped probabilities, same length (at least 2).

    Raises
    ------
    InvalidArgumentError
        The knots violate the invariants.

    Examples
    --------

    ```python
    >>> import uqkit as uq
    >>> g = uq.RecalibrationMap([0, 0.5, 1], [0, 0.25, 1])
    >>> g(0.5), g.inverse(0.25)
    (0.25, 0.5)

    ```
    '''

    def __init__(self, knots_x, knots_y):
        x = np.array(knots_x, dtype=float).reshape(-1)
        y = np.array(knots_y, dtype=float).reshape(-1)
        if x.size != y.size or x.size < 2:
            raise InvalidArgumentError('knots_x and knots_y need equal lengths >= 2')
        if np.any(np.diff(x) <= 0):
            raise InvalidArgumentError('knots_x must be strictly increasing')
        if np.any(np.diff(y) < 0):
            raise InvalidArgumentError('knots_y must be nondecreasing')
        if np.any((x < 0) | (x > 1) | (y < 0) | (y > 1)):
            raise InvalidArgumentError('knots must lie in [0, 1]')
        x.setflags(write=False)
        y.setflags(write=False)
        self.knots_x = x
        self.knots_y = y

    def __repr__(self):
        return f'RecalibrationMap(knots={len(self.knots_x)})'

    def __eq__(self, other):
        return (isinstance(other, RecalibrationMap)
                and np.array_equal(self.knots_x, other.knots_x)
                and np.array_equal(self.knots_y, other.knots_y))

    def __call__(self, p):
        return apply_map(self, p)

    @classmethod
    def identity(cls):
        '''The map `g(p) = p`.'''
        return cls([0.0, 1.0], [0.0, 1.0])

    @property
    def fitted(self):
        '''Knot values without the boundary knots at 0 and 1.'''
        return self.knots_y[1:-1]

    def inverse(self, p):
        '''
        Generalized inverse `inf{u : g(u) >= p}`, elementwise.

        Flat segments of the map invert to their left end, so recalibrated
        quantiles are left-continuous in `p`.

        Parameters
        ----------
        p : number or array
            Probabilities in [0, 1].

        Returns
        -------
        float or numpy.ndarray

        '''
        p = np.asarray(p, dtype=float)
        if np.any((p < 0) | (p > 1)):
            raise InvalidArgumentError('p must lie in [0, 1]')
        scalar = p.ndim == 0
        p = np.atleast_1d(p)
        x, y = self.knots_x, self.knots_y
        j = np.searchsorted(y, p, side='left')
        out = np.full(p.shape, x[0])
        inner = (j > 0) & (j < len(y))
        jj = j[inner]
        x0, x1, y0, y1 = x[jj - 1], x[jj], y[jj - 1], y[jj]
        out[inner] = x0 + (p[inner] - y0) / (y1 - y0) * (x1 - x0)
        out[j >= len(y)] = x[-1]
        return float(out[0]) if scalar else out

    def to_dict(self):
        '''JSON form: `{"knots_x": [...], "knots_y": [...]}`.'''
        return {'knots_x': self.knots_x.tolist(), 'knots_y': self.knots_y.tolist()}

    @classmethod
    def from_dict(cls, d):
        try:
            return cls(d['knots_x'], d['knots_y'])
        except (KeyError, TypeError) as e:
            raise ValidationError(f'not a recalibration map: {e}')

def fit_isotonic(expected, observed):
    '''
    Fit a recalibration map by L2 isotonic regression (pool adjacent
    violators, equal weights) of observed on expected probabilities.
    Boundary knots (0, 0) and (1, 1) are added so the map is defined on all
    of [0, 1].

    Parameters
    ----------
    expected : array like
        Strictly increasing expected probabilities in (0, 1).
    observed : array like
        Observed proportions in [0, 1], same length.

    Raises
    ------
    InvalidArgumentError
        Fewer than two points, non-increasing `expected`, or values out of
        range.

    Returns
    -------
    RecalibrationMap

    Examples
    --------

    ```python
    >>> import uqkit as uq
    >>> g = uq.fit_isotonic([0.25, 0.75], [0.2, 0.1])
    >>> g.fitted.round(12).tolist()
    [0.15, 0.15]

    ```

    '''
    expected = np.asarray(expected, dtype=float).reshape(-1)
    observed = np.asarray(observed, dtype=float).reshape(-1)
    if expected.size != observed.size or expected.size < 2:
        raise InvalidArgumentError('expected and observed need equal lengths >= 2')
    if np.any(np.diff(expected) <= 0):
        raise InvalidArgumentError('expected probabilities must be strictly increasing')
    if np.any((expected <= 0) | (expected >= 1)):
        raise InvalidArgumentError('expected probabilities must lie in (0, 1)')
    if np.any((observed < 0) | (observed > 1)):
        raise InvalidArgumentError('observed proportions must lie in [0, 1]')

    fitted = IsotonicRegression(increasing=True).fit_transform(expected, observed)
    if np.all(fitted == fitted[0]):
        warnings.warn('isotonic fit is constant; the recalibration map is a '
                      'step at the boundaries', UQKitWarning)
    return RecalibrationMap(np.concatenate(([0.0], expected, [1.0])),
                            np.concatenate(([0.0], fitted, [1.0])))

def apply_map(recal_map, p):
    '''
    Evaluate a recalibration map by linear interpolation through its knots.

    Parameters
    ----------
    recal_map : RecalibrationMap
    p : number or array
        Probabilities in [0, 1].

    Raises
    ------
    InvalidArgumentError
        `p` outside [0, 1].

    Returns
    -------
    float or numpy.ndarray

    '''
    p = np.asarray(p, dtype=float)
    if np.any((p < 0) | (p > 1)):
        raise InvalidArgumentError('p must lie in [0, 1]')
    out = np.interp(p, recal_map.knots_x, recal_map.knots_y)
    return float(out) if out.ndim == 0 else out

class RecalibratedPredictionSet(PredictionSet):
    '''
    Gaussian predictions composed with a recalibration map.

    `quantiles` and `cdf` describe the recalibrated distributions; `means`
    and `stddevs` are those of the original Gaussians.
    '''

    def __init__(self, base, recal_map):
        super().__init__(base.means, base.stddevs)
        self.base = base
        self.recal_map = recal_map

    def take(self, indices):
        return RecalibratedPredictionSet(self.base.take(indices), self.recal_map)

    def quantiles(self, levels):
        levels = np.asarray(levels, dtype=float).reshape(-1)
        if not np.all((levels > 0) & (levels < 1)):
            raise InvalidArgumentError('quantile levels must lie in (0, 1)')
        return self.base.quantiles(self.recal_map.inverse(levels))

    def cdf(self, y):
        return apply_map(self.recal_map, self.base.cdf(y))

def recalibrate_quantiles(preds, recal_map, grid=None):
    '''
    Recalibrated quantile table: for each point and each grid level `p`, the
    original quantile at `g^-1(p)`.

    Parameters
    ----------
    preds : uqkit.core.PredictionSet
    recal_map : RecalibrationMap
    grid : uqkit.core.ProbGrid, optional
        The default is None, meaning `ProbGrid.default()`.

    Returns
    -------
    numpy.ndarray
        Shape `(len(preds), len(grid))`.

    '''
    grid = ProbGrid.default() if grid is None else grid
    return RecalibratedPredictionSet(preds, recal_map).quantiles(grid.probs)

@dataclass
class RecalibrationResult:
    '''Outputs of `recalibration_pipeline`.'''
    recal_map: RecalibrationMap
    quantiles: np.ndarray
    before: object
    after: object

_CARRIED_OVER = ('sharpness', 'nll', 'crps')

def recalibration_pipeline(preds_recal, data_recal, preds_test, data_test,
                           grid=None, recal_map=None):
    '''
    Fit a recalibration map on one split and evaluate it on another.

    Parameters
    ----------
    preds_recal, data_recal : PredictionSet, EvalDataset
        The split the map is fitted on.
    preds_test, data_test : PredictionSet, EvalDataset
        The split the map is applied to.
    grid : uqkit.core.ProbGrid, optional
        The default is None, meaning `ProbGrid.default()`.
    recal_map : RecalibrationMap, optional
        Reuse this map instead of fitting one; the recalibration split is then
        only validated.

    Returns
    -------
    RecalibrationResult
        The map, the recalibrated test quantile table, and the test
        MetricReports before and after.  In `after`, the calibration metrics
        and quantile scores come from the recalibrated quantiles, rmse and mae
        are unchanged, and sharpness/nll/crps are carried over from the
        Gaussian (listed in `after.pre_recalibration`).

    '''
    validate_nonempty(preds_recal, data_recal)
    validate(preds_test, data_test)
    grid = ProbGrid.default() if grid is None else grid
    if recal_map is None:
        curve = calibration_curve(preds_recal, data_recal, grid)
        recal_map = fit_isotonic(grid.probs, curve.observed)

    before = metric_report(preds_test, data_test, grid)
    recalibrated = RecalibratedPredictionSet(preds_test, recal_map)
    after = metric_report(recalibrated, data_test, grid)
    after.recalibrated = True
    after.pre_recalibration = _CARRIED_OVER
    return RecalibrationResult(recal_map=recal_map,
                               quantiles=recalibrated.quantiles(grid.probs),
                               before=before, after=after)
