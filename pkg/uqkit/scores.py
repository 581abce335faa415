#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Accuracy metrics, sharpness and proper scoring rules for Gaussian predictions.

Every scoring rule is available as a per-point kernel on arrays
(`gaussian_nll`, `gaussian_crps`, `pinball_loss`, `interval_loss`) and as a
dataset mean on a `uqkit.core.PredictionSet` / `uqkit.core.EvalDataset` pair.
Scores are reported in their negative orientation: lower is better.

.. include:: ../docs/metrics.md

"""

__all__ = ['MetricReport', 'gaussian_nll', 'gaussian_crps', 'pinball_loss',
           'interval_loss', 'rmse', 'mae', 'sharpness', 'nll', 'crps',
           'check_score', 'interval_score', 'metric_report']

from dataclasses import dataclass, field

import numpy as np
from scipy import special

from uqkit.calib import (AdvGroupCurve, CalibrationCurve,
                         adversarial_group_calibration, calibration_curve,
                         ece_from_observed, miscalibration_area)
from uqkit.core import ProbGrid, validate_nonempty
from uqkit.errors import EmptyInputError, ValidationError

_HALF_LOG_2PI = 0.5 * np.log(2 * np.pi)
_INV_SQRT_PI = 1 / np.sqrt(np.pi)

@dataclass
class MetricReport:
    '''
    The scalar metric bundle for one set of predictions on one dataset, plus
    the calibration curve and (optionally) the adversarial group curve.

    When the report describes recalibrated predictions, `recalibrated` is True
    and `pre_recalibration` names the fields carried over unchanged from the
    original Gaussian predictions.
    '''
    rmse: float
    mae: float
    ece: float
    sharpness: float
    nll: float
    crps: float
    check: float
    interval: float
    miscalibration_area: float
    calibration_curve: CalibrationCurve
    adv_group_curve: AdvGroupCurve = None
    recalibrated: bool = False
    pre_recalibration: tuple = field(default_factory=tuple)

    SCALARS = ('rmse', 'mae', 'ece', 'sharpness', 'nll', 'crps', 'check',
               'interval', 'miscalibration_area')

    def scalars(self):
        '''Return the scalar metrics as a dict.'''
        return {k: float(getattr(self, k)) for k in self.SCALARS}

    def to_dict(self):
        '''JSON-ready dict (the body of a report file).'''
        d = self.scalars()
        d['calibration'] = {'expected': self.calibration_curve.expected.probs.tolist(),
                            'observed': self.calibration_curve.observed.tolist()}
        if self.adv_group_curve is not None:
            d['adv_group'] = self.adv_group_curve.to_dict()
        d['recalibrated'] = self.recalibrated
        d['pre_recalibration'] = list(self.pre_recalibration)
        return d

    @classmethod
    def from_dict(cls, d):
        '''Rebuild a report from `to_dict` output.'''
        curve = CalibrationCurve(ProbGrid(d['calibration']['expected']),
                                 d['calibration']['observed'])
        adv = d.get('adv_group')
        return cls(**{k: d[k] for k in cls.SCALARS},
                   calibration_curve=curve,
                   adv_group_curve=None if adv is None else AdvGroupCurve.from_dict(adv),
                   recalibrated=d.get('recalibrated', False),
                   pre_recalibration=tuple(d.get('pre_recalibration', ())))

def gaussian_nll(mu, sigma, y):
    '''Negative log density of N(mu, sigma**2) at y, elementwise.'''
    z = (np.asarray(y) - mu) / sigma
    return _HALF_LOG_2PI + np.log(sigma) + 0.5 * z**2

def gaussian_crps(mu, sigma, y):
    '''Closed-form CRPS of N(mu, sigma**2) at y, elementwise.'''
    z = (np.asarray(y) - mu) / sigma
    pdf = np.exp(-0.5 * z**2) / np.sqrt(2 * np.pi)
    return sigma * (z * (2 * special.ndtr(z) - 1) + 2 * pdf - _INV_SQRT_PI)

def pinball_loss(y, q, p):
    '''
    Check (pinball) loss of quantile `q` at level `p`, elementwise:
    `p * u` if `u >= 0` else `(p - 1) * u`, with `u = y - q`.
    '''
    u = np.asarray(y) - q
    return np.where(u >= 0, p * u, (p - 1) * u)

def interval_loss(y, lower, upper, alpha):
    '''
    Interval score of the central interval `[lower, upper]` with nominal
    miscoverage `alpha`, elementwise: the width plus `2/alpha` times the
    distance by which `y` falls outside.
    '''
    y = np.asarray(y)
    below = np.where(y < lower, lower - y, 0.0)
    above = np.where(y > upper, y - upper, 0.0)
    return (upper - lower) + (2 / alpha) * (below + above)

def _grid(grid):
    return ProbGrid.default() if grid is None else grid

def rmse(preds, data):
    '''Root mean squared error of the predicted means.'''
    validate_nonempty(preds, data)
    return float(np.sqrt(np.mean((data.targets - preds.means)**2)))

def mae(preds, data):
    '''Mean absolute error of the predicted means.'''
    validate_nonempty(preds, data)
    return float(np.mean(np.abs(data.targets - preds.means)))

def sharpness(preds):
    '''
    Sharpness: the root mean square of the predicted standard deviations.
    A property of the predictions only.

    Parameters
    ----------
    preds : uqkit.core.PredictionSet

    Raises
    ------
    EmptyInputError
        No predictions.
    ValidationError
        A standard deviation is not finite and positive.

    Returns
    -------
    float

    '''
    stddevs = preds.stddevs
    if stddevs.size == 0:
        raise EmptyInputError('sharpness needs at least one prediction')
    if not np.all(np.isfinite(stddevs) & (stddevs > 0)):
        raise ValidationError('predicted standard deviations must be finite '
                              'and positive')
    return float(np.sqrt(np.mean(stddevs**2)))

def nll(preds, data):
    '''Mean negative log-likelihood of the targets.'''
    validate_nonempty(preds, data)
    return float(np.mean(gaussian_nll(preds.means, preds.stddevs, data.targets)))

def crps(preds, data):
    '''Mean closed-form Gaussian CRPS.'''
    validate_nonempty(preds, data)
    return float(np.mean(gaussian_crps(preds.means, preds.stddevs, data.targets)))

def check_score(preds, data, grid=None):
    '''
    Mean check (pinball) score over all points and grid levels.

    Parameters
    ----------
    preds : uqkit.core.PredictionSet
        Predictions; any object with a `quantiles(levels)` method works.
    data : uqkit.core.EvalDataset
        Targets.
    grid : uqkit.core.ProbGrid, optional
        Quantile levels. The default is None, meaning `ProbGrid.default()`.

    Returns
    -------
    float

    '''
    validate_nonempty(preds, data)
    probs = _grid(grid).probs
    q = preds.quantiles(probs)
    return float(np.mean(pinball_loss(data.targets[:, None], q, probs[None, :])))

def interval_score(preds, data, grid=None):
    '''
    Mean interval score over all points and grid levels.  A grid value `p`
    is the central coverage of the interval: `alpha = 1 - p`, with endpoints
    at the `alpha/2` and `1 - alpha/2` quantiles.

    Parameters
    ----------
    preds : uqkit.core.PredictionSet
        Predictions; any object with a `quantiles(levels)` method works.
    data : uqkit.core.EvalDataset
        Targets.
    grid : uqkit.core.ProbGrid, optional
        Coverage levels. The default is None, meaning `ProbGrid.default()`.

    Returns
    -------
    float

    '''
    validate_nonempty(preds, data)
    alpha = 1 - _grid(grid).probs
    lower = preds.quantiles(alpha / 2)
    upper = preds.quantiles(1 - alpha / 2)
    scores = interval_loss(data.targets[:, None], lower, upper, alpha[None, :])
    return float(np.mean(scores))

def metric_report(preds, data, grid=None, adv=None, rng=None):
    '''
    Compute every metric for one prediction set.

    Parameters
    ----------
    preds : uqkit.core.PredictionSet
        Predictions.
    data : uqkit.core.EvalDataset
        Targets.
    grid : uqkit.core.ProbGrid, optional
        Levels for calibration and the quantile scores. The default is None,
        meaning `ProbGrid.default()`.
    adv : uqkit.calib.AdvGroupConfig, optional
        When given, the adversarial group curve is computed too.
        The default is None.
    rng : int or numpy.random.Generator, optional
        Random source for the adversarial groups; overrides `adv.seed`.

    Returns
    -------
    MetricReport

    Examples
    --------

    ```python
    >>> import uqkit as uq
    >>> data = uq.EvalDataset([0.0, 1.0])
    >>> preds = uq.PredictionSet([0.0, 1.0], [1e-9, 1e-9])
    >>> report = uq.metric_report(preds, data)
    >>> report.rmse, report.mae
    (0.0, 0.0)

    ```

    '''
    validate_nonempty(preds, data)
    grid = _grid(grid)
    curve = calibration_curve(preds, data, grid)
    adv_curve = None
    if adv is not None:
        adv_curve = adversarial_group_calibration(
            preds, data, grid, n_sizes=adv.n_sizes, n_draws=adv.n_draws,
            rng=adv.seed if rng is None else rng)
    return MetricReport(rmse=rmse(preds, data),
                        mae=mae(preds, data),
                        ece=ece_from_observed(grid.probs, curve.observed),
                        sharpness=sharpness(preds),
                        nll=nll(preds, data),
                        crps=crps(preds, data),
                        check=check_score(preds, data, grid),
                        interval=interval_score(preds, data, grid),
                        miscalibration_area=miscalibration_area(curve),
                        calibration_curve=curve,
                        adv_group_curve=adv_curve)
