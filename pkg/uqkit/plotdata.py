#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Plot data for the figure families of uqkit, stored as one comma-separated file
per series so figures can be re-rendered without recomputing anything.

Families and their columns:

- `confidence_band`: x, mean, lo, hi, y (sorted by x)
- `ordered_intervals`: index, y, mean, lo, hi (sorted by observed y)
- `calibration`: expected, observed, diagonal
- `training_curves`: epoch, ece, sharpness, gt_sharpness, best_epoch (0/1 marker)
- `adversarial_group`: fraction, mean_worst_ece, lo, hi (mean +/- 1 standard error)
"""

__all__ = ['FAMILIES', 'PlotBundle', 'build_plot_bundle', 'write_plot_data',
           'read_plot_data']

import json
import logging
import os

import numpy as np
import pandas as pd

from uqkit.calib import calibration_curve
from uqkit.core import ProbGrid, validate_nonempty
from uqkit.errors import UQKitError, ValidationError
from uqkit.resources import BAND_MULTIPLE, INTERVAL_COVERAGE

logger = logging.getLogger(__name__)

FAMILIES = {'confidence_band': ('x', 'mean', 'lo', 'hi', 'y'),
            'ordered_intervals': ('index', 'y', 'mean', 'lo', 'hi'),
            'calibration': ('expected', 'observed', 'diagonal'),
            'training_curves': ('epoch', 'ece', 'sharpness', 'gt_sharpness',
                                'best_epoch'),
            'adversarial_group': ('fraction', 'mean_worst_ece', 'lo', 'hi')}

MANIFEST = 'manifest.json'
FLOAT_FORMAT = '%.17g'

class PlotBundle:
    '''
    The plot series of one prediction set, keyed by family name.

    Parameters
    ----------
    series : dict of pandas.DataFrame
        Family name to data frame with the family's columns, in order.

    Raises
    ------
    ValidationError
        Unknown family, wrong columns, or an unsorted x-sorted series.
    '''

    def __init__(self, series):
        for name, frame in series.items():
            if name not in FAMILIES:
                raise ValidationError(f'unknown plot family "{name}"')
            if tuple(frame.columns) != FAMILIES[name]:
                raise ValidationError(f'{name} columns must be {FAMILIES[name]}, '
                                      f'not {tuple(frame.columns)}')
        for name, col in (('confidence_band', 'x'), ('ordered_intervals', 'y')):
            if name in series and not series[name][col].is_monotonic_increasing:
                raise ValidationError(f'{name} must be sorted by {col}')
        self.series = {k: series[k] for k in FAMILIES if k in series}

    def __getitem__(self, name):
        return self.series[name]

    def __contains__(self, name):
        return name in self.series

    def __repr__(self):
        return f'PlotBundle(families={list(self.series)})'

    def __eq__(self, other):
        return (isinstance(other, PlotBundle)
                and list(self.series) == list(other.series)
                and all(self.series[k].equals(other.series[k]) for k in self.series))

def _band(preds, data, multiple):
    if data.inputs.shape[1] > 0:
        x = data.inputs[:, 0]
    else:
        x = np.arange(len(data), dtype=float)
    order = np.argsort(x, kind='stable')
    half = multiple * preds.stddevs[order]
    mean = preds.means[order]
    return pd.DataFrame({'x': x[order], 'mean': mean, 'lo': mean - half,
                         'hi': mean + half, 'y': data.targets[order]})

def _ordered(preds, data, coverage):
    order = np.argsort(data.targets, kind='stable')
    alpha = 1 - coverage
    q = preds.quantiles([alpha / 2, 1 - alpha / 2])[order]
    return pd.DataFrame({'index': np.arange(len(data), dtype=float),
                         'y': data.targets[order], 'mean': preds.means[order],
                         'lo': q[:, 0], 'hi': q[:, 1]})

def _calibration(curve):
    expected = curve.expected.probs
    return pd.DataFrame({'expected': expected, 'observed': curve.observed,
                         'diagonal': expected})

def _training(curves):
    epochs = np.arange(len(curves), dtype=float)
    marker = np.zeros(len(curves))
    if curves.best_epoch is not None:
        marker[curves.best_epoch] = 1.0
    return pd.DataFrame({'epoch': epochs, 'ece': curves.test_ece,
                         'sharpness': curves.test_sharpness,
                         'gt_sharpness': np.full(len(curves), curves.gt_sharpness),
                         'best_epoch': marker})

def _adversarial(adv):
    mean = adv.mean_worst_ece
    return pd.DataFrame({'fraction': adv.group_fractions, 'mean_worst_ece': mean,
                         'lo': mean - adv.stderr, 'hi': mean + adv.stderr})

def build_plot_bundle(preds, data, curves=None, adv=None, grid=None,
                      band_multiple=BAND_MULTIPLE,
                      interval_coverage=INTERVAL_COVERAGE):
    '''
    Assemble every plot series available for one prediction set.

    Parameters
    ----------
    preds : uqkit.core.PredictionSet
        Predictions.
    data : uqkit.core.EvalDataset
        Targets; the band x axis is the first input feature (or the point
        index when there are no inputs).
    curves : uqkit.pnn.TrainingCurves, optional
        Training curves; omitted when None.
    adv : uqkit.calib.AdvGroupCurve, optional
        Adversarial group curve; omitted when None.
    grid : uqkit.core.ProbGrid, optional
        Levels of the calibration series. The default is None, meaning
        `ProbGrid.default()`.
    band_multiple : float, optional
        Half-width of the confidence band in standard deviations.
        The default is 2.
    interval_coverage : float, optional
        Central coverage of the ordered prediction intervals.
        The default is 0.95.

    Returns
    -------
    PlotBundle

    '''
    validate_nonempty(preds, data)
    grid = ProbGrid.default() if grid is None else grid
    series = {'confidence_band': _band(preds, data, band_multiple),
              'ordered_intervals': _ordered(preds, data, interval_coverage),
              'calibration': _calibration(calibration_curve(preds, data, grid))}
    if curves is not None and len(curves) > 0:
        series['training_curves'] = _training(curves)
    if adv is not None:
        series['adversarial_group'] = _adversarial(adv)
    return PlotBundle(series)

def write_plot_data(bundle, directory):
    '''
    Write one `<family>.csv` per series and a `manifest.json` listing the
    written and the omitted families.

    Parameters
    ----------
    bundle : PlotBundle
    directory : str or path
        Created if missing.

    Raises
    ------
    UQKitError
        The files cannot be written (the message names the path).

    Returns
    -------
    list of str
        Paths of the written files, manifest last.

    '''
    written = []
    try:
        os.makedirs(directory, exist_ok=True)
        for name, frame in bundle.series.items():
            path = os.path.join(directory, name + '.csv')
            frame.to_csv(path, index=False, float_format=FLOAT_FORMAT,
                         lineterminator='\n')
            written.append(path)
            logger.debug('wrote %s', path)
        manifest = {'written': [n + '.csv' for n in bundle.series],
                    'omitted': [n for n in FAMILIES if n not in bundle.series]}
        path = os.path.join(directory, MANIFEST)
        with open(path, 'w', encoding='utf-8') as f:
            json.dump(manifest, f, indent=2, sort_keys=True)
            f.write('\n')
        written.append(path)
    except OSError as e:
        raise UQKitError(f'cannot write plot data to "{e.filename or directory}": '
                         f'{e.strerror}') from e
    return written

def read_plot_data(directory):
    '''
    Read a directory written by `write_plot_data`.

    Raises
    ------
    UQKitError
        The manifest or a listed series file is missing (the message names
        the file).

    Returns
    -------
    PlotBundle

    '''
    path = os.path.join(directory, MANIFEST)
    if not os.path.exists(path):
        raise UQKitError(f'missing plot-data manifest "{path}"')
    with open(path, encoding='utf-8') as f:
        manifest = json.load(f)
    series = {}
    for filename in manifest['written']:
        path = os.path.join(directory, filename)
        if not os.path.exists(path):
            raise UQKitError(f'missing plot-data file "{path}"')
        frame = pd.read_csv(path, dtype=float, float_precision='round_trip')
        series[os.path.splitext(filename)[0]] = frame
    return PlotBundle(series)
