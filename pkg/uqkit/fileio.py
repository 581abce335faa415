#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Reading and writing the files uqkit exchanges with the outside world:
prediction files, metric reports and recalibration maps.

A prediction file is comma-separated with a header row.  The columns `y`, `mu`
and `sigma` are required; optional input features are named `x0`, `x1`, ...
Column names are case-sensitive and any other column is ignored.

```
y,mu,sigma,x0
1.25,1.0,0.5,-3.2
0.40,0.1,0.3,4.7
```

Reports and maps are JSON with sorted keys and shortest round-trip floats, so
identical inputs give identical bytes.
"""

__all__ = ['read_prediction_file', 'write_prediction_file', 'dump_json',
           'make_provenance', 'write_report', 'read_report', 'save_map',
           'load_map', 'write_text']

import json
import logging
import math
import re

import numpy as np
import pandas as pd

from uqkit._version import v as VERSION
from uqkit.core import EvalDataset, PredictionSet, ProbGrid, validate
from uqkit.errors import EmptyInputError, UQKitError, ValidationError
from uqkit.recal import RecalibrationMap
from uqkit.resources import MIN_GRID_STEP
from uqkit.scores import MetricReport

logger = logging.getLogger(__name__)

REQUIRED = ('y', 'mu', 'sigma')
FLOAT_FORMAT = '%.17g'
_FEATURE = re.compile(r'x(\d+)$')
_LINE = re.compile(r'line (\d+)')

def _column(frame, name):
    out = np.empty(len(frame))
    for i, raw in enumerate(frame[name].tolist()):
        try:
            value = float(raw)
        except (TypeError, ValueError):
            raise ValidationError(f'row {i + 1}, column "{name}": malformed '
                                  f'number "{raw}"', row=i + 1, column=name) from None
        if not math.isfinite(value):
            raise ValidationError(f'row {i + 1}, column "{name}": value must be '
                                  f'finite, got {raw}', row=i + 1, column=name)
        out[i] = value
    return out

def read_prediction_file(path):
    '''
    Read a prediction file.

    Parameters
    ----------
    path : str or path
        Comma-separated file with a header row.

    Raises
    ------
    ValidationError
        A required column is missing, a row has extra fields, the file is
        not UTF-8, a cell is not a finite number, or a `sigma` is not
        positive.  `row` (1-based data row, header excluded)
        and `column` are set on the exception.
    EmptyInputError
        The file has a header but no data rows.
    UQKitError
        The file cannot be read.

    Returns
    -------
    preds : uqkit.core.PredictionSet
    data : uqkit.core.EvalDataset

    '''
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False,
                            skipinitialspace=True)
    except pd.errors.EmptyDataError:
        raise ValidationError(f'"{path}" has no header row') from None
    except pd.errors.ParserError as e:
        line = _LINE.search(str(e))
        if line is None:
            raise ValidationError(f'"{path}": {e}') from None
        row = int(line.group(1)) - 1
        raise ValidationError(f'row {row}: wrong number of fields ({str(e).strip()})',
                              row=row) from None
    except UnicodeDecodeError as e:
        raise ValidationError(f'"{path}" is not UTF-8 text: {e.reason} at byte '
                              f'{e.start}') from None
    except OSError as e:
        raise UQKitError(f'cannot read "{path}": {e.strerror}') from e

    for name in REQUIRED:
        if name not in frame.columns:
            raise ValidationError(f'"{path}" is missing the column "{name}"',
                                  column=name)
    if len(frame) == 0:
        raise EmptyInputError(f'"{path}" has no data rows')

    features = sorted((int(m.group(1)), c) for c in frame.columns
                      if (m := _FEATURE.match(c)))
    y, mu, sigma = (_column(frame, name) for name in REQUIRED)
    bad = np.flatnonzero(sigma <= 0)
    if bad.size:
        row = int(bad[0]) + 1
        raise ValidationError(f'row {row}, column "sigma": must be > 0, '
                              f'got {frame["sigma"].iloc[row - 1]}',
                              row=row, column='sigma')
    inputs = None
    if features:
        inputs = np.column_stack([_column(frame, c) for _, c in features])

    preds = PredictionSet(mu, sigma)
    data = EvalDataset(y, inputs)
    validate(preds, data)
    logger.debug('read %d predictions from %s', len(preds), path)
    return preds, data

def write_prediction_file(path, preds, data):
    '''
    Write predictions and targets (and any input features) as a prediction
    file that `read_prediction_file` reads back exactly.

    Raises
    ------
    UQKitError
        The file cannot be written.
    '''
    validate(preds, data)
    frame = pd.DataFrame({'y': data.targets, 'mu': preds.means,
                          'sigma': preds.stddevs})
    for j in range(data.inputs.shape[1]):
        frame[f'x{j}'] = data.inputs[:, j]
    try:
        frame.to_csv(path, index=False, float_format=FLOAT_FORMAT,
                     lineterminator='\n')
    except OSError as e:
        raise UQKitError(f'cannot write "{path}": {e.strerror}') from e
    logger.debug('wrote %s', path)

def _default(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, tuple):
        return list(obj)
    raise TypeError(f'{type(obj).__name__} is not JSON serializable')

def dump_json(obj):
    '''Deterministic JSON text: sorted keys, indent 2, trailing newline.'''
    return json.dumps(obj, indent=2, sort_keys=True, default=_default) + '\n'

def write_text(path, text):
    '''Write UTF-8 text with Unix line endings.'''
    try:
        with open(path, 'w', encoding='utf-8', newline='\n') as f:
            f.write(text)
    except OSError as e:
        raise UQKitError(f'cannot write "{path}": {e.strerror}') from e
    logger.debug('wrote %s', path)

def _read_json(path):
    try:
        with open(path, encoding='utf-8') as f:
            return json.load(f)
    except OSError as e:
        raise UQKitError(f'cannot read "{path}": {e.strerror}') from e
    except json.JSONDecodeError as e:
        raise ValidationError(f'"{path}" is not valid JSON: {e}') from None

def make_provenance(grid=None, seed=None):
    '''
    The provenance block of a report: the grid (as its step when it is a
    regular grid, else the full level list), the seed and the uqkit version.
    '''
    grid = ProbGrid.default() if grid is None else grid
    step = float(grid.probs[0])
    if step >= MIN_GRID_STEP and grid == ProbGrid.from_step(step):
        grid_entry = {'step': step}
    else:
        grid_entry = {'probs': grid.probs.tolist()}
    return {'grid': grid_entry, 'seed': seed, 'version': VERSION}

def write_report(path, report, provenance=None):
    '''
    Write a report file.

    Parameters
    ----------
    path : str or path
    report : uqkit.scores.MetricReport or dict
        One report, or a mapping of names to reports (e.g. `before` and
        `after` of a recalibration), written as a JSON object of reports.
    provenance : dict, optional
        Stored under the `provenance` key. The default is None.

    '''
    if isinstance(report, MetricReport):
        body = report.to_dict()
    else:
        body = {name: r.to_dict() for name, r in report.items()}
    if provenance is not None:
        body['provenance'] = provenance
    write_text(path, dump_json(body))

def read_report(path):
    '''
    Read a file written by `write_report`.

    Returns
    -------
    report : uqkit.scores.MetricReport or dict
        A single report, or a dict of reports.
    provenance : dict or None

    '''
    body = _read_json(path)
    provenance = body.pop('provenance', None)
    try:
        if 'calibration' in body:
            return MetricReport.from_dict(body), provenance
        return {k: MetricReport.from_dict(v) for k, v in body.items()}, provenance
    except (KeyError, TypeError, AttributeError) as e:
        raise ValidationError(f'"{path}" is not a report file: {e}') from None

def save_map(path, recal_map):
    '''Write a recalibration map as `{"knots_x": [...], "knots_y": [...]}`.'''
    write_text(path, dump_json(recal_map.to_dict()))

def load_map(path):
    '''Read a recalibration map written by `save_map`.'''
    return RecalibrationMap.from_dict(_read_json(path))
