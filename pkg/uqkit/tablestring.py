#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Create aligned text tables of multi-seed case-study results.

Rows are methods and columns are metrics; each cell shows the mean over seeds
with one standard error.  Trained methods come first, followed by a rule and
the ground-truth row.

"""

from uqkit.errors import UQKitError

__all__ = ['aggregate_table']

METHOD_LABELS = {'nll': 'NLL',
                 'crps': 'CRPS',
                 'check': 'Check',
                 'interval': 'Interval',
                 'ground_truth': 'Ground Truth'}

METRIC_LABELS = {'rmse': 'RMSE',
                 'mae': 'MAE',
                 'ece': 'ECE',
                 'sharpness': 'Sharpness',
                 'nll': 'NLL',
                 'crps': 'CRPS',
                 'check': 'Check',
                 'interval': 'Interval',
                 'miscalibration_area': 'Miscal. Area'}

METRIC_GROUPS = (('rmse', 'mae', 'ece', 'sharpness'),
                 ('nll', 'crps', 'check', 'interval'))

def aggregate_table(aggregate, methods=None, metric_groups=METRIC_GROUPS,
                    digits=3, mark_best=True, rule='='):
    '''
    Create the text tables of an aggregate, one table per metric group.

    Parameters
    ----------
    aggregate : dict
        Output of `uqkit.casestudy.aggregate_reports`: method name to metric
        name to `{'mean': ..., 'stderr': ...}`.
    methods : list of str, optional
        Row order. The default is None, meaning the order of `aggregate` with
        `ground_truth` moved to the end.
    metric_groups : tuple of tuples, optional
        The metrics of each table. The default is
        `(('rmse', 'mae', 'ece', 'sharpness'), ('nll', 'crps', 'check', 'interval'))`.
    digits : int, optional
        Decimals shown. The default is 3.
    mark_best : bool, optional
        Append `*` to the lowest mean among the trained methods in each
        column. The default is True.
    rule : str, optional
        Character of the line separating the ground-truth row. The default
        is '='.

    Raises
    ------
    UQKitError
        A requested method or metric is not in the aggregate.

    Returns
    -------
    str
        The tables, separated by a blank line.

    Examples
    --------

    ```python
    >>> import uqkit as uq
    >>> agg = {'nll': {'rmse': {'mean': 2.048, 'stderr': 0.125}},
    ...        'ground_truth': {'rmse': {'mean': 0.962, 'stderr': 0.064}}}
    >>> print(uq.aggregate_table(agg, metric_groups=(('rmse',),)))
                           RMSE
             NLL  2.048 ± 0.125
    ============================
    Ground Truth  0.962 ± 0.064

    ```

    '''
    if methods is None:
        methods = [m for m in aggregate if m != 'ground_truth']
        if 'ground_truth' in aggregate:
            methods.append('ground_truth')
    for m in methods:
        if m not in aggregate:
            raise UQKitError(f'method "{m}" is not in the aggregate')

    labels = [METHOD_LABELS.get(m, m) for m in methods]
    namespacing = max(len(n) for n in labels)
    trained = [i for i, m in enumerate(methods) if m != 'ground_truth']

    tables = []
    for group in metric_groups:
        cells = []
        best = {}
        for metric in group:
            column = []
            for m in methods:
                try:
                    entry = aggregate[m][metric]
                except KeyError:
                    raise UQKitError(f'metric "{metric}" missing for method "{m}"') from None
                column.append(f'{entry["mean"]:.{digits}f} ± {entry["stderr"]:.{digits}f}')
            cells.append(column)
            if mark_best and len(trained) > 1:
                best[metric] = min(trained, key=lambda i: aggregate[methods[i]][metric]['mean'])

        widths = []
        for metric, column in zip(group, cells):
            w = max(len(METRIC_LABELS.get(metric, metric)), *(len(c) + 1 for c in column))
            widths.append(w + 2)

        s = ' ' * namespacing
        s += ''.join(METRIC_LABELS.get(metric, metric).rjust(w - 1) + ' '
                     for metric, w in zip(group, widths)).rstrip()
        s += '\n'
        for i, (m, name) in enumerate(zip(methods, labels)):
            if m == 'ground_truth' and i > 0:
                s += rule * (namespacing + sum(widths)) + '\n'
            row = name.rjust(namespacing)
            for metric, column, w in zip(group, cells, widths):
                mark = '*' if best.get(metric) == i else ' '
                row += (column[i] + mark).rjust(w)
            s += row.rstrip() + '\n'
        tables.append(s)

    return '\n'.join(tables).rstrip('\n')
