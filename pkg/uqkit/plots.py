#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Various plots for visualizing a `uqkit.plotdata.PlotBundle`, and static SVG
rendering of every figure family it holds.
"""

__all__ = ['bandplot', 'intervalplot', 'calibrationplot', 'trainingplot',
           'advgroupplot', 'render_svg']

import logging
import os

import matplotlib as mpl
from matplotlib.figure import Figure
import matplotlib.pyplot as plt

from uqkit.errors import UQKitError

logger = logging.getLogger(__name__)

# get the color cycle from mpl
prop_cycle = plt.rcParams['axes.prop_cycle']
colors = prop_cycle.by_key()['color']

SVG_RC = {'svg.hashsalt': 'uqkit', 'svg.fonttype': 'path', 'path.simplify': False}

def _setup(ax, grid, xlabel, ylabel, kwds):
    if ax is None:
        ax = plt.gca()
    if grid:
        ax.grid(True, which='major', alpha=.3)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    return ax, ({} if kwds is None else kwds)

def bandplot(bundle, ax=None, grid=True, plot_kwds=None):
    '''
    Observations with the predicted mean and confidence band against the
    input.

    Parameters
    ----------
    bundle : uqkit.plotdata.PlotBundle
        Bundle holding the `confidence_band` series.
    ax : matplotlib.axes.Axes, optional
        Axes to create the plot on. The default is None.
    grid : bool, optional
        Whether to include a grid. The default is True.
    plot_kwds : dict, optional
        Keyword arguments passed to `matplotlib.axes.Axes.plot` for the mean.
        The default is None.

    Returns
    -------
    matplotlib.figure.Figure
        The Figure containing the axes used.

    '''
    ax, plot_kwds = _setup(ax, grid, 'x', 'y', plot_kwds)
    df = bundle['confidence_band']
    ax.fill_between(df['x'], df['lo'], df['hi'], color=colors[0], alpha=.25,
                    linewidth=0, label='band')
    ax.plot(df['x'], df['hi'], color=colors[0], linewidth=.5, label='upper', gid='band_upper')
    ax.plot(df['x'], df['lo'], color=colors[0], linewidth=.5, label='lower', gid='band_lower')
    ax.plot(df['x'], df['mean'], color=colors[0], label='mean', **plot_kwds)
    ax.scatter(df['x'], df['y'], color='black', s=6, zorder=5,
               label='observations')
    ax.legend(loc='best', fontsize='small')
    return ax.figure

def intervalplot(bundle, ax=None, grid=True, plot_kwds=None):
    '''
    Observations, predicted means and central prediction intervals, in
    order of the observations.

    Parameters
    ----------
    bundle : uqkit.plotdata.PlotBundle
        Bundle holding the `ordered_intervals` series.
    ax : matplotlib.axes.Axes, optional
        The default is None.
    grid : bool, optional
        The default is True.
    plot_kwds : dict, optional
        Keyword arguments passed to `matplotlib.axes.Axes.errorbar`.

    Returns
    -------
    matplotlib.figure.Figure

    '''
    ax, plot_kwds = _setup(ax, grid, 'index (ordered by observation)',
                           'y', plot_kwds)
    df = bundle['ordered_intervals']
    err = [df['mean'] - df['lo'], df['hi'] - df['mean']]
    ax.errorbar(df['index'], df['mean'], yerr=err, fmt='o', markersize=2,
                color=colors[0], ecolor=colors[0], alpha=.6,
                label='prediction interval', **plot_kwds)
    ax.plot(df['index'], df['y'], '.', color='black', label='observations')
    ax.legend(loc='best', fontsize='small')
    return ax.figure

def calibrationplot(bundle, ax=None, grid=True, plot_kwds=None):
    '''
    Average calibration plot: observed against expected probabilities, with
    the identity diagonal for reference.

    Parameters
    ----------
    bundle : uqkit.plotdata.PlotBundle
        Bundle holding the `calibration` series.
    ax : matplotlib.axes.Axes, optional
        The default is None.
    grid : bool, optional
        The default is True.
    plot_kwds : dict, optional
        Keyword arguments passed to `matplotlib.axes.Axes.plot` for the curve.

    Returns
    -------
    matplotlib.figure.Figure

    '''
    ax, plot_kwds = _setup(ax, grid, 'expected probability',
                           'observed probability', plot_kwds)
    df = bundle['calibration']
    ax.plot(df['expected'], df['diagonal'], '--', color='gray', label='ideal')
    ax.plot(df['expected'], df['observed'], color=colors[0],
            label='predictor', **plot_kwds)
    ax.fill_between(df['expected'], df['diagonal'], df['observed'],
                    color=colors[0], alpha=.2, linewidth=0)
    ax.set_xlim(0, 1)
    ax.set_ylim(0, 1)
    ax.set_aspect('equal')
    ax.legend(loc='upper left', fontsize='small')
    return ax.figure

def trainingplot(bundle, ax=None, grid=True):
    '''
    Training curves: test ECE on the left y axis, test sharpness and the
    ground-truth sharpness on the right y axis, and a vertical marker at the
    epoch with the lowest validation loss.

    Parameters
    ----------
    bundle : uqkit.plotdata.PlotBundle
        Bundle holding the `training_curves` series.
    ax : matplotlib.axes.Axes, optional
        The default is None.
    grid : bool, optional
        The default is True.

    Returns
    -------
    matplotlib.figure.Figure

    '''
    ax, _ = _setup(ax, grid, 'epoch', 'ECE', None)
    df = bundle['training_curves']
    ax.plot(df['epoch'], df['ece'], color=colors[0], label='ECE')
    ax.tick_params(axis='y', colors=colors[0])
    right = ax.twinx()
    right.set_ylabel('sharpness')
    right.plot(df['epoch'], df['sharpness'], color=colors[1], label='sharpness')
    right.plot(df['epoch'], df['gt_sharpness'], '--', color=colors[1],
               label='GT sharpness')
    right.tick_params(axis='y', colors=colors[1])
    best = df.loc[df['best_epoch'] == 1, 'epoch']
    for epoch in best:
        ax.axvline(epoch, color='gray', linestyle=':', label='val epoch')
    handles = ax.get_legend_handles_labels()
    more = right.get_legend_handles_labels()
    ax.legend(handles[0] + more[0], handles[1] + more[1], loc='best',
              fontsize='small')
    return ax.figure

def advgroupplot(bundle, ax=None, grid=True, plot_kwds=None):
    '''
    Adversarial group calibration: mean worst-group ECE against group size,
    shaded by +/- 1 standard error.

    Parameters
    ----------
    bundle : uqkit.plotdata.PlotBundle
        Bundle holding the `adversarial_group` series.
    ax : matplotlib.axes.Axes, optional
        The default is None.
    grid : bool, optional
        The default is True.
    plot_kwds : dict, optional
        Keyword arguments passed to `matplotlib.axes.Axes.plot`.

    Returns
    -------
    matplotlib.figure.Figure

    '''
    ax, plot_kwds = _setup(ax, grid, 'group size (fraction of dataset)',
                           'worst-group ECE', plot_kwds)
    df = bundle['adversarial_group']
    ax.fill_between(df['fraction'], df['lo'], df['hi'], color=colors[0],
                    alpha=.25, linewidth=0)
    ax.plot(df['fraction'], df['mean_worst_ece'], color=colors[0],
            marker='o', markersize=3, **plot_kwds)
    ax.set_xlim(0, 1)
    return ax.figure

PLOTTERS = {'confidence_band': bandplot,
            'ordered_intervals': intervalplot,
            'calibration': calibrationplot,
            'training_curves': trainingplot,
            'adversarial_group': advgroupplot}

def render_svg(bundle, directory):
    '''
    Write one `<family>.svg` per series present in the bundle.  Output is
    byte-identical for identical bundles.

    Parameters
    ----------
    bundle : uqkit.plotdata.PlotBundle
    directory : str or path
        Created if missing.

    Raises
    ------
    UQKitError
        A file cannot be written.

    Returns
    -------
    list of str
        Paths of the written SVGs.

    '''
    written = []
    try:
        os.makedirs(directory, exist_ok=True)
    except OSError as e:
        raise UQKitError(f'cannot create "{directory}": {e.strerror}') from e
    with mpl.rc_context(SVG_RC):
        for name in bundle.series:
            fig = Figure(figsize=(6, 4.5))
            PLOTTERS[name](bundle, ax=fig.add_subplot())
            fig.tight_layout()
            path = os.path.join(directory, name + '.svg')
            try:
                fig.savefig(path, format='svg', metadata={'Date': None})
            except OSError as e:
                raise UQKitError(f'cannot write "{path}": {e.strerror}') from e
            written.append(path)
            logger.debug('wrote %s', path)
    return written
