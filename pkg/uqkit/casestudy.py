#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
The PNN case study end to end: for every seed, draw the synthetic splits,
train one network per loss, evaluate every trained model and the ground-truth
predictor on the test split, and aggregate the results over seeds.

With an output directory the artifact tree is:

```
out_dir/
    aggregate.json
    aggregate.txt
    seed_<s>/<method>/
        report.json
        manifest.json
        <family>.csv
        <family>.svg
```

where `<method>` is a loss kind or `ground_truth`.
"""

__all__ = ['GROUND_TRUTH', 'CaseStudyResult', 'method_seed',
           'aggregate_reports', 'run_case_study']

from dataclasses import dataclass, replace
import logging
import os

import numpy as np

from uqkit.calib import AdvGroupConfig
from uqkit.core import ProbGrid
from uqkit.errors import ConfigurationError
from uqkit.fileio import dump_json, make_provenance, write_report, write_text
from uqkit.plotdata import build_plot_bundle, write_plot_data
from uqkit.plots import render_svg
from uqkit.pnn import LOSS_KINDS, TrainConfig, predict, train
from uqkit.resources import standard_error
from uqkit.scores import MetricReport, metric_report
from uqkit.synthetic import SynthConfig, generate_synthetic
from uqkit.tablestring import aggregate_table

logger = logging.getLogger(__name__)

GROUND_TRUTH = 'ground_truth'

@dataclass
class CaseStudyResult:
    '''Reports and training curves keyed by `(method, seed)`, and the
    aggregate over seeds (see `aggregate_reports`).'''
    reports: dict
    curves: dict
    aggregate: dict

def method_seed(seed, method):
    '''
    The SeedSequence of one (seed, method) run, `SeedSequence([seed, i])` with
    `i = 0` for the ground truth and `1 + LOSS_KINDS.index(method)` for a
    loss.  Runs never share random streams, whatever subset of losses is run.
    '''
    index = 0 if method == GROUND_TRUTH else 1 + LOSS_KINDS.index(method)
    return np.random.SeedSequence([seed, index])

def aggregate_reports(reports):
    '''
    Mean and standard error over seeds of every scalar metric, per method.

    Parameters
    ----------
    reports : dict
        `(method, seed)` to `uqkit.scores.MetricReport`.

    Returns
    -------
    dict
        `method -> metric -> {'mean': float, 'stderr': float, 'n': int}`.
        Trained methods come in loss order, the ground truth last.  The
        standard error is 0 for a single seed.

    '''
    by_method = {}
    for (method, seed), report in sorted(reports.items(), key=lambda kv: kv[0][1]):
        by_method.setdefault(method, []).append(report)
    order = [m for m in LOSS_KINDS if m in by_method]
    order += [m for m in by_method if m not in LOSS_KINDS and m != GROUND_TRUTH]
    if GROUND_TRUTH in by_method:
        order.append(GROUND_TRUTH)

    aggregate = {}
    for method in order:
        rows = by_method[method]
        aggregate[method] = {}
        for metric in MetricReport.SCALARS:
            values = [getattr(r, metric) for r in rows]
            aggregate[method][metric] = {'mean': float(np.mean(values)),
                                         'stderr': standard_error(values),
                                         'n': len(values)}
    return aggregate

def _write_artifacts(directory, report, preds, data, curves, grid, seed, render):
    bundle = build_plot_bundle(preds, data, curves=curves,
                               adv=report.adv_group_curve, grid=grid)
    write_plot_data(bundle, directory)
    write_report(os.path.join(directory, 'report.json'), report,
                 make_provenance(grid, seed))
    if render:
        render_svg(bundle, directory)

def run_case_study(seeds, out_dir=None, losses=LOSS_KINDS, train_cfg=None,
                   synth_cfg=None, grid=None, adv=AdvGroupConfig(), render=True):
    '''
    Run the case study.

    Parameters
    ----------
    seeds : iterable of int
        Data seeds; each gives one row per method.
    out_dir : str or path, optional
        Where to write the artifact tree. The default is None (nothing is
        written).
    losses : iterable of str, optional
        Training losses. The default is all of `uqkit.pnn.LOSS_KINDS`.
    train_cfg : uqkit.pnn.TrainConfig, optional
        Training settings; `loss` and `seed` are replaced per run.
        The default is None, meaning `TrainConfig()`.
    synth_cfg : uqkit.synthetic.SynthConfig, optional
        Data settings; `seed` is replaced per seed. The default is None,
        meaning `SynthConfig()`.
    grid : uqkit.core.ProbGrid, optional
        The default is None, meaning `ProbGrid.default()`.
    adv : uqkit.calib.AdvGroupConfig or None, optional
        Adversarial group settings; None skips the adversarial curve.  Its
        `seed` is ignored in favour of the per-run stream.
    render : bool, optional
        Also write SVG figures. The default is True.

    Raises
    ------
    ConfigurationError
        No seeds, repeated seeds, or an unknown loss.
    NumericError
        A training run diverged.

    Returns
    -------
    CaseStudyResult

    '''
    seeds = [int(s) for s in seeds]
    losses = list(losses)
    if not seeds:
        raise ConfigurationError('the case study needs at least one seed')
    if len(set(seeds)) != len(seeds):
        raise ConfigurationError(f'repeated seeds in {seeds}')
    for loss in losses:
        if loss not in LOSS_KINDS:
            raise ConfigurationError(f'loss must be one of {LOSS_KINDS}, not "{loss}"')
    train_cfg = TrainConfig() if train_cfg is None else train_cfg
    synth_cfg = SynthConfig() if synth_cfg is None else synth_cfg
    grid = ProbGrid.default() if grid is None else grid

    reports = {}
    curves = {}
    for seed in seeds:
        data = generate_synthetic(replace(synth_cfg, seed=seed))
        truth = data.truth['test']
        for method in losses + [GROUND_TRUTH]:
            train_ss, adv_ss = method_seed(seed, method).spawn(2)
            adv_rng = np.random.default_rng(adv_ss)
            run_curves = None
            if method == GROUND_TRUTH:
                preds = truth
            else:
                tcfg = replace(train_cfg, loss=method,
                               seed=int(train_ss.generate_state(1)[0]))
                model, run_curves = train(data, tcfg, truth_test=truth)
                preds = predict(model, data.test.inputs)
                curves[(method, seed)] = run_curves
            report = metric_report(preds, data.test, grid, adv=adv, rng=adv_rng)
            reports[(method, seed)] = report
            logger.info('seed %d, %s: ece %.4f, sharpness %.4f, nll %.4f',
                        seed, method, report.ece, report.sharpness, report.nll)
            if out_dir is not None:
                _write_artifacts(os.path.join(out_dir, f'seed_{seed}', method),
                                 report, preds, data.test, run_curves, grid,
                                 seed, render)

    aggregate = aggregate_reports(reports)
    if out_dir is not None:
        provenance = make_provenance(grid)
        provenance['seed'] = seeds
        write_text(os.path.join(out_dir, 'aggregate.json'),
                   dump_json({'aggregate': aggregate, 'provenance': provenance}))
        write_text(os.path.join(out_dir, 'aggregate.txt'),
                   aggregate_table(aggregate) + '\n')
    return CaseStudyResult(reports=reports, curves=curves, aggregate=aggregate)
