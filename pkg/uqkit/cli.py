#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
The `uqkit` command line.

```
uqkit eval INPUT [--grid-step 0.01] [--adv] [--seed 0] [--out PATH] [--plot-dir DIR]
uqkit recalibrate RECAL TEST [--grid-step 0.01] [--map PATH] [--out-map PATH] [--out-report PATH]
uqkit case-study [--losses nll,crps,check,interval] [--seeds 0] [--out-dir DIR]
                 [--epochs 2000] [--optimizer adam] [--no-resample-probs]
                 [--grid-step 0.01] [--no-adv] [--no-svg]
uqkit plot DIR [--out-dir DIR]
```

Exit codes: 0 on success, 2 when an input file fails validation, 1 for any
other error.  Results go to standard output, logs and errors to standard
error.
"""

__all__ = ['main']

import argparse
import logging
import os
import sys

from uqkit._version import v as VERSION
from uqkit.calib import AdvGroupConfig
from uqkit.casestudy import run_case_study
from uqkit.core import ProbGrid
from uqkit.errors import (EmptyInputError, InvalidArgumentError, ShapeError,
                          UQKitError, ValidationError)
from uqkit.fileio import (dump_json, load_map, make_provenance,
                          read_prediction_file, save_map, write_report)
from uqkit.plotdata import MANIFEST, build_plot_bundle, read_plot_data, write_plot_data
from uqkit.plots import render_svg
from uqkit.pnn import LOSS_KINDS, TrainConfig
from uqkit.recal import recalibration_pipeline
from uqkit.resources import GRID_STEP
from uqkit.scores import metric_report
from uqkit.tablestring import aggregate_table

logger = logging.getLogger(__name__)

INPUT_ERRORS = (ValidationError, ShapeError, InvalidArgumentError, EmptyInputError)

class InputError(Exception):
    '''An input file failed validation (exit code 2).'''

def _read(path):
    try:
        return read_prediction_file(path)
    except INPUT_ERRORS as e:
        raise InputError(f'{path}: {e}') from e

def _grid(step):
    try:
        return ProbGrid.from_step(step)
    except InvalidArgumentError as e:
        raise InputError(f'--grid-step: {e}') from e

def cmd_eval(args):
    '''Metrics of one prediction file.'''
    preds, data = _read(args.input)
    grid = _grid(args.grid_step)
    adv = AdvGroupConfig(seed=args.seed) if args.adv else None
    report = metric_report(preds, data, grid, adv=adv)
    provenance = make_provenance(grid, args.seed)
    if args.out:
        write_report(args.out, report, provenance)
    else:
        body = report.to_dict()
        body['provenance'] = provenance
        sys.stdout.write(dump_json(body))
    if args.plot_dir:
        bundle = build_plot_bundle(preds, data, adv=report.adv_group_curve,
                                   grid=grid)
        write_plot_data(bundle, args.plot_dir)
        render_svg(bundle, args.plot_dir)
    logger.info('eval: %d points, ece %.5f', len(data), report.ece)
    return 0

def cmd_recalibrate(args):
    '''Fit a map on one prediction file and apply it to another.'''
    preds_recal, data_recal = _read(args.recal)
    preds_test, data_test = _read(args.test)
    grid = _grid(args.grid_step)
    recal_map = None
    if args.map:
        try:
            recal_map = load_map(args.map)
        except INPUT_ERRORS as e:
            raise InputError(f'{args.map}: {e}') from e
    result = recalibration_pipeline(preds_recal, data_recal, preds_test,
                                    data_test, grid, recal_map=recal_map)
    if args.out_map:
        save_map(args.out_map, result.recal_map)
    reports = {'before': result.before, 'after': result.after}
    provenance = make_provenance(grid)
    if args.out_report:
        write_report(args.out_report, reports, provenance)
    else:
        body = {k: r.to_dict() for k, r in reports.items()}
        body['provenance'] = provenance
        sys.stdout.write(dump_json(body))
    logger.info('recalibrate: ece %.5f -> %.5f', result.before.ece,
                result.after.ece)
    return 0

def cmd_case_study(args):
    '''Run the PNN case study and print the aggregate table.'''
    tcfg = TrainConfig(epochs=args.epochs, resample_probs=args.resample_probs,
                       lr=args.lr, optimizer=args.optimizer)
    result = run_case_study(args.seeds, out_dir=args.out_dir, losses=args.losses,
                            train_cfg=tcfg, grid=_grid(args.grid_step),
                            adv=None if args.no_adv else AdvGroupConfig(),
                            render=not args.no_svg)
    sys.stdout.write(aggregate_table(result.aggregate) + '\n')
    return 0

def cmd_plot(args):
    '''Render SVGs for every plot-data directory under a root.'''
    found = 0
    for root, dirs, files in os.walk(args.directory):
        dirs.sort()
        if MANIFEST not in files:
            continue
        bundle = read_plot_data(root)
        out = root
        if args.out_dir:
            out = os.path.join(args.out_dir, os.path.relpath(root, args.directory))
        render_svg(bundle, out)
        found += 1
        logger.info('rendered %s', out)
    if not found:
        raise UQKitError(f'no {MANIFEST} found under "{args.directory}"')
    return 0

def _loss_list(text):
    losses = [s.strip() for s in text.split(',') if s.strip()]
    for loss in losses:
        if loss not in LOSS_KINDS:
            raise argparse.ArgumentTypeError(f'unknown loss "{loss}"; '
                                             f'choose from {",".join(LOSS_KINDS)}')
    if not losses:
        raise argparse.ArgumentTypeError('no losses given')
    return losses

def _seed_list(text):
    try:
        return [int(s) for s in text.split(',') if s.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f'seeds must be integers, not "{text}"')

def build_parser():
    '''The argument parser of `main`.'''
    parser = argparse.ArgumentParser(
        prog='uqkit',
        description='Assess, visualize and recalibrate the uncertainty of '
                    'regression predictions.')
    parser.add_argument('-v', '--verbose', action='count', default=0,
                        help='-v for progress, -vv for debug output')
    parser.add_argument('--version', action='version', version=f'%(prog)s {VERSION}')
    sub = parser.add_subparsers(dest='cmd', required=True)

    ev = sub.add_parser('eval', help='metrics of a prediction file')
    ev.add_argument('input')
    ev.add_argument('--grid-step', type=float, default=GRID_STEP)
    ev.add_argument('--adv', action='store_true',
                    help='include adversarial group calibration')
    ev.add_argument('--seed', type=int, default=0)
    ev.add_argument('--out', help='report path (default: standard output)')
    ev.add_argument('--plot-dir', help='also write plot data and SVGs here')
    ev.set_defaults(func=cmd_eval)

    rc = sub.add_parser('recalibrate', help='isotonic recalibration')
    rc.add_argument('recal', help='prediction file the map is fitted on')
    rc.add_argument('test', help='prediction file the map is applied to')
    rc.add_argument('--grid-step', type=float, default=GRID_STEP)
    rc.add_argument('--map', help='reuse a saved map instead of fitting one')
    rc.add_argument('--out-map')
    rc.add_argument('--out-report', help='before/after report path '
                                         '(default: standard output)')
    rc.set_defaults(func=cmd_recalibrate)

    cs = sub.add_parser('case-study', help='train and evaluate PNNs')
    cs.add_argument('--losses', type=_loss_list, default=list(LOSS_KINDS))
    cs.add_argument('--seeds', type=_seed_list, default=[0])
    cs.add_argument('--out-dir', default='case_study')
    cs.add_argument('--epochs', type=int, default=2000)
    cs.add_argument('--lr', type=float, default=1e-3)
    cs.add_argument('--optimizer', choices=('adam', 'sgd'), default='adam')
    cs.add_argument('--resample-probs', action=argparse.BooleanOptionalAction,
                    default=True)
    cs.add_argument('--grid-step', type=float, default=GRID_STEP)
    cs.add_argument('--no-adv', action='store_true')
    cs.add_argument('--no-svg', action='store_true')
    cs.set_defaults(func=cmd_case_study)

    pl = sub.add_parser('plot', help='render SVGs from plot data')
    pl.add_argument('directory')
    pl.add_argument('--out-dir')
    pl.set_defaults(func=cmd_plot)
    return parser

def main(argv=None):
    '''
    Run the command line.

    Parameters
    ----------
    argv : list of str, optional
        Arguments without the program name. The default is None, meaning
        `sys.argv[1:]`.

    Returns
    -------
    int
        The exit code.

    '''
    args = build_parser().parse_args(argv)
    level = {0: logging.WARNING, 1: logging.INFO}.get(args.verbose, logging.DEBUG)
    logging.basicConfig(format='%(asctime)s - %(levelname)s - %(message)s',
                        level=level)
    logging.getLogger('uqkit').setLevel(level)
    try:
        return args.func(args)
    except InputError as e:
        print(f'uqkit {args.cmd}: {e}', file=sys.stderr)
        return 2
    except UQKitError as e:
        print(f'uqkit {args.cmd}: {e}', file=sys.stderr)
        return 1

if __name__ == '__main__':
    sys.exit(main())
