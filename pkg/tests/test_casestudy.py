"""Tests for the end-to-end case study."""

import json
import os

import numpy as np
import pytest

import uqkit as uq
from uqkit.errors import ConfigurationError

QUICK = uq.TrainConfig(epochs=2, hidden=(8,), log_every=0)
ADV = uq.AdvGroupConfig(n_sizes=3, n_draws=4)


def run(out_dir=None, seeds=(0,), render=False, **kwds):
    return uq.run_case_study(seeds, out_dir=out_dir, losses=['nll'], train_cfg=QUICK,
                             adv=ADV, render=render, **kwds)


def tree(root):
    files = {}
    for dirpath, _, filenames in os.walk(root):
        for name in filenames:
            path = os.path.join(dirpath, name)
            with open(path, 'rb') as f:
                files[os.path.relpath(path, root)] = f.read()
    return files


def test_reports_for_trained_model_and_ground_truth():
    result = run()
    assert set(result.reports) == {('nll', 0), ('ground_truth', 0)}
    assert set(result.curves) == {('nll', 0)}
    assert list(result.aggregate) == ['nll', 'ground_truth']
    for method in result.aggregate:
        rmse = result.aggregate[method]['rmse']
        assert rmse['n'] == 1
        assert rmse['stderr'] == 0.0


def test_ground_truth_row_is_the_truth_report():
    result = run()
    data = uq.generate_synthetic(uq.SynthConfig(seed=0))
    truth = uq.metric_report(data.truth['test'], data.test)
    assert result.reports[('ground_truth', 0)].nll == truth.nll
    assert result.reports[('ground_truth', 0)].adv_group_curve is not None


def test_aggregate_over_seeds():
    result = run(seeds=[0, 1])
    rmse = [result.reports[('nll', s)].rmse for s in (0, 1)]
    entry = result.aggregate['nll']['rmse']
    assert entry['mean'] == pytest.approx(np.mean(rmse))
    assert entry['stderr'] == pytest.approx(abs(rmse[0] - rmse[1]) / 2)
    assert entry['n'] == 2


def test_method_seeds_are_distinct():
    states = {m: tuple(uq.method_seed(0, m).generate_state(2))
              for m in uq.LOSS_KINDS + (uq.GROUND_TRUTH,)}
    assert len(set(states.values())) == len(states)
    assert uq.method_seed(3, 'crps').entropy == uq.method_seed(3, 'crps').entropy


def test_loss_subset_does_not_change_runs():
    alone = uq.run_case_study([0], losses=['crps'], train_cfg=QUICK, adv=None)
    both = uq.run_case_study([0], losses=['nll', 'crps'], train_cfg=QUICK, adv=None)
    assert alone.reports[('crps', 0)].to_dict() == both.reports[('crps', 0)].to_dict()


def test_artifact_tree(tmp_path):
    run(tmp_path, render=True)
    files = tree(tmp_path)
    assert 'aggregate.json' in files and 'aggregate.txt' in files
    for method in ('nll', 'ground_truth'):
        prefix = os.path.join('seed_0', method)
        for name in ('report.json', 'manifest.json', 'confidence_band.csv',
                     'calibration.svg', 'adversarial_group.csv'):
            assert os.path.join(prefix, name) in files
    assert os.path.join('seed_0', 'nll', 'training_curves.csv') in files
    assert os.path.join('seed_0', 'ground_truth', 'training_curves.csv') not in files
    body = json.loads(files['aggregate.json'])
    assert body['provenance']['seed'] == [0]
    assert set(body['aggregate']) == {'nll', 'ground_truth'}


def test_reruns_are_byte_identical(tmp_path):
    run(tmp_path / 'a', render=True)
    run(tmp_path / 'b', render=True)
    assert tree(tmp_path / 'a') == tree(tmp_path / 'b')


@pytest.mark.parametrize('seeds, losses', [([], ['nll']), ([1, 1], ['nll']),
                                           ([0], ['mse'])])
def test_configuration_errors(seeds, losses):
    with pytest.raises(ConfigurationError):
        uq.run_case_study(seeds, losses=losses, train_cfg=QUICK)
