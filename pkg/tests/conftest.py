"""Shared fixtures and the `--runslow` switch."""

import matplotlib
matplotlib.use('Agg')

import numpy as np
import pytest

import uqkit as uq


def pytest_addoption(parser):
    parser.addoption('--runslow', action='store_true', default=False,
                     help='run the slow multi-seed training tests')


def pytest_collection_modifyitems(config, items):
    if config.getoption('--runslow'):
        return
    skip_slow = pytest.mark.skip(reason='needs --runslow')
    for item in items:
        if 'slow' in item.keywords:
            item.add_marker(skip_slow)


def sample_own(n, seed, scale=1.0):
    """Predictions with random means/stddevs, and targets drawn from
    `N(mean, (scale * stddev)**2)`; `scale=1` gives calibrated predictions."""
    rng = np.random.default_rng(seed)
    means = rng.normal(0, 3, size=n)
    stddevs = rng.uniform(0.5, 2.0, size=n)
    targets = means + scale * stddevs * rng.standard_normal(n)
    x = rng.uniform(-10, 10, size=n)
    return uq.PredictionSet(means, stddevs), uq.EvalDataset(targets, x[:, None])


@pytest.fixture
def calibrated():
    return sample_own(10_000, seed=11)


@pytest.fixture
def small():
    preds = uq.PredictionSet([0.0, 1.0, -2.0, 0.5], [1.0, 0.5, 2.0, 1.5])
    data = uq.EvalDataset([0.3, 0.2, -1.0, 2.5], inputs=[[1.0], [-3.0], [4.0], [0.0]])
    return preds, data


@pytest.fixture
def synth():
    return uq.generate_synthetic(uq.SynthConfig(seed=0))
