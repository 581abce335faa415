"""Tests for plotting and SVG rendering."""

import re
import xml.etree.ElementTree as ET

import matplotlib.pyplot as plt
from matplotlib.figure import Figure
import numpy as np
import pytest

import uqkit as uq

SVG_NS = '{http://www.w3.org/2000/svg}'


@pytest.fixture
def bundle(synth):
    model, curves = uq.train(synth, uq.TrainConfig(epochs=3, hidden=(8,), log_every=0))
    preds = uq.predict(model, synth.test.inputs)
    adv = uq.adversarial_group_calibration(preds, synth.test, n_sizes=3, n_draws=4, rng=0)
    return uq.build_plot_bundle(preds, synth.test, curves=curves, adv=adv)


@pytest.mark.parametrize('plotter', [uq.bandplot, uq.intervalplot, uq.calibrationplot,
                                     uq.trainingplot, uq.advgroupplot])
def test_plot_functions_return_figure(bundle, plotter):
    fig, ax = plt.subplots()
    assert plotter(bundle, ax=ax) is fig
    plt.close(fig)


def test_calibration_axes_are_unit_square(bundle):
    fig = Figure()
    ax = fig.add_subplot()
    uq.calibrationplot(bundle, ax=ax)
    assert ax.get_xlim() == (0, 1)
    assert ax.get_ylim() == (0, 1)


def test_render_svg_writes_every_family(tmp_path, bundle):
    paths = uq.render_svg(bundle, tmp_path / 'svg')
    assert [p.rsplit('/', 1)[-1] for p in paths] == [
        'confidence_band.svg', 'ordered_intervals.svg', 'calibration.svg',
        'training_curves.svg', 'adversarial_group.svg']
    for path in paths:
        root = ET.parse(path).getroot()
        assert root.tag == SVG_NS + 'svg'
        assert root.findall(f'.//{SVG_NS}path')


def test_render_svg_is_byte_identical(tmp_path, bundle):
    first = uq.render_svg(bundle, tmp_path / 'a')
    second = uq.render_svg(bundle, tmp_path / 'b')
    for a, b in zip(first, second):
        with open(a, 'rb') as fa, open(b, 'rb') as fb:
            assert fa.read() == fb.read()


def _polyline(root, gid):
    group = next(g for g in root.iter(SVG_NS + 'g') if g.get('id') == gid)
    d = group.find(SVG_NS + 'path').get('d')
    return np.array(re.findall(r'-?\d+(?:\.\d+)?(?:e[-+]?\d+)?', d), dtype=float).reshape(-1, 2)


def test_band_upper_edge_above_lower_in_svg(tmp_path, bundle):
    uq.render_svg(bundle, tmp_path)
    root = ET.parse(tmp_path / 'confidence_band.svg').getroot()
    upper = _polyline(root, 'band_upper')
    lower = _polyline(root, 'band_lower')
    assert upper.shape == lower.shape == (len(bundle['confidence_band']), 2)
    np.testing.assert_allclose(upper[:, 0], lower[:, 0])
    # svg y grows downward
    assert np.all(upper[:, 1] <= lower[:, 1] + 1e-6)
