"""Tests for isotonic recalibration."""

import itertools

import numpy as np
import pytest

import uqkit as uq
from uqkit.errors import InvalidArgumentError, UQKitWarning

from conftest import sample_own


def brute_force_projection(y):
    """L2 projection of `y` onto nondecreasing vectors, by trying every split
    into consecutive blocks whose means are nondecreasing."""
    n = len(y)
    best, best_sse = None, np.inf
    for cuts in itertools.product([False, True], repeat=n - 1):
        edges = [0] + [i + 1 for i, c in enumerate(cuts) if c] + [n]
        means = [np.mean(y[a:b]) for a, b in zip(edges, edges[1:])]
        if np.any(np.diff(means) < 0):
            continue
        fitted = np.concatenate([np.full(b - a, m) for a, b, m in
                                 zip(edges, edges[1:], means)])
        sse = np.sum((fitted - y)**2)
        if sse < best_sse:
            best, best_sse = fitted, sse
    return best


def test_monotone_input_is_unchanged():
    g = uq.fit_isotonic([0.25, 0.5, 0.75], [0.1, 0.2, 0.3])
    np.testing.assert_allclose(g.fitted, [0.1, 0.2, 0.3])


def test_violating_pair_is_pooled():
    with pytest.warns(UQKitWarning):
        g = uq.fit_isotonic([0.25, 0.75], [0.2, 0.1])
    np.testing.assert_allclose(g.fitted, [0.15, 0.15])


def test_three_point_pooling():
    with pytest.warns(UQKitWarning, match='constant'):
        g = uq.fit_isotonic([0.25, 0.5, 0.75], [0.3, 0.1, 0.2])
    np.testing.assert_allclose(g.fitted, [0.2, 0.2, 0.2])


@pytest.mark.filterwarnings('ignore::uqkit.errors.UQKitWarning')
def test_pava_matches_brute_force():
    rng = np.random.default_rng(4)
    for n in range(2, 8):
        for _ in range(40):
            expected = np.linspace(0.1, 0.9, n)
            observed = rng.uniform(0, 1, size=n)
            if rng.uniform() < 0.3:
                observed = np.round(observed, 1)
            g = uq.fit_isotonic(expected, observed)
            np.testing.assert_allclose(g.fitted, brute_force_projection(observed),
                                       atol=1e-12)


def test_map_has_boundary_knots():
    g = uq.fit_isotonic([0.25, 0.75], [0.4, 0.9])
    assert g.knots_x.tolist() == [0.0, 0.25, 0.75, 1.0]
    assert g(0.0) == 0.0
    assert g(1.0) == 1.0


def test_map_interpolates_between_knots():
    g = uq.fit_isotonic([0.25, 0.75], [0.4, 0.9])
    assert g(0.125) == pytest.approx(0.2)
    assert g(0.5) == pytest.approx(0.65)


def test_identity_map():
    g = uq.RecalibrationMap.identity()
    p = np.linspace(0, 1, 11)
    np.testing.assert_array_equal(uq.apply_map(g, p), p)
    np.testing.assert_array_equal(g.inverse(p), p)


def test_apply_map_rejects_out_of_range():
    with pytest.raises(InvalidArgumentError):
        uq.apply_map(uq.RecalibrationMap.identity(), 1.5)


def test_inverse_of_flat_segment_is_left_end():
    g = uq.RecalibrationMap([0.0, 0.2, 0.6, 1.0], [0.0, 0.5, 0.5, 1.0])
    assert g.inverse(0.5) == pytest.approx(0.2)
    assert g.inverse(0.25) == pytest.approx(0.1)
    assert g.inverse(0.75) == pytest.approx(0.8)


@pytest.mark.parametrize('knots_x, knots_y', [
    ([0.0], [0.0]),
    ([0.0, 0.5, 0.5, 1.0], [0.0, 0.2, 0.3, 1.0]),
    ([0.0, 0.5, 1.0], [0.0, 0.6, 0.4]),
    ([0.0, 1.0], [0.0, 1.2]),
])
def test_map_invariants(knots_x, knots_y):
    with pytest.raises(InvalidArgumentError):
        uq.RecalibrationMap(knots_x, knots_y)


def test_map_dict_round_trip():
    g = uq.fit_isotonic([0.25, 0.5, 0.75], [0.1, 0.35, 0.8])
    assert uq.RecalibrationMap.from_dict(g.to_dict()) == g


def test_identity_recalibration_is_a_no_op(small):
    preds, _ = small
    grid = uq.ProbGrid.default()
    table = uq.recalibrate_quantiles(preds, uq.RecalibrationMap.identity(), grid)
    np.testing.assert_array_equal(table, preds.quantiles(grid.probs))


@pytest.mark.parametrize('scale', [2.0, 0.5])
def test_recalibration_improves_held_out_ece(scale):
    # targets have `scale` times the predicted spread
    preds_recal, data_recal = sample_own(10_000, seed=20, scale=scale)
    preds_test, data_test = sample_own(10_000, seed=21, scale=scale)
    result = uq.recalibration_pipeline(preds_recal, data_recal, preds_test, data_test)
    assert result.after.ece < result.before.ece
    assert result.after.ece < 0.02
    assert result.quantiles.shape == (10_000, 99)


@pytest.mark.parametrize('scale', [2.0, 0.5])
def test_fitting_split_ece_does_not_increase(scale):
    preds, data = sample_own(5_000, seed=22, scale=scale)
    result = uq.recalibration_pipeline(preds, data, preds, data)
    assert result.after.ece <= result.before.ece + 1e-12


def test_calibrated_model_gives_near_identity_map(calibrated):
    preds, data = calibrated
    result = uq.recalibration_pipeline(preds, data, preds, data)
    grid = uq.ProbGrid.default()
    assert np.max(np.abs(result.recal_map(grid.probs) - grid.probs)) < 0.03


def test_after_report_flags_carried_over_metrics():
    preds_recal, data_recal = sample_own(2_000, seed=23, scale=2.0)
    preds_test, data_test = sample_own(2_000, seed=24, scale=2.0)
    result = uq.recalibration_pipeline(preds_recal, data_recal, preds_test, data_test)
    after, before = result.after, result.before
    assert after.recalibrated and not before.recalibrated
    assert set(after.pre_recalibration) == {'sharpness', 'nll', 'crps'}
    for name in ('rmse', 'mae', 'sharpness', 'nll', 'crps'):
        assert getattr(after, name) == getattr(before, name)
    assert after.check != before.check


def test_pipeline_reuses_given_map(small):
    preds, data = small
    g = uq.RecalibrationMap.identity()
    result = uq.recalibration_pipeline(preds, data, preds, data, recal_map=g)
    assert result.recal_map is g
    assert result.after.ece == result.before.ece


def test_recalibrated_cdf_composes_map():
    base = uq.PredictionSet([0.0], [1.0])
    g = uq.RecalibrationMap([0.0, 0.5, 1.0], [0.0, 0.25, 1.0])
    recal = uq.RecalibratedPredictionSet(base, g)
    assert recal.cdf([0.0])[0] == pytest.approx(0.25)
    assert recal.quantiles([0.25])[0, 0] == pytest.approx(0.0, abs=1e-12)


def test_squaring_map_moves_median_to_lower_quartile():
    knots = np.linspace(0, 1, 11)
    g = uq.RecalibrationMap(knots, knots ** 2)
    assert g(0.5) == pytest.approx(0.25)
    assert g.inverse(0.25) == pytest.approx(0.5)
    preds, _ = sample_own(50, seed=30)
    recal = uq.recalibrate_quantiles(preds, g, uq.ProbGrid([0.25]))
    np.testing.assert_allclose(recal[:, 0], preds.quantiles([0.5])[:, 0], atol=1e-12)
    np.testing.assert_allclose(recal[:, 0], preds.means, atol=1e-12)
