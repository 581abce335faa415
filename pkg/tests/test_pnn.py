"""Tests for the probabilistic neural network and its training loop."""

import numpy as np
import pytest
import torch

import uqkit as uq
from uqkit.errors import ConfigurationError

SMALL = (8, 8)


def zero_model(hidden=SMALL):
    model = uq.PNN(1, hidden)
    with torch.no_grad():
        for p in model.parameters():
            p.zero_()
    return model


def numpy_forward(model, x):
    """Reference forward pass from the raw weights."""
    state = {k: v.numpy() for k, v in model.state_dict().items()}
    h = np.asarray(x, dtype=float).reshape(len(x), -1)
    i = 0
    while f'hidden.{i}.weight' in state:
        h = np.maximum(h @ state[f'hidden.{i}.weight'].T + state[f'hidden.{i}.bias'], 0)
        i += 2
    out = h @ state['head.weight'].T + state['head.bias']
    return out[:, 0], np.exp(0.5 * out[:, 1])


def batch_loss(model, x, y, kind, levels):
    mu, logvar = model(torch.as_tensor(x, dtype=torch.float64)[:, None])
    return uq.loss_tensor(mu, logvar, torch.as_tensor(y, dtype=torch.float64),
                          kind, levels).item()


def test_zero_model_outputs_standard_normal():
    mu, sigma = uq.forward(zero_model(), np.linspace(-3, 3, 5))
    np.testing.assert_array_equal(mu, 0.0)
    np.testing.assert_array_equal(sigma, 1.0)


@pytest.mark.parametrize('kind, value, logvar_grad', [
    ('nll', 0.918939, 0.5),
    ('crps', 0.233695, 0.5 * 0.233695),
])
def test_zero_model_loss_and_grad(kind, value, logvar_grad):
    model = zero_model()
    loss, grads = uq.loss_and_grad(model, [[1.0], [-2.0]], [0.0, 0.0], kind)
    assert loss == pytest.approx(value, abs=1e-6)
    names = [n for n, _ in model.named_parameters()]
    for name, g in zip(names, grads):
        if name == 'head.bias':
            assert float(g[0]) == pytest.approx(0.0, abs=1e-12)
            assert float(g[1]) == pytest.approx(logvar_grad, abs=1e-6)
        else:
            assert torch.count_nonzero(g) == 0, name


def test_forward_matches_numpy():
    model = uq.PNN(1, SMALL, torch.Generator().manual_seed(0))
    x = np.linspace(-10, 10, 50)
    mu, sigma = uq.forward(model, x)
    mu_ref, sigma_ref = numpy_forward(model, x)
    np.testing.assert_allclose(mu, mu_ref, rtol=0, atol=1e-12)
    np.testing.assert_allclose(sigma, sigma_ref, rtol=1e-12)


def test_initialization_bounds():
    model = uq.PNN(1, (4, 16), torch.Generator().manual_seed(1))
    for module in model.modules():
        if isinstance(module, torch.nn.Linear):
            bound = 1 / np.sqrt(module.in_features)
            assert float(module.weight.abs().max()) <= bound
            assert float(module.bias.abs().max()) <= bound


@pytest.mark.parametrize('kind', uq.LOSS_KINDS)
def test_gradient_matches_finite_differences(kind):
    rng = np.random.default_rng(2)
    model = uq.PNN(1, SMALL, torch.Generator().manual_seed(2))
    x = rng.uniform(-3, 3, size=20)
    y = rng.normal(size=20)
    levels = uq.sample_levels(rng, 5)
    _, grads = uq.loss_and_grad(model, x[:, None], y, kind, levels=levels)

    h = 1e-6
    for param, grad in zip(model.parameters(), grads):
        numeric = torch.zeros_like(param)
        flat = param.data.view(-1)
        for i in range(flat.numel()):
            orig = float(flat[i])
            flat[i] = orig + h
            up = batch_loss(model, x, y, kind, levels)
            flat[i] = orig - h
            down = batch_loss(model, x, y, kind, levels)
            flat[i] = orig
            numeric.view(-1)[i] = (up - down) / (2 * h)
        err = torch.linalg.norm(numeric - grad)
        scale = max(float(torch.linalg.norm(grad)), 1e-8)
        assert float(err) / scale < 1e-4


def test_quantile_losses_need_levels():
    mu = torch.zeros(3, dtype=torch.float64)
    with pytest.raises(ConfigurationError):
        uq.loss_tensor(mu, mu, mu, 'check')
    with pytest.raises(ConfigurationError):
        uq.loss_tensor(mu, mu, mu, 'pinball')


def test_sample_levels_stay_in_range():
    levels = uq.sample_levels(0, 10_000)
    assert np.all((levels >= 0.01) & (levels <= 0.99))
    narrow = uq.sample_levels(0, 1000, level_range=(0.4, 0.6))
    assert narrow.min() >= 0.4 and narrow.max() <= 0.6


def small_config(**kwds):
    defaults = dict(epochs=5, hidden=SMALL, seed=3, log_every=0)
    defaults.update(kwds)
    return uq.TrainConfig(**defaults)


@pytest.mark.parametrize('kind', uq.LOSS_KINDS)
def test_training_is_deterministic(synth, kind):
    model_a, curves_a = uq.train(synth, small_config(loss=kind))
    model_b, curves_b = uq.train(synth, small_config(loss=kind))
    for (name, a), b in zip(model_a.state_dict().items(), model_b.state_dict().values()):
        assert torch.equal(a, b), name
    np.testing.assert_array_equal(curves_a.val_loss, curves_b.val_loss)
    np.testing.assert_array_equal(curves_a.test_ece, curves_b.test_ece)


def test_curves_and_best_epoch(synth):
    model, curves = uq.train(synth, small_config(epochs=20, lr=1e-2))
    assert len(curves) == 20
    assert curves.best_epoch == int(np.argmin(curves.val_loss))
    assert curves.gt_sharpness == pytest.approx(uq.sharpness(synth.truth['test']))
    # the returned parameters are those of the best epoch
    val_loss = batch_loss(model, synth.validation.inputs[:, 0],
                          synth.validation.targets, 'nll', None)
    assert val_loss == pytest.approx(curves.val_loss[curves.best_epoch], rel=1e-12)
    assert curves.test_sharpness[0] > 0


def test_zero_epochs_returns_initial_model(synth):
    model, curves = uq.train(synth, small_config(epochs=0))
    assert curves.best_epoch is None
    assert len(curves) == 0
    initial = uq.PNN(1, SMALL)
    assert sum(p.numel() for p in model.parameters()) == \
        sum(p.numel() for p in initial.parameters())


def test_fixed_levels_differ_from_resampled(synth):
    _, fixed = uq.train(synth, small_config(loss='check', resample_probs=False))
    _, resampled = uq.train(synth, small_config(loss='check'))
    # both draw the first batch of levels from the same stream
    assert fixed.train_loss[0] == resampled.train_loss[0]
    assert not np.array_equal(fixed.train_loss, resampled.train_loss)


def test_train_accepts_split_tuple(synth):
    _, curves = uq.train((synth.train, synth.validation, synth.test), small_config())
    assert np.isnan(curves.gt_sharpness)
    _, curves = uq.train((synth.train, synth.validation, synth.test), small_config(),
                         truth_test=synth.truth['test'])
    assert curves.gt_sharpness == pytest.approx(uq.sharpness(synth.truth['test']))


@pytest.mark.parametrize('kwds', [dict(loss='mse'), dict(lr=0.0), dict(epochs=-1),
                                  dict(n_sampled_probs=0), dict(optimizer='rmsprop'),
                                  dict(level_range=(0.0, 0.99)),
                                  dict(level_range=(0.6, 0.4))])
def test_config_validation(kwds):
    with pytest.raises(ConfigurationError):
        uq.TrainConfig(**kwds)


def test_plain_gradient_descent_option(synth):
    _, curves_sgd = uq.train(synth, small_config(optimizer='sgd'))
    _, curves_adam = uq.train(synth, small_config())
    assert curves_sgd.train_loss[0] == curves_adam.train_loss[0]
    assert not np.array_equal(curves_sgd.train_loss, curves_adam.train_loss)
    assert np.all(np.isfinite(curves_sgd.train_loss))


@pytest.mark.parametrize('kind', uq.LOSS_KINDS)
def test_best_epoch_loss_not_above_initial(synth, kind):
    cfg = small_config(loss=kind, epochs=30, lr=1e-2, hidden=(16, 16),
                       resample_probs=False)
    _, curves = uq.train(synth, cfg)
    assert curves.train_loss[curves.best_epoch] <= curves.train_loss[0]


@pytest.mark.parametrize('seed', range(5))
def test_interval_training_stays_finite(seed):
    data = uq.generate_synthetic(uq.SynthConfig(seed=seed))
    _, curves = uq.train(data, uq.TrainConfig(loss='interval', seed=seed, epochs=200,
                                              log_every=0))
    assert np.all(np.isfinite(curves.train_loss))
    assert np.all(np.isfinite(curves.test_sharpness))


@pytest.fixture(scope='module')
def case_study():
    return uq.run_case_study(range(5), train_cfg=uq.TrainConfig(log_every=0), adv=None)


@pytest.mark.slow
def test_training_loss_at_best_epoch_not_above_initial(case_study):
    for (kind, seed), curves in case_study.curves.items():
        assert curves.train_loss[curves.best_epoch] <= curves.train_loss[0], (kind, seed)


@pytest.mark.slow
def test_nll_training_sharpness_over_five_seeds(case_study):
    sharpness = case_study.aggregate['nll']['sharpness']['mean']
    assert sharpness == pytest.approx(1.746, abs=3 * 0.155)


@pytest.mark.slow
def test_nll_training_gives_the_widest_predictions(case_study):
    reports = case_study.reports
    for other in ('crps', 'check', 'interval'):
        wider = sum(reports[('nll', s)].sharpness > reports[(other, s)].sharpness
                    for s in range(5))
        assert wider >= 4, other


@pytest.mark.slow
def test_crps_and_check_training_sharper_than_truth(case_study):
    reports = case_study.reports
    for kind in ('crps', 'check'):
        sharper = sum(reports[(kind, s)].sharpness < reports[('ground_truth', s)].sharpness
                      for s in range(5))
        assert sharper >= 4, kind


@pytest.mark.slow
def test_ground_truth_has_the_best_proper_scores(case_study):
    reports = case_study.reports
    for seed in range(5):
        truth = reports[('ground_truth', seed)]
        for kind in uq.LOSS_KINDS:
            report = reports[(kind, seed)]
            for score in ('nll', 'crps', 'check', 'interval'):
                assert getattr(report, score) > getattr(truth, score), (kind, seed, score)
