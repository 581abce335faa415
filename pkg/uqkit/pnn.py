#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Probabilistic neural network (PNN): a ReLU multilayer perceptron with a mean
head and a log-variance head, trained by full-batch gradient descent on one of
four proper scoring rules (NLL, CRPS, check score, interval score).

Gradients come from torch autograd.  The check and interval losses sum the
score over a batch of sampled probability levels `p ~ unif(0.01, 0.99)` before
averaging over points; for the interval loss a level `p` is the central
coverage of the interval (`alpha = 1 - p`), as in `uqkit.scores`.
"""

__all__ = ['LOSS_KINDS', 'PNN', 'TrainConfig', 'TrainingCurves', 'forward',
           'predict', 'loss_tensor', 'sample_levels', 'loss_and_grad', 'train']

import copy
from dataclasses import dataclass
import logging
import math

import numpy as np
from scipy import special
import torch
from torch import nn

from uqkit.calib import ece
from uqkit.core import PredictionSet
from uqkit.errors import ConfigurationError, NumericError
from uqkit.resources import LEVEL_RANGE, make_rng
from uqkit.scores import sharpness

logger = logging.getLogger(__name__)

LOSS_KINDS = ('nll', 'crps', 'check', 'interval')

DTYPE = torch.float64
_HALF_LOG_2PI = 0.5 * math.log(2 * math.pi)
_INV_SQRT_PI = 1 / math.sqrt(math.pi)
_INV_SQRT_2PI = 1 / math.sqrt(2 * math.pi)

OPTIMIZERS = {'adam': torch.optim.Adam, 'sgd': torch.optim.SGD}

@dataclass(frozen=True)
class TrainConfig:
    '''
    Training settings.

    `epochs = 0` is allowed and returns the initial model.  With
    `resample_probs=False` one batch of levels is drawn before training and
    reused every epoch.  `optimizer` is 'adam' (default) or 'sgd' (plain
    gradient descent, no momentum); both take full-batch steps.
    '''
    loss: str = 'nll'
    lr: float = 1e-3
    epochs: int = 2000
    n_sampled_probs: int = 30
    resample_probs: bool = True
    seed: int = 0
    hidden: tuple = (64, 64, 64)
    log_every: int = 100
    optimizer: str = 'adam'
    level_range: tuple = LEVEL_RANGE

    def __post_init__(self):
        if self.loss not in LOSS_KINDS:
            raise ConfigurationError(f'loss must be one of {LOSS_KINDS}, '
                                     f'not "{self.loss}"')
        if not self.lr > 0:
            raise ConfigurationError('learning rate must be positive')
        if self.epochs < 0:
            raise ConfigurationError('epochs must be >= 0')
        if self.n_sampled_probs < 1:
            raise ConfigurationError('n_sampled_probs must be >= 1')
        if self.optimizer not in OPTIMIZERS:
            raise ConfigurationError(f'optimizer must be one of {tuple(OPTIMIZERS)}, '
                                     f'not "{self.optimizer}"')
        low, high = self.level_range
        if not 0 < low < high < 1:
            raise ConfigurationError('level_range must satisfy 0 < low < high < 1')

@dataclass
class TrainingCurves:
    '''Per-epoch training loss, validation loss, test ECE and test sharpness
    of the parameters at the start of each epoch, the epoch with the lowest
    validation loss, and the ground-truth sharpness of the test split.'''
    train_loss: np.ndarray
    val_loss: np.ndarray
    test_ece: np.ndarray
    test_sharpness: np.ndarray
    best_epoch: int = None
    gt_sharpness: float = float('nan')

    def __len__(self):
        return len(self.train_loss)

class PNN(nn.Module):
    '''
    Mean / log-variance network.

    Parameters
    ----------
    n_inputs : int, optional
        Input dimension. The default is 1.
    hidden : tuple of int, optional
        Hidden layer widths. The default is (64, 64, 64).
    generator : torch.Generator, optional
        Source for the uniform fan-in initialization
        (bound `1/sqrt(fan_in)`). The default is None.
    '''

    def __init__(self, n_inputs=1, hidden=(64, 64, 64), generator=None):
        super().__init__()
        layers = []
        fan_in = n_inputs
        for width in hidden:
            layers += [nn.Linear(fan_in, width, dtype=DTYPE), nn.ReLU()]
            fan_in = width
        self.hidden = nn.Sequential(*layers)
        self.head = nn.Linear(fan_in, 2, dtype=DTYPE)
        self.reset_parameters(generator)

    def reset_parameters(self, generator=None):
        '''Uniform fan-in initialization of every weight and bias.'''
        with torch.no_grad():
            for module in self.modules():
                if isinstance(module, nn.Linear):
                    bound = 1 / math.sqrt(module.in_features)
                    module.weight.uniform_(-bound, bound, generator=generator)
                    module.bias.uniform_(-bound, bound, generator=generator)

    def forward(self, x):
        '''Return the mean and log-variance heads, each of shape `(n,)`.'''
        out = self.head(self.hidden(x))
        return out[:, 0], out[:, 1]

def _as_tensor(a):
    if isinstance(a, torch.Tensor):
        return a.to(DTYPE)
    return torch.tensor(np.asarray(a, dtype=float), dtype=DTYPE)

def _as_inputs(x):
    x = _as_tensor(x)
    return x[:, None] if x.ndim == 1 else x

def forward(model, x):
    '''
    Predicted means and standard deviations, `sigma = exp(logvar / 2)`.

    Parameters
    ----------
    model : PNN
    x : array like
        Inputs, shape `(n, k)` (or `(n,)` for one feature).

    Raises
    ------
    NumericError
        An output is not finite.

    Returns
    -------
    mu, sigma : numpy.ndarray

    '''
    with torch.no_grad():
        mu, logvar = model(_as_inputs(x))
        sigma = torch.exp(0.5 * logvar)
    mu, sigma = mu.numpy(), sigma.numpy()
    bad = ~(np.isfinite(mu) & np.isfinite(sigma) & (sigma > 0))
    if bad.any():
        raise NumericError(f'non-finite network output at point '
                           f'{int(np.flatnonzero(bad)[0])}')
    return mu, sigma

def predict(model, x):
    '''Wrap `forward` in a `uqkit.core.PredictionSet`.'''
    return PredictionSet(*forward(model, x))

def sample_levels(rng, n, level_range=LEVEL_RANGE):
    '''
    Draw `n` probability levels uniformly from `level_range`, by default
    [0.01, 0.99], the span of the default grid.  With that range the
    interval-loss weight `2/(1 - p)` stays at most 200.
    '''
    low, high = level_range
    return make_rng(rng).uniform(low, high, size=n)

def loss_tensor(mu, logvar, y, kind, levels=None):
    '''
    Batch-mean loss as a differentiable tensor.

    Parameters
    ----------
    mu, logvar : torch.Tensor
        Network outputs, shape `(n,)`.
    y : torch.Tensor
        Targets, shape `(n,)`.
    kind : str
        One of 'nll', 'crps', 'check', 'interval'.
    levels : array like, optional
        Probability levels; required for 'check' and 'interval'.

    Returns
    -------
    torch.Tensor
        Scalar.

    '''
    sigma = torch.exp(0.5 * logvar)
    if kind == 'nll':
        per_point = _HALF_LOG_2PI + 0.5 * logvar + 0.5 * ((y - mu) / sigma)**2
    elif kind == 'crps':
        z = (y - mu) / sigma
        pdf = _INV_SQRT_2PI * torch.exp(-0.5 * z**2)
        per_point = sigma * (z * (2 * torch.special.ndtr(z) - 1) + 2 * pdf - _INV_SQRT_PI)
    elif kind in ('check', 'interval'):
        if levels is None:
            raise ConfigurationError(f'the {kind} loss needs probability levels')
        p = np.asarray(levels, dtype=float)
        if kind == 'check':
            z = _as_tensor(special.ndtri(p))
            q = mu[:, None] + sigma[:, None] * z[None, :]
            u = y[:, None] - q
            pt = _as_tensor(p)[None, :]
            per_point = (pt * torch.relu(u) + (1 - pt) * torch.relu(-u)).sum(dim=1)
        else:
            alpha = 1 - p
            z_lo = _as_tensor(special.ndtri(alpha / 2))
            z_hi = _as_tensor(special.ndtri(1 - alpha / 2))
            lower = mu[:, None] + sigma[:, None] * z_lo[None, :]
            upper = mu[:, None] + sigma[:, None] * z_hi[None, :]
            scale = _as_tensor(2 / alpha)[None, :]
            yy = y[:, None]
            per_point = ((upper - lower)
                         + scale * (torch.relu(lower - yy) + torch.relu(yy - upper))
                         ).sum(dim=1)
    else:
        raise ConfigurationError(f'loss must be one of {LOSS_KINDS}, not "{kind}"')
    return per_point.mean()

def loss_and_grad(model, x, y, kind, rng=None, levels=None, n_sampled_probs=30):
    '''
    Loss on a batch and its exact gradient with respect to every parameter.

    Parameters
    ----------
    model : PNN
    x, y : array like
        Batch inputs and targets.
    kind : str
        Loss kind.
    rng : int or numpy.random.Generator, optional
        Source for the sampled levels when `levels` is not given.
    levels : array like, optional
        Fixed probability levels for 'check' / 'interval'.
    n_sampled_probs : int, optional
        Number of levels to sample. The default is 30.

    Raises
    ------
    NumericError
        The loss is not finite.

    Returns
    -------
    loss : float
    grads : list of torch.Tensor
        Same shapes as `model.parameters()`.

    '''
    y = _as_tensor(y)
    if len(y) == 0:
        raise ConfigurationError('the batch is empty')
    if levels is None and kind in ('check', 'interval'):
        levels = sample_levels(rng, n_sampled_probs)
    model.zero_grad()
    mu, logvar = model(_as_inputs(x))
    loss = loss_tensor(mu, logvar, y, kind, levels)
    if not torch.isfinite(loss):
        raise NumericError(f'non-finite {kind} loss')
    loss.backward()
    return loss.item(), [p.grad.detach().clone() for p in model.parameters()]

def _splits(data):
    if hasattr(data, 'train'):
        truth = getattr(data, 'truth', {}).get('test')
        return data.train, data.validation, data.test, truth
    train_set, val_set, test_set = data
    return train_set, val_set, test_set, None

def train(data, tcfg=None, truth_test=None):
    '''
    Train a PNN by full-batch gradient descent (Adam updates unless
    `tcfg.optimizer` is 'sgd') and backtrack to the epoch with the lowest
    validation loss.

    Each epoch records the training loss, validation loss (same kind, levels
    from a dedicated seeded stream), test ECE and test sharpness of the current
    parameters, then takes one gradient step.

    Parameters
    ----------
    data : uqkit.synthetic.SyntheticData or tuple
        The splits, either as SyntheticData (whose test ground truth gives the
        reference sharpness) or as a `(train, validation, test)` tuple of
        EvalDatasets.
    tcfg : TrainConfig, optional
        The default is None, meaning `TrainConfig()`.
    truth_test : uqkit.core.PredictionSet, optional
        Ground-truth predictions on the test split, for the reference
        sharpness; overrides the truth carried by SyntheticData.

    Raises
    ------
    NumericError
        Training diverged; the `epoch` attribute says when.

    Returns
    -------
    model : PNN
        The best-validation parameters.
    curves : TrainingCurves

    '''
    tcfg = TrainConfig() if tcfg is None else tcfg
    train_set, val_set, test_set, truth = _splits(data)
    if truth_test is not None:
        truth = truth_test

    init_ss, level_ss, val_ss = np.random.SeedSequence(tcfg.seed).spawn(3)
    generator = torch.Generator().manual_seed(int(init_ss.generate_state(1)[0]))
    level_rng = np.random.default_rng(level_ss)
    val_rng = np.random.default_rng(val_ss)

    model = PNN(train_set.inputs.shape[1], tcfg.hidden, generator)
    optimizer = OPTIMIZERS[tcfg.optimizer](model.parameters(), lr=tcfg.lr)

    x_train, y_train = _as_inputs(train_set.inputs), _as_tensor(train_set.targets)
    x_val, y_val = _as_inputs(val_set.inputs), _as_tensor(val_set.targets)
    x_test = _as_inputs(test_set.inputs)

    quantile_loss = tcfg.loss in ('check', 'interval')
    fixed_levels = fixed_val_levels = None
    if quantile_loss and not tcfg.resample_probs:
        fixed_levels = sample_levels(level_rng, tcfg.n_sampled_probs, tcfg.level_range)
        fixed_val_levels = sample_levels(val_rng, tcfg.n_sampled_probs, tcfg.level_range)

    def levels_for(rng, fixed):
        if not quantile_loss:
            return None
        if fixed is not None:
            return fixed
        return sample_levels(rng, tcfg.n_sampled_probs, tcfg.level_range)

    history = {k: np.empty(tcfg.epochs) for k in
               ('train_loss', 'val_loss', 'test_ece', 'test_sharpness')}
    best_val = np.inf
    best_epoch = None
    best_state = copy.deepcopy(model.state_dict())

    for epoch in range(tcfg.epochs):
        optimizer.zero_grad()
        mu, logvar = model(x_train)
        loss = loss_tensor(mu, logvar, y_train, tcfg.loss,
                           levels_for(level_rng, fixed_levels))
        with torch.no_grad():
            val_loss = loss_tensor(*model(x_val), y_val, tcfg.loss,
                                   levels_for(val_rng, fixed_val_levels)).item()
        if not (torch.isfinite(loss) and np.isfinite(val_loss)):
            raise NumericError(f'{tcfg.loss} training diverged at epoch {epoch}',
                               epoch=epoch)
        try:
            test_preds = predict(model, x_test)
        except NumericError as e:
            raise NumericError(f'{e} at epoch {epoch}', epoch=epoch)

        history['train_loss'][epoch] = loss.item()
        history['val_loss'][epoch] = val_loss
        history['test_ece'][epoch] = ece(test_preds, test_set)
        history['test_sharpness'][epoch] = sharpness(test_preds)

        if val_loss < best_val:
            best_val, best_epoch = val_loss, epoch
            best_state = copy.deepcopy(model.state_dict())

        if tcfg.log_every and epoch % tcfg.log_every == 0:
            logger.debug('%s epoch %d: train %.5f, val %.5f', tcfg.loss, epoch,
                         history['train_loss'][epoch], val_loss)

        loss.backward()
        optimizer.step()

    model.load_state_dict(best_state)
    if best_epoch is not None:
        logger.info('%s: best validation loss %.5f at epoch %d', tcfg.loss,
                    best_val, best_epoch)

    gt_sharpness = float('nan') if truth is None else sharpness(truth)
    curves = TrainingCurves(best_epoch=best_epoch, gt_sharpness=gt_sharpness,
                            **history)
    return model, curves
