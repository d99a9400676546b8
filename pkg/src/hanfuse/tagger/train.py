"""Mini-batch Adam training with dev-loss early stopping."""

import logging
from dataclasses import dataclass, field
from typing import List

import numpy as np

from .. import fusion
from ..errors import EmptyCorpus, NumericError
from .model import TaggerModel, loss_and_grad

log = logging.getLogger(__name__)


@dataclass
class TrainConfig:
    batch_size: int = 12
    max_epochs: int = 60
    learning_rate: float = 2e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    dropout: float = 0.4
    early_stop_patience: int = 5
    seed: int = 0

    def __post_init__(self):
        if min(self.batch_size, self.max_epochs, self.early_stop_patience) <= 0:
            raise ValueError("batch_size, max_epochs and early_stop_patience must be positive")
        if self.learning_rate <= 0 or self.eps <= 0:
            raise ValueError("learning_rate and eps must be positive")
        if not 0 <= self.dropout < 1:
            raise ValueError("dropout must lie in [0, 1)")


@dataclass
class EpochRecord:
    epoch: int
    train_loss: float
    dev_loss: float
    improved: bool


@dataclass
class TrainLog:
    epochs: List[EpochRecord] = field(default_factory=list)
    best_epoch: int = 0
    stopped_early: bool = False

    @property
    def train_losses(self):
        return [e.train_loss for e in self.epochs]

    @property
    def dev_losses(self):
        return [e.dev_loss for e in self.epochs]


class Adam:
    def __init__(self, params, lr, beta1=0.9, beta2=0.999, eps=1e-8):
        self.lr, self.beta1, self.beta2, self.eps = lr, beta1, beta2, eps
        self.m = {k: np.zeros_like(v) for k, v in params.items()}
        self.v = {k: np.zeros_like(v) for k, v in params.items()}
        self.t = 0

    def step(self, params, grads):
        self.t += 1
        c1 = 1.0 - self.beta1 ** self.t
        c2 = 1.0 - self.beta2 ** self.t
        for k, g in grads.items():
            m, v = self.m[k], self.v[k]
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * g * g
            params[k] -= self.lr * (m / c1) / (np.sqrt(v / c2) + self.eps)


def embed_corpus(corpus, model, tables, mode="lenient"):
    """Per-sentence (sem, gly, pho) matrices and tag-index lists."""
    parts = [fusion.embed_parts(chars, tables, mode) for chars, _ in corpus]
    tags = [model.tagset.encode(t) for _, t in corpus]
    return parts, tags


def mean_loss(model, parts, tags, batch_size=64):
    total = 0.0
    for s in range(0, len(parts), batch_size):
        loss, _ = loss_and_grad(model, parts[s:s + batch_size], tags[s:s + batch_size], need_grad=False)
        total += loss * len(parts[s:s + batch_size])
    return total / len(parts)


def train(model: TaggerModel, corpus, dev, config: TrainConfig, tables, mode="lenient", callback=None):
    """Fit ``model`` in place and return (best-dev-loss snapshot, TrainLog).

    ``corpus`` and ``dev`` are sequences of (characters, tags) pairs.
    Training stops once the dev loss has failed to improve for
    ``early_stop_patience`` consecutive epochs, or at ``max_epochs``.
    """
    if len(corpus) == 0 or len(dev) == 0:
        raise EmptyCorpus("training and dev corpora must be non-empty")
    model.dropout = config.dropout
    train_parts, train_tags = embed_corpus(corpus, model, tables, mode)
    dev_parts, dev_tags = embed_corpus(dev, model, tables, mode)
    rng = np.random.default_rng(config.seed)
    opt = Adam(model.params, config.learning_rate, config.beta1, config.beta2, config.eps)
    history = TrainLog()
    best = model.copy()
    best_dev = np.inf
    stale = 0
    n = len(train_parts)
    for epoch in range(1, config.max_epochs + 1):
        order = rng.permutation(n)
        running = 0.0
        for s in range(0, n, config.batch_size):
            idx = order[s:s + config.batch_size]
            loss, grads = loss_and_grad(
                model, [train_parts[i] for i in idx], [train_tags[i] for i in idx], training=True, rng=rng
            )
            if not np.isfinite(loss):
                raise NumericError(f"non-finite training loss at epoch {epoch}")
            opt.step(model.params, grads)
            running += loss * len(idx)
        dev_loss = mean_loss(model, dev_parts, dev_tags)
        if not np.isfinite(dev_loss):
            raise NumericError(f"non-finite dev loss at epoch {epoch}")
        improved = dev_loss < best_dev
        if improved:
            best_dev = dev_loss
            best = model.copy()
            history.best_epoch = epoch
            stale = 0
        else:
            stale += 1
        history.epochs.append(EpochRecord(epoch, running / n, dev_loss, improved))
        log.info("epoch %d train %.4f dev %.4f%s", epoch, running / n, dev_loss, " *" if improved else "")
        if callback is not None:
            callback(epoch, model, history)
        if stale >= config.early_stop_patience:
            history.stopped_early = True
            break
    return best, history
