"""Training loops for the pseudo-label scorer.

``train_scorer`` optimizes a comparison-data ranking objective plus an
auxiliary likelihood term over gold labels; ``train_generator`` is the
plain maximum-likelihood loop used for initial and downstream models.
Checkpoints are selected by dev selection accuracy: the fraction of dev
comparison samples whose positive label outscores every negative.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np

from .losses import ranking_loss, ranking_loss_grad
from .quads import LabelSequence, Review
from .records import write_jsonl
from .scoring import DEFAULT_SCORE_MODE, match_score, token_probabilities


@dataclass(frozen=True)
class TrainConfig:
    """Hyperparameters of one scorer-training run.

    ``learning_rates`` is a grid; training restarts from the initial
    weights for each entry and the best dev checkpoint overall wins.
    """

    objective: str = "listwise"
    alpha: float = 1.0
    beta: float = 1.0
    batch_size: int = 10
    epochs: int = 10
    learning_rates: tuple[float, ...] = (0.02,)
    seed: int = 0
    score_mode: str = DEFAULT_SCORE_MODE

    @classmethod
    def from_file(cls, path) -> "TrainConfig":
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
        known = {f.name for f in fields(cls)}
        unknown = set(raw) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        if "learning_rates" in raw:
            raw["learning_rates"] = tuple(raw["learning_rates"])
        return cls(**raw)


@dataclass
class TrainResult:
    generator: object
    metrics: list[dict] = field(default_factory=list)
    best_dev_accuracy: float = 0.0
    best_epoch: int = -1
    best_learning_rate: float = 0.0

    def write_metrics(self, path) -> None:
        write_jsonl(path, self.metrics)


class Adam:
    """Vanilla Adam over a dict of parameter arrays."""

    def __init__(self, params: dict[str, np.ndarray], lr: float,
                 beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
        self.lr = lr
        self.beta1, self.beta2, self.eps = beta1, beta2, eps
        self.m = {k: np.zeros_like(v) for k, v in params.items()}
        self.v = {k: np.zeros_like(v) for k, v in params.items()}
        self.t = 0

    def step(self, params: dict[str, np.ndarray], grads: dict[str, np.ndarray]) -> None:
        self.t += 1
        b1, b2 = self.beta1, self.beta2
        for k in params:
            g = grads[k]
            self.m[k] = b1 * self.m[k] + (1 - b1) * g
            self.v[k] = b2 * self.v[k] + (1 - b2) * g * g
            m_hat = self.m[k] / (1 - b1 ** self.t)
            v_hat = self.v[k] / (1 - b2 ** self.t)
            params[k] -= self.lr * m_hat / (np.sqrt(v_hat) + self.eps)


def selection_accuracy(gen, comp_samples, score_mode: str = DEFAULT_SCORE_MODE) -> float:
    """Percent of samples whose positive gets the strictly highest score."""
    if not comp_samples:
        return 0.0
    correct = 0
    for sample in comp_samples:
        pos = match_score(token_probabilities(gen, sample.review, sample.positive),
                          score_mode)
        negs = [match_score(token_probabilities(gen, sample.review, neg), score_mode)
                for neg in sample.negatives]
        if all(pos > n for n in negs):
            correct += 1
    return 100.0 * correct / len(comp_samples)


def train_generator(gen, samples: list[tuple[Review, LabelSequence]],
                    epochs: int = 10, lr: float = 0.02, batch_size: int = 10,
                    seed: int = 0):
    """Maximum-likelihood training on (review, label) pairs, in place."""
    if not samples:
        raise ValueError("empty training data")
    rng = np.random.default_rng(seed)
    opt = Adam(gen.params, lr=lr)
    order = np.arange(len(samples))
    for _ in range(epochs):
        rng.shuffle(order)
        for start in range(0, len(order), batch_size):
            batch = [samples[i] for i in order[start:start + batch_size]]
            grads = gen.zero_grads()
            for review, label in batch:
                gen.accumulate_logprob_grad(review, label.text,
                                            -1.0 / len(batch), grads)
            opt.step(gen.params, grads)
    return gen


def train_scorer(gen, comp_data, asqp_data=None,
                 config: TrainConfig = TrainConfig()) -> TrainResult:
    """Fine-tune ``gen`` into a pseudo-label scorer on comparison data.

    ``comp_data`` carries ``train`` and ``dev`` lists of comparison
    samples (option-6 tasks must already be excluded); ``asqp_data`` is
    an optional list of (review, label) gold pairs whose likelihood is
    maximized alongside the comparison positives. The model state with
    the best dev selection accuracy across the learning-rate grid is
    restored into ``gen`` before returning.
    """
    comp_train, comp_dev = list(comp_data.train), list(comp_data.dev)
    if not comp_train:
        raise ValueError("empty training data")
    asqp_data = list(asqp_data or [])

    pos_pool = [(s.review, s.positive.text) for s in comp_train]
    pos_pool += [(review, label.text) for review, label in asqp_data]

    init_params = gen.copy_params()
    result = TrainResult(generator=gen)
    best_params = gen.copy_params()
    order = np.arange(len(comp_train))

    for lr in config.learning_rates:
        gen.set_params(init_params)
        opt = Adam(gen.params, lr=lr)
        rng = np.random.default_rng(config.seed)
        for epoch in range(config.epochs):
            rng.shuffle(order)
            epoch_losses = []
            for start in range(0, len(order), config.batch_size):
                batch = [comp_train[i] for i in order[start:start + config.batch_size]]
                grads = gen.zero_grads()
                step_loss = _ranking_step(gen, batch, grads, config)
                if config.alpha > 0 and pos_pool:
                    step_loss += _likelihood_step(gen, pos_pool, grads, config, rng)
                epoch_losses.append(step_loss)
                opt.step(gen.params, grads)
            dev_acc = selection_accuracy(gen, comp_dev, config.score_mode)
            result.metrics.append({
                "learning_rate": lr,
                "epoch": epoch,
                "loss": float(np.mean(epoch_losses)),
                "dev_accuracy": dev_acc,
            })
            if dev_acc > result.best_dev_accuracy:
                result.best_dev_accuracy = dev_acc
                result.best_epoch = epoch
                result.best_learning_rate = lr
                best_params = gen.copy_params()

    gen.set_params(best_params)
    return result


def _ranking_step(gen, batch, grads, config: TrainConfig) -> float:
    """Accumulate the ranking-loss gradient for one comparison batch."""
    scale = 1.0 / len(batch)
    losses = []
    for sample in batch:
        logp_pos = gen.sequence_logprob(sample.review, sample.positive.text)
        logp_negs = np.array([gen.sequence_logprob(sample.review, n.text)
                              for n in sample.negatives])
        losses.append(ranking_loss(config.objective, logp_pos, logp_negs, config.beta))
        g_pos, g_negs = ranking_loss_grad(config.objective, logp_pos, logp_negs,
                                          config.beta)
        gen.accumulate_logprob_grad(sample.review, sample.positive.text,
                                    g_pos * scale, grads)
        for neg, g in zip(sample.negatives, g_negs):
            gen.accumulate_logprob_grad(sample.review, neg.text, g * scale, grads)
    return float(np.mean(losses))


def _likelihood_step(gen, pos_pool, grads, config: TrainConfig, rng) -> float:
    """Accumulate the auxiliary positive-likelihood gradient."""
    picks = rng.integers(0, len(pos_pool), size=config.batch_size)
    weight = -config.alpha / len(picks)
    logps = [gen.accumulate_logprob_grad(pos_pool[i][0], pos_pool[i][1], weight, grads)
             for i in picks]
    return float(-config.alpha * np.mean(logps))
