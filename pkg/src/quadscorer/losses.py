"""Ranking objectives for training the pseudo-label scorer.

Each comparison sample pairs one positive label with zero or more
negatives. All losses consume *sequence log-likelihoods* (never raw
probabilities) and come with analytic gradients so that any generator
exposing d(log p)/d(params) can be trained with them.

Objectives:
    listwise   -log softmax(logp_pos over positive + negatives)
    pointwise  -logp_pos - sum log(1 - p_neg)
    pairwise1  -sum log sigmoid(beta * (logp_pos - logp_neg))
    pairwise2  sum hinge(p_neg - p_pos)   (on raw probabilities)
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

from .quads import LabelSequence, Review

OBJECTIVES = ("listwise", "pointwise", "pairwise1", "pairwise2")


@dataclass(frozen=True)
class ComparisonSample:
    """A review with one positive label and its rejected alternatives."""

    review: Review
    positive: LabelSequence
    negatives: tuple[LabelSequence, ...] = field(default_factory=tuple)
    origin: str = "human"

    def __post_init__(self) -> None:
        pos_set = self.positive.quad_set()
        neg_sets = [n.quad_set() for n in self.negatives]
        if any(pos_set == ns for ns in neg_sets):
            raise ValueError(
                f"positive label duplicated among negatives for review {self.review.id!r}"
            )
        if len(set(neg_sets)) != len(neg_sets):
            raise ValueError(f"duplicate negatives for review {self.review.id!r}")


@dataclass(frozen=True)
class LossConfig:
    """Objective choice plus the weights entering the combined loss."""

    objective: str = "listwise"
    alpha: float = 1.0
    beta: float = 1.0

    def __post_init__(self) -> None:
        if self.objective not in OBJECTIVES:
            raise ValueError(f"unknown objective {self.objective!r}")
        if self.alpha < 0:
            raise ValueError("alpha must be >= 0")
        if self.beta <= 0:
            raise ValueError("beta must be > 0")


def _log1mexp(u: np.ndarray) -> np.ndarray:
    """log(1 - exp(u)) for u < 0, stable near both ends."""
    u = np.asarray(u, dtype=float)
    out = np.empty_like(u)
    small = u > -np.log(2.0)  # exp(u) close to 1: use expm1
    out[small] = np.log(-np.expm1(u[small]))
    out[~small] = np.log1p(-np.exp(u[~small]))
    return out


def _log_sigmoid(z: np.ndarray) -> np.ndarray:
    return -np.logaddexp(0.0, -z)


def listwise_loss(logp_pos: float, logp_negs) -> float:
    scores = np.concatenate(([logp_pos], np.asarray(logp_negs, dtype=float)))
    return float(logsumexp(scores) - logp_pos)


def pointwise_loss(logp_pos: float, logp_negs) -> float:
    logp_negs = np.asarray(logp_negs, dtype=float)
    if np.any(logp_negs == 0.0):
        raise ValueError("pointwise loss undefined for a negative with probability 1")
    return float(-logp_pos - np.sum(_log1mexp(logp_negs)))


def pairwise1_loss(logp_pos: float, logp_negs, beta: float = 1.0) -> float:
    logp_negs = np.asarray(logp_negs, dtype=float)
    z = beta * (logp_pos - logp_negs)
    return float(-np.sum(_log_sigmoid(z)))


def pairwise2_loss(logp_pos: float, logp_negs) -> float:
    logp_negs = np.asarray(logp_negs, dtype=float)
    return float(np.sum(np.maximum(0.0, np.exp(logp_negs) - np.exp(logp_pos))))


def ranking_loss(kind: str, logp_pos: float, logp_negs, beta: float = 1.0) -> float:
    """One comparison sample's ranking loss under the chosen objective."""
    if kind == "listwise":
        return listwise_loss(logp_pos, logp_negs)
    if kind == "pointwise":
        return pointwise_loss(logp_pos, logp_negs)
    if kind == "pairwise1":
        return pairwise1_loss(logp_pos, logp_negs, beta)
    if kind == "pairwise2":
        return pairwise2_loss(logp_pos, logp_negs)
    raise ValueError(f"unknown objective {kind!r}")


def ranking_loss_grad(kind: str, logp_pos: float, logp_negs,
                      beta: float = 1.0) -> tuple[float, np.ndarray]:
    """Gradient of :func:`ranking_loss` w.r.t. (logp_pos, logp_negs)."""
    logp_negs = np.asarray(logp_negs, dtype=float)
    if kind == "listwise":
        scores = np.concatenate(([logp_pos], logp_negs))
        w = np.exp(scores - logsumexp(scores))
        return float(w[0] - 1.0), w[1:]
    if kind == "pointwise":
        if np.any(logp_negs == 0.0):
            raise ValueError("pointwise loss undefined for a negative with probability 1")
        # d/du [-log(1 - e^u)] = e^u / (1 - e^u)
        g_neg = np.exp(logp_negs - _log1mexp(logp_negs))
        return -1.0, g_neg
    if kind == "pairwise1":
        z = beta * (logp_pos - logp_negs)
        s = 1.0 / (1.0 + np.exp(z))  # sigmoid(-z)
        return float(-beta * np.sum(s)), beta * s
    if kind == "pairwise2":
        active = np.exp(logp_negs) > np.exp(logp_pos)
        g_neg = np.where(active, np.exp(logp_negs), 0.0)
        g_pos = -np.exp(logp_pos) * np.count_nonzero(active)
        return float(g_pos), g_neg
    raise ValueError(f"unknown objective {kind!r}")


def combined_objective(comp_logps, extra_pos_logps, alpha: float,
                       kind: str = "listwise", beta: float = 1.0) -> float:
    """Ranking loss plus the auxiliary positive-likelihood term.

    ``comp_logps`` holds one ``(logp_pos, logp_negs)`` pair per comparison
    sample; ``extra_pos_logps`` holds log-likelihoods of additional gold
    labels. The auxiliary term averages the negative log-likelihood over
    the union of comparison positives and the extra positives. Either
    batch may be empty, in which case its term contributes zero.
    """
    comp_logps = list(comp_logps)
    extra_pos_logps = list(extra_pos_logps)
    l1 = 0.0
    if comp_logps:
        l1 = float(np.mean([ranking_loss(kind, p, negs, beta) for p, negs in comp_logps]))
    pos_pool = [p for p, _ in comp_logps] + extra_pos_logps
    l2 = float(-np.mean(pos_pool)) if pos_pool else 0.0
    return l1 + alpha * l2
