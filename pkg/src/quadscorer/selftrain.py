"""Self-training with two-stage pseudo-label filtering.

The pipeline trains an initial model on gold data, pseudo-labels
unlabeled reviews, and keeps only samples that (1) clear a min-token
confidence threshold under the initial model and (2) land inside a
percentile window of scorer match scores: the lowest-scoring samples are
mislabeled, while the very top is dominated by trivially easy sentences.
The same scorer doubles as a label-quality auditor for gold datasets.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .quads import LabelSequence, Review
from .scoring import (DEFAULT_SCORE_MODE, GeneratorHandle, ScoredSample,
                      generate_candidates, match_score, token_probabilities)

#: Scorer-window defaults per domain: top 10-40% for restaurant reviews,
#: top 20-50% for laptop reviews.
RESTAURANT_WINDOW = (0.10, 0.40)
LAPTOP_WINDOW = (0.20, 0.50)

#: Augmentation sizes beyond this hurt more than they help.
SAMPLE_N_WARN_LIMIT = 20000


@dataclass(frozen=True)
class FilterConfig:
    """Thresholds of the two-stage filter plus the sampling budget."""

    gamma1: float = 0.7
    window: tuple[float, float] = RESTAURANT_WINDOW
    sample_n: int = 10000
    score_mode: str = DEFAULT_SCORE_MODE

    def __post_init__(self) -> None:
        if not 0.0 <= self.gamma1 <= 1.0:
            raise ValueError("gamma1 must be in [0, 1] (0 disables the filter)")
        lo, hi = self.window
        if not (0.0 <= lo < hi <= 1.0):
            raise ValueError("window must satisfy 0 <= lo < hi <= 1")
        if self.sample_n > SAMPLE_N_WARN_LIMIT:
            warnings.warn(
                f"sample_n={self.sample_n} exceeds {SAMPLE_N_WARN_LIMIT}; "
                "augmentation quality degrades past that size",
                stacklevel=2,
            )


def confidence_filter(samples, gamma1: float) -> list[ScoredSample]:
    """Keep samples whose min-token confidence reaches ``gamma1``.

    The boundary is inclusive: a sample at exactly ``gamma1`` survives.
    """
    return [s for s in samples if s.min_conf >= gamma1]


def scorer_filter_window(samples, window: tuple[float, float]) -> list[ScoredSample]:
    """Keep samples whose score rank falls inside a percentile window.

    Samples are sorted by score descending (ties broken by review id so
    the cut is deterministic); the sample at 1-based rank ``r`` of ``N``
    sits at fraction ``(r - 1) / N`` and is kept iff ``lo <= f < hi``.
    """
    lo, hi = window
    ranked = sorted(samples, key=lambda s: (-s.score, s.review.id))
    n = len(ranked)
    return [s for r, s in enumerate(ranked) if lo <= r / n < hi]


@dataclass
class StageReport:
    """Sample counts after each pipeline stage, in execution order."""

    counts: list[tuple[str, int]] = field(default_factory=list)

    def add(self, stage: str, count: int) -> None:
        self.counts.append((stage, count))

    def get(self, stage: str) -> int:
        for name, count in self.counts:
            if name == stage:
                return count
        raise KeyError(stage)

    def write(self, path) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(
            json.dumps({"stages": [{"stage": s, "count": c} for s, c in self.counts]},
                       indent=2) + "\n",
            encoding="utf-8",
        )


def pseudo_label(gen: GeneratorHandle, reviews) -> list[tuple[Review, LabelSequence]]:
    """Top-beam labels for unlabeled reviews; unusable labels dropped.

    A pseudo-label is unusable when it parses to no quads or contains
    malformed segments, since it cannot contribute training quads.
    """
    out = []
    for review in reviews:
        candidates = generate_candidates(gen, review, k=1)
        if not candidates:
            continue
        label = candidates[0].label
        if label.quads and label.dropped == 0:
            out.append((review, label))
    return out


def score_pseudo_labels(initial: GeneratorHandle, scorer: GeneratorHandle,
                        samples, score_mode: str = DEFAULT_SCORE_MODE
                        ) -> list[ScoredSample]:
    """Attach initial-model min confidence and scorer match score."""
    out = []
    for review, label in samples:
        min_conf = token_probabilities(initial, review, label).min()
        score = match_score(token_probabilities(scorer, review, label), score_mode)
        out.append(ScoredSample(review=review, label=label, min_conf=min_conf,
                                score=score, mode=score_mode))
    return out


def run_self_training(labeled, unlabeled, gen_trainer, scorer: GeneratorHandle,
                      config: FilterConfig = FilterConfig(), seed: int = 0,
                      report_path=None):
    """Full self-training round; returns (augmented dataset, stage report).

    Steps: train the initial model on ``labeled`` via ``gen_trainer``,
    pseudo-label ``unlabeled``, apply the confidence filter, apply the
    scorer window filter, sample at most ``config.sample_n`` survivors
    with a seeded generator, and merge them with the gold data. The
    report records counts for every completed stage even when a later
    stage fails.
    """
    labeled = list(labeled)
    unlabeled = list(unlabeled)
    if not labeled:
        raise ValueError("labeled dataset must be non-empty")
    report = StageReport()
    try:
        report.add("labeled", len(labeled))
        report.add("unlabeled", len(unlabeled))
        initial = gen_trainer(labeled)
        pseudo = pseudo_label(initial, unlabeled)
        report.add("pseudo_labeled", len(pseudo))
        scored = score_pseudo_labels(initial, scorer, pseudo, config.score_mode)
        confident = confidence_filter(scored, config.gamma1)
        report.add("confidence_kept", len(confident))
        windowed = scorer_filter_window(confident, config.window)
        report.add("window_kept", len(windowed))
        rng = np.random.default_rng(seed)
        take = min(config.sample_n, len(windowed))
        picks = rng.choice(len(windowed), size=take, replace=False) if windowed else []
        sampled = [windowed[i] for i in sorted(picks)]
        report.add("sampled", len(sampled))
        augmented = labeled + [(s.review, s.label) for s in sampled]
        report.add("augmented", len(augmented))
        return augmented, report
    finally:
        if report_path is not None:
            report.write(report_path)


# -- label-quality audit -------------------------------------------------

AUDIT_THRESHOLDS = (0.1, 0.3, 0.5, 0.7, 0.9)
REMOVAL_RATIOS = (2, 4, 6, 8, 10)


@dataclass
class AuditReport:
    """Match-score statistics of a gold dataset under a trained scorer."""

    scores: list[tuple[str, float]]
    proportions: dict[float, float]
    removal_candidates: dict[int, list[str]]

    def write(self, path) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        payload = {
            "proportions_below": {str(t): p for t, p in self.proportions.items()},
            "removal_candidates": {f"{r}%": ids
                                   for r, ids in self.removal_candidates.items()},
            "scores": [{"review_id": rid, "score": s} for rid, s in self.scores],
        }
        path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")


def audit_scores(scores: list[tuple[str, float]],
                 thresholds=AUDIT_THRESHOLDS,
                 removal_ratios=REMOVAL_RATIOS) -> AuditReport:
    """Audit statistics over precomputed (review_id, score) pairs."""
    n = len(scores)
    if n == 0:
        raise ValueError("nothing to audit")
    values = np.array([s for _, s in scores])
    proportions = {t: float(np.count_nonzero(values < t)) / n for t in thresholds}
    by_score = sorted(scores, key=lambda item: (item[1], item[0]))
    removal = {r: [rid for rid, _ in by_score[: math.floor(n * r / 100)]]
               for r in removal_ratios}
    return AuditReport(scores=scores, proportions=proportions,
                       removal_candidates=removal)


def audit_labels(scorer: GeneratorHandle, labeled,
                 score_mode: str = DEFAULT_SCORE_MODE,
                 thresholds=AUDIT_THRESHOLDS,
                 removal_ratios=REMOVAL_RATIOS) -> AuditReport:
    """Score every gold (review, label) pair and report quality stats."""
    scores = [
        (review.id,
         match_score(token_probabilities(scorer, review, label), score_mode))
        for review, label in labeled
    ]
    return audit_scores(scores, thresholds, removal_ratios)
