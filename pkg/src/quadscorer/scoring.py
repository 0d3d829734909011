"""Scoring labels with a conditional sequence generator.

A generator handle is anything that can (a) report per-token
probabilities of a given label under teacher forcing and (b) produce
k-best candidate labels via beam search. Match scores are derived from
the token probabilities in log space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Protocol, runtime_checkable

from .quads import LabelSequence, Review

#: Supported reductions of token probabilities into one match score.
SCORE_MODES = ("product", "geometric_mean", "sum_log")

#: Length-normalized scores keep filtering thresholds comparable across
#: labels of different lengths, so this is the default everywhere except
#: ranking-loss training (which always uses raw sum_log likelihoods).
DEFAULT_SCORE_MODE = "geometric_mean"


class GeneratorUnavailableError(RuntimeError):
    """The handle's backing model cannot be reached."""


@runtime_checkable
class GeneratorHandle(Protocol):
    """Conditional sequence generator seen by scoring and training."""

    def token_probabilities(self, review: Review, label_text: str) -> list[float]:
        """Per-token probabilities of ``label_text`` under teacher forcing."""
        ...

    def generate(self, review: Review, k: int) -> list[tuple[str, float]]:
        """Up to ``k`` (label_text, confidence) pairs, best first."""
        ...


@dataclass(frozen=True)
class TokenProbs:
    """Ordered per-token probabilities for one (review, label) pair."""

    probs: tuple[float, ...]

    def __post_init__(self) -> None:
        if not self.probs:
            raise ValueError("token probabilities must be non-empty")
        if any(p <= 0.0 or p > 1.0 for p in self.probs):
            raise ValueError("token probabilities must lie in (0, 1]")

    def min(self) -> float:
        return min(self.probs)

    def __len__(self) -> int:
        return len(self.probs)


@dataclass(frozen=True)
class ScoredSample:
    """A pseudo-labeled review with its confidence and match score."""

    review: Review
    label: LabelSequence
    min_conf: float
    score: float
    mode: str = DEFAULT_SCORE_MODE


@dataclass(frozen=True)
class Candidate:
    """One beam-search candidate with the generator's confidence."""

    label: LabelSequence
    confidence: float


def token_probabilities(gen: GeneratorHandle, review: Review,
                        label: LabelSequence | str) -> TokenProbs:
    """Teacher-forced token probabilities of ``label`` given ``review``."""
    text = label.text if isinstance(label, LabelSequence) else label
    if not text.strip():
        raise ValueError("label text must be non-empty")
    return TokenProbs(probs=tuple(float(p) for p in gen.token_probabilities(review, text)))


def match_score(tp: TokenProbs, mode: str = DEFAULT_SCORE_MODE) -> float:
    """Reduce token probabilities to a single match score.

    All modes run in log space; ``product`` and ``geometric_mean`` map
    back to probability scale at the end.
    """
    log_sum = sum(math.log(p) for p in tp.probs)
    if mode == "sum_log":
        return log_sum
    if mode == "product":
        return math.exp(log_sum)
    if mode == "geometric_mean":
        return math.exp(log_sum / len(tp))
    raise ValueError(f"unknown score mode {mode!r}")


def score_sample(gen: GeneratorHandle, review: Review, label: LabelSequence,
                 mode: str = DEFAULT_SCORE_MODE) -> ScoredSample:
    tp = token_probabilities(gen, review, label)
    return ScoredSample(review=review, label=label, min_conf=tp.min(),
                        score=match_score(tp, mode), mode=mode)


def generate_candidates(gen: GeneratorHandle, review: Review, k: int) -> list[Candidate]:
    """K-best labels for a review, deduplicated by parsed quad set.

    Beams that serialize to the same quad set are collapsed onto the
    higher-confidence one, so fewer than ``k`` candidates come back when
    beams agree semantically.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    raw = gen.generate(review, k)
    candidates: list[Candidate] = []
    seen: set[frozenset] = set()
    for text, confidence in raw:
        if not text.strip():
            continue
        label = LabelSequence.from_text(text)
        key = label.quad_set()
        if key in seen:
            continue
        seen.add(key)
        candidates.append(Candidate(label=label, confidence=float(confidence)))
    candidates.sort(key=lambda c: -c.confidence)
    return candidates[:k]
