"""Reranking beam candidates and quad-level evaluation.

The trained scorer rescores the candidate labels of each review and the
argmax becomes the final prediction. An oracle variant picks the
candidate with the best sentence-level F1 against gold, giving the
upper bound a perfect reranker could reach. Corpus metrics are exact
quad matches, micro-averaged.
"""

from __future__ import annotations

from dataclasses import dataclass

from .quads import LabelSequence, Quad, Review
from .scoring import (DEFAULT_SCORE_MODE, Candidate, GeneratorHandle,
                      match_score, token_probabilities)


@dataclass(frozen=True)
class CandidateSet:
    """Beam candidates for one review, best generator confidence first."""

    review: Review
    candidates: tuple[Candidate, ...]
    gold: tuple[Quad, ...] | None = None

    def __post_init__(self) -> None:
        if not self.candidates:
            raise ValueError(f"no candidates for review {self.review.id!r}")
        confidences = [c.confidence for c in self.candidates]
        if any(a < b for a, b in zip(confidences, confidences[1:])):
            raise ValueError("candidates must be ordered by descending confidence")


@dataclass(frozen=True)
class EvalResult:
    """Micro-averaged exact-match scores, in percent."""

    precision: float
    recall: float
    f1: float
    tp: int
    pred_count: int
    gold_count: int

    def format(self) -> str:
        return (f"precision {self.precision:.2f}  recall {self.recall:.2f}  "
                f"f1 {self.f1:.2f}  (tp {self.tp} / pred {self.pred_count} "
                f"/ gold {self.gold_count})")


def normalize_quad(quad: Quad) -> tuple[str, str, str, str]:
    """Comparison key: terms are trimmed and lowercased, the category and
    sentiment are kept verbatim."""
    return (
        quad.aspect_category,
        quad.sentiment,
        quad.aspect_term.strip().lower(),
        quad.opinion_term.strip().lower(),
    )


def quad_key_set(quads) -> set[tuple[str, str, str, str]]:
    return {normalize_quad(q) for q in quads}


def _prf(tp: int, pred: int, gold: int) -> tuple[float, float, float]:
    p = 100.0 * tp / pred if pred else 0.0
    r = 100.0 * tp / gold if gold else 0.0
    f1 = 2 * p * r / (p + r) if p + r > 0 else 0.0
    return p, r, f1


def sentence_f1(pred_quads, gold_quads) -> float:
    """Exact-match F1 for one sentence; two empty sides count as perfect."""
    pred, gold = quad_key_set(pred_quads), quad_key_set(gold_quads)
    if not pred and not gold:
        return 100.0
    return _prf(len(pred & gold), len(pred), len(gold))[2]


def _argmax_first(values) -> int:
    """Index of the strict maximum; earlier index wins ties."""
    best, best_i = None, 0
    for i, v in enumerate(values):
        if best is None or v > best:
            best, best_i = v, i
    return best_i


def rerank(cs: CandidateSet, scorer: GeneratorHandle,
           score_mode: str = DEFAULT_SCORE_MODE) -> Candidate:
    """Scorer's pick among the candidates; confidence rank breaks ties."""
    scores = [match_score(token_probabilities(scorer, cs.review, c.label), score_mode)
              for c in cs.candidates]
    return cs.candidates[_argmax_first(scores)]


def oracle_rerank(cs: CandidateSet) -> Candidate:
    """Perfect-reranker pick: best sentence F1 against the gold quads."""
    if cs.gold is None:
        raise ValueError(f"review {cs.review.id!r} has no gold quads")
    f1s = [sentence_f1(c.label.quads, cs.gold) for c in cs.candidates]
    return cs.candidates[_argmax_first(f1s)]


def rank_distribution(candidate_sets, scorer: GeneratorHandle,
                      score_mode: str = DEFAULT_SCORE_MODE, k: int = 4
                      ) -> tuple[list[float], list[float]]:
    """Where the best and the preferred candidates sit among the beams.

    Returns two lists over confidence ranks 1..k, each summing to 100:
    the rank of the oracle-best candidate, and the rank the scorer
    prefers.
    """
    candidate_sets = list(candidate_sets)
    if not candidate_sets:
        raise ValueError("no candidate sets")
    best_counts = [0] * k
    preferred_counts = [0] * k
    for cs in candidate_sets:
        best = oracle_rerank(cs)
        preferred = rerank(cs, scorer, score_mode)
        best_counts[cs.candidates.index(best)] += 1
        preferred_counts[cs.candidates.index(preferred)] += 1
    n = len(candidate_sets)
    return ([100.0 * c / n for c in best_counts],
            [100.0 * c / n for c in preferred_counts])


def quad_f1(pred_sets: dict[str, list[Quad]], gold_sets: dict[str, list[Quad]]
            ) -> EvalResult:
    """Micro precision/recall/F1 of exact quad matches over a corpus.

    ``pred_sets`` and ``gold_sets`` map review ids to quad lists and must
    cover the same reviews. Duplicate quads within a sentence collapse
    to a set before counting.
    """
    if set(pred_sets) != set(gold_sets):
        missing = set(gold_sets) ^ set(pred_sets)
        raise ValueError(f"pred/gold review ids differ, e.g. {sorted(missing)[:3]}")
    tp = pred_count = gold_count = 0
    for rid in gold_sets:
        pred = quad_key_set(pred_sets[rid])
        gold = quad_key_set(gold_sets[rid])
        tp += len(pred & gold)
        pred_count += len(pred)
        gold_count += len(gold)
    p, r, f1 = _prf(tp, pred_count, gold_count)
    return EvalResult(precision=p, recall=r, f1=f1, tp=tp,
                      pred_count=pred_count, gold_count=gold_count)


def evaluate_predictions(preds: dict[str, LabelSequence],
                         golds: dict[str, LabelSequence]) -> EvalResult:
    """Convenience wrapper comparing parsed label sequences."""
    return quad_f1({rid: list(label.quads) for rid, label in preds.items()},
                   {rid: list(label.quads) for rid, label in golds.items()})
