import numpy as np
import pytest

from quadscorer.quads import LabelSequence, Quad, Review
from quadscorer.rerank import (CandidateSet, oracle_rerank, quad_f1,
                               rank_distribution, rerank, sentence_f1)
from quadscorer.scoring import Candidate

REVIEW = Review(id="r1", text="the pizza was great")

TEXTS = [
    "food quality | positive | pizza | great",
    "food quality | negative | pizza | bland",
    "service general | positive | staff | great",
    "ambience general | negative | music | noisy",
]


def make_set(texts=TEXTS, gold_text=None, rid="r1"):
    candidates = tuple(
        Candidate(label=LabelSequence.from_text(t), confidence=-float(i))
        for i, t in enumerate(texts))
    gold = None
    if gold_text is not None:
        gold = tuple(LabelSequence.from_text(gold_text).quads)
    return CandidateSet(review=Review(id=rid, text=REVIEW.text),
                        candidates=candidates, gold=gold)


class MapScorer:
    """Scores labels from a lookup; geometric mean equals the raw value."""

    def __init__(self, scores):
        self.scores = scores

    def token_probabilities(self, review, label_text):
        return [self.scores[label_text]] * len(label_text.split())

    def generate(self, review, k):
        return []


class TestRerank:
    def test_single_candidate_is_identity(self):
        cs = make_set(TEXTS[:1], gold_text=TEXTS[0])
        chosen = rerank(cs, MapScorer({TEXTS[0]: 0.4}))
        assert chosen == cs.candidates[0]

    def test_argmax(self):
        scorer = MapScorer(dict(zip(TEXTS, (0.2, 0.9, 0.1, 0.1))))
        chosen = rerank(make_set(), scorer)
        assert chosen.label.text == TEXTS[1]

    def test_ties_resolve_to_highest_confidence(self):
        scorer = MapScorer({t: 0.5 for t in TEXTS})
        chosen = rerank(make_set(), scorer)
        assert chosen == make_set().candidates[0]

    def test_empty_candidates_rejected(self):
        with pytest.raises(ValueError):
            CandidateSet(review=REVIEW, candidates=())

    def test_misordered_confidences_rejected(self):
        candidates = (
            Candidate(label=LabelSequence.from_text(TEXTS[0]), confidence=-2.0),
            Candidate(label=LabelSequence.from_text(TEXTS[1]), confidence=-1.0),
        )
        with pytest.raises(ValueError):
            CandidateSet(review=REVIEW, candidates=candidates)


class TestOracle:
    def test_exact_match_candidate_wins(self):
        cs = make_set(gold_text=TEXTS[2])
        chosen = oracle_rerank(cs)
        assert chosen.label.text == TEXTS[2]
        assert sentence_f1(chosen.label.quads, cs.gold) == 100.0

    def test_oracle_never_below_any_candidate(self):
        rng = np.random.default_rng(4)
        for _ in range(50):
            texts = list(rng.permutation(TEXTS))
            gold = str(rng.choice(TEXTS))
            cs = make_set(texts, gold_text=gold)
            best = oracle_rerank(cs)
            best_f1 = sentence_f1(best.label.quads, cs.gold)
            for c in cs.candidates:
                assert best_f1 >= sentence_f1(c.label.quads, cs.gold)

    def test_missing_gold_rejected(self):
        with pytest.raises(ValueError):
            oracle_rerank(make_set())

    def test_corpus_dominance_and_equality(self):
        # collection A: rank 1 is oracle-best everywhere -> equality
        sets_a = [make_set(gold_text=TEXTS[0], rid=f"a{i}") for i in range(5)]
        # collection B: the oracle-best candidate sits at rank 3 somewhere
        sets_b = sets_a + [make_set(gold_text=TEXTS[2], rid="b0")]
        for sets, expect_equal in ((sets_a, True), (sets_b, False)):
            oracle_pred = {cs.review.id: list(oracle_rerank(cs).label.quads)
                           for cs in sets}
            rank1_pred = {cs.review.id: list(cs.candidates[0].label.quads)
                          for cs in sets}
            gold = {cs.review.id: list(cs.gold) for cs in sets}
            f1_oracle = quad_f1(oracle_pred, gold).f1
            f1_rank1 = quad_f1(rank1_pred, gold).f1
            assert f1_oracle >= f1_rank1
            assert (f1_oracle == f1_rank1) == expect_equal


class TestRankDistribution:
    def test_confidence_scorer_always_prefers_rank_one(self):
        # score proportional to the stored confidence order
        scorer = MapScorer(dict(zip(TEXTS, (0.9, 0.7, 0.5, 0.3))))
        sets = [make_set(gold_text=TEXTS[1], rid=f"r{i}") for i in range(10)]
        best, preferred = rank_distribution(sets, scorer)
        assert preferred == [100.0, 0.0, 0.0, 0.0]
        assert best == [0.0, 100.0, 0.0, 0.0]

    def test_rows_sum_to_hundred(self):
        scorer = MapScorer(dict(zip(TEXTS, (0.9, 0.7, 0.5, 0.3))))
        sets = [make_set(gold_text=str(np.random.default_rng(i).choice(TEXTS)),
                         rid=f"r{i}") for i in range(7)]
        best, preferred = rank_distribution(sets, scorer)
        assert sum(best) == pytest.approx(100.0, abs=1e-9)
        assert sum(preferred) == pytest.approx(100.0, abs=1e-9)

    def test_uniform_random_scorer_is_near_uniform(self):
        class RandomScorer:
            def __init__(self, seed):
                self.rng = np.random.default_rng(seed)

            def token_probabilities(self, review, label_text):
                return [float(self.rng.uniform(0.05, 1.0))] * 2

            def generate(self, review, k):
                return []

        sets = [make_set(gold_text=TEXTS[0], rid=f"r{i}") for i in range(10000)]
        _, preferred = rank_distribution(sets, RandomScorer(seed=0))
        for pct in preferred:
            assert abs(pct - 25.0) < 2.0


def brute_force_micro_prf(pred_sets, gold_sets):
    """Independent oracle: nested-loop matching with inline normalization."""
    def norm(q):
        return (q.aspect_category, q.sentiment,
                q.aspect_term.strip().lower(), q.opinion_term.strip().lower())

    def dedup(quads):
        out = []
        for q in quads:
            if not any(norm(q) == norm(other) for other in out):
                out.append(q)
        return out

    tp = pred_n = gold_n = 0
    for rid in gold_sets:
        pred = dedup(pred_sets[rid])
        gold = dedup(gold_sets[rid])
        pred_n += len(pred)
        gold_n += len(gold)
        for p in pred:
            if any(norm(p) == norm(g) for g in gold):
                tp += 1
    precision = 100.0 * tp / pred_n if pred_n else 0.0
    recall = 100.0 * tp / gold_n if gold_n else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return precision, recall, f1


def random_quads(rng, max_n=5):
    cats = ["food quality", "service general", "ambience general"]
    terms = ["pizza", "staff", "music", "wine"]
    sentiments = ["positive", "negative", "neutral"]
    quads = []
    for _ in range(int(rng.integers(0, max_n + 1))):
        term = str(rng.choice(terms))
        opinion = str(rng.choice(terms))
        if rng.random() < 0.3:
            term = " " + term.upper()  # normalization must absorb this
        quads.append(Quad(term, str(rng.choice(cats)), opinion,
                          str(rng.choice(sentiments))))
    return quads


class TestQuadF1:
    def test_perfect_predictions(self):
        gold = {"r1": list(LabelSequence.from_text(TEXTS[0]).quads)}
        result = quad_f1(gold, gold)
        assert (result.precision, result.recall, result.f1) == (100.0, 100.0, 100.0)

    def test_two_gold_two_pred_one_correct(self):
        gold = {"r1": [Quad("pizza", "food quality", "great", "positive"),
                       Quad("staff", "service general", "rude", "negative")]}
        pred = {"r1": [Quad("pizza", "food quality", "great", "positive"),
                       Quad("music", "ambience general", "loud", "negative")]}
        result = quad_f1(pred, gold)
        assert result.precision == pytest.approx(50.0)
        assert result.recall == pytest.approx(50.0)
        assert result.f1 == pytest.approx(50.0)

    def test_empty_pred_nonempty_gold(self):
        gold = {"r1": [Quad("pizza", "food quality", "great", "positive")]}
        result = quad_f1({"r1": []}, gold)
        assert (result.precision, result.recall, result.f1) == (0.0, 0.0, 0.0)

    def test_duplicates_collapse(self):
        q = Quad("pizza", "food quality", "great", "positive")
        result = quad_f1({"r1": [q, q]}, {"r1": [q]})
        assert result.pred_count == 1 and result.f1 == 100.0

    def test_terms_lowercased_categories_verbatim(self):
        gold = {"r1": [Quad("pizza", "food quality", "great", "positive")]}
        pred_ok = {"r1": [Quad(" Pizza", "food quality", "GREAT ", "positive")]}
        pred_bad = {"r1": [Quad("pizza", "Food Quality", "great", "positive")]}
        assert quad_f1(pred_ok, gold).f1 == 100.0
        assert quad_f1(pred_bad, gold).f1 == 0.0

    def test_swap_exchanges_precision_and_recall(self):
        rng = np.random.default_rng(9)
        for _ in range(20):
            pred = {"r1": random_quads(rng), "r2": random_quads(rng)}
            gold = {"r1": random_quads(rng), "r2": random_quads(rng)}
            f = quad_f1(pred, gold)
            b = quad_f1(gold, pred)
            assert f.precision == pytest.approx(b.recall)
            assert f.recall == pytest.approx(b.precision)
            assert f.f1 == pytest.approx(b.f1)

    def test_matches_brute_force_oracle(self):
        rng = np.random.default_rng(12)
        for _ in range(100):
            ids = [f"r{i}" for i in range(int(rng.integers(1, 4)))]
            pred = {rid: random_quads(rng) for rid in ids}
            gold = {rid: random_quads(rng) for rid in ids}
            result = quad_f1(pred, gold)
            p, r, f1 = brute_force_micro_prf(pred, gold)
            assert result.precision == pytest.approx(p, abs=1e-9)
            assert result.recall == pytest.approx(r, abs=1e-9)
            assert result.f1 == pytest.approx(f1, abs=1e-9)

    def test_id_mismatch_rejected(self):
        with pytest.raises(ValueError):
            quad_f1({"r1": []}, {"r2": []})

    def test_report_precision_two_decimals(self):
        gold = {"r1": [Quad("pizza", "food quality", "great", "positive"),
                       Quad("staff", "service general", "rude", "negative"),
                       Quad("music", "ambience general", "loud", "negative")]}
        pred = {"r1": gold["r1"][:1]}
        text = quad_f1(pred, gold).format()
        assert "precision 100.00" in text and "recall 33.33" in text
