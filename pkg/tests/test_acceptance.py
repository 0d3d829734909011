"""Acceptance gate: one test per criterion, each printing a PASS line.

Run with ``pytest tests/test_acceptance.py -v -s``. The toy end-to-end
criteria (7, 8, 11) train real models and take a couple of minutes
combined; everything else is analytic and instant.
"""

import math

import numpy as np
import pytest

from quadscorer.ai_annotator import AiAnnotationConfig, annotate_batch, cohen_kappa
from quadscorer.comparison import (adjudicate, build_annotation_tasks,
                                   finalize_dataset, merge_votes)
from quadscorer.losses import OBJECTIVES, ranking_loss, ranking_loss_grad
from quadscorer.model import TinyConditionalGenerator
from quadscorer.quads import (IMPLICIT, SENTIMENTS, LabelSequence, Quad, Review,
                              parse_label_sequence, serialize_quads)
from quadscorer.rerank import CandidateSet, oracle_rerank, quad_f1
from quadscorer.records import write_labeled
from quadscorer.scoring import ScoredSample, generate_candidates
from quadscorer.selftrain import (FilterConfig, audit_scores, confidence_filter,
                                  run_self_training, scorer_filter_window)
from quadscorer.toydata import ScriptedAnnotators, make_toy_corpus
from quadscorer.training import (TrainConfig, selection_accuracy,
                                 train_generator, train_scorer)
from tests.test_rerank import brute_force_micro_prf, random_quads


def report(number: int, description: str) -> None:
    print(f"ACCEPTANCE {number:02d} PASS  {description}")


def test_criterion_01_listwise_analytic_values():
    equal = ranking_loss("listwise", -1.0, [-1.0, -1.0, -1.0])
    assert abs(equal - math.log(4.0)) < 1e-9
    half = ranking_loss("listwise", math.log(0.5), [math.log(0.25), math.log(0.25)])
    assert abs(half - math.log(2.0)) < 1e-9
    report(1, "listwise loss equals ln4 / ln2 on the analytic cases (1e-9)")


def test_criterion_02_gradient_checks():
    h = 1e-6
    for kind in OBJECTIVES:
        rng = np.random.default_rng(2024)
        checked = 0
        while checked < 100:
            pos = float(-rng.uniform(0.05, 6.0))
            negs = -rng.uniform(0.05, 6.0, size=int(rng.integers(1, 5)))
            if kind == "pairwise2" and np.any(
                    np.abs(np.exp(negs) - np.exp(pos)) < 1e-3):
                continue
            beta = float(rng.uniform(0.5, 2.0))
            g_pos, g_negs = ranking_loss_grad(kind, pos, negs, beta)
            num_pos = (ranking_loss(kind, pos + h, negs, beta)
                       - ranking_loss(kind, pos - h, negs, beta)) / (2 * h)
            num_negs = []
            for i in range(len(negs)):
                up, down = negs.copy(), negs.copy()
                up[i] += h
                down[i] -= h
                num_negs.append((ranking_loss(kind, pos, up, beta)
                                 - ranking_loss(kind, pos, down, beta)) / (2 * h))
            scale = max(1e-8, abs(num_pos), float(np.max(np.abs(num_negs))))
            assert abs(g_pos - num_pos) / scale < 1e-4, kind
            assert float(np.max(np.abs(g_negs - np.array(num_negs)))) / scale < 1e-4, kind
            checked += 1
    report(2, "all four ranking losses match central differences (<1e-4, 100 inputs each)")


def test_criterion_03_template_round_trip():
    rng = np.random.default_rng(7)
    words = ["food", "quality", "pizza", "great", "laptop#general", "wine_list",
             "reasonably priced", "not bad"]
    for _ in range(1000):
        quads = []
        for _ in range(int(rng.integers(0, 4))):
            quads.append(Quad(
                aspect_term=(IMPLICIT if rng.random() < 0.2
                             else str(rng.choice(words))),
                aspect_category=str(rng.choice(words)),
                opinion_term=(IMPLICIT if rng.random() < 0.2
                              else str(rng.choice(words))),
                sentiment=str(rng.choice(SENTIMENTS)),
            ))
        parsed, dropped = parse_label_sequence(serialize_quads(quads))
        assert dropped == 0 and parsed == quads
    report(3, "1000 randomized quad sets round-trip exactly (incl. sentinels)")


def test_criterion_04_quad_f1_oracle_equivalence():
    rng = np.random.default_rng(12)
    for _ in range(100):
        ids = [f"r{i}" for i in range(int(rng.integers(1, 4)))]
        pred = {rid: random_quads(rng) for rid in ids}
        gold = {rid: random_quads(rng) for rid in ids}
        result = quad_f1(pred, gold)
        p, r, f1 = brute_force_micro_prf(pred, gold)
        assert (abs(result.precision - p) < 1e-9
                and abs(result.recall - r) < 1e-9
                and abs(result.f1 - f1) < 1e-9)
    gold = {"s": [Quad("pizza", "food quality", "great", "positive"),
                  Quad("staff", "service general", "rude", "negative")]}
    pred = {"s": [Quad("pizza", "food quality", "great", "positive"),
                  Quad("music", "ambience general", "loud", "negative")]}
    result = quad_f1(pred, gold)
    assert (result.precision, result.recall, result.f1) == (50.0, 50.0, 50.0)
    report(4, "quad_f1 matches the brute-force oracle; 2-gold/2-pred/1-hit = 50.0")


def _scored(rid, score, min_conf=0.9):
    return ScoredSample(
        review=Review(id=rid, text="the pizza was great"),
        label=LabelSequence.from_text("food quality | positive | pizza | great"),
        min_conf=min_conf, score=score)


def test_criterion_05_percentile_window():
    samples = [_scored(f"r{i}", score=1.0 - i / 100) for i in range(10)]
    kept = scorer_filter_window(samples, (0.1, 0.4))
    assert [s.review.id for s in kept] == ["r1", "r2", "r3"]

    rng = np.random.default_rng(0)
    for n in range(1, 101):
        lo, hi = sorted(rng.uniform(0, 1, size=2))
        if lo == hi:
            continue
        block = [_scored(f"r{i:03d}", float(rng.normal())) for i in range(n)]
        kept = scorer_filter_window(block, (lo, hi))
        assert len(kept) == math.ceil(hi * n) - math.ceil(lo * n)

    for _ in range(20):
        block = [_scored(f"r{i:03d}", float(rng.normal())) for i in range(40)]
        kept = scorer_filter_window(block, (0.25, 0.7))
        kept_ids = {s.review.id for s in kept}
        ranked = sorted(block, key=lambda s: (-s.score, s.review.id))
        above = [s.score for i, s in enumerate(ranked) if i / 40 < 0.25]
        below = [s.score for i, s in enumerate(ranked) if i / 40 >= 0.7]
        for s in kept:
            assert all(s.score <= a for a in above)
            assert all(s.score >= b for b in below)
        assert kept_ids == {s.review.id for i, s in enumerate(ranked)
                            if 0.25 <= i / 40 < 0.7}
    report(5, "window keeps ranks 2-4 at N=10, count = ceil(hi*N)-ceil(lo*N), "
              "boundaries monotone")


def test_criterion_06_confidence_boundary():
    kept = confidence_filter([_scored("a", 0.5, min_conf=0.70)], 0.7)
    assert len(kept) == 1
    dropped = confidence_filter([_scored("a", 0.5, min_conf=0.699999)], 0.7)
    assert dropped == []
    report(6, "confidence filter keeps min_conf 0.70 and drops 0.699999 at gamma1=0.7")


# -- toy end-to-end -----------------------------------------------------

TOY_EPOCHS = 20
TOY_LR = 0.02


@pytest.fixture(scope="session")
def toy_pipeline():
    corpus = make_toy_corpus(n_labeled=500, n_unlabeled=5000,
                             n_comparison=1000, n_test=400,
                             noise_rate=0.3, seed=0)
    vocab_texts = corpus.vocab_texts()

    def new_gen(seed):
        return TinyConditionalGenerator.from_corpus(vocab_texts, seed=seed)

    initial = new_gen(0)
    train_generator(initial, corpus.labeled, epochs=TOY_EPOCHS, lr=TOY_LR, seed=0)

    reviews = [r for r, _ in corpus.comparison_pool]
    gold = {r.id: y for r, y in corpus.comparison_pool}
    annotators = ScriptedAnnotators(gold=gold, error_rate=0.05, seed=1)
    resolved, by_task = [], {}
    for batch in build_annotation_tasks(reviews, initial, k=4, batch_size=200):
        for task in batch:
            by_task[task.task_id] = task.review
            res = merge_votes(task, annotators.vote_all(task))
            if res is None:
                res = adjudicate(task, annotators.adjudicator_vote(task))
            resolved.append(res)
    dataset = finalize_dataset(resolved, by_task, dev_reserve=200, seed=0)

    baseline = selection_accuracy(initial, dataset.dev)
    scorer = initial.clone()
    result = train_scorer(scorer, dataset, asqp_data=corpus.labeled,
                          config=TrainConfig(objective="listwise", alpha=1.0,
                                             batch_size=10, epochs=10,
                                             learning_rates=(0.02,), seed=0))
    return {"corpus": corpus, "new_gen": new_gen, "initial": initial,
            "scorer": scorer, "baseline": baseline,
            "scorer_dev_accuracy": result.best_dev_accuracy}


def _greedy_predictions(model, samples):
    preds, golds = {}, {}
    for review, gold in samples:
        cands = generate_candidates(model, review, 1)
        preds[review.id] = (list(cands[0].label.quads) if cands else [])
        golds[review.id] = list(gold.quads)
    return preds, golds


def test_criterion_07_toy_end_to_end(toy_pipeline):
    corpus = toy_pipeline["corpus"]
    new_gen = toy_pipeline["new_gen"]
    scorer = toy_pipeline["scorer"]

    # (a) the trained scorer beats the highest-confidence baseline
    baseline = toy_pipeline["baseline"]
    scorer_acc = toy_pipeline["scorer_dev_accuracy"]
    assert scorer_acc >= baseline + 5.0

    # (b) CS-filtered augmentation beats unfiltered, averaged over 3 seeds
    margins = []
    for seed in (0, 1, 2):
        def gen_trainer(samples, seed=seed):
            g = new_gen(seed)
            return train_generator(g, samples, epochs=TOY_EPOCHS, lr=TOY_LR,
                                   seed=seed)

        cfg_u = FilterConfig(gamma1=0.0, window=(0.0, 1.0), sample_n=700)
        cfg_f = FilterConfig(gamma1=0.6, window=(0.05, 0.70), sample_n=700)
        aug_u, _ = run_self_training(corpus.labeled, corpus.unlabeled,
                                     gen_trainer, scorer, cfg_u, seed=seed)
        aug_f, _ = run_self_training(corpus.labeled, corpus.unlabeled,
                                     gen_trainer, scorer, cfg_f, seed=seed)
        f1 = {}
        for arm, aug in (("u", aug_u), ("f", aug_f)):
            model = new_gen(seed + 100)
            train_generator(model, aug, epochs=TOY_EPOCHS, lr=TOY_LR,
                            seed=seed + 100)
            f1[arm] = quad_f1(*_greedy_predictions(model, corpus.test)).f1
        margins.append(f1["f"] - f1["u"])
    assert float(np.mean(margins)) > 0.0
    report(7, f"toy end-to-end: scorer dev acc {scorer_acc:.1f} vs baseline "
              f"{baseline:.1f} (>=5 pts); filtering margin "
              f"{float(np.mean(margins)):+.2f} F1 over 3 seeds")


def test_criterion_08_oracle_rerank_dominance(toy_pipeline):
    corpus = toy_pipeline["corpus"]
    initial = toy_pipeline["initial"]
    sets = []
    for review, gold in corpus.test[:200]:
        candidates = generate_candidates(initial, review, 4)
        if candidates:
            sets.append(CandidateSet(review=review, candidates=tuple(candidates),
                                     gold=tuple(gold.quads)))
    assert len(sets) > 100

    def corpus_f1(pick):
        preds = {cs.review.id: list(pick(cs).label.quads) for cs in sets}
        golds = {cs.review.id: list(cs.gold) for cs in sets}
        return quad_f1(preds, golds).f1

    oracle_f1 = corpus_f1(oracle_rerank)
    rank1_f1 = corpus_f1(lambda cs: cs.candidates[0])
    assert oracle_f1 >= rank1_f1
    differs = [cs for cs in sets if oracle_rerank(cs) != cs.candidates[0]]
    assert differs, "toy collection should contain oracle improvements"
    assert oracle_f1 > rank1_f1

    agree = [cs for cs in sets if oracle_rerank(cs) == cs.candidates[0]]
    preds = {cs.review.id: list(oracle_rerank(cs).label.quads) for cs in agree}
    golds = {cs.review.id: list(cs.gold) for cs in agree}
    rank1_preds = {cs.review.id: list(cs.candidates[0].label.quads) for cs in agree}
    assert quad_f1(preds, golds).f1 == quad_f1(rank1_preds, golds).f1
    report(8, f"oracle rerank F1 {oracle_f1:.2f} >= rank-1 {rank1_f1:.2f}; "
              "equality exactly when rank-1 is oracle-best everywhere")


def test_criterion_09_cohen_kappa():
    labels = [(i % 6) + 1 for i in range(60)]
    assert cohen_kappa(labels, list(labels)) == 1.0

    rng = np.random.default_rng(99)
    a = list(rng.integers(1, 5, size=10000))
    b = list(rng.integers(1, 5, size=10000))
    assert abs(cohen_kappa(a, b)) < 0.1

    def oracle(x, y):
        cats = sorted(set(x) | set(y))
        n = len(x)
        p_o = sum(1 for u, v in zip(x, y) if u == v) / n
        p_e = sum((sum(1 for u in x if u == c) / n)
                  * (sum(1 for v in y if v == c) / n) for c in cats)
        return 1.0 if p_e == 1.0 else (p_o - p_e) / (1.0 - p_e)

    for _ in range(20):
        n = int(rng.integers(4, 30))
        x = list(rng.integers(1, 6, size=n))
        y = list(rng.integers(1, 6, size=n))
        assert abs(cohen_kappa(x, y) - oracle(x, y)) < 1e-12
    report(9, "kappa: 1.0 on perfect agreement, |k|<0.1 for random labelers, "
              "matches contingency-table oracle")


def test_criterion_10_audit_proportions():
    rng = np.random.default_rng(5)
    score_sets = [
        [(f"r{i}", float(rng.uniform())) for i in range(200)],
        [(f"r{i}", 0.0999999) for i in range(50)],           # adversarial: all equal
        [(f"r{i}", float(rng.choice([0.1, 0.3, 0.5, 0.7, 0.9])))
         for i in range(100)],                               # exactly on thresholds
    ]
    for scores in score_sets:
        proportions = audit_scores(scores).proportions
        ordered = [proportions[t] for t in sorted(proportions)]
        assert ordered == sorted(ordered)
    grid = audit_scores([(f"r{i:03d}", i / 100) for i in range(100)])
    assert grid.proportions[0.5] == 0.50
    report(10, "audit proportions non-decreasing on random/adversarial sets; "
               "i/100 grid reports 0.50 below 0.5")


def test_criterion_11_self_training_reproducibility(tmp_path):
    corpus = make_toy_corpus(n_labeled=150, n_unlabeled=600, n_comparison=10,
                             n_test=10, noise_rate=0.3, seed=4)
    vocab_texts = corpus.vocab_texts()

    outputs = []
    for run in range(2):
        def gen_trainer(samples):
            g = TinyConditionalGenerator.from_corpus(vocab_texts, seed=11)
            return train_generator(g, samples, epochs=6, lr=TOY_LR, seed=11)

        scorer = TinyConditionalGenerator.from_corpus(vocab_texts, seed=12)
        train_generator(scorer, corpus.labeled, epochs=6, lr=TOY_LR, seed=12)
        augmented, _ = run_self_training(
            corpus.labeled, corpus.unlabeled, gen_trainer, scorer,
            FilterConfig(gamma1=0.5, window=(0.05, 0.8), sample_n=200), seed=13)
        path = tmp_path / f"augmented-{run}.jsonl"
        write_labeled(path, augmented)
        outputs.append(path.read_bytes())
    assert outputs[0] == outputs[1]
    report(11, "fixed-seed self-training produces byte-identical augmented datasets")


def test_criterion_12_ai_annotation_gates():
    from tests.test_ai_annotator import ScriptedClient, line, make_task

    tasks = [make_task("t1"), make_task("t2"), make_task("t3")]
    pass1 = "\n".join([line(1, 2, 5), line(2, 2, 5), line(3, 1, 4)])
    pass2 = "\n".join([line(1, 2, 5), line(2, 3, 5), line(3, 1, 5)])
    kept, rejected = annotate_batch(ScriptedClient([pass1, pass2]), tasks,
                                    AiAnnotationConfig())
    assert [j.task_id for j in kept] == ["t1"]
    assert kept[0].option == 2 and kept[0].confidence == 5
    assert rejected == 2
    report(12, "AI annotation keeps only pass-consistent confidence-5 judgments")
