"""Reranking beam candidates with the scorer.

The generator proposes four candidate labels per review; the scorer
picks one. A perfect reranker (oracle on gold sentence F1) bounds how
much any reranker could gain, and the rank-distribution table shows
where the best and the preferred candidates sit among the beams.
"""

import time

from quadscorer import (CandidateSet, TinyConditionalGenerator, TrainConfig,
                        adjudicate, build_annotation_tasks, finalize_dataset,
                        generate_candidates, merge_votes, oracle_rerank,
                        quad_f1, rank_distribution, rerank, train_generator,
                        train_scorer)
from quadscorer.toydata import ScriptedAnnotators, make_toy_corpus

t0 = time.time()
corpus = make_toy_corpus(seed=0)
initial = TinyConditionalGenerator.from_corpus(corpus.vocab_texts(), seed=0)
train_generator(initial, corpus.labeled, epochs=20, seed=0)

gold = {r.id: y for r, y in corpus.comparison_pool}
annotators = ScriptedAnnotators(gold=gold, error_rate=0.05, seed=1)
resolved, by_task = [], {}
for batch in build_annotation_tasks([r for r, _ in corpus.comparison_pool],
                                    initial, k=4, batch_size=200):
    for task in batch:
        by_task[task.task_id] = task.review
        outcome = merge_votes(task, annotators.vote_all(task))
        resolved.append(outcome if outcome is not None
                        else adjudicate(task, annotators.adjudicator_vote(task)))
scorer = initial.clone()
train_scorer(scorer, finalize_dataset(resolved, by_task, dev_reserve=200, seed=0),
             asqp_data=corpus.labeled, config=TrainConfig(seed=0))
print(f"[{time.time()-t0:5.1f}s] models ready")

sets = []
for review, label in corpus.test:
    candidates = generate_candidates(initial, review, 4)
    if candidates:
        sets.append(CandidateSet(review=review, candidates=tuple(candidates),
                                 gold=tuple(label.quads)))


def corpus_f1(pick):
    preds = {cs.review.id: list(pick(cs).label.quads) for cs in sets}
    golds = {cs.review.id: list(cs.gold) for cs in sets}
    return quad_f1(preds, golds)


print(f"\nrank-1 (no reranking) : {corpus_f1(lambda cs: cs.candidates[0]).f1:.2f} F1")
print(f"scorer reranking      : {corpus_f1(lambda cs: rerank(cs, scorer)).f1:.2f} F1")
print(f"perfect reranker bound: {corpus_f1(oracle_rerank).f1:.2f} F1")

best, preferred = rank_distribution(sets, scorer)
print("\nrank  holds-best-candidate  scorer-prefers")
for i in range(4):
    print(f"{i + 1:>4}  {best[i]:20.2f}%  {preferred[i]:13.2f}%")
