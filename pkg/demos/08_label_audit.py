"""Auditing gold-label quality with a trained scorer.

The scorer assigns every (review, gold label) pair a match score;
cumulative proportions under fixed thresholds summarize dataset quality,
and the lowest-scoring slices are removal candidates. On the synthetic
corpus the planted annotation noise is exactly what sinks to the bottom.
"""

from quadscorer import (TinyConditionalGenerator, TrainConfig, adjudicate,
                        audit_labels, build_annotation_tasks, finalize_dataset,
                        merge_votes, train_generator, train_scorer)
from quadscorer.toydata import ScriptedAnnotators, make_toy_corpus

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

report = audit_labels(scorer, corpus.labeled)
print("cumulative proportion of gold labels below each match score:")
for threshold, proportion in sorted(report.proportions.items()):
    print(f"  score < {threshold}: {100 * proportion:5.1f}%")

# the corpus knows which labels were corrupted; check what the audit caught
corrupted = {r.id for (r, noisy), (_, clean)
             in zip(corpus.labeled, corpus.labeled_clean)
             if noisy.quads != clean.quads}
print(f"\nplanted noise: {len(corrupted)} of {len(corpus.labeled)} labels")
for ratio, ids in sorted(report.removal_candidates.items()):
    hits = sum(1 for rid in ids if rid in corrupted)
    print(f"  removing the lowest {ratio:>2}% ({len(ids):>3} labels) "
          f"catches {hits:>3} corrupted ones "
          f"({100 * hits / max(1, len(ids)):.0f}% precision)")
