"""Training a pseudo-label scorer on comparison data.

End-to-end on the synthetic corpus: train an initial model on noisy gold
labels, build six-option annotation tasks from its beams, resolve
scripted votes into a comparison dataset, then fine-tune the model into
a scorer with the listwise objective. The scorer's dev selection
accuracy is compared against picking by generator confidence alone.
"""

import time

from quadscorer import (TinyConditionalGenerator, TrainConfig, adjudicate,
                        build_annotation_tasks, finalize_dataset, merge_votes,
                        selection_accuracy, train_generator, train_scorer)
from quadscorer.toydata import ScriptedAnnotators, make_toy_corpus

t0 = time.time()
corpus = make_toy_corpus(n_labeled=500, n_unlabeled=100, n_comparison=1000,
                         n_test=100, noise_rate=0.3, seed=0)

gen = TinyConditionalGenerator.from_corpus(corpus.vocab_texts(), seed=0)
train_generator(gen, corpus.labeled, epochs=20, seed=0)
print(f"[{time.time()-t0:5.1f}s] initial model trained on 500 noisy labels")

# six-option tasks from the model's beams, three votes each, adjudication
# on disagreement
gold = {r.id: y for r, y in corpus.comparison_pool}
annotators = ScriptedAnnotators(gold=gold, error_rate=0.05, seed=1)
resolved, reviews_by_task = [], {}
adjudicated = 0
for batch in build_annotation_tasks([r for r, _ in corpus.comparison_pool],
                                    gen, k=4, batch_size=200):
    for task in batch:
        reviews_by_task[task.task_id] = task.review
        outcome = merge_votes(task, annotators.vote_all(task))
        if outcome is None:
            outcome = adjudicate(task, annotators.adjudicator_vote(task))
            adjudicated += 1
        resolved.append(outcome)
dataset = finalize_dataset(resolved, reviews_by_task, dev_reserve=200, seed=0)
print(f"[{time.time()-t0:5.1f}s] comparison dataset ready "
      f"({adjudicated} adjudications)")
print("option counts:", dataset.stats.as_row())

baseline = selection_accuracy(gen, dataset.dev)
scorer = gen.clone()
result = train_scorer(scorer, dataset, asqp_data=corpus.labeled,
                      config=TrainConfig(objective="listwise", alpha=1.0,
                                         batch_size=10, epochs=10, seed=0))
print(f"\n[{time.time()-t0:5.1f}s] scorer trained; per-epoch dev accuracy:")
for row in result.metrics:
    print(f"  epoch {row['epoch']}: loss {row['loss']:.3f} "
          f"dev accuracy {row['dev_accuracy']:.1f}%")
print(f"\nhighest-confidence baseline: {baseline:.1f}%")
print(f"trained scorer             : {result.best_dev_accuracy:.1f}% "
      f"(epoch {result.best_epoch})")
