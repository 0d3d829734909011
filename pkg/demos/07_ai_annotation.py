"""Replacing humans with a language model, plus agreement metrics.

The remote client here is a scripted stand-in that answers like a
careful model with occasional lapses, which is enough to show the three
quality gates (self-consistency, confidence, rationale-first output) and
the kappa/accuracy comparison against human resolutions.
"""

import numpy as np

from quadscorer import (AiAnnotationConfig, TinyConditionalGenerator,
                        agreement_metrics, annotate_batch,
                        build_annotation_tasks, train_generator)
from quadscorer.ai_annotator import render_prompt
from quadscorer.toydata import ScriptedAnnotators, make_toy_corpus

corpus = make_toy_corpus(n_labeled=200, n_unlabeled=10, n_comparison=40,
                         n_test=10, seed=0)
gen = TinyConditionalGenerator.from_corpus(corpus.vocab_texts(), seed=0)
train_generator(gen, corpus.labeled, epochs=10, seed=0)
batches = build_annotation_tasks([r for r, _ in corpus.comparison_pool],
                                 gen, k=4, batch_size=200)
tasks = [t for batch in batches for t in batch]
gold = {r.id: y for r, y in corpus.comparison_pool}
oracle = ScriptedAnnotators(gold=gold, error_rate=0.0, seed=0)


class ScriptedModelClient:
    """Answers with gold options, wavering on some tasks."""

    def __init__(self, seed=0):
        self.rng = np.random.default_rng(seed)
        self.tasks_by_text = {t.review.text: t for t in tasks}

    def send(self, prompt):
        lines = []
        index = 0
        for raw in prompt.splitlines():
            if raw.startswith("sentence: "):
                index += 1
                task = self.tasks_by_text[raw[len("sentence: "):]]
                option = oracle.correct_vote(task, "ai").option
                confidence = 5
                if option == 5:  # no write-in available to the model
                    option, confidence = 1, 3
                elif self.rng.random() < 0.12:
                    confidence = int(self.rng.integers(2, 5))
                lines.append(f"task {index}: rationale: the chosen option covers "
                             f"every expressed sentiment | option: {option} | "
                             f"confidence: {confidence}")
        return "\n".join(lines)


config = AiAnnotationConfig(guidelines="pick the option covering all sentiments")
print("prompt for the first group of four tasks:")
print("-" * 60)
print(render_prompt(tasks[:4], config)[:800], "...")
print("-" * 60)

kept, rejected = annotate_batch(ScriptedModelClient(), tasks, config)
print(f"\nkept {len(kept)} judgments, rejected {rejected} "
      f"(inconsistent or confidence < 5)")

human = {t.task_id: oracle.correct_vote(t, "h").option for t in tasks}
ai = {j.task_id: j.option for j in kept}
for include_p6 in (True, False):
    try:
        report = agreement_metrics(ai, human, include_p6=include_p6)
        tag = "w/ option 6" if include_p6 else "w/o option 6"
        print(f"agreement {tag}: kappa {report.kappa:.3f}, "
              f"accuracy {report.accuracy:.1f}% over {report.n_tasks} tasks")
    except ValueError as exc:
        print(f"agreement: {exc}")

# kept judgments persist in the same store as human votes, tagged origin=ai
import tempfile

from quadscorer import EventStore

store = EventStore(tempfile.mkdtemp(prefix="ai-annotation-") + "/store")
store.add_tasks(tasks)
for judgment in kept:
    store.record_ai_judgment(judgment)
print(f"\nstore now holds {len(store.resolutions)} AI-resolved tasks "
      f"({store.path})")
