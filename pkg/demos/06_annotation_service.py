"""The annotation service workflow, driven in process.

Tasks go into an append-only store; three annotators vote over HTTP, a
fourth adjudicates disagreements, and the export endpoint writes the
train/dev comparison files. The same flow works over the network via
``quadscorer serve --store <dir> --port <n>``.
"""

import tempfile
from pathlib import Path

from fastapi.testclient import TestClient

from quadscorer import (EventStore, TinyConditionalGenerator,
                        build_annotation_tasks, train_generator)
from quadscorer.service import create_app
from quadscorer.toydata import ScriptedAnnotators, make_toy_corpus

corpus = make_toy_corpus(n_labeled=200, n_unlabeled=10, n_comparison=12,
                         n_test=10, seed=0)
gen = TinyConditionalGenerator.from_corpus(corpus.vocab_texts(), seed=0)
train_generator(gen, corpus.labeled, epochs=10, seed=0)

workdir = Path(tempfile.mkdtemp(prefix="annotation-"))
store = EventStore(workdir / "store")
for batch in build_annotation_tasks([r for r, _ in corpus.comparison_pool],
                                    gen, k=4, batch_size=200):
    store.add_tasks(batch)

client = TestClient(create_app(store))
annotators = ScriptedAnnotators(
    gold={r.id: y for r, y in corpus.comparison_pool},
    error_rate=0.15, seed=2)

for annotator in annotators.annotator_ids:
    while True:
        payload = client.get("/tasks/next",
                             params={"annotator_id": annotator}).json()
        if payload["task"] is None:
            break
        task = store.tasks[payload["task"]["task_id"]]
        vote = annotators.vote(task, annotator)
        client.post("/votes", json={
            "task_id": vote.task_id, "annotator_id": annotator,
            "option": vote.option,
            "write_in": vote.write_in.text if vote.write_in else None})

print("progress after three annotators:", client.get("/progress").json())

while True:
    payload = client.get("/tasks/next", params={
        "annotator_id": annotators.adjudicator_id,
        "role": "adjudicator"}).json()
    if payload["task"] is None:
        break
    task = store.tasks[payload["task"]["task_id"]]
    print("adjudicating", task.task_id, "prior votes:",
          [v["option"] for v in payload["task"]["votes"]])
    vote = annotators.adjudicator_vote(task)
    client.post("/adjudications", json={
        "task_id": vote.task_id, "annotator_id": annotators.adjudicator_id,
        "option": vote.option,
        "write_in": vote.write_in.text if vote.write_in else None})

result = client.post("/export", json={"dev_reserve": 2,
                                      "out_dir": str(workdir / "export")}).json()
print("\nexport stats:", result["stats"])
print("files:", result["train"], "and", result["dev"])
print("event log:", store.path)
