"""Append-only store backing the annotation workflow.

Every state change is one JSON line in ``events.jsonl``; replaying the
file reconstructs the exact store state, which keeps the whole
annotation history auditable. Writes are serialized by a single lock,
and a task resolution always references the votes that caused it.
"""

from __future__ import annotations

import threading
import time
from pathlib import Path

from . import records
from .comparison import (AnnotationTask, ResolvedTask, Vote, adjudicate,
                         finalize_dataset, meeting_override, merge_votes,
                         resolve_vote)
from .quads import LabelSequence
from .scoring import Candidate


class VoteRejected(ValueError):
    """A vote violating the workflow rules; the reason is the message."""


def _task_record(task: AnnotationTask) -> dict:
    return {
        "task_id": task.task_id,
        "batch_id": task.batch_id,
        "review": records.review_to_record(task.review),
        "candidates": [{"text": c.label.text, "confidence": c.confidence}
                       for c in task.candidates],
    }


def _task_from_record(rec: dict) -> AnnotationTask:
    return AnnotationTask(
        task_id=rec["task_id"],
        review=records.review_from_record(rec["review"]),
        candidates=tuple(
            Candidate(label=LabelSequence.from_text(c["text"]),
                      confidence=c["confidence"])
            for c in rec["candidates"]),
        batch_id=rec["batch_id"],
    )


def _vote_record(vote: Vote) -> dict:
    return {
        "task_id": vote.task_id,
        "annotator_id": vote.annotator_id,
        "option": vote.option,
        "write_in": vote.write_in.text if vote.write_in else None,
        "timestamp": vote.timestamp,
    }


def _vote_from_record(rec: dict) -> Vote:
    write_in = rec.get("write_in")
    return Vote(
        task_id=rec["task_id"],
        annotator_id=rec["annotator_id"],
        option=rec["option"],
        write_in=LabelSequence.from_text(write_in) if write_in else None,
        timestamp=rec.get("timestamp", 0.0),
    )


def _resolution_record(res: ResolvedTask, vote_seqs: list[int]) -> dict:
    return {
        "task_id": res.task_id,
        "resolution": res.resolution,
        "option": res.option,
        "positive": res.positive.text if res.positive else None,
        "negatives": [n.text for n in res.negatives],
        "resolved_by": res.resolved_by,
        "origin": res.origin,
        "vote_seqs": vote_seqs,
    }


def _resolution_from_record(rec: dict) -> ResolvedTask:
    positive = rec.get("positive")
    return ResolvedTask(
        task_id=rec["task_id"],
        resolution=rec["resolution"],
        positive=LabelSequence.from_text(positive) if positive else None,
        negatives=tuple(LabelSequence.from_text(t) for t in rec["negatives"]),
        resolved_by=rec["resolved_by"],
        option=rec["option"],
        origin=rec.get("origin", "human"),
    )


class EventStore:
    """File-backed annotation state with append-only persistence."""

    def __init__(self, directory):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)
        self.path = self.directory / "events.jsonl"
        self._lock = threading.Lock()
        self._seq = 0
        self.tasks: dict[str, AnnotationTask] = {}
        self.votes: dict[str, list[tuple[int, Vote]]] = {}
        self.resolutions: dict[str, ResolvedTask] = {}
        if self.path.exists():
            for rec in records.read_jsonl(self.path):
                self._apply(rec)
                self._seq = max(self._seq, rec["seq"])

    # -- event plumbing ---------------------------------------------------

    def _append(self, event: str, payload: dict) -> dict:
        self._seq += 1
        rec = {"seq": self._seq, "event": event, "ts": time.time(), **payload}
        with self.path.open("a", encoding="utf-8") as fh:
            fh.write(records.dump_line(rec) + "\n")
        self._apply(rec)
        return rec

    def _apply(self, rec: dict) -> None:
        event = rec["event"]
        if event == "task_created":
            task = _task_from_record(rec["task"])
            self.tasks[task.task_id] = task
            self.votes.setdefault(task.task_id, [])
        elif event == "vote_submitted":
            vote = _vote_from_record(rec["vote"])
            self.votes.setdefault(vote.task_id, []).append((rec["seq"], vote))
        elif event == "task_resolved":
            res = _resolution_from_record(rec["resolution"])
            self.resolutions[res.task_id] = res
        elif event == "dataset_exported":
            pass  # audit trail only
        else:
            raise ValueError(f"unknown event type {event!r}")

    # -- workflow ---------------------------------------------------------

    def add_tasks(self, tasks) -> None:
        with self._lock:
            for task in tasks:
                if task.task_id in self.tasks:
                    raise ValueError(f"task {task.task_id!r} already exists")
                self._append("task_created", {"task": _task_record(task)})

    def batch_ids(self) -> list[str]:
        return sorted({t.batch_id for t in self.tasks.values()})

    def needs_adjudication(self, task_id: str) -> bool:
        return (task_id not in self.resolutions
                and len(self.votes.get(task_id, [])) >= 3)

    def next_task(self, annotator_id: str, role: str = "annotator",
                  batch_id: str | None = None) -> AnnotationTask | None:
        """First open task, in task-id order, for this session.

        Annotators get tasks they have not voted on that still collect
        votes; adjudicators get only disagreement tasks.
        """
        with self._lock:
            for task_id in sorted(self.tasks):
                task = self.tasks[task_id]
                if batch_id is not None and task.batch_id != batch_id:
                    continue
                if task_id in self.resolutions:
                    continue
                votes = self.votes.get(task_id, [])
                if role == "adjudicator":
                    if len(votes) >= 3:
                        return task
                    continue
                if len(votes) >= 3:
                    continue
                if any(v.annotator_id == annotator_id for _, v in votes):
                    continue
                return task
        return None

    def submit_vote(self, vote: Vote) -> ResolvedTask | None:
        """Persist a vote; the third vote triggers the majority merge.

        Returns the resolution when the vote resolved the task, ``None``
        otherwise. Raises :class:`VoteRejected` for workflow violations.
        """
        with self._lock:
            task = self.tasks.get(vote.task_id)
            if task is None:
                raise VoteRejected(f"unknown task {vote.task_id!r}")
            if vote.task_id in self.resolutions:
                raise VoteRejected(f"task {vote.task_id!r} is already resolved")
            votes = self.votes.get(vote.task_id, [])
            if any(v.annotator_id == vote.annotator_id for _, v in votes):
                raise VoteRejected(
                    f"duplicate vote by {vote.annotator_id!r} on {vote.task_id!r}")
            if len(votes) >= 3:
                raise VoteRejected(
                    f"task {vote.task_id!r} already has three votes")
            if 1 <= vote.option <= 4 and vote.option > len(task.candidates):
                raise VoteRejected(
                    f"option {vote.option} out of range for {vote.task_id!r}")
            self._append("vote_submitted", {"vote": _vote_record(vote)})
            votes = self.votes[vote.task_id]
            if len(votes) == 3:
                resolution = merge_votes(task, [v for _, v in votes])
                if resolution is not None:
                    self._append("task_resolved", {
                        "resolution": _resolution_record(
                            resolution, [seq for seq, _ in votes]),
                    })
                    return resolution
        return None

    def record_ai_judgment(self, judgment) -> ResolvedTask:
        """Persist a kept AI judgment as a vote tagged ``origin=ai`` and
        resolve the task directly (its two passes already agreed)."""
        with self._lock:
            task = self.tasks.get(judgment.task_id)
            if task is None:
                raise VoteRejected(f"unknown task {judgment.task_id!r}")
            if judgment.task_id in self.resolutions:
                raise VoteRejected(
                    f"task {judgment.task_id!r} is already resolved")
            vote = Vote(task_id=judgment.task_id, annotator_id="ai",
                        option=judgment.option, timestamp=time.time())
            vote_rec = self._append("vote_submitted", {
                "vote": _vote_record(vote),
                "origin": "ai",
                "rationale": judgment.rationale,
                "confidence": judgment.confidence,
            })
            resolution = resolve_vote(task, vote, resolved_by="majority",
                                      origin="ai")
            self._append("task_resolved", {
                "resolution": _resolution_record(resolution, [vote_rec["seq"]]),
            })
            return resolution

    def submit_adjudication(self, vote: Vote, override: bool = False) -> ResolvedTask:
        """Resolve a disagreement, or override a resolution after a
        batch meeting when ``override`` is set."""
        with self._lock:
            task = self.tasks.get(vote.task_id)
            if task is None:
                raise VoteRejected(f"unknown task {vote.task_id!r}")
            already = vote.task_id in self.resolutions
            if already and not override:
                raise VoteRejected(
                    f"task {vote.task_id!r} is already resolved; "
                    "set override for a batch-meeting correction")
            if not already and not self.needs_adjudication(vote.task_id):
                raise VoteRejected(
                    f"task {vote.task_id!r} does not need adjudication")
            resolve = meeting_override if already else adjudicate
            resolution = resolve(task, vote)
            vote_rec = self._append("vote_submitted", {"vote": _vote_record(vote)})
            self._append("task_resolved", {
                "resolution": _resolution_record(resolution, [vote_rec["seq"]]),
            })
            return resolution

    # -- reporting and export ----------------------------------------------

    def progress(self) -> dict:
        batches: dict[str, dict] = {}
        for task in self.tasks.values():
            b = batches.setdefault(task.batch_id, {
                "total": 0, "resolved": 0, "needs_adjudication": 0, "votes": 0,
            })
            b["total"] += 1
            b["votes"] += len(self.votes.get(task.task_id, []))
            if task.task_id in self.resolutions:
                b["resolved"] += 1
            elif self.needs_adjudication(task.task_id):
                b["needs_adjudication"] += 1
        return {
            "batches": {b: batches[b] for b in sorted(batches)},
            "total_tasks": len(self.tasks),
            "total_resolved": len(self.resolutions),
        }

    def export_dataset(self, dev_reserve: int, out_dir, seed: int = 0) -> dict:
        """Finalize all resolutions into train/dev files plus stats."""
        with self._lock:
            unresolved = sorted(set(self.tasks) - set(self.resolutions))
            if unresolved:
                raise ValueError(f"unresolved tasks remain, e.g. {unresolved[0]!r}")
            reviews = {tid: task.review for tid, task in self.tasks.items()}
            resolved = [self.resolutions[tid] for tid in sorted(self.resolutions)]
            dataset = finalize_dataset(resolved, reviews, dev_reserve, seed=seed)
            out_dir = Path(out_dir)
            out_dir.mkdir(parents=True, exist_ok=True)
            records.write_comparisons(out_dir / "train.jsonl", dataset.train)
            records.write_comparisons(out_dir / "dev.jsonl", dataset.dev)
            stats = dataset.stats.as_row()
            (out_dir / "stats.json").write_text(
                records.dump_line(stats) + "\n", encoding="utf-8")
            self._append("dataset_exported", {
                "payload": {"dev_reserve": dev_reserve, "seed": seed,
                            "out_dir": str(out_dir), "stats": stats},
            })
            return {"stats": stats, "train": str(out_dir / "train.jsonl"),
                    "dev": str(out_dir / "dev.jsonl")}
