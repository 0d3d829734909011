"""Building comparison datasets from annotated candidate labels.

Each review gets up to four beam-search candidates; three annotators
choose among six options (the candidates, a write-in, or "no
sentiment"). Two matching votes resolve a task; otherwise a fourth
annotator adjudicates, and batch meetings can override any resolution.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .losses import ComparisonSample
from .quads import LabelSequence, Review
from .scoring import Candidate, GeneratorHandle, generate_candidates

OPTION_WRITE_IN = 5
OPTION_NO_SENTIMENT = 6


@dataclass(frozen=True)
class AnnotationTask:
    """One review with its candidate labels, assigned to a batch."""

    task_id: str
    review: Review
    candidates: tuple[Candidate, ...]
    batch_id: str

    def __post_init__(self) -> None:
        if not 1 <= len(self.candidates) <= 4:
            raise ValueError(f"task {self.task_id!r} needs 1..4 candidates")
        keys = [c.label.quad_set() for c in self.candidates]
        if len(set(keys)) != len(keys):
            raise ValueError(f"task {self.task_id!r} has duplicate candidates")

    def option_count(self) -> int:
        """Number of selectable options: candidates + write-in + no-sentiment."""
        return len(self.candidates) + 2


@dataclass(frozen=True)
class Vote:
    """One annotator's choice on a task."""

    task_id: str
    annotator_id: str
    option: int
    write_in: LabelSequence | None = None
    timestamp: float = 0.0

    def __post_init__(self) -> None:
        if not 1 <= self.option <= 6:
            raise ValueError(f"option must be in 1..6, got {self.option}")
        if self.option == OPTION_WRITE_IN:
            if self.write_in is None:
                raise ValueError("option 5 requires a write-in label")
            if self.write_in.dropped > 0 or not self.write_in.quads:
                raise ValueError("write-in label must parse cleanly")
        elif self.write_in is not None:
            raise ValueError("write-in only allowed with option 5")


@dataclass(frozen=True)
class ResolvedTask:
    """Final outcome of a task after majority vote or adjudication."""

    task_id: str
    resolution: str  # "candidate_<k>" | "write_in" | "no_sentiment"
    positive: LabelSequence | None
    negatives: tuple[LabelSequence, ...]
    resolved_by: str  # "majority" | "adjudicator" | "batch_meeting"
    option: int
    origin: str = "human"

    def __post_init__(self) -> None:
        if self.resolution == "no_sentiment":
            if self.positive is not None:
                raise ValueError("no-sentiment tasks carry no positive")
        elif self.positive is None:
            raise ValueError(f"resolution {self.resolution!r} requires a positive")

    def to_comparison_sample(self, review: Review) -> ComparisonSample | None:
        if self.positive is None:
            return None
        origin = "write_in" if self.resolution == "write_in" else self.origin
        return ComparisonSample(review=review, positive=self.positive,
                                negatives=self.negatives, origin=origin)


def build_annotation_tasks(reviews, gen: GeneratorHandle, k: int = 4,
                           batch_size: int = 200) -> list[list[AnnotationTask]]:
    """One task per review, grouped into batches of about ``batch_size``."""
    reviews = list(reviews)
    if not reviews:
        raise ValueError("no reviews to annotate")
    tasks = []
    for review in reviews:
        candidates = generate_candidates(gen, review, k)
        tasks.append(AnnotationTask(
            task_id=f"task-{review.id}",
            review=review,
            candidates=tuple(candidates),
            batch_id=f"batch-{len(tasks) // batch_size:04d}",
        ))
    return [tasks[i:i + batch_size] for i in range(0, len(tasks), batch_size)]


def _vote_key(vote: Vote):
    """Votes agree when options match; write-ins also need equal quad sets."""
    if vote.option == OPTION_WRITE_IN:
        return (OPTION_WRITE_IN, vote.write_in.quad_set())
    return (vote.option, None)


def _resolve(task: AnnotationTask, vote: Vote, resolved_by: str,
             origin: str = "human") -> ResolvedTask:
    option = vote.option
    if option == OPTION_NO_SENTIMENT:
        return ResolvedTask(task_id=task.task_id, resolution="no_sentiment",
                            positive=None, negatives=(), resolved_by=resolved_by,
                            option=option, origin=origin)
    if option == OPTION_WRITE_IN:
        negatives = tuple(c.label for c in task.candidates)
        return ResolvedTask(task_id=task.task_id, resolution="write_in",
                            positive=vote.write_in, negatives=negatives,
                            resolved_by=resolved_by, option=option, origin=origin)
    if option > len(task.candidates):
        raise ValueError(
            f"option {option} out of range for task {task.task_id!r} "
            f"with {len(task.candidates)} candidates")
    positive = task.candidates[option - 1].label
    negatives = tuple(c.label for i, c in enumerate(task.candidates)
                      if i != option - 1)
    return ResolvedTask(task_id=task.task_id, resolution=f"candidate_{option}",
                        positive=positive, negatives=negatives,
                        resolved_by=resolved_by, option=option, origin=origin)


def merge_votes(task: AnnotationTask, votes, origin: str = "human") -> ResolvedTask | None:
    """Resolve three independent votes by majority.

    Returns ``None`` when no two votes agree, meaning the task needs an
    adjudicator (see :func:`adjudicate`).
    """
    votes = list(votes)
    if len(votes) != 3:
        raise ValueError(f"expected exactly 3 votes, got {len(votes)}")
    if len({v.annotator_id for v in votes}) != 3:
        raise ValueError("votes must come from distinct annotators")
    if any(v.task_id != task.task_id for v in votes):
        raise ValueError("vote/task id mismatch")
    groups: dict = {}
    for vote in votes:
        groups.setdefault(_vote_key(vote), []).append(vote)
    for group in groups.values():
        if len(group) >= 2:
            return _resolve(task, group[0], resolved_by="majority", origin=origin)
    return None


def resolve_vote(task: AnnotationTask, vote: Vote, resolved_by: str,
                 origin: str = "human") -> ResolvedTask:
    """Resolution from one decisive vote; adjudication, batch-meeting
    overrides and AI judgments all funnel through here."""
    return _resolve(task, vote, resolved_by=resolved_by, origin=origin)


def adjudicate(task: AnnotationTask, vote: Vote, origin: str = "human") -> ResolvedTask:
    """A fourth annotator's vote resolves a disagreement directly."""
    return resolve_vote(task, vote, resolved_by="adjudicator", origin=origin)


def meeting_override(task: AnnotationTask, vote: Vote,
                     origin: str = "human") -> ResolvedTask:
    """Batch-meeting reconciliation overriding an earlier resolution."""
    return resolve_vote(task, vote, resolved_by="batch_meeting", origin=origin)


@dataclass
class DatasetStats:
    """Per-option sample counts (P1..P6) of a finalized dataset."""

    option_counts: dict[int, int] = field(default_factory=dict)

    @property
    def total(self) -> int:
        return sum(self.option_counts.values())

    def as_row(self) -> dict:
        row = {f"P{i}": self.option_counts.get(i, 0) for i in range(1, 7)}
        row["total"] = self.total
        return row


@dataclass
class ComparisonDataset:
    train: list[ComparisonSample]
    dev: list[ComparisonSample]
    stats: DatasetStats


def finalize_dataset(resolved_tasks, reviews_by_task: dict[str, Review],
                     dev_reserve: int, seed: int = 0) -> ComparisonDataset:
    """Assemble train/dev comparison samples from resolved tasks.

    No-sentiment (option 6) tasks are counted in the stats but excluded
    from both splits; ``dev_reserve`` samples are held out with a seeded
    shuffle so repeated exports are identical.
    """
    resolved_tasks = list(resolved_tasks)
    stats = DatasetStats()
    usable: list[ComparisonSample] = []
    for task in resolved_tasks:
        stats.option_counts[task.option] = stats.option_counts.get(task.option, 0) + 1
        sample = task.to_comparison_sample(reviews_by_task[task.task_id])
        if sample is not None:
            usable.append(sample)
    if dev_reserve > 0 and dev_reserve >= len(usable):
        raise ValueError(
            f"dev_reserve={dev_reserve} leaves no training data "
            f"(usable samples: {len(usable)})")
    order = np.random.default_rng(seed).permutation(len(usable))
    dev = [usable[i] for i in order[:dev_reserve]]
    train = [usable[i] for i in order[dev_reserve:]]
    return ComparisonDataset(train=train, dev=dev, stats=stats)
