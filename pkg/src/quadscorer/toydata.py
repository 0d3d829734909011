"""Synthetic restaurant-review corpus for desk-scale experiments.

A small grammar over ~30 category/term words generates review sentences
with known gold quads, including two-quad sentences, implicit aspect or
opinion terms, no-sentiment sentences, and an ambiguous opinion word
whose polarity is fixed by a nearby adverb. Gold labels can be corrupted
at a configurable rate to emulate noisy annotations, and scripted
annotators turn candidate sets into comparison votes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .comparison import AnnotationTask, Vote
from .quads import IMPLICIT, LabelSequence, Quad, Review

CATEGORIES: dict[str, tuple[str, ...]] = {
    "food quality": ("pizza", "pasta", "sushi", "burger"),
    "food prices": ("prices", "bill"),
    "service general": ("waiter", "staff", "service"),
    "ambience general": ("decor", "music", "atmosphere"),
    "drinks quality": ("wine", "coffee"),
    "restaurant general": ("place", "restaurant"),
}

OPINIONS: dict[str, tuple[str, ...]] = {
    "positive": ("great", "delicious", "friendly", "lovely", "excellent"),
    "negative": ("terrible", "bland", "rude", "noisy", "awful"),
    "neutral": ("average", "ordinary", "unremarkable"),
}

#: "surprising" alone is ambiguous; the adverb disambiguates.
AMBIGUOUS_ADVERBS = {"pleasantly": "positive", "unpleasantly": "negative"}

CATEGORY_OF = {term: cat for cat, terms in CATEGORIES.items() for term in terms}
ASPECT_TERMS = tuple(CATEGORY_OF)
SENTIMENT_OF = {term: sent for sent, terms in OPINIONS.items() for term in terms}
OPINION_TERMS = tuple(SENTIMENT_OF)


def _simple(rng) -> tuple[str, list[Quad]]:
    a = str(rng.choice(ASPECT_TERMS))
    o = str(rng.choice(OPINION_TERMS))
    return (f"the {a} was {o}",
            [Quad(a, CATEGORY_OF[a], o, SENTIMENT_OF[o])])


def _double_shared(rng) -> tuple[str, list[Quad]]:
    a1, a2 = rng.choice(ASPECT_TERMS, size=2, replace=False)
    a1, a2 = str(a1), str(a2)
    o = str(rng.choice(OPINION_TERMS))
    return (
        f"the {a1} and the {a2} were both {o}",
        [Quad(a1, CATEGORY_OF[a1], o, SENTIMENT_OF[o]),
         Quad(a2, CATEGORY_OF[a2], o, SENTIMENT_OF[o])],
    )


def _double_contrast(rng) -> tuple[str, list[Quad]]:
    a1, a2 = rng.choice(ASPECT_TERMS, size=2, replace=False)
    o1, o2 = str(rng.choice(OPINION_TERMS)), str(rng.choice(OPINION_TERMS))
    a1, a2 = str(a1), str(a2)
    return (
        f"the {a1} was {o1} and the {a2} was {o2}",
        [Quad(a1, CATEGORY_OF[a1], o1, SENTIMENT_OF[o1]),
         Quad(a2, CATEGORY_OF[a2], o2, SENTIMENT_OF[o2])],
    )


def _implicit_aspect(rng) -> tuple[str, list[Quad]]:
    o = str(rng.choice(OPINION_TERMS))
    return (f"a {o} experience overall",
            [Quad(IMPLICIT, "restaurant general", o, SENTIMENT_OF[o])])


def _implicit_opinion(rng) -> tuple[str, list[Quad]]:
    a = str(rng.choice(ASPECT_TERMS))
    if rng.random() < 0.5:
        return (f"we will come back for the {a}",
                [Quad(a, CATEGORY_OF[a], IMPLICIT, "positive")])
    return (f"we will not come back because of the {a}",
            [Quad(a, CATEGORY_OF[a], IMPLICIT, "negative")])


def _ambiguous(rng) -> tuple[str, list[Quad]]:
    a = str(rng.choice(ASPECT_TERMS))
    adv = str(rng.choice(sorted(AMBIGUOUS_ADVERBS)))
    return (f"the {a} was {adv} surprising",
            [Quad(a, CATEGORY_OF[a], "surprising", AMBIGUOUS_ADVERBS[adv])])


def _no_sentiment(rng) -> tuple[str, list[Quad]]:
    a1, a2 = rng.choice(ASPECT_TERMS, size=2, replace=False)
    return f"we ordered the {a1} and the {a2}", []


_TEMPLATES = (
    (_simple, 0.35),
    (_double_shared, 0.15),
    (_double_contrast, 0.05),
    (_implicit_aspect, 0.08),
    (_implicit_opinion, 0.07),
    (_ambiguous, 0.20),
    (_no_sentiment, 0.10),
)

#: In the labeled split the ambiguous template is rarer, and its
#: annotations get their sentiment flipped half the time (hard cases are
#: the ones human annotators disagree on), so a model trained on the
#: labeled data alone sees the tokens but cannot learn the adverb rule.
#: Comparison annotations are where that knowledge enters the pipeline.
_TEMPLATES_LABELED = tuple(
    (fn, 0.10 if fn is _ambiguous else w) for fn, w in _TEMPLATES
)
AMBIGUOUS_LABEL_FLIP = 0.5


def sample_sentence(rng, templates=_TEMPLATES) -> tuple[str, list[Quad]]:
    weights = np.array([w for _, w in templates])
    pick = rng.choice(len(templates), p=weights / weights.sum())
    return templates[pick][0](rng)


def corrupt_quads(quads: list[Quad], rng) -> list[Quad]:
    """Plant one labeling error: a flipped sentiment, or a wrong
    category/aspect/opinion term. No-op on empty quad lists."""
    if not quads:
        return quads
    quads = list(quads)
    i = int(rng.integers(len(quads)))
    q = quads[i]
    kind = rng.integers(4)
    if kind == 0:
        wrong = [s for s in OPINIONS if s != q.sentiment]
        quads[i] = Quad(q.aspect_term, q.aspect_category, q.opinion_term,
                        str(rng.choice(wrong)))
    elif kind == 1:
        wrong = [c for c in CATEGORIES if c != q.aspect_category]
        quads[i] = Quad(q.aspect_term, str(rng.choice(wrong)), q.opinion_term,
                        q.sentiment)
    elif kind == 2:
        wrong = [t for t in ASPECT_TERMS if t != q.aspect_term]
        quads[i] = Quad(str(rng.choice(wrong)), q.aspect_category, q.opinion_term,
                        q.sentiment)
    else:
        wrong = [t for t in OPINION_TERMS if t != q.opinion_term]
        quads[i] = Quad(q.aspect_term, q.aspect_category, str(rng.choice(wrong)),
                        q.sentiment)
    return quads


@dataclass
class ToyCorpus:
    """Synthetic splits mirroring a real self-training setup."""

    labeled: list[tuple[Review, LabelSequence]]        # noisy gold labels
    labeled_clean: list[tuple[Review, LabelSequence]]  # same reviews, true labels
    unlabeled: list[Review]
    unlabeled_gold: dict[str, LabelSequence]  # hidden truth, for diagnostics
    comparison_pool: list[tuple[Review, LabelSequence]]  # disjoint from unlabeled
    test: list[tuple[Review, LabelSequence]]
    noise_rate: float = 0.0
    seed: int = 0

    def vocab_texts(self) -> list[str]:
        """Texts a tokenizer would be built from: every raw review in the
        corpora plus the gold labels of the labeled split."""
        texts = [r.text for r, _ in self.labeled]
        texts += [label.text for _, label in self.labeled]
        texts += [r.text for r in self.unlabeled]
        texts += [r.text for r, _ in self.comparison_pool]
        texts += [r.text for r, _ in self.test]
        return texts


def make_toy_corpus(n_labeled: int = 500, n_unlabeled: int = 5000,
                    n_comparison: int = 1000, n_test: int = 400,
                    noise_rate: float = 0.3, seed: int = 0) -> ToyCorpus:
    rng = np.random.default_rng(seed)

    def draw(prefix: str, count: int,
             templates=_TEMPLATES) -> list[tuple[Review, LabelSequence]]:
        out = []
        for i in range(count):
            text, quads = sample_sentence(rng, templates)
            review = Review(id=f"{prefix}{i:05d}", text=text)
            out.append((review, LabelSequence.from_quads(quads)))
        return out

    clean = draw("L", n_labeled, templates=_TEMPLATES_LABELED)
    noisy = []
    for review, label in clean:
        quads = list(label.quads)
        if quads and "surprising" in review.text:
            if rng.random() < AMBIGUOUS_LABEL_FLIP:
                q = quads[0]
                flipped = "negative" if q.sentiment == "positive" else "positive"
                quads = [Quad(q.aspect_term, q.aspect_category, q.opinion_term,
                              flipped)]
        elif quads and rng.random() < noise_rate:
            quads = corrupt_quads(quads, rng)
        noisy.append((review, LabelSequence.from_quads(quads)))

    unlabeled = draw("U", n_unlabeled)
    return ToyCorpus(
        labeled=noisy,
        labeled_clean=clean,
        unlabeled=[review for review, _ in unlabeled],
        unlabeled_gold={review.id: label for review, label in unlabeled},
        comparison_pool=draw("C", n_comparison),
        test=draw("T", n_test),
        noise_rate=noise_rate,
        seed=seed,
    )


@dataclass
class ScriptedAnnotators:
    """Simulated annotator pool that knows the gold labels.

    Each annotator votes for the candidate matching the gold quad set;
    when none matches they write the gold label in (option 5), or pick
    the no-sentiment option for quad-free sentences. With probability
    ``error_rate`` a vote lands on a random wrong option instead.
    """

    gold: dict[str, LabelSequence]  # review id -> gold label
    error_rate: float = 0.05
    seed: int = 0
    annotator_ids: tuple[str, ...] = ("ann-1", "ann-2", "ann-3")
    adjudicator_id: str = "ann-4"
    _rng: np.random.Generator = field(init=False, repr=False)

    def __post_init__(self) -> None:
        self._rng = np.random.default_rng(self.seed)

    def correct_vote(self, task: AnnotationTask, annotator_id: str) -> Vote:
        gold = self.gold[task.review.id]
        if not gold.quads:
            return Vote(task.task_id, annotator_id, option=6)
        for i, candidate in enumerate(task.candidates, start=1):
            if candidate.label.quad_set() == gold.quad_set():
                return Vote(task.task_id, annotator_id, option=i)
        return Vote(task.task_id, annotator_id, option=5,
                    write_in=LabelSequence.from_quads(gold.quads))

    def vote(self, task: AnnotationTask, annotator_id: str) -> Vote:
        intended = self.correct_vote(task, annotator_id)
        if self._rng.random() >= self.error_rate:
            return intended
        wrong = [o for o in range(1, len(task.candidates) + 1) if o != intended.option]
        if intended.option != 6:
            wrong.append(6)
        return Vote(task.task_id, annotator_id, option=int(self._rng.choice(wrong)))

    def vote_all(self, task: AnnotationTask) -> list[Vote]:
        return [self.vote(task, aid) for aid in self.annotator_ids]

    def adjudicator_vote(self, task: AnnotationTask) -> Vote:
        return self.correct_vote(task, self.adjudicator_id)
