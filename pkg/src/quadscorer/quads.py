"""Sentiment quads and their label-sequence template.

A quad bundles one aspect-level opinion: (aspect term, aspect category,
opinion term, sentiment polarity). Quad sets serialize to flat label
sequences of the form

    category | sentiment | aspect | opinion ; category | sentiment | ...

which a conditional generator can emit token by token. Parsing is total:
malformed segments are dropped and counted, never raised.
"""

from __future__ import annotations

from dataclasses import dataclass, field

SENTIMENTS = ("positive", "negative", "neutral")

#: Literal written in place of an aspect/opinion term that is not
#: expressed in the sentence.
IMPLICIT = "NULL"

#: Serialized form of an empty quad set (sentence carries no sentiment).
NO_SENTIMENT_TEXT = "NONE"

FIELD_SEP = " | "
QUAD_SEP = " ; "


@dataclass(frozen=True)
class Quad:
    """One (aspect, category, opinion, sentiment) opinion tuple.

    Fields are plain strings preserved verbatim from their source;
    implicit aspect/opinion terms hold the ``IMPLICIT`` sentinel.
    Use :func:`validate_quad` to check a quad against a taxonomy.
    """

    aspect_term: str
    aspect_category: str
    opinion_term: str
    sentiment: str

    def is_implicit_aspect(self) -> bool:
        return self.aspect_term == IMPLICIT

    def is_implicit_opinion(self) -> bool:
        return self.opinion_term == IMPLICIT


@dataclass(frozen=True)
class Review:
    """A single review sentence to be labeled."""

    id: str
    text: str
    domain: str = "restaurant"

    def __post_init__(self) -> None:
        if not self.text.strip():
            raise ValueError(f"review {self.id!r} has empty text")


@dataclass(frozen=True)
class LabelSequence:
    """A label string together with its parsed quads.

    ``dropped`` counts malformed segments encountered while parsing;
    sequences built from quads always have ``dropped == 0``.
    """

    text: str
    quads: tuple[Quad, ...] = field(default_factory=tuple)
    dropped: int = 0

    @classmethod
    def from_quads(cls, quads) -> "LabelSequence":
        quads = tuple(quads)
        return cls(text=serialize_quads(quads), quads=quads, dropped=0)

    @classmethod
    def from_text(cls, text: str) -> "LabelSequence":
        quads, dropped = parse_label_sequence(text)
        return cls(text=text, quads=tuple(quads), dropped=dropped)

    def quad_set(self) -> frozenset[Quad]:
        """Parsed quads as a set; the identity used for deduplication."""
        return frozenset(self.quads)

    def canonical_text(self) -> str:
        return serialize_quads(self.quads)


def serialize_quads(quads) -> str:
    """Render a quad list in the label-sequence template.

    Field order is category, sentiment, aspect, opinion; quads keep their
    input order. An empty list renders as the ``NONE`` sentinel.
    """
    quads = list(quads)
    if not quads:
        return NO_SENTIMENT_TEXT
    segments = [
        FIELD_SEP.join((q.aspect_category, q.sentiment, q.aspect_term, q.opinion_term))
        for q in quads
    ]
    return QUAD_SEP.join(segments)


def parse_label_sequence(text: str) -> tuple[list[Quad], int]:
    """Parse generator output back into quads.

    Splits on ``;`` then ``|`` and trims each field, so both the spaced
    and unspaced separator conventions round-trip. Segments without
    exactly four fields, or with a sentiment outside ``SENTIMENTS``, are
    dropped and counted. Never raises.
    """
    if text.strip() == NO_SENTIMENT_TEXT:
        return [], 0
    quads: list[Quad] = []
    dropped = 0
    for segment in text.split(";"):
        fields = [f.strip() for f in segment.split("|")]
        if len(fields) != 4:
            dropped += 1
            continue
        category, sentiment, aspect, opinion = fields
        if sentiment not in SENTIMENTS or not category or not aspect or not opinion:
            dropped += 1
            continue
        quads.append(
            Quad(
                aspect_term=aspect,
                aspect_category=category,
                opinion_term=opinion,
                sentiment=sentiment,
            )
        )
    return quads, dropped


def validate_quad(quad: Quad, taxonomy) -> list[str]:
    """Check a quad against a dataset's category taxonomy.

    Returns a list of violation messages; an empty list means the quad
    is valid. Violations are data, not exceptions, so callers can report
    them in bulk.
    """
    violations = []
    if quad.sentiment not in SENTIMENTS:
        violations.append(f"invalid sentiment: {quad.sentiment!r}")
    if not quad.aspect_category:
        violations.append("empty aspect category")
    elif quad.aspect_category not in set(taxonomy):
        violations.append(f"unknown category: {quad.aspect_category!r}")
    if not quad.aspect_term:
        violations.append("empty aspect term")
    if not quad.opinion_term:
        violations.append("empty opinion term")
    return violations
