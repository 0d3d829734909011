"""Line-delimited record files.

Every persistent artifact is a JSON-lines file: one record per line,
UTF-8, keys sorted so identical data always produces identical bytes.

Formats:
    reviews          {"id", "text", "domain"}
    labeled samples  {"review_id", "text"?, "quads": [{"aspect", "category",
                      "opinion", "sentiment"}]}
    scored samples   {"review_id", "label_text", "min_conf", "score", "mode"}
    comparison data  {"review_id", "text", "positive", "negatives", "origin"}
"""

from __future__ import annotations

import json
from pathlib import Path

from .quads import LabelSequence, Quad, Review


def dump_line(obj: dict) -> str:
    return json.dumps(obj, sort_keys=True, ensure_ascii=False)


def write_jsonl(path, records) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(dump_line(rec) + "\n")


def read_jsonl(path) -> list[dict]:
    with Path(path).open("r", encoding="utf-8") as fh:
        return [json.loads(line) for line in fh if line.strip()]


# -- reviews -----------------------------------------------------------

def review_to_record(review: Review) -> dict:
    return {"id": review.id, "text": review.text, "domain": review.domain}


def review_from_record(rec: dict) -> Review:
    return Review(id=str(rec["id"]), text=rec["text"], domain=rec.get("domain", "restaurant"))


def write_reviews(path, reviews) -> None:
    write_jsonl(path, (review_to_record(r) for r in reviews))


def read_reviews(path) -> list[Review]:
    return [review_from_record(rec) for rec in read_jsonl(path)]


# -- labeled samples ---------------------------------------------------

def quad_to_record(quad: Quad) -> dict:
    return {
        "aspect": quad.aspect_term,
        "category": quad.aspect_category,
        "opinion": quad.opinion_term,
        "sentiment": quad.sentiment,
    }


def quad_from_record(rec: dict) -> Quad:
    return Quad(
        aspect_term=rec["aspect"],
        aspect_category=rec["category"],
        opinion_term=rec["opinion"],
        sentiment=rec["sentiment"],
    )


def labeled_to_record(review: Review, label: LabelSequence) -> dict:
    return {
        "review_id": review.id,
        "text": review.text,
        "domain": review.domain,
        "quads": [quad_to_record(q) for q in label.quads],
    }


def labeled_from_record(rec: dict) -> tuple[Review, LabelSequence]:
    review = Review(
        id=str(rec["review_id"]),
        text=rec.get("text", ""),
        domain=rec.get("domain", "restaurant"),
    )
    label = LabelSequence.from_quads(quad_from_record(q) for q in rec["quads"])
    return review, label


def write_labeled(path, samples) -> None:
    """``samples`` is an iterable of (Review, LabelSequence) pairs."""
    write_jsonl(path, (labeled_to_record(r, y) for r, y in samples))


def read_labeled(path) -> list[tuple[Review, LabelSequence]]:
    return [labeled_from_record(rec) for rec in read_jsonl(path)]


# -- scored samples ----------------------------------------------------

def scored_to_record(review_id: str, label_text: str, min_conf: float,
                     score: float, mode: str) -> dict:
    return {
        "review_id": review_id,
        "label_text": label_text,
        "min_conf": min_conf,
        "score": score,
        "mode": mode,
    }


# -- comparison datasets -----------------------------------------------

def comparison_to_record(sample) -> dict:
    return {
        "review_id": sample.review.id,
        "text": sample.review.text,
        "domain": sample.review.domain,
        "positive": sample.positive.text,
        "negatives": [n.text for n in sample.negatives],
        "origin": sample.origin,
    }


def comparison_from_record(rec: dict):
    from .losses import ComparisonSample

    review = Review(id=str(rec["review_id"]), text=rec["text"],
                    domain=rec.get("domain", "restaurant"))
    return ComparisonSample(
        review=review,
        positive=LabelSequence.from_text(rec["positive"]),
        negatives=tuple(LabelSequence.from_text(t) for t in rec["negatives"]),
        origin=rec.get("origin", "human"),
    )


def write_comparisons(path, samples) -> None:
    write_jsonl(path, (comparison_to_record(s) for s in samples))


def read_comparisons(path) -> list:
    return [comparison_from_record(rec) for rec in read_jsonl(path)]
