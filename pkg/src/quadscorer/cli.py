"""Command-line entry points.

Subcommands cover the pipeline stages (``pseudo-label``, ``filter``,
``self-train``, ``audit``), candidate reranking and evaluation
(``rerank``, ``evaluate``, ``rank-dist``), and the annotation service
(``serve``). Models are the numpy generators saved with
``TinyConditionalGenerator.save``.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import records
from .model import TinyConditionalGenerator
from .quads import LabelSequence
from .rerank import CandidateSet, evaluate_predictions, rank_distribution, rerank
from .scoring import (DEFAULT_SCORE_MODE, SCORE_MODES, ScoredSample,
                      generate_candidates, match_score, token_probabilities)
from .selftrain import (FilterConfig, audit_labels, confidence_filter,
                        pseudo_label, run_self_training, scorer_filter_window)
from .training import train_generator


def _load_model(path) -> TinyConditionalGenerator:
    return TinyConditionalGenerator.load(path)


def _add_score_mode(parser) -> None:
    parser.add_argument("--score-mode", choices=SCORE_MODES,
                        default=DEFAULT_SCORE_MODE)


def cmd_pseudo_label(args) -> int:
    gen = _load_model(args.model)
    reviews = records.read_reviews(args.reviews)
    scorer = _load_model(args.scorer) if args.scorer else gen
    samples = pseudo_label(gen, reviews)
    rows = []
    for review, label in samples:
        tp = token_probabilities(gen, review, label)
        score = match_score(token_probabilities(scorer, review, label),
                            args.score_mode)
        rows.append(records.scored_to_record(review.id, label.text, tp.min(),
                                             score, args.score_mode))
    records.write_jsonl(args.out, rows)
    print(f"pseudo-labeled {len(rows)} of {len(reviews)} reviews -> {args.out}")
    return 0


def _read_scored(path, reviews_path) -> list[ScoredSample]:
    reviews = {r.id: r for r in records.read_reviews(reviews_path)}
    out = []
    for rec in records.read_jsonl(path):
        out.append(ScoredSample(
            review=reviews[str(rec["review_id"])],
            label=LabelSequence.from_text(rec["label_text"]),
            min_conf=rec["min_conf"],
            score=rec["score"],
            mode=rec.get("mode", DEFAULT_SCORE_MODE),
        ))
    return out


def cmd_filter(args) -> int:
    samples = _read_scored(args.scored, args.reviews)
    kept = confidence_filter(samples, args.gamma1)
    n_conf = len(kept)
    kept = scorer_filter_window(kept, (args.window_lo, args.window_hi))
    records.write_jsonl(args.out, (
        records.scored_to_record(s.review.id, s.label.text, s.min_conf, s.score, s.mode)
        for s in kept))
    print(f"{len(samples)} scored -> {n_conf} past confidence "
          f"-> {len(kept)} in window -> {args.out}")
    return 0


def cmd_self_train(args) -> int:
    labeled = records.read_labeled(args.labeled)
    unlabeled = records.read_reviews(args.unlabeled)
    scorer = _load_model(args.scorer)

    def gen_trainer(samples):
        texts = [r.text for r, _ in samples] + [y.text for _, y in samples]
        gen = TinyConditionalGenerator.from_corpus(texts, seed=args.seed)
        return train_generator(gen, samples, epochs=args.epochs, seed=args.seed)

    config = FilterConfig(gamma1=args.gamma1,
                          window=(args.window_lo, args.window_hi),
                          sample_n=args.sample_n, score_mode=args.score_mode)
    out_dir = Path(args.out_dir)
    augmented, report = run_self_training(
        labeled, unlabeled, gen_trainer, scorer, config, seed=args.seed,
        report_path=out_dir / "stage_report.json")
    records.write_labeled(out_dir / "augmented.jsonl", augmented)
    for stage, count in report.counts:
        print(f"{stage:>16}: {count}")
    print(f"augmented dataset -> {out_dir / 'augmented.jsonl'}")
    return 0


def cmd_audit(args) -> int:
    scorer = _load_model(args.scorer)
    labeled = records.read_labeled(args.labeled)
    report = audit_labels(scorer, labeled, score_mode=args.score_mode)
    report.write(args.out)
    for threshold, proportion in sorted(report.proportions.items()):
        print(f"score < {threshold}: {100 * proportion:5.2f}%")
    print(f"audit report -> {args.out}")
    return 0


def _candidate_sets(gen, reviews, gold_by_id, k):
    sets = []
    for review in reviews:
        candidates = generate_candidates(gen, review, k)
        if not candidates:
            continue
        gold = gold_by_id.get(review.id)
        sets.append(CandidateSet(review=review, candidates=tuple(candidates),
                                 gold=None if gold is None else tuple(gold.quads)))
    return sets


def cmd_rerank(args) -> int:
    gen = _load_model(args.model)
    scorer = _load_model(args.scorer)
    reviews = records.read_reviews(args.reviews)
    sets = _candidate_sets(gen, reviews, {}, args.k)
    chosen = {cs.review.id: rerank(cs, scorer, args.score_mode) for cs in sets}
    records.write_jsonl(args.out, (
        {"review_id": rid, "label_text": c.label.text, "confidence": c.confidence}
        for rid, c in sorted(chosen.items())))
    print(f"reranked {len(chosen)} reviews -> {args.out}")
    return 0


def cmd_evaluate(args) -> int:
    gold = {r.id: y for r, y in records.read_labeled(args.gold)}
    preds = {}
    for rec in records.read_jsonl(args.predictions):
        preds[str(rec["review_id"])] = LabelSequence.from_text(rec["label_text"])
    result = evaluate_predictions(preds, gold)
    print(result.format())
    if args.out:
        Path(args.out).write_text(result.format() + "\n", encoding="utf-8")
    return 0


def cmd_rank_dist(args) -> int:
    gen = _load_model(args.model)
    scorer = _load_model(args.scorer)
    gold = {r.id: y for r, y in records.read_labeled(args.gold)}
    reviews = [r for r, _ in records.read_labeled(args.gold)]
    sets = _candidate_sets(gen, reviews, gold, args.k)
    best, preferred = rank_distribution(sets, scorer, args.score_mode, k=args.k)
    print("rank  best-candidate  scorer-preferred")
    for i in range(args.k):
        print(f"{i + 1:>4}  {best[i]:13.2f}%  {preferred[i]:15.2f}%")
    return 0


def cmd_serve(args) -> int:
    from .service import serve

    serve(args.store, port=args.port, host=args.host)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="quadscorer")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pseudo-label", help="label reviews and score them")
    p.add_argument("--model", required=True, help="initial generator (.npz)")
    p.add_argument("--scorer", help="scorer model; defaults to --model")
    p.add_argument("--reviews", required=True)
    p.add_argument("--out", required=True)
    _add_score_mode(p)
    p.set_defaults(func=cmd_pseudo_label)

    p = sub.add_parser("filter", help="apply the two-stage filter to scored samples")
    p.add_argument("--scored", required=True)
    p.add_argument("--reviews", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--gamma1", type=float, default=0.7)
    p.add_argument("--window-lo", type=float, default=0.10)
    p.add_argument("--window-hi", type=float, default=0.40)
    p.set_defaults(func=cmd_filter)

    p = sub.add_parser("self-train", help="run the full self-training round")
    p.add_argument("--labeled", required=True)
    p.add_argument("--unlabeled", required=True)
    p.add_argument("--scorer", required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--gamma1", type=float, default=0.7)
    p.add_argument("--window-lo", type=float, default=0.10)
    p.add_argument("--window-hi", type=float, default=0.40)
    p.add_argument("--sample-n", type=int, default=10000)
    p.add_argument("--epochs", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    _add_score_mode(p)
    p.set_defaults(func=cmd_self_train)

    p = sub.add_parser("audit", help="score gold labels and report quality stats")
    p.add_argument("--scorer", required=True)
    p.add_argument("--labeled", required=True)
    p.add_argument("--out", required=True)
    _add_score_mode(p)
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("rerank", help="pick the best beam candidate per review")
    p.add_argument("--model", required=True)
    p.add_argument("--scorer", required=True)
    p.add_argument("--reviews", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("-k", type=int, default=4)
    _add_score_mode(p)
    p.set_defaults(func=cmd_rerank)

    p = sub.add_parser("evaluate", help="micro P/R/F1 of predictions against gold")
    p.add_argument("--predictions", required=True)
    p.add_argument("--gold", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("rank-dist", help="rank distribution of best/preferred candidates")
    p.add_argument("--model", required=True)
    p.add_argument("--scorer", required=True)
    p.add_argument("--gold", required=True)
    p.add_argument("-k", type=int, default=4)
    _add_score_mode(p)
    p.set_defaults(func=cmd_rank_dist)

    p = sub.add_parser("serve", help="run the annotation service")
    p.add_argument("--store", required=True)
    p.add_argument("--port", type=int, default=8400)
    p.add_argument("--host", default="127.0.0.1")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
