"""Pseudo-label scoring, filtering and reranking for aspect sentiment
quad prediction.

The package trains a generative scorer on comparison data with ranking
objectives, then uses it to filter pseudo-labeled samples during
self-training, to rerank beam candidates at inference time, and to
audit label quality of existing datasets.
"""

from .ai_annotator import (AgreementReport, AiAnnotationConfig, AiJudgment,
                           agreement_metrics, annotate_batch, cohen_kappa)
from .comparison import (AnnotationTask, ComparisonDataset, DatasetStats,
                         ResolvedTask, Vote, adjudicate, build_annotation_tasks,
                         finalize_dataset, meeting_override, merge_votes)
from .losses import (ComparisonSample, LossConfig, combined_objective,
                     ranking_loss, ranking_loss_grad)
from .model import TinyConditionalGenerator
from .quads import (IMPLICIT, NO_SENTIMENT_TEXT, SENTIMENTS, LabelSequence,
                    Quad, Review, parse_label_sequence, serialize_quads,
                    validate_quad)
from .rerank import (CandidateSet, EvalResult, oracle_rerank, quad_f1,
                     rank_distribution, rerank, sentence_f1)
from .scoring import (DEFAULT_SCORE_MODE, SCORE_MODES, Candidate,
                      GeneratorHandle, GeneratorUnavailableError, ScoredSample,
                      TokenProbs, generate_candidates, match_score,
                      score_sample, token_probabilities)
from .selftrain import (AuditReport, FilterConfig, StageReport, audit_labels,
                        confidence_filter, pseudo_label, run_self_training,
                        scorer_filter_window)
from .store import EventStore, VoteRejected
from .training import TrainConfig, TrainResult, selection_accuracy, train_generator, train_scorer

__all__ = [
    "AgreementReport", "AiAnnotationConfig", "AiJudgment", "AnnotationTask",
    "AuditReport", "Candidate", "CandidateSet", "ComparisonDataset",
    "ComparisonSample", "DatasetStats", "DEFAULT_SCORE_MODE", "EvalResult",
    "EventStore", "FilterConfig", "GeneratorHandle", "GeneratorUnavailableError",
    "IMPLICIT", "LabelSequence", "LossConfig", "NO_SENTIMENT_TEXT", "Quad",
    "ResolvedTask", "Review", "SCORE_MODES", "SENTIMENTS", "ScoredSample",
    "StageReport", "TinyConditionalGenerator", "TokenProbs", "TrainConfig",
    "TrainResult", "Vote", "VoteRejected", "adjudicate", "agreement_metrics",
    "annotate_batch", "audit_labels", "build_annotation_tasks", "cohen_kappa",
    "combined_objective", "confidence_filter", "finalize_dataset",
    "generate_candidates", "match_score", "meeting_override", "merge_votes",
    "oracle_rerank", "parse_label_sequence", "pseudo_label", "quad_f1",
    "rank_distribution", "ranking_loss", "ranking_loss_grad", "rerank",
    "run_self_training", "score_sample", "scorer_filter_window",
    "selection_accuracy", "sentence_f1", "serialize_quads", "token_probabilities",
    "train_generator", "train_scorer", "validate_quad",
]
