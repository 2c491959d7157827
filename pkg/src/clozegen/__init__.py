"""Distractor generation for extractive multiple-choice cloze questions.

A two-stage pipeline: a masked language model proposes candidate fills for
the blanked answer span (with variable-length masking and configurable
decode orders), then an entailment classifier eliminates candidates that
agree with the answer or with each other. Dataset loaders and ranking
metrics round out an offline evaluation harness; deterministic mock
backends make the whole surface testable without model weights.
"""

from .backends import (
    CONTRADICTION,
    ENTAILMENT,
    NEUTRAL,
    BackendInfo,
    MaskedLanguageModel,
    MockMaskedLM,
    MockNliClassifier,
    NliClassifier,
    TokenPrediction,
    load_mock_backends,
)
from .data import (
    ClozePassage,
    ClozeQuestion,
    ContextAnswerPair,
    PreparedContext,
    extract_sentence,
    fill_target,
    load_cloth,
    load_pairs,
    prepare_context,
)
from .errors import (
    BackendError,
    ClozegenError,
    ConfigError,
    ContractViolation,
    ParseError,
    ResolveError,
    SequenceLengthError,
    SpanError,
)
from .generation import (
    Candidate,
    GenerationConfig,
    MaskedContext,
    build_masked_context,
    decode_order,
    generate_candidates,
    mask_count_interval,
    rank_candidates,
    rank_score,
    resolve_mask_count,
    sample_mask_counts,
    score_candidate,
)
from .metrics import EvalItemResult, EvalReport, compute_item, evaluate_dataset
from .pipeline import (
    GenerationResult,
    RenderedCloze,
    generate_distractors,
    render_cloze,
    result_to_dict,
    result_to_json,
)
from .selection import (
    DistractorSet,
    TraceEntry,
    filter_pairwise,
    filter_vs_answer,
    select_distractors,
    two_way_entails,
)

__version__ = "0.1.0"

__all__ = [
    "BackendError",
    "BackendInfo",
    "Candidate",
    "ClozePassage",
    "ClozeQuestion",
    "ClozegenError",
    "ConfigError",
    "ContextAnswerPair",
    "ContractViolation",
    "CONTRADICTION",
    "DistractorSet",
    "ENTAILMENT",
    "EvalItemResult",
    "EvalReport",
    "GenerationConfig",
    "GenerationResult",
    "MaskedContext",
    "MaskedLanguageModel",
    "MockMaskedLM",
    "MockNliClassifier",
    "NEUTRAL",
    "NliClassifier",
    "ParseError",
    "PreparedContext",
    "RenderedCloze",
    "ResolveError",
    "SequenceLengthError",
    "SpanError",
    "TokenPrediction",
    "TraceEntry",
    "build_masked_context",
    "compute_item",
    "decode_order",
    "evaluate_dataset",
    "extract_sentence",
    "fill_target",
    "filter_pairwise",
    "filter_vs_answer",
    "generate_candidates",
    "generate_distractors",
    "load_cloth",
    "load_mock_backends",
    "load_pairs",
    "mask_count_interval",
    "prepare_context",
    "rank_candidates",
    "rank_score",
    "render_cloze",
    "resolve_mask_count",
    "result_to_dict",
    "result_to_json",
    "sample_mask_counts",
    "score_candidate",
    "select_distractors",
    "two_way_entails",
]
