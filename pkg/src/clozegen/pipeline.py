"""End-to-end orchestration for one (context, answer span) request.

Resolves the mask-count interval, decodes candidates for every sampled
count, merges and ranks them, then hands the ranked list to the
entailment-based selector. Entailment comparisons always run on the
sentence containing the answer, extracted from the original context.
"""

from __future__ import annotations

import json
import random
import time
from dataclasses import dataclass, field

import numpy as np

from .backends import MaskedLanguageModel, NliClassifier
from .data import extract_sentence
from .errors import ContractViolation, SpanError
from .generation import (
    Candidate,
    GenerationConfig,
    build_masked_context,
    decode_order,
    drop_answer_matches,
    generate_candidates,
    mask_count_interval,
    rank_candidates,
    resolve_mask_count,
    sample_mask_counts,
    window_context,
)
from .selection import DistractorSet, select_distractors

BLANK_MARKER = "_____"
OPTION_LETTERS = "ABCDEFGHIJ"


@dataclass
class GenerationResult:
    distractor_set: DistractorSet
    all_candidates: list[Candidate]
    config_echo: GenerationConfig
    timing: dict[str, float] = field(default_factory=dict)


@dataclass(frozen=True)
class RenderedCloze:
    """A presentable item: stem with a blank, shuffled options, answer key."""

    stem: str
    options: list[str]
    answer_index: int
    underfilled: bool

    @property
    def answer_letter(self) -> str:
        return OPTION_LETTERS[self.answer_index]


def resolve_search_multiplier(config: GenerationConfig, resolved_mask_count: int) -> int:
    """Explicit ``m_s`` when set, else 10 for single-mask runs and 7 otherwise."""
    if config.m_s is not None:
        return config.m_s
    return 10 if resolved_mask_count == 1 else 7


def map_char_span(
    backend: MaskedLanguageModel, context: str, answer_span: tuple[int, int]
) -> tuple[list[str], tuple[int, int]]:
    """Map a character span onto backend tokens.

    Prefers the backend's token offsets when the span lands exactly on
    token boundaries; otherwise re-tokenizes with the span isolated so the
    answer occupies whole tokens.
    """
    start, end = answer_span
    offsets = backend.tokenize_with_offsets(context)
    if offsets is not None:
        token_start = token_end = None
        for i, (_, tok_start, tok_end) in enumerate(offsets):
            if tok_start == start:
                token_start = i
            if tok_end == end:
                token_end = i + 1
        if token_start is not None and token_end is not None and token_start < token_end:
            return [tok for tok, _, _ in offsets], (token_start, token_end)

    before = backend.tokenize(context[:start]) if context[:start].strip() else []
    answer = backend.tokenize(context[start:end])
    after = backend.tokenize(context[end:]) if context[end:].strip() else []
    tokens = before + answer + after
    return tokens, (len(before), len(before) + len(answer))


def generate_distractors(
    context: str,
    answer_span: tuple[int, int],
    config: GenerationConfig,
    mlm_backend: MaskedLanguageModel,
    nli_backend: NliClassifier,
) -> GenerationResult:
    """Run generation and selection for one answer span in a context."""
    start, end = answer_span
    if not (0 <= start < end <= len(context)) or not context[start:end].strip():
        raise SpanError(f"answer span ({start}, {end}) invalid for the given context")
    answer_text = context[start:end]
    timing: dict[str, float] = {}

    t0 = time.perf_counter()
    tokens, token_span = map_char_span(mlm_backend, context, answer_span)
    answer_token_count = token_span[1] - token_span[0]
    resolved = resolve_mask_count(config, answer_token_count)
    branch_width = config.k * resolve_search_multiplier(config, resolved)
    rng = np.random.default_rng(config.seed)
    counts = sample_mask_counts(mask_count_interval(resolved, config.dispersion), rng)

    info = mlm_backend.info()
    candidates: list[Candidate] = []
    for count in counts:
        masked = build_masked_context(
            tokens, token_span, count, info.mask_token, answer_text=answer_text
        )
        masked = window_context(masked, info.max_sequence_length)
        order = decode_order(config.strategy, count)
        candidates.extend(generate_candidates(mlm_backend, masked, order, branch_width))
    ranked = drop_answer_matches(rank_candidates(candidates, config.avg), answer_text)
    timing["csg_ms"] = (time.perf_counter() - t0) * 1000.0

    t1 = time.perf_counter()
    sentence, sentence_span = extract_sentence(context, answer_span)
    distractor_set = select_distractors(
        nli_backend, sentence, answer_text, ranked, config.k, answer_span=sentence_span
    )
    timing["ds_ms"] = (time.perf_counter() - t1) * 1000.0
    timing["total_ms"] = timing["csg_ms"] + timing["ds_ms"]

    return GenerationResult(
        distractor_set=distractor_set,
        all_candidates=ranked,
        config_echo=config,
        timing=timing,
    )


def render_cloze(
    context: str,
    answer_span: tuple[int, int],
    distractor_set: DistractorSet,
    shuffle_seed: int = 0,
) -> RenderedCloze:
    """Turn a generation result into a stem plus shuffled options."""
    if not distractor_set.distractors:
        raise ContractViolation("cannot render a cloze item without distractors")
    start, end = answer_span
    if not (0 <= start < end <= len(context)):
        raise SpanError(f"answer span ({start}, {end}) outside context")
    stem = context[:start] + BLANK_MARKER + context[end:]
    options = [distractor_set.answer] + list(distractor_set.distractors)
    random.Random(shuffle_seed).shuffle(options)
    return RenderedCloze(
        stem=stem,
        options=options,
        answer_index=options.index(distractor_set.answer),
        underfilled=distractor_set.underfilled or len(options) < 4,
    )


def result_to_dict(result: GenerationResult) -> dict:
    """Wire format for a result; timing is excluded so output is reproducible."""
    config = result.config_echo
    return {
        "distractors": list(result.distractor_set.distractors),
        "candidates": [
            {
                "text": c.text,
                "rank_score": c.rank_score,
                "score_T": c.product_score,
                "probs": list(c.step_probabilities),
                "mask_count": c.source_mask_count,
            }
            for c in result.all_candidates
        ],
        "trace": [
            {
                "candidate": entry.candidate,
                "stage": entry.stage,
                "counterpart": entry.counterpart,
                "verdicts": list(entry.verdicts),
            }
            for entry in result.distractor_set.trace
        ],
        "config": {
            "n_mask": config.n_mask,
            "dispersion": config.dispersion,
            "k": config.k,
            "m_s": config.m_s,
            "strategy": config.strategy,
            "avg": config.avg,
            "seed": config.seed,
        },
    }


def result_to_json(result: GenerationResult) -> str:
    return json.dumps(result_to_dict(result), ensure_ascii=False, separators=(",", ":"))
