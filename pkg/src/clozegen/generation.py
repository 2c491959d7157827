"""Candidate generation: masking, decode orders, pseudo-beam search, ranking.

The generator replaces an answer span with a run of mask tokens, decodes
the run with a masked LM under a chosen order, and ranks the resulting
strings by a length-normalized probability score. Search is deliberately
narrow: the first decoded position branches into ``k * m_s`` hypotheses,
every later position extends each hypothesis with its single most
probable fill, conditioning on everything already committed.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from .backends import MaskedLanguageModel
from .errors import ContractViolation, SpanError

L2R = "l2r"
R2L = "r2l"
CTL = "ctl"
STRATEGIES = (L2R, R2L, CTL)

GEOMETRIC = "geometric"
HARMONIC = "harmonic"
AVERAGES = (GEOMETRIC, HARMONIC)


@dataclass(frozen=True)
class GenerationConfig:
    """Knobs for one generation request.

    ``n_mask`` = 0 means "use the answer's token count". ``m_s`` = None
    resolves at run time to 10 for single-mask requests and 7 otherwise.
    """

    n_mask: int = 0
    dispersion: int = 1
    k: int = 3
    m_s: int | None = None
    strategy: str = CTL
    avg: str = GEOMETRIC
    seed: int = 0

    def __post_init__(self):
        if self.n_mask < 0:
            raise ContractViolation("n_mask must be >= 0")
        if self.dispersion < 0:
            raise ContractViolation("dispersion must be >= 0")
        if self.k < 1:
            raise ContractViolation("k must be >= 1")
        if self.m_s is not None and self.m_s < 1:
            raise ContractViolation("m_s must be >= 1")
        object.__setattr__(self, "strategy", canonical_strategy(self.strategy))
        object.__setattr__(self, "avg", canonical_average(self.avg))


def canonical_strategy(name: str) -> str:
    lowered = str(name).lower()
    if lowered not in STRATEGIES:
        raise ContractViolation(f"unknown strategy {name!r}; expected one of {STRATEGIES}")
    return lowered


def canonical_average(name: str) -> str:
    lowered = str(name).lower()
    if lowered not in AVERAGES:
        raise ContractViolation(f"unknown average {name!r}; expected one of {AVERAGES}")
    return lowered


@dataclass(frozen=True)
class MaskedContext:
    """A token sequence whose answer span was replaced by mask tokens."""

    tokens: list[str]
    mask_positions: list[int]
    answer_text: str
    original_tokens: list[str] = field(default_factory=list)

    def __post_init__(self):
        if not self.mask_positions:
            raise ContractViolation("mask_positions must be nonempty")
        run = self.mask_positions
        if any(b - a != 1 for a, b in zip(run, run[1:])):
            raise ContractViolation("mask_positions must be contiguous ascending")
        if run[0] < 0 or run[-1] >= len(self.tokens):
            raise ContractViolation("mask_positions outside token sequence")
        if len({self.tokens[p] for p in run}) != 1:
            raise ContractViolation("all mask positions must hold the same mask token")


@dataclass(frozen=True)
class Candidate:
    """One generated fill for a masked answer span.

    ``token_strings`` follow positional (textual) order while
    ``step_probabilities`` follow decode order; ``product_score`` is the
    product of the step probabilities and ``rank_score`` its
    length-normalized average used for cross-length ranking.
    """

    token_strings: list[str]
    text: str
    step_probabilities: list[float]
    product_score: float
    rank_score: float
    source_mask_count: int


def normalize_text(text: str) -> str:
    """Case-folded, whitespace-collapsed form used for dedup and matching."""
    return " ".join(text.lower().split())


def resolve_mask_count(config: GenerationConfig, answer_token_count: int) -> int:
    """Number of mask tokens to use: the answer's own token count when
    ``n_mask`` is 0, otherwise the explicit override."""
    if answer_token_count < 1:
        raise ContractViolation("answer_token_count must be >= 1")
    return answer_token_count if config.n_mask == 0 else config.n_mask


def mask_count_interval(n_mask: int, dispersion: int) -> tuple[int, int]:
    """Inclusive interval of mask counts widened by the dispersion knob,
    clamped below at 1."""
    if n_mask < 1:
        raise ContractViolation("n_mask must be >= 1")
    return max(n_mask - dispersion, 1), n_mask + dispersion


def sample_mask_counts(
    interval: tuple[int, int], rng: np.random.Generator | int
) -> list[int]:
    """Draw up to three distinct mask counts uniformly from the interval.

    Returns min(3, interval size) values without replacement, ascending.
    Deterministic for a fixed seed or generator state.
    """
    low, high = interval
    if low > high:
        raise ContractViolation(f"empty interval ({low}, {high})")
    if low < 1:
        raise ContractViolation("mask counts must be >= 1")
    if isinstance(rng, (int, np.integer)):
        rng = np.random.default_rng(int(rng))
    size = min(3, high - low + 1)
    drawn = rng.choice(np.arange(low, high + 1), size=size, replace=False)
    return sorted(int(v) for v in drawn)


def build_masked_context(
    context_tokens: list[str],
    answer_span: tuple[int, int],
    mask_count: int,
    mask_token: str,
    answer_text: str | None = None,
) -> MaskedContext:
    """Replace the answer token span with ``mask_count`` mask tokens.

    The span is half-open ``[start, end)``; the mask count may differ from
    the span length (that is how dispersion produces variable-length
    candidates). All tokens outside the span are preserved in order.
    """
    start, end = answer_span
    if not (0 <= start < end <= len(context_tokens)):
        raise SpanError(
            f"span ({start}, {end}) invalid for {len(context_tokens)} tokens"
        )
    if mask_count < 1:
        raise ContractViolation("mask_count must be >= 1")
    tokens = list(context_tokens[:start]) + [mask_token] * mask_count + list(
        context_tokens[end:]
    )
    if answer_text is None:
        answer_text = " ".join(context_tokens[start:end])
    return MaskedContext(
        tokens=tokens,
        mask_positions=list(range(start, start + mask_count)),
        answer_text=answer_text,
        original_tokens=list(context_tokens),
    )


def window_context(context: MaskedContext, max_length: int) -> MaskedContext:
    """Trim an over-long context to a symmetric token window around the
    mask run, so wider surroundings are kept on both sides when possible."""
    if len(context.tokens) <= max_length:
        return context
    first, last = context.mask_positions[0], context.mask_positions[-1]
    run_length = last - first + 1
    if run_length > max_length:
        raise SpanError(
            f"mask run of {run_length} tokens cannot fit in window of {max_length}"
        )
    budget = max_length - run_length
    left_avail = first
    right_avail = len(context.tokens) - last - 1
    left = min(budget // 2, left_avail)
    right = min(budget - left, right_avail)
    left = min(budget - right, left_avail)
    start = first - left
    stop = last + 1 + right
    return MaskedContext(
        tokens=context.tokens[start:stop],
        mask_positions=[p - start for p in context.mask_positions],
        answer_text=context.answer_text,
        original_tokens=context.original_tokens,
    )


def decode_order(strategy: str, mask_count: int) -> list[int]:
    """Order in which mask slots are decoded, as indices into the run.

    l2r counts up, r2l counts down, and ctl alternates between the two
    ends moving inward (0, m-1, 1, m-2, ...).
    """
    if mask_count < 1:
        raise ContractViolation("mask_count must be >= 1")
    strategy = canonical_strategy(strategy)
    if strategy == L2R:
        return list(range(mask_count))
    if strategy == R2L:
        return list(range(mask_count - 1, -1, -1))
    order = []
    lo, hi = 0, mask_count - 1
    while lo <= hi:
        order.append(lo)
        if lo != hi:
            order.append(hi)
        lo += 1
        hi -= 1
    return order


def generate_candidates(
    backend: MaskedLanguageModel,
    masked_context: MaskedContext,
    order: list[int],
    branch_width: int,
) -> list[Candidate]:
    """Branch-then-greedy decoding of one masked context.

    The first position in decode order expands into its ``branch_width``
    most probable fills; each subsequent position extends every hypothesis
    with that hypothesis's single top prediction, querying the backend on
    the partially filled tokens so later steps condition on earlier
    commitments. Returns at most ``branch_width`` candidates, in
    first-step probability order.
    """
    positions = masked_context.mask_positions
    if sorted(order) != list(range(len(positions))):
        raise ContractViolation(
            f"order {order!r} is not a permutation of 0..{len(positions) - 1}"
        )
    if branch_width < 1:
        raise ContractViolation("branch_width must be >= 1")

    first_pos = positions[order[0]]
    first_preds = backend.fill_mask(masked_context.tokens, first_pos, branch_width)
    if not first_preds:
        warnings.warn(
            "backend returned no predictions for the first mask position; "
            "no candidates generated",
            RuntimeWarning,
            stacklevel=2,
        )
        return []

    hypotheses = []
    for pred in first_preds:
        tokens = list(masked_context.tokens)
        tokens[first_pos] = pred.token
        hypotheses.append((tokens, {order[0]: pred.token}, [pred.probability]))

    for slot in order[1:]:
        position = positions[slot]
        survivors = []
        for tokens, fills, probs in hypotheses:
            preds = backend.fill_mask(tokens, position, 1)
            if not preds:
                warnings.warn(
                    f"backend returned no predictions at position {position}; "
                    "dropping hypothesis",
                    RuntimeWarning,
                    stacklevel=2,
                )
                continue
            top = preds[0]
            tokens[position] = top.token
            fills[slot] = top.token
            probs.append(top.probability)
            survivors.append((tokens, fills, probs))
        hypotheses = survivors
        if not hypotheses:
            return []

    candidates = []
    for _, fills, probs in hypotheses:
        token_strings = [fills[i] for i in range(len(positions))]
        candidates.append(
            Candidate(
                token_strings=token_strings,
                text=backend.detokenize(token_strings),
                step_probabilities=list(probs),
                product_score=score_candidate(probs),
                rank_score=rank_score(probs, GEOMETRIC),
                source_mask_count=len(positions),
            )
        )
    return candidates


def score_candidate(step_probabilities: list[float]) -> float:
    """Product of the per-step probabilities."""
    _check_probabilities(step_probabilities, allow_zero=False)
    return math.prod(step_probabilities)


def rank_score(step_probabilities: list[float], avg: str = GEOMETRIC) -> float:
    """Length-normalized score comparable across candidate lengths.

    Geometric: r-th root of the probability product. Harmonic:
    r / sum(1/p). Constant inputs return that constant exactly (both
    means degenerate to it, so no rounding is introduced).
    """
    avg = canonical_average(avg)
    _check_probabilities(step_probabilities, allow_zero=True)
    if any(p == 0.0 for p in step_probabilities):
        warnings.warn(
            "zero step probability; rank score forced to 0",
            RuntimeWarning,
            stacklevel=2,
        )
        return 0.0
    first = step_probabilities[0]
    if all(p == first for p in step_probabilities):
        return first
    r = len(step_probabilities)
    if avg == GEOMETRIC:
        return math.exp(math.fsum(map(math.log, step_probabilities)) / r)
    return r / math.fsum(1.0 / p for p in step_probabilities)


def _check_probabilities(values: list[float], allow_zero: bool) -> None:
    if not values:
        raise ContractViolation("step probabilities must be nonempty")
    for v in values:
        if not 0.0 <= v <= 1.0 or (v == 0.0 and not allow_zero):
            bound = "[0, 1]" if allow_zero else "(0, 1]"
            raise ContractViolation(f"step probability {v} outside {bound}")


def rank_candidates(candidates: list[Candidate], avg: str = GEOMETRIC) -> list[Candidate]:
    """Merge candidates from all contexts into one ranked, deduplicated list.

    Each candidate is rescored from its own step probabilities with the
    requested average, sorted descending, with ties resolved toward the
    shorter mask count and then lexicographic text. Duplicate texts
    (case/whitespace-insensitive) collapse onto the best-ranked copy.
    """
    avg = canonical_average(avg)
    rescored = [
        replace(c, rank_score=rank_score(c.step_probabilities, avg)) for c in candidates
    ]
    rescored.sort(key=lambda c: (-c.rank_score, c.source_mask_count, c.text))
    seen = set()
    unique = []
    for candidate in rescored:
        key = normalize_text(candidate.text)
        if key in seen:
            continue
        seen.add(key)
        unique.append(candidate)
    return unique


def drop_answer_matches(candidates: list[Candidate], answer_text: str) -> list[Candidate]:
    """Remove candidates that reproduce the answer verbatim (normalized)."""
    answer_key = normalize_text(answer_text)
    return [c for c in candidates if normalize_text(c.text) != answer_key]
