"""Distractor selection: two-stage entailment elimination over candidates.

Stage one removes candidates whose substituted sentence mutually entails
the answer sentence (such candidates are alternative correct answers).
Stage two walks the survivors in rank order and drops any candidate that
mutually entails an already kept one, so near-duplicates cannot coexist;
the lower-ranked member of a pair is always the one removed. A pair
counts as entailing only when the classifier says entailment in *both*
argument orders; neutral or contradictory verdicts retain the candidate.

Every removal is recorded in an elimination trace so a final set can be
audited after the fact.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

from .backends import ENTAILMENT, NliClassifier
from .errors import SpanError
from .generation import Candidate, normalize_text

STAGE_ANSWER = "answer-entailment"
STAGE_PAIRWISE = "pairwise-entailment"
STAGES = (STAGE_ANSWER, STAGE_PAIRWISE)


@dataclass(frozen=True)
class TraceEntry:
    """Why one candidate was eliminated.

    ``verdicts`` holds the classifier labels for (removed -> counterpart,
    counterpart -> removed); removal requires both to be entailment.
    """

    candidate: str
    stage: str
    counterpart: str
    verdicts: tuple[str, str]


@dataclass
class DistractorSet:
    """Final distractors in rank order plus the full elimination trace."""

    distractors: list[str]
    answer: str
    trace: list[TraceEntry] = field(default_factory=list)
    underfilled: bool = False


def two_way_entails(nli_backend: NliClassifier, text_a: str, text_b: str) -> bool:
    """True only when both (a, b) and (b, a) classify as entailment."""
    if nli_backend.classify_nli(text_a, text_b) != ENTAILMENT:
        return False
    return nli_backend.classify_nli(text_b, text_a) == ENTAILMENT


def filter_vs_answer(
    nli_backend: NliClassifier,
    comparison_text_with_answer: str,
    candidates: Sequence[Candidate],
    candidate_instantiator: Callable[[str], str],
    trace: list[TraceEntry] | None = None,
    answer_text: str | None = None,
) -> list[Candidate]:
    """Drop candidates whose substituted text mutually entails the answer text.

    ``candidate_instantiator`` maps a candidate string to the comparison
    text with that candidate substituted for the answer. Order is
    preserved; removals are appended to ``trace`` when given.
    """
    counterpart = answer_text if answer_text is not None else comparison_text_with_answer
    kept = []
    for candidate in candidates:
        substituted = candidate_instantiator(candidate.text)
        if two_way_entails(nli_backend, substituted, comparison_text_with_answer):
            if trace is not None:
                trace.append(
                    TraceEntry(
                        candidate=candidate.text,
                        stage=STAGE_ANSWER,
                        counterpart=counterpart,
                        verdicts=(ENTAILMENT, ENTAILMENT),
                    )
                )
            continue
        kept.append(candidate)
    return kept


def filter_pairwise(
    nli_backend: NliClassifier,
    comparison_text: str,
    candidates: Sequence[Candidate],
    k: int,
    candidate_instantiator: Callable[[str], str],
    trace: list[TraceEntry] | None = None,
) -> list[str]:
    """Greedy rank-order scan keeping candidates that entail no kept one.

    ``comparison_text`` is the sentence frame the instantiator substitutes
    into. Scanning stops as soon as ``k`` candidates are kept; later
    candidates are surplus and never checked.
    """
    del comparison_text  # frame is already baked into the instantiator
    kept: list[Candidate] = []
    for candidate in candidates:
        if len(kept) == k:
            break
        substituted = candidate_instantiator(candidate.text)
        removed = False
        for previous in kept:
            if two_way_entails(
                nli_backend, substituted, candidate_instantiator(previous.text)
            ):
                if trace is not None:
                    trace.append(
                        TraceEntry(
                            candidate=candidate.text,
                            stage=STAGE_PAIRWISE,
                            counterpart=previous.text,
                            verdicts=(ENTAILMENT, ENTAILMENT),
                        )
                    )
                removed = True
                break
        if not removed:
            kept.append(candidate)
    return [c.text for c in kept]


def select_distractors(
    nli_backend: NliClassifier,
    context: str,
    answer: str,
    candidates: Sequence[Candidate],
    k: int,
    answer_span: tuple[int, int] | None = None,
) -> DistractorSet:
    """Run both elimination stages and assemble the final distractor set.

    ``context`` is the comparison sentence containing the answer;
    ``answer_span`` locates the answer within it (first occurrence when
    omitted). Candidates must arrive ranked best-first and free of
    verbatim answer copies.
    """
    if not candidates:
        return DistractorSet([], answer, [], underfilled=True)
    if answer_span is None:
        start = context.find(answer)
        if start < 0:
            raise SpanError(f"answer {answer!r} not found in comparison text")
        answer_span = (start, start + len(answer))
    start, end = answer_span
    if not (0 <= start < end <= len(context)):
        raise SpanError(f"answer span ({start}, {end}) outside comparison text")

    def instantiate(candidate_text: str) -> str:
        return context[:start] + candidate_text + context[end:]

    trace: list[TraceEntry] = []
    survivors = filter_vs_answer(
        nli_backend, context, candidates, instantiate, trace, answer_text=answer
    )
    chosen = filter_pairwise(nli_backend, context, survivors, k, instantiate, trace)
    return DistractorSet(
        distractors=chosen,
        answer=answer,
        trace=trace,
        underfilled=len(chosen) < k,
    )


def verify_distractor_set(
    nli_backend: NliClassifier,
    context: str,
    result: DistractorSet,
    answer_span: tuple[int, int] | None = None,
) -> bool:
    """Post-hoc audit: no kept pair mutually entails and none equals the answer."""
    if answer_span is None:
        start = context.find(result.answer)
        if start < 0:
            raise SpanError(f"answer {result.answer!r} not found in comparison text")
        answer_span = (start, start + len(result.answer))
    start, end = answer_span
    answer_key = normalize_text(result.answer)
    if any(normalize_text(d) == answer_key for d in result.distractors):
        return False
    texts = [context[:start] + d + context[end:] for d in result.distractors]
    for i in range(len(texts)):
        for j in range(i + 1, len(texts)):
            if two_way_entails(nli_backend, texts[i], texts[j]):
                return False
    return True
