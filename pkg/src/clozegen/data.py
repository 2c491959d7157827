"""Dataset ingestion and context preparation.

Handles cloze passages in the public CLOTH JSON layout (an ``article``
string with ``_`` blanks plus parallel ``options``/``answers`` arrays),
JSON-lines (context, answer span) pairs, per-question context preparation
with passage/sentence input modes and model/gold blank prefilling, and a
rule-based sentence extractor used both for sentence-mode inputs and for
the sentence-level entailment comparisons.
"""

from __future__ import annotations

import json
import re
import warnings
from dataclasses import dataclass
from pathlib import Path

from .backends import MaskedLanguageModel
from .errors import ConfigError, ContractViolation, ParseError, ResolveError, SpanError

BLANK_RE = re.compile(r"_+")
ANSWER_LETTERS = "ABCD"

INPUT_PASSAGE = "passage"
INPUT_SENTENCE = "sentence"
INPUT_MODES = (INPUT_PASSAGE, INPUT_SENTENCE)

PREFILL_MODEL = "model"
PREFILL_GOLD = "gold"
PREFILL_NONE = "none"
PREFILL_MODES = (PREFILL_MODEL, PREFILL_GOLD, PREFILL_NONE)

# Trailing words whose period does not end a sentence.
_ABBREVIATIONS = {
    "mr", "mrs", "ms", "dr", "prof", "sr", "jr", "st", "mt", "no", "vol",
    "vs", "etc", "e.g", "i.e", "cf", "al", "inc", "ltd", "co", "fig", "approx",
    "u.s", "u.k", "a.m", "p.m",
}


@dataclass(frozen=True)
class ClozeQuestion:
    """Gold answer plus the three human-authored distractors."""

    answer: str
    distractors: list[str]


@dataclass(frozen=True)
class ClozePassage:
    """One passage whose blanks each correspond to a question, in order."""

    id: str
    text_with_blanks: str
    questions: list[ClozeQuestion]

    def blank_spans(self) -> list[tuple[int, int]]:
        return [m.span() for m in BLANK_RE.finditer(self.text_with_blanks)]

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "text_with_blanks": self.text_with_blanks,
            "questions": [
                {"answer": q.answer, "distractors": list(q.distractors)}
                for q in self.questions
            ],
        }


@dataclass(frozen=True)
class ContextAnswerPair:
    """A context with a character-level answer span, ready for generation."""

    id: str
    context: str
    answer_span: tuple[int, int]

    def __post_init__(self):
        start, end = self.answer_span
        if not (0 <= start < end <= len(self.context)):
            raise SpanError(f"span ({start}, {end}) outside context of pair {self.id!r}")

    @property
    def answer_text(self) -> str:
        return self.context[self.answer_span[0] : self.answer_span[1]]


@dataclass(frozen=True)
class PreparedContext:
    """A passage reduced to a single unresolved blank (the target question).

    ``answer_span`` covers the remaining blank marker; substitute the gold
    answer with :func:`fill_target` to obtain generation input.
    """

    context: str
    answer_span: tuple[int, int]
    input_mode: str
    prefill_mode: str


def load_cloth(path: str | Path) -> list[ClozePassage]:
    """Load CLOTH-format passages from one JSON file or a directory of them.

    Each file holds one passage: an article with one ``_`` blank per
    question, an options array of four strings per question, and an
    answers array of letters. The answer letter is resolved to its option
    text; the other three options become the gold distractors.
    """
    root = Path(path)
    if root.is_dir():
        files = sorted(root.glob("*.json"))
        if not files:
            raise ParseError(f"{root}: no .json files found")
    else:
        files = [root]
    return [_parse_cloth_file(f) for f in files]


def _parse_cloth_file(path: Path) -> ClozePassage:
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"{path.name}: unreadable or invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ParseError(f"{path.name}: expected a JSON object")

    article = doc.get("article")
    options = doc.get("options")
    answers = doc.get("answers")
    if not isinstance(article, str) or not article:
        raise ParseError(f"{path.name}: field 'article' must be a nonempty string")
    if not isinstance(options, list):
        raise ParseError(f"{path.name}: field 'options' must be a list")
    if not isinstance(answers, list):
        raise ParseError(f"{path.name}: field 'answers' must be a list")
    if len(options) != len(answers):
        raise ParseError(
            f"{path.name}: 'options' has {len(options)} entries but 'answers' "
            f"has {len(answers)}"
        )
    blanks = len(BLANK_RE.findall(article))
    if blanks != len(answers):
        raise ParseError(
            f"{path.name}: 'article' has {blanks} blanks but 'answers' has "
            f"{len(answers)} entries"
        )

    questions = []
    for i, (opts, letter) in enumerate(zip(options, answers)):
        if not isinstance(opts, list) or len(opts) != 4:
            raise ParseError(f"{path.name}: options[{i}] must have exactly 4 entries")
        if letter not in ANSWER_LETTERS:
            raise ParseError(f"{path.name}: answers[{i}] is {letter!r}, not A-D")
        idx = ANSWER_LETTERS.index(letter)
        questions.append(
            ClozeQuestion(
                answer=str(opts[idx]),
                distractors=[str(o) for j, o in enumerate(opts) if j != idx],
            )
        )
    return ClozePassage(id=path.stem, text_with_blanks=article, questions=questions)


def load_pairs(path: str | Path) -> list[ContextAnswerPair]:
    """Load JSON-lines (id, context, answer span) records.

    Each line carries either explicit ``answer_start``/``answer_end``
    character offsets or an ``answer_text`` whose first occurrence in the
    context resolves the span (a repeated occurrence emits a warning).
    """
    pairs = []
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"line {lineno}: invalid JSON: {exc}") from exc
            if not isinstance(record, dict):
                raise ParseError(f"line {lineno}: expected a JSON object")
            context = record.get("context")
            if not isinstance(context, str) or not context:
                raise ParseError(f"line {lineno}: field 'context' must be a nonempty string")
            pair_id = str(record.get("id", f"pair-{lineno}"))
            if "answer_start" in record or "answer_end" in record:
                try:
                    span = (int(record["answer_start"]), int(record["answer_end"]))
                except (KeyError, TypeError, ValueError) as exc:
                    raise ParseError(
                        f"line {lineno}: fields 'answer_start'/'answer_end' must both "
                        "be integers"
                    ) from exc
            elif "answer_text" in record:
                answer_text = str(record["answer_text"])
                if not answer_text:
                    raise ParseError(f"line {lineno}: field 'answer_text' is empty")
                start = context.find(answer_text)
                if start < 0:
                    raise ResolveError(
                        f"line {lineno}: answer_text {answer_text!r} not found in context"
                    )
                if context.find(answer_text, start + 1) >= 0:
                    warnings.warn(
                        f"line {lineno}: answer_text occurs more than once; "
                        "using the first occurrence",
                        stacklevel=2,
                    )
                span = (start, start + len(answer_text))
            else:
                raise ParseError(
                    f"line {lineno}: need 'answer_start'/'answer_end' or 'answer_text'"
                )
            pairs.append(ContextAnswerPair(id=pair_id, context=context, answer_span=span))
    return pairs


def extract_sentence(text: str, span: tuple[int, int]) -> tuple[str, tuple[int, int]]:
    """Return the sentence containing ``span`` and the span re-based into it.

    Sentences are bounded by ., ! or ? followed by whitespace (or the text
    edges); periods after known abbreviations do not split. A span that
    straddles a boundary returns the union of the touched sentences and
    emits a warning.
    """
    start, end = span
    if not (0 <= start <= end <= len(text)):
        raise SpanError(f"span ({start}, {end}) outside text of length {len(text)}")
    segments = _sentence_segments(text)
    query_end = max(end, start + 1)  # treat an empty span as a position
    touched = [
        (s, e) for s, e in segments if s < query_end and e > start
    ]
    if not touched:
        return text, span
    if len(touched) > 1:
        warnings.warn(
            "span straddles a sentence boundary; returning the sentence union",
            stacklevel=2,
        )
    union_start = touched[0][0]
    union_end = touched[-1][1]
    return text[union_start:union_end], (start - union_start, end - union_start)


def _sentence_segments(text: str) -> list[tuple[int, int]]:
    """Half-open character spans of sentences, leading whitespace trimmed."""
    breaks = []
    for match in re.finditer(r"[.!?]+", text):
        stop = match.end()
        if stop < len(text) and not text[stop].isspace():
            continue
        if match.group() == "." and _ends_with_abbreviation(text, match.start()):
            continue
        breaks.append(stop)
    if not breaks or breaks[-1] < len(text):
        breaks.append(len(text))
    segments = []
    cursor = 0
    for stop in breaks:
        chunk = text[cursor:stop]
        lead = len(chunk) - len(chunk.lstrip())
        if cursor + lead < stop:
            segments.append((cursor + lead, stop))
        cursor = stop
    return segments


def _ends_with_abbreviation(text: str, period_index: int) -> bool:
    match = re.search(r"[\w.]+$", text[:period_index])
    if match is None:
        return False
    word = match.group().rstrip(".").lower()
    if word in _ABBREVIATIONS:
        return True
    # single-letter initials such as "J." in "J. Smith"
    return len(word) == 1 and word.isalpha() and text[: period_index].rstrip()[-1:].isupper()


def prepare_context(
    passage: ClozePassage,
    question_index: int,
    input_mode: str = INPUT_PASSAGE,
    prefill_mode: str = PREFILL_GOLD,
    mlm_backend: MaskedLanguageModel | None = None,
) -> PreparedContext:
    """Resolve every blank except the target question's.

    Non-target blanks are spliced with gold answers or with the backend's
    top-1 fill committed left to right; text outside blank spans is never
    touched. Sentence mode then narrows the result to the sentence holding
    the target blank.
    """
    if input_mode not in INPUT_MODES:
        raise ContractViolation(f"unknown input_mode {input_mode!r}")
    if prefill_mode not in PREFILL_MODES:
        raise ContractViolation(f"unknown prefill_mode {prefill_mode!r}")
    blanks = passage.blank_spans()
    if not 0 <= question_index < len(blanks):
        raise ContractViolation(
            f"question_index {question_index} outside 0..{len(blanks) - 1}"
        )
    if prefill_mode == PREFILL_MODEL and mlm_backend is None:
        raise ConfigError("prefill_mode 'model' requires an MLM backend")

    text = passage.text_with_blanks
    target_span = blanks[question_index]
    if prefill_mode != PREFILL_NONE:
        shift = 0
        for i, (bstart, bend) in enumerate(blanks):
            bstart += shift
            bend += shift
            if i == question_index:
                target_span = (bstart, bend)
                continue
            if prefill_mode == PREFILL_GOLD:
                filling = passage.questions[i].answer
            else:
                filling = _model_fill(mlm_backend, text, (bstart, bend))
            text = text[:bstart] + filling + text[bend:]
            shift += len(filling) - (bend - bstart)
    if input_mode == INPUT_SENTENCE:
        text, target_span = extract_sentence(text, target_span)
    return PreparedContext(
        context=text,
        answer_span=target_span,
        input_mode=input_mode,
        prefill_mode=prefill_mode,
    )


def _model_fill(backend: MaskedLanguageModel, text: str, blank: tuple[int, int]) -> str:
    """Top-1 fill for one blank, queried with the blank as a mask token."""
    from .generation import MaskedContext, window_context

    info = backend.info()
    bstart, bend = blank
    query = text[:bstart] + info.mask_token + text[bend:]
    tokens = backend.tokenize(query)
    try:
        position = tokens.index(info.mask_token)
    except ValueError as exc:
        raise ContractViolation(
            "mask token did not survive tokenization of the prefill query"
        ) from exc
    masked = window_context(
        MaskedContext(tokens=tokens, mask_positions=[position], answer_text=""),
        info.max_sequence_length,
    )
    predictions = backend.fill_mask(masked.tokens, masked.mask_positions[0], 1)
    if not predictions:
        raise ContractViolation("backend returned no predictions for prefill")
    return backend.detokenize([predictions[0].token])


def fill_target(prepared: PreparedContext, answer_text: str) -> tuple[str, tuple[int, int]]:
    """Substitute the gold answer into the remaining blank.

    Returns the generation-ready context and the answer's character span.
    """
    if not answer_text:
        raise ContractViolation("answer_text must be nonempty")
    start, end = prepared.answer_span
    context = prepared.context[:start] + answer_text + prepared.context[end:]
    return context, (start, start + len(answer_text))
