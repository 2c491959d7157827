"""Inference backend contracts plus deterministic mock implementations.

Two model roles are abstracted here: a masked language model that fills
mask tokens inside a token sequence, and a natural language inference
classifier that labels (premise, hypothesis) pairs. Everything downstream
talks to these contracts only, so the full algorithmic surface runs
against the table-driven mocks below without any model weights.

Mock lookups are keyed by a *context fingerprint*: the token sequence
joined with single spaces. A mock is a pure function of its configuration,
so identical inputs give identical outputs across processes, and instances
are safe for concurrent read-only use.
"""

from __future__ import annotations

import hashlib
import json
from abc import ABC, abstractmethod
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple, Sequence

from .errors import ContractViolation, ParseError, SequenceLengthError

ENTAILMENT = "entailment"
NEUTRAL = "neutral"
CONTRADICTION = "contradiction"
NLI_LABELS = frozenset({ENTAILMENT, NEUTRAL, CONTRADICTION})

DEFAULT_MASK_TOKEN = "[MASK]"


class TokenPrediction(NamedTuple):
    """One vocabulary unit with the probability assigned at a mask slot."""

    token: str
    probability: float


@dataclass(frozen=True)
class BackendInfo:
    """Static facts about a masked-LM backend."""

    name: str
    max_sequence_length: int
    mask_token: str

    def __post_init__(self):
        if self.max_sequence_length <= 0:
            raise ContractViolation("max_sequence_length must be positive")
        if not self.mask_token:
            raise ContractViolation("mask_token must be nonempty")


def fingerprint(tokens: Sequence[str]) -> str:
    """Canonical lookup key for a token sequence: tokens joined by spaces."""
    return " ".join(tokens)


def sort_predictions(predictions: Sequence[TokenPrediction]) -> list[TokenPrediction]:
    """Probability-descending order, ties broken by lexicographic token."""
    return sorted(predictions, key=lambda p: (-p.probability, p.token))


class MaskedLanguageModel(ABC):
    """Contract for fill-mask inference over a tokenized context."""

    @abstractmethod
    def info(self) -> BackendInfo:
        """Static backend facts (name, max length, mask token)."""

    @abstractmethod
    def tokenize(self, text: str) -> list[str]:
        """Split text into backend tokens; detokenize round-trips up to whitespace."""

    @abstractmethod
    def detokenize(self, tokens: Sequence[str]) -> str:
        """Join backend tokens back into a plain string."""

    @abstractmethod
    def fill_mask(
        self, tokens: Sequence[str], mask_position: int, top_k: int
    ) -> list[TokenPrediction]:
        """Predict fills for the mask token at ``mask_position``.

        Returns at most ``top_k`` predictions, probability-descending with
        lexicographic tie-breaks. Probabilities are vocabulary-softmax
        slices and need not sum to 1.
        """

    def tokenize_with_offsets(self, text: str) -> list[tuple[str, int, int]] | None:
        """Tokens with character spans, or None when offsets are unavailable."""
        return None

    def _check_fill_args(self, tokens: Sequence[str], mask_position: int, top_k: int) -> None:
        info = self.info()
        if top_k < 1:
            raise ContractViolation("top_k must be >= 1")
        if len(tokens) > info.max_sequence_length:
            raise SequenceLengthError(
                f"sequence of {len(tokens)} tokens exceeds backend maximum "
                f"{info.max_sequence_length}"
            )
        if not 0 <= mask_position < len(tokens):
            raise ContractViolation(
                f"mask_position {mask_position} outside sequence of {len(tokens)} tokens"
            )
        if tokens[mask_position] != info.mask_token:
            raise ContractViolation(
                f"token at position {mask_position} is {tokens[mask_position]!r}, "
                f"not the mask token {info.mask_token!r}"
            )


class NliClassifier(ABC):
    """Contract for three-way entailment classification.

    Implementations must be deterministic for identical inputs. Two-way
    checkpoints that only distinguish entailment from contradiction are
    admitted; their outputs simply never include the neutral label.
    """

    @abstractmethod
    def classify_nli(self, premise: str, hypothesis: str) -> str:
        """Argmax label for the pair: entailment, neutral or contradiction."""

    @staticmethod
    def _check_pair(premise: str, hypothesis: str) -> None:
        if not premise or not hypothesis:
            raise ContractViolation("premise and hypothesis must be nonempty")


def _check_text(text: str) -> None:
    if not text:
        raise ContractViolation("text must be nonempty")


class MockMaskedLM(MaskedLanguageModel):
    """Table-driven masked LM with whitespace tokenization.

    Predictions are looked up by ``(fingerprint(tokens), mask_position)``.
    Misses fall back to the configured vocabulary, either uniformly
    weighted (default) or with stable pseudo-random weights derived from a
    salted SHA-256 of (fingerprint, position, token). The seeded mode
    makes randomized search tests non-degenerate while staying a pure
    function of the configuration.
    """

    def __init__(
        self,
        mask_token: str = DEFAULT_MASK_TOKEN,
        vocabulary: Sequence[str] = (),
        table: dict[tuple[str, int], Sequence[TokenPrediction]] | None = None,
        fallback: str = "uniform",
        salt: int = 0,
        max_sequence_length: int = 512,
        name: str = "mock-mlm",
    ):
        if fallback not in ("uniform", "seeded"):
            raise ContractViolation(f"unknown fallback mode {fallback!r}")
        self._info = BackendInfo(name, max_sequence_length, mask_token)
        self.vocabulary = list(vocabulary)
        self.fallback = fallback
        self.salt = salt
        self.table: dict[tuple[str, int], list[TokenPrediction]] = {}
        for key, preds in (table or {}).items():
            self.table[key] = sort_predictions(
                [TokenPrediction(str(t), float(p)) for t, p in preds]
            )
        for preds in self.table.values():
            for pred in preds:
                if not 0.0 <= pred.probability <= 1.0:
                    raise ContractViolation(
                        f"mock probability {pred.probability} outside [0, 1]"
                    )

    @classmethod
    def from_json_file(cls, path: str | Path) -> "MockMaskedLM":
        """Build from a mock-configuration JSON document (see README)."""
        doc = _load_mock_document(path)
        table = {}
        for entry in doc.get("predictions", []):
            try:
                key = (str(entry["fingerprint"]), int(entry["position"]))
                table[key] = [(t, p) for t, p in entry["top"]]
            except (KeyError, TypeError, ValueError) as exc:
                raise ParseError(f"{path}: malformed predictions entry: {entry!r}") from exc
        return cls(
            mask_token=doc.get("mask_token", DEFAULT_MASK_TOKEN),
            vocabulary=doc.get("vocabulary", []),
            table=table,
            fallback=doc.get("fallback", "uniform"),
            salt=int(doc.get("salt", 0)),
            max_sequence_length=int(doc.get("max_sequence_length", 512)),
            name=doc.get("name", "mock-mlm"),
        )

    def info(self) -> BackendInfo:
        return self._info

    def tokenize(self, text: str) -> list[str]:
        _check_text(text)
        return text.split()

    def detokenize(self, tokens: Sequence[str]) -> str:
        return " ".join(tokens)

    def tokenize_with_offsets(self, text: str) -> list[tuple[str, int, int]]:
        _check_text(text)
        out = []
        pos = 0
        for token in text.split():
            start = text.index(token, pos)
            out.append((token, start, start + len(token)))
            pos = start + len(token)
        return out

    def fill_mask(
        self, tokens: Sequence[str], mask_position: int, top_k: int
    ) -> list[TokenPrediction]:
        self._check_fill_args(tokens, mask_position, top_k)
        key = (fingerprint(tokens), mask_position)
        preds = self.table.get(key)
        if preds is None:
            preds = self._fallback_predictions(key)
        return list(preds[:top_k])

    def _fallback_predictions(self, key: tuple[str, int]) -> list[TokenPrediction]:
        if not self.vocabulary:
            return []
        if self.fallback == "uniform":
            p = 1.0 / len(self.vocabulary)
            return sort_predictions(TokenPrediction(t, p) for t in self.vocabulary)
        weights = {t: self._hash_weight(key, t) for t in self.vocabulary}
        total = sum(weights.values())
        return sort_predictions(
            TokenPrediction(t, w / total) for t, w in weights.items()
        )

    def _hash_weight(self, key: tuple[str, int], token: str) -> int:
        digest = hashlib.sha256(
            f"{self.salt}|{key[0]}|{key[1]}|{token}".encode("utf-8")
        ).digest()
        return 1 + int.from_bytes(digest[:8], "big")


class MockNliClassifier(NliClassifier):
    """Table lookup over (premise, hypothesis) pairs with a default label."""

    def __init__(
        self,
        table: dict[tuple[str, str], str] | None = None,
        default: str = NEUTRAL,
        name: str = "mock-nli",
    ):
        if default not in NLI_LABELS:
            raise ContractViolation(f"unknown NLI label {default!r}")
        self.name = name
        self.default = default
        self.table = {}
        for pair, label in (table or {}).items():
            if label not in NLI_LABELS:
                raise ContractViolation(f"unknown NLI label {label!r}")
            self.table[pair] = label

    @classmethod
    def from_json_file(cls, path: str | Path) -> "MockNliClassifier":
        doc = _load_mock_document(path)
        table = {}
        for entry in doc.get("nli", []):
            try:
                premise, hypothesis, label = entry
            except (TypeError, ValueError) as exc:
                raise ParseError(f"{path}: malformed nli entry: {entry!r}") from exc
            table[(str(premise), str(hypothesis))] = str(label)
        return cls(
            table=table,
            default=doc.get("nli_default", NEUTRAL),
            name=doc.get("name", "mock-nli"),
        )

    def classify_nli(self, premise: str, hypothesis: str) -> str:
        self._check_pair(premise, hypothesis)
        return self.table.get((premise, hypothesis), self.default)


def _load_mock_document(path: str | Path) -> dict:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ParseError(f"{path}: mock configuration must be a JSON object")
    return doc


def load_mock_backends(path: str | Path) -> tuple[MockMaskedLM, MockNliClassifier]:
    """Load both mock backends from one shared configuration document."""
    return MockMaskedLM.from_json_file(path), MockNliClassifier.from_json_file(path)
