"""Adapters exposing HuggingFace checkpoints behind the backend contracts.

These are deliberately thin: tokenization, special-token bookkeeping and
label mapping only. Everything algorithmic lives upstream of the
contracts, so none of it needs model weights to be exercised. Imports of
torch/transformers happen lazily so the rest of the package works in
environments without them (install the ``hf`` extra to use these).
"""

from __future__ import annotations

from typing import Sequence

from .backends import (
    CONTRADICTION,
    ENTAILMENT,
    NEUTRAL,
    BackendInfo,
    MaskedLanguageModel,
    NliClassifier,
    TokenPrediction,
    sort_predictions,
)
from .errors import BackendError, ContractViolation


def _import_torch_and_transformers():
    try:
        import torch
        import transformers
    except ImportError as exc:
        raise BackendError(
            "torch and transformers are required for HuggingFace adapters; "
            "install the 'hf' extra"
        ) from exc
    return torch, transformers


class HuggingFaceMaskedLM(MaskedLanguageModel):
    """Fill-mask inference over any AutoModelForMaskedLM checkpoint."""

    def __init__(
        self,
        model_id: str,
        device: str | None = None,
        cache_dir: str | None = None,
        max_length: int | None = None,
    ):
        torch, transformers = _import_torch_and_transformers()
        self._torch = torch
        try:
            self._tokenizer = transformers.AutoTokenizer.from_pretrained(
                model_id, cache_dir=cache_dir
            )
            self._model = transformers.AutoModelForMaskedLM.from_pretrained(
                model_id, cache_dir=cache_dir
            )
        except Exception as exc:
            raise BackendError(f"failed to load masked LM {model_id!r}: {exc}") from exc
        if self._tokenizer.mask_token is None:
            raise BackendError(f"{model_id!r} has no mask token; not an MLM checkpoint")
        self._device = device or ("cuda" if torch.cuda.is_available() else "cpu")
        self._model.to(self._device)
        self._model.eval()
        declared = max_length or int(self._tokenizer.model_max_length)
        specials = self._tokenizer.num_special_tokens_to_add()
        self._info = BackendInfo(
            name=model_id,
            max_sequence_length=max(1, min(declared, 100_000) - specials),
            mask_token=self._tokenizer.mask_token,
        )

    def info(self) -> BackendInfo:
        return self._info

    def tokenize(self, text: str) -> list[str]:
        if not text:
            raise ContractViolation("text must be nonempty")
        try:
            return self._tokenizer.tokenize(text)
        except Exception as exc:
            raise BackendError(f"tokenization failed: {exc}") from exc

    def detokenize(self, tokens: Sequence[str]) -> str:
        return self._tokenizer.convert_tokens_to_string(list(tokens)).strip()

    def tokenize_with_offsets(self, text: str) -> list[tuple[str, int, int]] | None:
        if not getattr(self._tokenizer, "is_fast", False):
            return None
        encoding = self._tokenizer(
            text, add_special_tokens=False, return_offsets_mapping=True
        )
        tokens = self._tokenizer.convert_ids_to_tokens(encoding["input_ids"])
        return [
            (tok, start, end)
            for tok, (start, end) in zip(tokens, encoding["offset_mapping"])
        ]

    def fill_mask(
        self, tokens: Sequence[str], mask_position: int, top_k: int
    ) -> list[TokenPrediction]:
        self._check_fill_args(tokens, mask_position, top_k)
        ids = self._tokenizer.convert_tokens_to_ids(list(tokens))
        with_specials = self._tokenizer.build_inputs_with_special_tokens(ids)
        prefix = _prefix_length(with_specials, ids)
        position = mask_position + prefix
        torch = self._torch
        try:
            with torch.no_grad():
                batch = torch.tensor([with_specials], device=self._device)
                logits = self._model(input_ids=batch).logits[0, position]
                probabilities = torch.softmax(logits, dim=-1)
                k = min(top_k, probabilities.shape[-1])
                top = torch.topk(probabilities, k)
        except Exception as exc:
            raise BackendError(f"fill-mask inference failed: {exc}") from exc
        predictions = [
            TokenPrediction(
                self._tokenizer.convert_ids_to_tokens(int(idx)), float(prob)
            )
            for prob, idx in zip(top.values, top.indices)
        ]
        return sort_predictions(predictions)


def _prefix_length(with_specials: list[int], ids: list[int]) -> int:
    """Index where the original ids start inside the special-token frame."""
    if not ids:
        return 0
    span = len(ids)
    for offset in range(len(with_specials) - span + 1):
        if with_specials[offset : offset + span] == ids:
            return offset
    raise BackendError("could not locate sequence inside special-token frame")


class HuggingFaceNli(NliClassifier):
    """Three-way (or two-way) sequence classification over sentence pairs.

    Checkpoint labels are normalized onto entailment/neutral/contradiction
    by substring matching, so two-way entailment models work as well.
    """

    def __init__(
        self,
        model_id: str,
        device: str | None = None,
        cache_dir: str | None = None,
    ):
        torch, transformers = _import_torch_and_transformers()
        self._torch = torch
        try:
            self._tokenizer = transformers.AutoTokenizer.from_pretrained(
                model_id, cache_dir=cache_dir
            )
            self._model = (
                transformers.AutoModelForSequenceClassification.from_pretrained(
                    model_id, cache_dir=cache_dir
                )
            )
        except Exception as exc:
            raise BackendError(f"failed to load NLI model {model_id!r}: {exc}") from exc
        self._device = device or ("cuda" if torch.cuda.is_available() else "cpu")
        self._model.to(self._device)
        self._model.eval()
        self._labels = {
            int(i): _normalize_label(str(label))
            for i, label in self._model.config.id2label.items()
        }

    def classify_nli(self, premise: str, hypothesis: str) -> str:
        self._check_pair(premise, hypothesis)
        torch = self._torch
        try:
            with torch.no_grad():
                encoded = self._tokenizer(
                    premise,
                    hypothesis,
                    return_tensors="pt",
                    truncation=True,
                ).to(self._device)
                logits = self._model(**encoded).logits[0]
                index = int(torch.argmax(logits).item())
        except Exception as exc:
            raise BackendError(f"NLI inference failed: {exc}") from exc
        return self._labels[index]


def _normalize_label(label: str) -> str:
    lowered = label.lower()
    if "entail" in lowered:
        return ENTAILMENT
    if "contra" in lowered:
        return CONTRADICTION
    if "neutral" in lowered or lowered.startswith("neut"):
        return NEUTRAL
    raise BackendError(f"cannot map checkpoint label {label!r} onto an NLI verdict")
