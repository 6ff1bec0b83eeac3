"""Classification backends: a transformer model and a lexical stand-in."""

from __future__ import annotations

import re
from typing import Protocol, Sequence

LABELS = ("entailment", "neutral", "contradiction")

DEFAULT_MODEL_ID = "MoritzLaurer/mDeBERTa-v3-base-xnli-multilingual-nli-2mil7"
DEFAULT_MAX_SEQUENCE_LENGTH = 512


class Backend(Protocol):
    model_id: str

    def classify(self, pairs: Sequence[tuple[str, str]]) -> list[dict]: ...


class LexicalBackend:
    """Deterministic heuristic backend for development and tests.

    A hypothesis introducing a negation cue absent from the premise reads as
    contradiction; high token overlap reads as entailment; anything else is
    neutral. No model weights required.
    """

    NEGATION_CUES = {"not", "no", "never", "nicht", "kein", "keine", "nunca", "jamás"}
    ENTAILMENT_OVERLAP = 0.6

    def __init__(self, model_id: str = "lexical-overlap-stub"):
        self.model_id = model_id

    def classify(self, pairs: Sequence[tuple[str, str]]) -> list[dict]:
        return [self._one(premise, hypothesis) for premise, hypothesis in pairs]

    def _one(self, premise: str, hypothesis: str) -> dict:
        prem = set(re.findall(r"\w+", premise.lower(), re.UNICODE))
        hyp = set(re.findall(r"\w+", hypothesis.lower(), re.UNICODE))
        if (hyp & self.NEGATION_CUES) - prem:
            probs = {"entailment": 0.1, "neutral": 0.2, "contradiction": 0.7}
        elif hyp and len(hyp & prem) / len(hyp) >= self.ENTAILMENT_OVERLAP:
            probs = {"entailment": 0.7, "neutral": 0.2, "contradiction": 0.1}
        else:
            probs = {"entailment": 0.2, "neutral": 0.6, "contradiction": 0.2}
        return {"label": max(probs, key=probs.get), "probs": probs}


class TransformersBackend:
    """Cross-encoder NLI model loaded once; premise truncated before the
    hypothesis when the pair exceeds the sequence budget."""

    def __init__(
        self,
        model_id: str = DEFAULT_MODEL_ID,
        max_sequence_length: int = DEFAULT_MAX_SEQUENCE_LENGTH,
        device: str | None = None,
    ):
        import torch
        from transformers import AutoModelForSequenceClassification, AutoTokenizer

        self.model_id = model_id
        self.max_sequence_length = max_sequence_length
        self._torch = torch
        self._device = device or ("cuda" if torch.cuda.is_available() else "cpu")
        self._tokenizer = AutoTokenizer.from_pretrained(model_id)
        self._model = AutoModelForSequenceClassification.from_pretrained(model_id)
        self._model.to(self._device)
        self._model.eval()
        id2label = {i: lab.lower() for i, lab in self._model.config.id2label.items()}
        self._order = [next(i for i, lab in id2label.items() if lab == name) for name in LABELS]

    def classify(self, pairs: Sequence[tuple[str, str]]) -> list[dict]:
        torch = self._torch
        premises = [p for p, _ in pairs]
        hypotheses = [h for _, h in pairs]
        encoded = self._tokenizer(
            premises,
            hypotheses,
            padding=True,
            truncation="only_first",
            max_length=self.max_sequence_length,
            return_tensors="pt",
        ).to(self._device)
        with torch.inference_mode():
            logits = self._model(**encoded).logits
        probs = torch.softmax(logits, dim=-1).cpu()
        results = []
        for row in probs:
            by_label = {name: float(row[idx]) for name, idx in zip(LABELS, self._order)}
            results.append({"label": max(by_label, key=by_label.get), "probs": by_label})
        return results


def load_backend(kind: str, model_id: str | None = None) -> Backend:
    if kind == "lexical":
        return LexicalBackend(**({"model_id": model_id} if model_id else {}))
    if kind == "transformers":
        return TransformersBackend(**({"model_id": model_id} if model_id else {}))
    raise ValueError(f"unknown backend {kind!r} (expected 'lexical' or 'transformers')")
