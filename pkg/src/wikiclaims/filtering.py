"""Two-stage claim validation: model self-judgment filter, then NLI agreement."""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Optional, Sequence

import httpx

from .records import (
    ClaimClass,
    ClaimRecord,
    FilterDecision,
    NliLabel,
    NliVerdict,
    Status,
)

# Category codes from the self-judgment mapped to target classes:
# C1 supported, C0 contradicted, C2 unverifiable.
CATEGORY_FOR_CLASS = {
    ClaimClass.SUPPORTS: "C1",
    ClaimClass.REFUTES: "C0",
    ClaimClass.NOT_INFO: "C2",
}

# Strictly-greater bar: scores 4 and 5 pass.
MIN_SCORE_EXCLUSIVE = 3


def llm_filter(record: ClaimRecord) -> FilterDecision:
    """Keep iff the self-judged category matches the target class and both
    quality and self-contained scores are above 3. Mutates status on keep."""
    if record.status != Status.GENERATED:
        raise ValueError(f"llm_filter requires a Generated record, got {record.status}")
    judgment = record.judgment
    if judgment.category != CATEGORY_FOR_CLASS[record.target_class]:
        return _reject(record, "llm_filter", "category mismatch")
    if judgment.overall_quality <= MIN_SCORE_EXCLUSIVE:
        return _reject(record, "llm_filter", "quality <= 3")
    if judgment.self_contained <= MIN_SCORE_EXCLUSIVE:
        return _reject(record, "llm_filter", "self-contained <= 3")
    record.status = Status.PASSED_LLM_FILTER
    return FilterDecision(keep=True, stage="llm_filter")


def map_nli_label(label: NliLabel) -> ClaimClass:
    """Entailment supports, contradiction refutes, neutral is not-info."""
    return {
        NliLabel.ENTAILMENT: ClaimClass.SUPPORTS,
        NliLabel.CONTRADICTION: ClaimClass.REFUTES,
        NliLabel.NEUTRAL: ClaimClass.NOT_INFO,
    }[label]


def nli_filter(record: ClaimRecord, verdict: NliVerdict) -> FilterDecision:
    """Keep iff the NLI label maps to the target class; verdict is stored either way."""
    if record.status != Status.PASSED_LLM_FILTER:
        raise ValueError(f"nli_filter requires PassedLlmFilter, got {record.status}")
    record.nli_verdict = verdict
    if map_nli_label(verdict.label) != record.target_class:
        return _reject(record, "nli_filter", "nli mismatch")
    record.status = Status.PASSED_NLI_FILTER
    return FilterDecision(keep=True, stage="nli_filter")


def _reject(record: ClaimRecord, stage: str, reason: str) -> FilterDecision:
    record.status = Status.REJECTED
    record.rejected_reason = reason
    record.rejected_stage = stage
    return FilterDecision(keep=False, stage=stage, reason=reason)


@dataclass
class NliConfig:
    base_url: str
    batch_size: int = 32
    timeout_ms: int = 60_000
    max_retries: int = 3
    backoff_seconds: float = 0.5


class NliProtocolError(Exception):
    """The NLI service returned a response that violates the wire protocol."""


class NliUnavailableError(Exception):
    """Retries exhausted; the run should checkpoint and resume later."""


class NliClient:
    """Client for the POST /v1/nli + GET /v1/health protocol."""

    def __init__(self, config: NliConfig, transport: Optional[httpx.BaseTransport] = None):
        self.config = config
        self._client = httpx.Client(
            base_url=config.base_url.rstrip("/"),
            timeout=config.timeout_ms / 1000,
            transport=transport,
        )

    def close(self) -> None:
        self._client.close()

    def __enter__(self) -> "NliClient":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    def health(self) -> dict:
        response = self._post_with_retry("/v1/health", None, method="GET")
        return response.json()

    def classify(self, premise: str, hypothesis: str) -> NliVerdict:
        return self.classify_batch([(premise, hypothesis)])[0]

    def classify_batch(self, pairs: Sequence[tuple[str, str]]) -> list[NliVerdict]:
        """Classify pairs, chunking to the configured batch size."""
        if any(not p or not h for p, h in pairs):
            raise ValueError("premise and hypothesis must be non-empty")
        verdicts: list[NliVerdict] = []
        size = self.config.batch_size
        for start in range(0, len(pairs), size):
            chunk = pairs[start : start + size]
            payload = {"pairs": [[p, h] for p, h in chunk]}
            response = self._post_with_retry("/v1/nli", payload)
            verdicts.extend(self._parse_results(response, expected=len(chunk)))
        return verdicts

    def _post_with_retry(self, path: str, payload: Optional[dict], method: str = "POST"):
        retries = 0
        last_error = "no attempts made"
        while retries <= self.config.max_retries:
            try:
                if method == "GET":
                    response = self._client.get(path)
                else:
                    response = self._client.post(path, json=payload)
            except httpx.HTTPError as exc:
                last_error = f"transport error: {exc}"
            else:
                if response.status_code == 200:
                    return response
                if response.status_code < 500:
                    raise NliProtocolError(
                        f"NLI service returned HTTP {response.status_code}: {response.text[:200]}"
                    )
                last_error = f"HTTP {response.status_code}"
            if retries == self.config.max_retries:
                break
            time.sleep(self.config.backoff_seconds * (2**retries))
            retries += 1
        raise NliUnavailableError(f"NLI service unavailable after {retries} retries ({last_error})")

    @staticmethod
    def _parse_results(response: httpx.Response, expected: int) -> list[NliVerdict]:
        try:
            results = response.json()["results"]
        except (KeyError, ValueError) as exc:
            raise NliProtocolError(f"malformed NLI response: {exc}") from exc
        if len(results) != expected:
            raise NliProtocolError(f"expected {expected} results, got {len(results)}")
        verdicts = []
        for item in results:
            try:
                probs = {NliLabel(k): float(v) for k, v in item["probs"].items()}
                verdict = NliVerdict.from_probs(probs)
            except (KeyError, ValueError) as exc:
                raise NliProtocolError(f"invalid NLI result {item!r}: {exc}") from exc
            if "label" in item and verdict.label.value != item["label"]:
                raise NliProtocolError(
                    f"label {item.get('label')!r} is not the argmax of {item['probs']!r}"
                )
            verdicts.append(verdict)
        return verdicts
